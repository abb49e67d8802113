#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

#include "docseg/errors.hpp"
#include "docseg/two_color.hpp"

namespace docseg {

struct GmmOptions {
    int components = 2;
    double tol = 1e-6;     // EM stops when the log-likelihood gain drops below this
    int max_iters = 200;
    double reg = 1e-6;     // added to covariance diagonals before inversion
};

/// Bivariate Gaussian component; cov stores the symmetric 2x2 matrix as
/// (xx, xy, yy).
struct GmmComponent {
    double weight = 1.0;
    std::array<double, 2> mean{};
    std::array<double, 3> cov{1.0, 0.0, 1.0};

    double log_density(double x, double y) const {
        const double a = cov[0], b = cov[1], c = cov[2];
        const double det = a * c - b * b;
        const double dx = x - mean[0], dy = y - mean[1];
        const double quad = (c * dx * dx - 2.0 * b * dx * dy + a * dy * dy) / det;
        return -std::log(2.0 * M_PI) - 0.5 * std::log(det) - 0.5 * quad;
    }
};

/// Gaussian mixture over (D1, D2) features.
struct GmmModel {
    std::vector<GmmComponent> components;
    bool fallback = false;            // fewer components than requested
    std::vector<double> ll_trace;     // per-iteration total log-likelihood

    /// Log of the mixture density at v (log-sum-exp over components).
    double log_density(const FeatureVector& v) const {
        double best = -std::numeric_limits<double>::infinity();
        std::vector<double> terms;
        terms.reserve(components.size());
        for (const auto& comp : components) {
            const double t = std::log(comp.weight) + comp.log_density(v.d1, v.d2);
            terms.push_back(t);
            best = std::max(best, t);
        }
        if (!std::isfinite(best)) return best;
        double sum = 0;
        for (double t : terms) sum += std::exp(t - best);
        return best + std::log(sum);
    }
};

namespace detail {

inline GmmComponent moment_fit(const std::vector<FeatureVector>& xs, double reg) {
    GmmComponent g;
    const double n = static_cast<double>(xs.size());
    for (const auto& v : xs) {
        g.mean[0] += v.d1;
        g.mean[1] += v.d2;
    }
    g.mean[0] /= n;
    g.mean[1] /= n;
    double sxx = 0, sxy = 0, syy = 0;
    for (const auto& v : xs) {
        const double dx = v.d1 - g.mean[0], dy = v.d2 - g.mean[1];
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    g.cov = {sxx / n + reg, sxy / n, syy / n + reg};
    g.weight = 1.0;
    return g;
}

} // namespace detail

/// Fits a Gaussian mixture by EM. Falls back to a single full-covariance
/// Gaussian (flagged) when there are fewer samples, or fewer distinct
/// samples, than requested components.
inline GmmModel fit_gmm(const std::vector<FeatureVector>& samples, int n_components,
                        std::uint64_t seed, const GmmOptions& opt_in = {}) {
    if (samples.empty()) throw ConfigError("fit_gmm requires at least one sample");
    GmmOptions opt = opt_in;
    opt.components = n_components;

    std::vector<FeatureVector> distinct;
    for (const auto& v : samples) {
        bool seen = false;
        for (const auto& u : distinct)
            if (u.d1 == v.d1 && u.d2 == v.d2) {
                seen = true;
                break;
            }
        if (!seen) {
            distinct.push_back(v);
            if (static_cast<int>(distinct.size()) >= n_components) break;
        }
    }

    GmmModel model;
    const int n = static_cast<int>(samples.size());
    const int k = std::min<int>(n_components, static_cast<int>(distinct.size()));
    if (k < n_components) model.fallback = true;
    if (k <= 1) {
        model.components.push_back(detail::moment_fit(samples, opt.reg));
        double ll = 0;
        for (const auto& v : samples) ll += model.components[0].log_density(v.d1, v.d2);
        model.ll_trace.push_back(ll);
        return model;
    }

    // init: means on k distinct samples picked via a seeded shuffle,
    // shared covariance from the global scatter
    std::mt19937_64 rng(seed);
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    const GmmComponent global = detail::moment_fit(samples, opt.reg);
    model.components.assign(k, global);
    {
        int placed = 0;
        for (int idx : order) {
            const auto& v = samples[idx];
            bool dup = false;
            for (int j = 0; j < placed; ++j)
                if (model.components[j].mean[0] == v.d1 && model.components[j].mean[1] == v.d2) {
                    dup = true;
                    break;
                }
            if (dup) continue;
            model.components[placed].mean = {v.d1, v.d2};
            model.components[placed].weight = 1.0 / k;
            if (++placed == k) break;
        }
    }

    std::vector<double> log_terms(k);
    std::vector<std::vector<double>> resp(k, std::vector<double>(n));
    double prev_ll = -std::numeric_limits<double>::infinity();
    std::vector<GmmComponent> prev_components = model.components;

    for (int iter = 0; iter < opt.max_iters; ++iter) {
        // E step + log-likelihood
        double ll = 0;
        for (int i = 0; i < n; ++i) {
            double best = -std::numeric_limits<double>::infinity();
            for (int j = 0; j < k; ++j) {
                log_terms[j] = std::log(model.components[j].weight) +
                               model.components[j].log_density(samples[i].d1, samples[i].d2);
                best = std::max(best, log_terms[j]);
            }
            double denom = 0;
            for (int j = 0; j < k; ++j) denom += std::exp(log_terms[j] - best);
            const double log_denom = best + std::log(denom);
            ll += log_denom;
            for (int j = 0; j < k; ++j) resp[j][i] = std::exp(log_terms[j] - log_denom);
        }

        if (ll < prev_ll) { // numerical noise at the fixpoint: keep the better params
            model.components = prev_components;
            break;
        }
        model.ll_trace.push_back(ll);
        const double gain = ll - prev_ll;
        prev_ll = ll;
        prev_components = model.components;
        if (iter > 0 && gain < opt.tol) break;

        // M step
        for (int j = 0; j < k; ++j) {
            double nj = 0;
            for (int i = 0; i < n; ++i) nj += resp[j][i];
            if (nj < 1e-12) continue; // dead component keeps its parameters
            double mx = 0, my = 0;
            for (int i = 0; i < n; ++i) {
                mx += resp[j][i] * samples[i].d1;
                my += resp[j][i] * samples[i].d2;
            }
            mx /= nj;
            my /= nj;
            double sxx = 0, sxy = 0, syy = 0;
            for (int i = 0; i < n; ++i) {
                const double dx = samples[i].d1 - mx, dy = samples[i].d2 - my;
                sxx += resp[j][i] * dx * dx;
                sxy += resp[j][i] * dx * dy;
                syy += resp[j][i] * dy * dy;
            }
            model.components[j].weight = nj / n;
            model.components[j].mean = {mx, my};
            model.components[j].cov = {sxx / nj + opt.reg, sxy / nj, syy / nj + opt.reg};
        }
        // renormalize weights (dead components may leave the sum short)
        double wsum = 0;
        for (const auto& comp : model.components) wsum += comp.weight;
        for (auto& comp : model.components) comp.weight /= wsum;
    }
    return model;
}

/// Log-likelihood of a feature vector under the text and picture mixtures.
inline std::pair<double, double> class_loglikelihood(const FeatureVector& v,
                                                     const GmmModel& text_model,
                                                     const GmmModel& pic_model) {
    return {text_model.log_density(v), pic_model.log_density(v)};
}

} // namespace docseg
