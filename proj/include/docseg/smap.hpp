#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "docseg/errors.hpp"
#include "docseg/gmm.hpp"
#include "docseg/label_map.hpp"
#include "docseg/two_color.hpp"

namespace docseg {

/// Parameters of the quadtree coarse-to-fine MAP pass.
struct SmapParams {
    int levels = 1;             // pyramid depth L; level 0 is block resolution
    double theta_init = 0.5;    // parent-agreement probability at level L-1
    double epsilon = 1e-3;      // stopping tolerance for the per-level theta EM
    int classes = 2;            // M
    bool estimate_theta = true; // re-estimate theta per level; false pins theta_init
    double theta_min = 0.01;
    double theta_max = 0.99;
    int max_em_iters = 50;
};

/// Pyramid depth used by the AC pipeline: floor(log2(min dimension)), >= 1.
inline int smap_levels(int rows, int cols) {
    int m = std::min(rows, cols);
    int l = 0;
    while (m > 1) {
        m >>= 1;
        ++l;
    }
    return std::max(1, l);
}

/// One grid per level; level 0 is block resolution, each coarser level halves
/// the dimensions (ceil). Cells without any foreground descendant are empty.
struct LabelPyramid {
    struct Level {
        int rows = 0;
        int cols = 0;
        std::vector<std::optional<int>> labels; // class index, row-major
    };
    std::vector<Level> levels; // index 0 .. L
    std::vector<double> thetas; // theta used per refined level, n = L-1 .. 0
};

namespace detail {

using CellLL = std::optional<std::array<double, 2>>;

struct LLGrid {
    int rows = 0, cols = 0;
    std::vector<CellLL> cells;
};

inline int argmax2(const std::array<double, 2>& ll) {
    return ll[1] > ll[0] ? 1 : 0;
}

} // namespace detail

/// Coarse-to-fine MAP labeling on aggregated log-likelihoods.
/// Level L takes the per-cell maximum-likelihood label; each finer level
/// maximizes l(k) + log tau(k | parent) with tau(k|j) = theta if k == j else
/// (1-theta)/(M-1). theta is re-estimated per level from the label/parent
/// agreement frequency until it moves less than epsilon, then damped by
/// (1 - 10 epsilon^2) to seed the next level.
inline LabelPyramid smap_label(int rows, int cols,
                               const std::vector<detail::CellLL>& likelihoods,
                               const SmapParams& p) {
    if (rows < 1 || cols < 1 || likelihoods.size() != static_cast<std::size_t>(rows) * cols)
        throw GeometryError("likelihood grid geometry mismatch");
    if (p.levels < 1) throw ConfigError("pyramid depth must be >= 1");
    if (!(p.theta_init > 0.0 && p.theta_init < 1.0))
        throw ConfigError("theta_init must lie in (0,1)");
    const int L = p.levels;
    const int M = p.classes;

    // bottom-up likelihood aggregation
    std::vector<detail::LLGrid> ll(L + 1);
    ll[0].rows = rows;
    ll[0].cols = cols;
    ll[0].cells = likelihoods;
    for (int n = 1; n <= L; ++n) {
        const auto& child = ll[n - 1];
        auto& g = ll[n];
        g.rows = (child.rows + 1) / 2;
        g.cols = (child.cols + 1) / 2;
        g.cells.assign(static_cast<std::size_t>(g.rows) * g.cols, std::nullopt);
        for (int r = 0; r < child.rows; ++r)
            for (int c = 0; c < child.cols; ++c) {
                const auto& cell = child.cells[static_cast<std::size_t>(r) * child.cols + c];
                if (!cell) continue;
                auto& parent = g.cells[static_cast<std::size_t>(r / 2) * g.cols + c / 2];
                if (!parent) parent = std::array<double, 2>{0.0, 0.0};
                (*parent)[0] += (*cell)[0];
                (*parent)[1] += (*cell)[1];
            }
    }

    LabelPyramid pyr;
    pyr.levels.resize(L + 1);
    for (int n = 0; n <= L; ++n) {
        pyr.levels[n].rows = ll[n].rows;
        pyr.levels[n].cols = ll[n].cols;
        pyr.levels[n].labels.assign(ll[n].cells.size(), std::nullopt);
    }

    // coarsest level: per-cell maximum likelihood
    for (std::size_t i = 0; i < ll[L].cells.size(); ++i)
        if (ll[L].cells[i]) pyr.levels[L].labels[i] = detail::argmax2(*ll[L].cells[i]);

    const auto compute_level = [&](int n, double theta) {
        const double log_agree = std::log(theta);
        const double log_disagree = std::log((1.0 - theta) / (M - 1));
        const auto& grid = ll[n];
        const auto& parent_labels = pyr.levels[n + 1];
        auto& labels = pyr.levels[n].labels;
        for (int r = 0; r < grid.rows; ++r)
            for (int c = 0; c < grid.cols; ++c) {
                const std::size_t i = static_cast<std::size_t>(r) * grid.cols + c;
                if (!grid.cells[i]) continue;
                const auto parent =
                    parent_labels.labels[static_cast<std::size_t>(r / 2) * parent_labels.cols + c / 2];
                std::array<double, 2> post = *grid.cells[i];
                for (int k = 0; k < 2; ++k)
                    post[k] += (parent && *parent == k) ? log_agree : log_disagree;
                labels[i] = detail::argmax2(post);
            }
    };

    const auto agreement = [&](int n) {
        const auto& labels = pyr.levels[n];
        const auto& parents = pyr.levels[n + 1];
        std::size_t total = 0, agree = 0;
        for (int r = 0; r < labels.rows; ++r)
            for (int c = 0; c < labels.cols; ++c) {
                const auto& lab = labels.labels[static_cast<std::size_t>(r) * labels.cols + c];
                if (!lab) continue;
                const auto& par =
                    parents.labels[static_cast<std::size_t>(r / 2) * parents.cols + c / 2];
                ++total;
                if (par && *lab == *par) ++agree;
            }
        return total == 0 ? 0.5 : static_cast<double>(agree) / total;
    };

    double theta = std::clamp(p.theta_init, p.theta_min, p.theta_max);
    for (int n = L - 1; n >= 0; --n) {
        if (p.estimate_theta) {
            for (int it = 0; it < p.max_em_iters; ++it) {
                compute_level(n, theta);
                const double next = std::clamp(agreement(n), p.theta_min, p.theta_max);
                const bool done = std::abs(next - theta) < p.epsilon;
                theta = next;
                if (done) break;
            }
        }
        compute_level(n, theta);
        pyr.thetas.push_back(theta);
        // damped seed for the next (finer) level
        theta = std::clamp(theta * (1.0 - 10.0 * p.epsilon * p.epsilon), p.theta_min, p.theta_max);
    }
    return pyr;
}

/// Refines per-block Text/Picture decisions for non-background blocks.
/// Background holes (empty optionals) are left untouched.
inline std::vector<std::optional<BlockLabel>> smap_refine(
    int rows, int cols, const std::vector<std::optional<FeatureVector>>& features,
    const GmmModel& text_model, const GmmModel& pic_model, const SmapParams& p) {
    std::vector<detail::CellLL> ll(features.size());
    for (std::size_t i = 0; i < features.size(); ++i)
        if (features[i]) {
            const auto [lt, lp] = class_loglikelihood(*features[i], text_model, pic_model);
            ll[i] = std::array<double, 2>{lt, lp};
        }
    const LabelPyramid pyr = smap_label(rows, cols, ll, p);
    std::vector<std::optional<BlockLabel>> out(features.size());
    for (std::size_t i = 0; i < out.size(); ++i)
        if (pyr.levels[0].labels[i])
            out[i] = *pyr.levels[0].labels[i] == 0 ? BlockLabel::Text : BlockLabel::Picture;
    return out;
}

} // namespace docseg
