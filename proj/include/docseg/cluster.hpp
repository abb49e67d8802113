#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <vector>

#include "docseg/label_map.hpp"
#include "docseg/two_color.hpp"

namespace docseg {

/// Two-cluster model over (D1, D2) features. Degenerate when the input had
/// fewer than two distinct vectors; then only cluster 0 is populated.
struct ClusterModel {
    std::array<FeatureVector, 2> centroids{};
    std::array<std::vector<int>, 2> member_ids{};
    bool degenerate = false;

    double mean_d1(int k) const { return centroids[k].d1; }
    double mean_d2(int k) const { return centroids[k].d2; }
};

/// Lloyd k-means (k = 2) under the gamma-weighted norm. Seeded k-means++
/// initialization; runs to an assignment fixpoint or 100 iterations.
inline ClusterModel kmeans_features(const std::vector<FeatureVector>& features,
                                    double gamma, std::uint64_t seed) {
    ClusterModel cm;
    const int n = static_cast<int>(features.size());

    bool all_same = true;
    for (int i = 1; i < n; ++i)
        if (features[i].d1 != features[0].d1 || features[i].d2 != features[0].d2) {
            all_same = false;
            break;
        }
    if (n < 2 || all_same) {
        cm.degenerate = true;
        if (n > 0) {
            cm.centroids[0] = features[0];
            for (int i = 0; i < n; ++i) cm.member_ids[0].push_back(i);
        }
        return cm;
    }

    // k-means++ seeding
    std::mt19937_64 rng(seed);
    std::array<FeatureVector, 2> mu{};
    mu[0] = features[std::uniform_int_distribution<int>(0, n - 1)(rng)];
    {
        std::vector<double> w(n);
        double total = 0;
        for (int i = 0; i < n; ++i) {
            const double d = weighted_distance(features[i], mu[0], gamma);
            w[i] = d * d;
            total += w[i];
        }
        if (total == 0) {
            mu[1] = mu[0]; // unreachable with distinct features, kept as guard
        } else {
            double target = std::uniform_real_distribution<double>(0.0, total)(rng);
            int pick = n - 1;
            for (int i = 0; i < n; ++i) {
                target -= w[i];
                if (target <= 0) {
                    pick = i;
                    break;
                }
            }
            mu[1] = features[pick];
        }
    }

    std::vector<std::uint8_t> assign(n, 0);
    for (int iter = 0; iter < 100; ++iter) {
        bool changed = iter == 0;
        for (int i = 0; i < n; ++i) {
            const double d0 = weighted_distance(features[i], mu[0], gamma);
            const double d1 = weighted_distance(features[i], mu[1], gamma);
            const std::uint8_t a = d0 <= d1 ? 0 : 1;
            if (a != assign[i]) {
                assign[i] = a;
                changed = true;
            }
        }
        if (!changed) break;

        std::array<double, 2> s1{}, s2{};
        std::array<int, 2> cnt{};
        for (int i = 0; i < n; ++i) {
            s1[assign[i]] += features[i].d1;
            s2[assign[i]] += features[i].d2;
            cnt[assign[i]]++;
        }
        for (int k = 0; k < 2; ++k)
            if (cnt[k] > 0) mu[k] = {s1[k] / cnt[k], s2[k] / cnt[k]};

        // empty cluster: restart it at the point farthest from its centroid
        for (int k = 0; k < 2; ++k) {
            if (cnt[k] > 0) continue;
            int far = 0;
            double best = -1;
            for (int i = 0; i < n; ++i) {
                const double d = weighted_distance(features[i], mu[1 - k], gamma);
                if (d > best) {
                    best = d;
                    far = i;
                }
            }
            mu[k] = features[far];
        }
    }

    cm.centroids = mu;
    for (int i = 0; i < n; ++i) cm.member_ids[assign[i]].push_back(i);
    if (cm.member_ids[0].empty() || cm.member_ids[1].empty()) cm.degenerate = true;
    return cm;
}

/// Maps the two clusters to Text/Picture. Text is the cluster that dominates
/// on (higher mean D1, lower mean D2); when neither dominates, the higher
/// mean_d1/(1+mean_d2) score wins, ties going to the higher mean D1.
inline std::array<BlockLabel, 2> assign_text_picture(const ClusterModel& cm) {
    if (cm.degenerate) {
        const BlockLabel l = cm.mean_d2(0) < 1.0 ? BlockLabel::Text : BlockLabel::Picture;
        return {l, l};
    }
    const double d1a = cm.mean_d1(0), d2a = cm.mean_d2(0);
    const double d1b = cm.mean_d1(1), d2b = cm.mean_d2(1);

    int text;
    if (d1a > d1b && d2a < d2b) {
        text = 0;
    } else if (d1b > d1a && d2b < d2a) {
        text = 1;
    } else {
        const double score_a = d1a / (1.0 + d2a);
        const double score_b = d1b / (1.0 + d2b);
        if (score_a != score_b) {
            text = score_a > score_b ? 0 : 1;
        } else {
            text = d1a >= d1b ? 0 : 1;
        }
    }
    std::array<BlockLabel, 2> out{};
    out[text] = BlockLabel::Text;
    out[1 - text] = BlockLabel::Picture;
    return out;
}

} // namespace docseg
