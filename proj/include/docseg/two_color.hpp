#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <span>

#include "docseg/errors.hpp"

namespace docseg {

/// Result of projecting an 8x8 tile onto its two cluster-mean luminances.
/// theta1 <= theta2 by construction.
struct TwoColorProjection {
    double theta1 = 0;
    double theta2 = 0;
    std::array<double, 64> projected{};
    std::array<std::uint8_t, 64> assignments{}; // 0 -> theta1, 1 -> theta2
};

/// 2-D block descriptor: encoding length (d1) and normalized two-color
/// projection distance (d2).
struct FeatureVector {
    double d1 = 0;
    double d2 = 0;
};

/// gamma-weighted feature norm sqrt(d1^2 + gamma * d2^2).
inline double weighted_norm(const FeatureVector& v, double gamma = 15.0) {
    return std::sqrt(v.d1 * v.d1 + gamma * v.d2 * v.d2);
}

inline double weighted_distance(const FeatureVector& a, const FeatureVector& b, double gamma = 15.0) {
    return weighted_norm({a.d1 - b.d1, a.d2 - b.d2}, gamma);
}

/// 2-means on the 64 luminances of a tile, each pixel clipped to its cluster
/// mean. Initial means are the tile min and max, so the procedure is
/// deterministic; the seed parameter is kept for API symmetry only.
inline TwoColorProjection two_color_project(std::span<const std::uint8_t> tile,
                                            std::uint64_t /*seed*/ = 0) {
    if (tile.size() != 64) throw GeometryError("two_color_project requires an 8x8 tile");

    TwoColorProjection p;
    std::uint8_t lo = tile[0], hi = tile[0];
    for (std::uint8_t v : tile) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    if (lo == hi) { // single-valued tile: degenerate clustering
        p.theta1 = p.theta2 = lo;
        p.projected.fill(lo);
        p.assignments.fill(0);
        return p;
    }

    double m1 = lo, m2 = hi;
    std::array<std::uint8_t, 64> assign{};
    for (int iter = 0; iter < 64; ++iter) {
        bool changed = iter == 0;
        for (int i = 0; i < 64; ++i) {
            const double v = tile[i];
            const std::uint8_t a = std::abs(v - m1) <= std::abs(v - m2) ? 0 : 1;
            if (a != assign[i]) {
                assign[i] = a;
                changed = true;
            }
        }
        if (!changed) break;
        double sum1 = 0, sum2 = 0;
        int n1 = 0, n2 = 0;
        for (int i = 0; i < 64; ++i) {
            if (assign[i] == 0) {
                sum1 += tile[i];
                ++n1;
            } else {
                sum2 += tile[i];
                ++n2;
            }
        }
        if (n1 > 0) m1 = sum1 / n1;
        if (n2 > 0) m2 = sum2 / n2;
    }

    if (m1 <= m2) {
        p.theta1 = m1;
        p.theta2 = m2;
        p.assignments = assign;
    } else {
        p.theta1 = m2;
        p.theta2 = m1;
        for (int i = 0; i < 64; ++i) p.assignments[i] = assign[i] ^ 1;
    }
    for (int i = 0; i < 64; ++i)
        p.projected[i] = p.assignments[i] == 0 ? p.theta1 : p.theta2;
    return p;
}

/// Two-color feature D2: l2 projection error normalized by the squared mean
/// separation. Defined as 0 when theta1 == theta2.
inline double feature_d2(std::span<const std::uint8_t> tile, const TwoColorProjection& p) {
    if (tile.size() != 64) throw GeometryError("feature_d2 requires an 8x8 tile");
    if (p.theta1 == p.theta2) return 0.0;
    double err = 0;
    for (int i = 0; i < 64; ++i) {
        const double d = tile[i] - p.projected[i];
        err += d * d;
    }
    const double sep = p.theta2 - p.theta1;
    return err / (sep * sep);
}

} // namespace docseg
