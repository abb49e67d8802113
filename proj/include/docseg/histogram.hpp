#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "docseg/errors.hpp"
#include "docseg/label_map.hpp"

namespace docseg {

/// Normalized intensity histogram of one B x B block.
struct BlockHistogram {
    std::array<double, 256> probs{};
    int block_size = 16;
};

/// An accepted histogram mode: a local maximum whose surrounding cumulative
/// probability clears the acceptance threshold.
struct Mode {
    int intensity = 0;
    double cum_prob = 0; // mass of probs[intensity-A .. intensity+A]
    int window = 0;      // A
};

/// Decision-rule thresholds. t1/t2/t3 compare against cumulative mode
/// probabilities expressed in percent; mode_t (a fraction) gates mode
/// acceptance and a_window is the half-width A of the cumulative window.
struct HistThresholds {
    double t1 = 30.0;
    double t2 = 45.0;
    double t3 = 70.0;
    double mode_t = 0.05;
    int a_window = 4;
};

/// Exact frequency counts normalized by B^2.
inline BlockHistogram block_histogram(std::span<const std::uint8_t> tile, int block_size) {
    if (block_size < 1 || tile.size() != static_cast<std::size_t>(block_size) * block_size)
        throw GeometryError("block_histogram tile size mismatch");
    BlockHistogram h;
    h.block_size = block_size;
    std::array<int, 256> freq{};
    for (std::uint8_t v : tile) freq[v]++;
    const double denom = static_cast<double>(block_size) * block_size;
    for (int i = 0; i < 256; ++i) h.probs[i] = freq[i] / denom;
    return h;
}

/// Finds modes: occupied local maxima (one-sided tests at the boundaries)
/// whose window mass c = sum of probs[i-A .. i+A] reaches mode_t.
/// Overlapping windows are suppressed greedily by descending c; the result is
/// sorted by descending c (ties by ascending intensity).
inline std::vector<Mode> detect_modes(const BlockHistogram& h, const HistThresholds& th) {
    if (th.a_window < 0) throw ConfigError("a_window must be >= 0");
    const int A = th.a_window;

    std::vector<Mode> candidates;
    for (int i = 0; i < 256; ++i) {
        if (h.probs[i] <= 0) continue;
        if (i > 0 && h.probs[i] < h.probs[i - 1]) continue;
        if (i < 255 && h.probs[i] < h.probs[i + 1]) continue;
        double c = 0;
        for (int j = std::max(0, i - A); j <= std::min(255, i + A); ++j) c += h.probs[j];
        if (c >= th.mode_t) candidates.push_back({i, c, A});
    }
    std::stable_sort(candidates.begin(), candidates.end(), [](const Mode& a, const Mode& b) {
        if (a.cum_prob != b.cum_prob) return a.cum_prob > b.cum_prob;
        return a.intensity < b.intensity;
    });

    std::vector<Mode> accepted;
    for (const Mode& m : candidates) {
        const int lo = std::max(0, m.intensity - A), hi = std::min(255, m.intensity + A);
        bool overlaps = false;
        for (const Mode& a : accepted) {
            const int alo = std::max(0, a.intensity - A), ahi = std::min(255, a.intensity + A);
            if (lo <= ahi && alo <= hi) {
                overlaps = true;
                break;
            }
        }
        if (!overlaps) accepted.push_back(m);
    }
    return accepted;
}

/// First-match decision over accepted modes (cumulative probabilities taken
/// in percent, missing modes counted as zero):
///   1. N == 1 and c1 > t1                          -> Background
///   2. N == 2 and c1+c2 > t1 and |c1-c2| > t2      -> Text
///   3. N <= 4 and c1+c2+c3+c4 > t1                 -> Graphics
///   4. N >  4 and c1+c2+c3+c4 < t3                 -> Picture
/// No match falls back to Picture.
inline BlockLabel apply_decision_rules(const std::vector<Mode>& modes, const HistThresholds& th) {
    const int n = static_cast<int>(modes.size());
    const auto c = [&](int k) { return k < n ? modes[k].cum_prob * 100.0 : 0.0; };
    const double top4 = c(0) + c(1) + c(2) + c(3);

    if (n == 1 && c(0) > th.t1) return BlockLabel::Background;
    if (n == 2 && c(0) + c(1) > th.t1 && std::abs(c(0) - c(1)) > th.t2) return BlockLabel::Text;
    if (n <= 4 && top4 > th.t1) return BlockLabel::Graphics;
    if (n > 4 && top4 < th.t3) return BlockLabel::Picture;
    return BlockLabel::Picture;
}

} // namespace docseg
