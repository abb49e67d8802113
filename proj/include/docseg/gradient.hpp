#pragma once

#include <algorithm>
#include <bitset>
#include <cstdint>
#include <cstdlib>
#include <span>

#include "docseg/errors.hpp"
#include "docseg/label_map.hpp"

namespace docseg {

/// Thresholds of the gradient-pixel text/image rule. t1..t3 count pixels,
/// t4 counts colour levels; g_lo/g_hi split the per-pixel gradient magnitude
/// into low / mid / high bands.
struct GradientThresholds {
    int t1 = 50;
    int t2 = 45;
    int t3 = 10;
    int t4 = 4;
    int g_lo = 8;
    int g_hi = 64;
};

/// Gradient-pixel rule over one tile. The per-pixel gradient is the maximum
/// absolute luminance difference to the 4-neighborhood (border pixels use
/// their existing neighbors); colour levels are the distinct values after
/// quantizing luminance into 16 bins.
///   high+low < t1                 -> Picture
///   high < t2 and low > t3        -> Text if colour levels < t4 else Picture
///   otherwise                     -> Picture
inline BlockLabel gradient_classify(std::span<const std::uint8_t> tile, int block_size,
                                    const GradientThresholds& th) {
    if (block_size < 1 || tile.size() != static_cast<std::size_t>(block_size) * block_size)
        throw GeometryError("gradient_classify tile size mismatch");
    if (th.g_lo < 0 || th.g_lo > th.g_hi) throw ConfigError("need 0 <= g_lo <= g_hi");

    const int B = block_size;
    int low = 0, high = 0;
    std::bitset<16> levels;
    for (int y = 0; y < B; ++y)
        for (int x = 0; x < B; ++x) {
            const int v = tile[y * B + x];
            int g = 0;
            if (x > 0) g = std::max(g, std::abs(v - tile[y * B + x - 1]));
            if (x + 1 < B) g = std::max(g, std::abs(v - tile[y * B + x + 1]));
            if (y > 0) g = std::max(g, std::abs(v - tile[(y - 1) * B + x]));
            if (y + 1 < B) g = std::max(g, std::abs(v - tile[(y + 1) * B + x]));
            if (g <= th.g_lo)
                ++low;
            else if (g >= th.g_hi)
                ++high;
            levels.set(v / 16);
        }
    const int colour_levels = static_cast<int>(levels.count());

    if (high + low < th.t1) return BlockLabel::Picture;
    if (high < th.t2 && low > th.t3)
        return colour_levels < th.t4 ? BlockLabel::Text : BlockLabel::Picture;
    return BlockLabel::Picture;
}

} // namespace docseg
