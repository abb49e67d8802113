#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>

#include "docseg/errors.hpp"

namespace docseg {

/// 8x8 orthonormal DCT-II coefficients in JPEG zig-zag order.
/// Index 0 is the DC coefficient; 1..63 are AC.
struct DctCoeffs {
    std::array<double, 64> zz{};

    double dc() const { return zz[0]; }
};

namespace detail {

/// Raster index (row*8+col) visited at each zig-zag position.
inline constexpr std::array<int, 64> make_zigzag() {
    std::array<int, 64> zz{};
    int idx = 0;
    for (int d = 0; d <= 14; ++d) {
        const int lo = d > 7 ? d - 7 : 0;
        const int hi = d < 7 ? d : 7;
        if (d % 2 == 0) {
            for (int i = hi; i >= lo; --i) zz[idx++] = i * 8 + (d - i);
        } else {
            for (int i = lo; i <= hi; ++i) zz[idx++] = i * 8 + (d - i);
        }
    }
    return zz;
}

inline constexpr std::array<int, 64> kZigzag = make_zigzag();

/// Orthonormal 1-D DCT-II basis, kBasis[u][x] = a(u) cos((2x+1)u pi / 16).
inline const std::array<std::array<double, 8>, 8>& dct_basis() {
    static const auto basis = [] {
        std::array<std::array<double, 8>, 8> b{};
        for (int u = 0; u < 8; ++u) {
            const double a = u == 0 ? std::sqrt(1.0 / 8.0) : std::sqrt(2.0 / 8.0);
            for (int x = 0; x < 8; ++x)
                b[u][x] = a * std::cos((2 * x + 1) * u * std::numbers::pi / 16.0);
        }
        return b;
    }();
    return basis;
}

} // namespace detail

/// 2-D orthonormal DCT-II of an 8x8 tile (row-major, 64 values).
/// Energy-preserving: sum of squared coefficients == sum of squared pixels.
inline DctCoeffs block_dct8(std::span<const double> tile) {
    if (tile.size() != 64) throw GeometryError("block_dct8 requires an 8x8 tile");
    const auto& basis = detail::dct_basis();

    // rows, then columns
    std::array<double, 64> tmp{};
    for (int y = 0; y < 8; ++y)
        for (int u = 0; u < 8; ++u) {
            double s = 0;
            for (int x = 0; x < 8; ++x) s += basis[u][x] * tile[y * 8 + x];
            tmp[y * 8 + u] = s;
        }
    std::array<double, 64> coef{};
    for (int u = 0; u < 8; ++u)
        for (int v = 0; v < 8; ++v) {
            double s = 0;
            for (int y = 0; y < 8; ++y) s += basis[v][y] * tmp[y * 8 + u];
            coef[v * 8 + u] = s;
        }

    DctCoeffs out;
    for (int i = 0; i < 64; ++i) out.zz[i] = coef[detail::kZigzag[i]];
    return out;
}

inline DctCoeffs block_dct8(std::span<const std::uint8_t> tile) {
    if (tile.size() != 64) throw GeometryError("block_dct8 requires an 8x8 tile");
    std::array<double, 64> t{};
    for (int i = 0; i < 64; ++i) t[i] = tile[i];
    return block_dct8(std::span<const double>(t));
}

/// AC energy of a block: sum of squared AC coefficients.
inline double ac_energy(const DctCoeffs& c) {
    double e = 0;
    for (int i = 1; i < 64; ++i) e += c.zz[i] * c.zz[i];
    return e;
}

/// Per-coefficient encoding-length estimate: log2(|x|) + 4 when |x| > 1,
/// otherwise 0.
inline double encoding_length_term(double x) {
    const double ax = std::abs(x);
    return ax > 1.0 ? std::log2(ax) + 4.0 : 0.0;
}

/// Encoding-length feature D1. prev_dc is the DC coefficient of the
/// raster-order predecessor block (0 for the first block).
inline double feature_d1(const DctCoeffs& c, double prev_dc) {
    double sum = encoding_length_term(c.zz[0] - prev_dc);
    for (int i = 1; i < 64; ++i) sum += encoding_length_term(c.zz[i]);
    return sum / 64.0;
}

// ---------------------------------------------------------------------------
// Optional JPEG luminance quantization (emulates decompressed coefficients)
// ---------------------------------------------------------------------------

namespace detail {

/// Annex-K luminance quantization table, raster order.
inline constexpr std::array<int, 64> kJpegLumaQuant = {
    16, 11, 10, 16, 24,  40,  51,  61,
    12, 12, 14, 19, 26,  58,  60,  55,
    14, 13, 16, 24, 40,  57,  69,  56,
    14, 17, 22, 29, 51,  87,  80,  62,
    18, 22, 37, 56, 68,  109, 103, 77,
    24, 35, 55, 64, 81,  104, 113, 92,
    49, 64, 78, 87, 103, 121, 120, 101,
    72, 92, 95, 98, 112, 100, 103, 99,
};

} // namespace detail

/// Quantization step for zig-zag position i at the given IJG quality.
inline int jpeg_quant_step(int zz_index, int quality) {
    if (quality < 1) quality = 1;
    if (quality > 100) quality = 100;
    const int scale = quality < 50 ? 5000 / quality : 200 - 2 * quality;
    const int q = detail::kJpegLumaQuant[detail::kZigzag[zz_index]];
    const int s = (q * scale + 50) / 100;
    return std::clamp(s, 1, 255);
}

/// Rounds each coefficient to the nearest multiple of its quantization step
/// and dequantizes, approximating what a JPEG decoder would hand back.
/// The DC coefficient is level-shifted by -1024 (the 8*128 sample shift)
/// around the rounding, matching the JPEG convention.
inline DctCoeffs quantize_dequantize(const DctCoeffs& c, int quality) {
    DctCoeffs out;
    for (int i = 0; i < 64; ++i) {
        const int q = jpeg_quant_step(i, quality);
        const double shift = i == 0 ? 1024.0 : 0.0;
        out.zz[i] = std::round((c.zz[i] - shift) / q) * q + shift;
    }
    return out;
}

} // namespace docseg
