#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "docseg/errors.hpp"
#include "docseg/image.hpp"
#include "docseg/label_map.hpp"

namespace docseg {

enum class PageLayout { SingleColumn, DoubleColumn };

inline std::string layout_name(PageLayout l) {
    return l == PageLayout::SingleColumn ? "single_column" : "double_column";
}

/// Recipe for one synthetic ground-truthed page.
struct SyntheticSpec {
    PageLayout layout = PageLayout::SingleColumn;
    bool with_figures = false;
    int width = 512;
    int height = 704;
    int text_contrast = 180; // luminance gap between background and ink
    double noise_sigma = 18.0;
    std::uint64_t seed = 0;
};

/// Pixel-accurate truth for a generated page (Background / Text / Picture).
struct GroundTruth {
    int width = 0;
    int height = 0;
    std::vector<BlockLabel> pixels;

    BlockLabel at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }

    /// Block truth at any block size by per-block pixel majority
    /// (ties resolved by label_precedence; edge blocks use existing pixels).
    LabelMap block_truth(int block_size) const {
        LabelMap m;
        m.block_size = block_size;
        m.rows = (height + block_size - 1) / block_size;
        m.cols = (width + block_size - 1) / block_size;
        m.labels.resize(static_cast<std::size_t>(m.rows) * m.cols);
        for (int r = 0; r < m.rows; ++r)
            for (int c = 0; c < m.cols; ++c) {
                std::array<std::size_t, 4> counts{};
                for (int y = r * block_size; y < std::min((r + 1) * block_size, height); ++y)
                    for (int x = c * block_size; x < std::min((c + 1) * block_size, width); ++x)
                        counts[static_cast<int>(at(x, y))]++;
                m.at(r, c) = majority_label(counts);
            }
        return m;
    }
};

namespace detail {

struct PageCanvas {
    int width, height;
    std::vector<std::uint8_t>& img;
    std::vector<BlockLabel>& truth;

    void set(int x, int y, std::uint8_t v) {
        if (x >= 0 && x < width && y >= 0 && y < height)
            img[static_cast<std::size_t>(y) * width + x] = v;
    }
    void mark(int x, int y, BlockLabel l) {
        if (x >= 0 && x < width && y >= 0 && y < height)
            truth[static_cast<std::size_t>(y) * width + x] = l;
    }
};

// Line pitch of the glyph generator. Bands are 16-aligned so block truth is
// unambiguous at both working block sizes; glyph bars are baseline-anchored.
constexpr int kLinePitch = 16;
constexpr int kBandHeight = 12;

inline void draw_text_line(PageCanvas& canvas, std::mt19937_64& rng, int x0, int y0,
                           int max_len, std::uint8_t ink) {
    auto u = [&rng](int lo, int hi) {
        return std::uniform_int_distribution<int>(lo, hi)(rng);
    };
    int len = max_len;
    if (u(0, 99) < 18) len = std::max(32, max_len * u(55, 95) / 100);

    int x = x0;
    int ink_end = x0;
    while (x < x0 + len - 1) {
        const int bw = u(0, 9) < 8 ? 1 : 2;
        const int bh = u(5, 10);
        for (int yy = kBandHeight - bh; yy < kBandHeight; ++yy)
            for (int xx = 0; xx < bw; ++xx) canvas.set(x + xx, y0 + yy, ink);
        ink_end = std::min(x + bw, x0 + len);
        if (u(0, 99) < 15) { // serif-ish horizontal stroke
            const int hl = u(3, 6);
            const int row = u(0, kBandHeight - 1);
            for (int xx = 0; xx < hl && x + bw + xx < x0 + len; ++xx)
                canvas.set(x + bw + xx, y0 + row, ink);
            ink_end = std::min(x + bw + hl, x0 + len);
        }
        x += bw + u(2, 5);
    }
    for (int yy = 0; yy < kBandHeight; ++yy)
        for (int xx = x0; xx < ink_end; ++xx) canvas.mark(xx, y0 + yy, BlockLabel::Text);
}

inline void draw_figure(PageCanvas& canvas, std::mt19937_64& rng, int fx, int fy, int fw,
                        int fh, std::uint8_t bg, double sigma) {
    auto u = [&rng](int lo, int hi) {
        return std::uniform_int_distribution<int>(lo, hi)(rng);
    };
    const int direction = u(0, 2);
    const int base = std::clamp(static_cast<int>(bg) - 90 + u(-15, 15), 20, 235);
    const int amp = u(40, 80);
    std::normal_distribution<double> noise(0.0, sigma);
    for (int y = 0; y < fh; ++y)
        for (int x = 0; x < fw; ++x) {
            double t = 0;
            if (direction == 0)
                t = fw > 1 ? static_cast<double>(x) / (fw - 1) : 0.0;
            else if (direction == 1)
                t = fh > 1 ? static_cast<double>(y) / (fh - 1) : 0.0;
            else
                t = (fw + fh > 2) ? static_cast<double>(x + y) / (fw + fh - 2) : 0.0;
            const double v = base - amp / 2.0 + amp * t + noise(rng);
            canvas.set(fx + x, fy + y,
                       static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L)));
            canvas.mark(fx + x, fy + y, BlockLabel::Picture);
        }
}

} // namespace detail

/// Generates a flat-background page with one or two columns of two-tone
/// glyph strokes and optional noise+gradient figure regions, together with
/// pixel-accurate truth. Deterministic given the spec (including seed).
inline std::pair<RasterImage, GroundTruth> generate_synthetic(const SyntheticSpec& spec) {
    if (spec.width < 64 || spec.height < 64)
        throw ConfigError("synthetic page must be at least 64x64");
    if (spec.text_contrast < 16 || spec.text_contrast > 255)
        throw ConfigError("text_contrast must lie in [16, 255]");

    std::mt19937_64 rng(spec.seed);
    auto u = [&rng](int lo, int hi) {
        return std::uniform_int_distribution<int>(lo, hi)(rng);
    };

    const int W = spec.width, H = spec.height;
    const std::uint8_t bg = static_cast<std::uint8_t>(226 + u(0, 19));
    const std::uint8_t ink =
        static_cast<std::uint8_t>(std::clamp(static_cast<int>(bg) - spec.text_contrast, 0, 255));

    RasterImage img;
    img.width = W;
    img.height = H;
    img.channels = 1;
    img.data.assign(static_cast<std::size_t>(W) * H, bg);
    GroundTruth truth;
    truth.width = W;
    truth.height = H;
    truth.pixels.assign(static_cast<std::size_t>(W) * H, BlockLabel::Background);
    detail::PageCanvas canvas{W, H, img.data, truth.pixels};

    const int margin = (W >= 256 && H >= 256) ? 32 : 16;
    const auto floor16 = [](int v) { return v / 16 * 16; };

    std::vector<std::pair<int, int>> columns; // (x0, width)
    if (spec.layout == PageLayout::SingleColumn) {
        const int w = floor16(W - 2 * margin);
        if (w < 32) throw ConfigError("page too small for single column layout");
        columns.emplace_back(margin, w);
    } else {
        const int gutter = 32;
        const int w = floor16((W - 2 * margin - gutter) / 2);
        if (w < 32) throw ConfigError("page too small for double column layout");
        columns.emplace_back(margin, w);
        columns.emplace_back(margin + w + gutter, w);
    }

    const int first_band = margin;
    const int n_bands = (H - 2 * margin) / detail::kLinePitch;
    if (n_bands < 2) throw ConfigError("page too small for any text line");

    const int figures_per_column = spec.layout == PageLayout::SingleColumn ? 2 : 1;
    for (const auto& [cx, cw] : columns) {
        std::vector<bool> band_is_figure(n_bands, false);
        if (spec.with_figures) {
            for (int f = 0; f < figures_per_column; ++f) {
                const int max_fig_bands = std::max(2, std::min(10, n_bands / 2 - 1));
                const int fig_bands = u(std::min(6, max_fig_bands), max_fig_bands);
                const int start = u(0, n_bands - fig_bands);
                bool free = true;
                for (int b = start; b < start + fig_bands; ++b)
                    if (band_is_figure[b]) free = false;
                if (!free) continue; // overlapping draw is skipped, not retried
                for (int b = start; b < start + fig_bands; ++b) band_is_figure[b] = true;
                detail::draw_figure(canvas, rng, cx, first_band + start * detail::kLinePitch,
                                    cw, fig_bands * detail::kLinePitch, bg, spec.noise_sigma);
            }
        }
        for (int b = 0; b < n_bands; ++b) {
            if (band_is_figure[b]) continue;
            detail::draw_text_line(canvas, rng, cx, first_band + b * detail::kLinePitch, cw, ink);
        }
    }
    return {std::move(img), std::move(truth)};
}

/// One corpus page: image, truth and the category it was generated under.
struct CorpusPage {
    SyntheticSpec spec;
    RasterImage image;
    GroundTruth truth;
    int category = 0; // index into corpus_category_names()
};

inline const std::array<std::string, 4>& corpus_category_names() {
    static const std::array<std::string, 4> names = {
        "single_column_no_figures",
        "double_column_no_figures",
        "single_column_figures",
        "double_column_figures",
    };
    return names;
}

/// Standard benchmark corpus: 20/20/30/30 pages over the four layout
/// categories, page parameters jittered deterministically from the seed.
inline std::vector<CorpusPage> make_corpus(int pages, std::uint64_t seed, int width = 512,
                                           int height = 704) {
    if (pages < 4) throw ConfigError("corpus needs at least 4 pages");
    std::vector<CorpusPage> corpus;
    corpus.reserve(pages);
    std::mt19937_64 rng(seed ^ 0x5eedc0de5eedc0deULL);
    auto u = [&rng](int lo, int hi) {
        return std::uniform_int_distribution<int>(lo, hi)(rng);
    };

    const std::array<int, 4> share = {20, 20, 30, 30}; // percent per category
    for (int i = 0; i < pages; ++i) {
        // fill categories proportionally, in order
        int category = 3;
        int acc = 0;
        for (int c = 0; c < 4; ++c) {
            acc += share[c];
            if (i * 100 < acc * pages) {
                category = c;
                break;
            }
        }
        CorpusPage page;
        page.category = category;
        page.spec.layout = (category % 2 == 0) ? PageLayout::SingleColumn : PageLayout::DoubleColumn;
        page.spec.with_figures = category >= 2;
        page.spec.width = width;
        page.spec.height = height;
        page.spec.text_contrast = u(150, 200);
        page.spec.noise_sigma = u(14, 22);
        page.spec.seed = rng();
        auto [img, truth] = generate_synthetic(page.spec);
        page.image = std::move(img);
        page.truth = std::move(truth);
        corpus.push_back(std::move(page));
    }
    return corpus;
}

} // namespace docseg
