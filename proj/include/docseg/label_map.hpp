#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <vector>

#include <nlohmann/json.hpp>

#include "docseg/errors.hpp"
#include "docseg/image.hpp"

namespace docseg {

/// Per-block class. The AC pipeline emits Background/Text/Picture only;
/// the histogram pipeline may emit all four.
enum class BlockLabel : std::uint8_t {
    Background = 0,
    Text = 1,
    Graphics = 2,
    Picture = 3,
};

/// Tie-break precedence for majority votes over labels. Foreground beats
/// background so thin text bands are not swallowed.
inline int label_precedence(BlockLabel l) {
    switch (l) {
        case BlockLabel::Text: return 0;
        case BlockLabel::Graphics: return 1;
        case BlockLabel::Picture: return 2;
        case BlockLabel::Background: return 3;
    }
    return 3;
}

/// Majority label over per-class counts indexed by BlockLabel value.
inline BlockLabel majority_label(const std::array<std::size_t, 4>& counts) {
    BlockLabel best = BlockLabel::Background;
    std::size_t best_n = 0;
    int best_prec = 4;
    for (int v = 0; v < 4; ++v) {
        const auto l = static_cast<BlockLabel>(v);
        const int prec = label_precedence(l);
        if (counts[v] > best_n || (counts[v] == best_n && counts[v] > 0 && prec < best_prec)) {
            best = l;
            best_n = counts[v];
            best_prec = prec;
        }
    }
    return best;
}

/// Block-granularity label grid.
struct LabelMap {
    int rows = 0;
    int cols = 0;
    int block_size = 0;
    std::vector<BlockLabel> labels; // row-major, rows*cols

    BlockLabel at(int r, int c) const { return labels[static_cast<std::size_t>(r) * cols + c]; }
    BlockLabel& at(int r, int c) { return labels[static_cast<std::size_t>(r) * cols + c]; }
    bool valid() const {
        return rows >= 1 && cols >= 1 && block_size >= 1 &&
               labels.size() == static_cast<std::size_t>(rows) * cols;
    }
    bool covers(int width, int height) const {
        return cols == (width + block_size - 1) / block_size &&
               rows == (height + block_size - 1) / block_size;
    }
};

inline nlohmann::json label_map_to_json(const LabelMap& m) {
    nlohmann::json j;
    j["rows"] = m.rows;
    j["cols"] = m.cols;
    j["block_size"] = m.block_size;
    auto& arr = j["labels"] = nlohmann::json::array();
    for (BlockLabel l : m.labels) arr.push_back(static_cast<int>(l));
    return j;
}

inline LabelMap label_map_from_json(const nlohmann::json& j) {
    LabelMap m;
    m.rows = j.at("rows").get<int>();
    m.cols = j.at("cols").get<int>();
    m.block_size = j.at("block_size").get<int>();
    for (const auto& v : j.at("labels")) {
        const int x = v.get<int>();
        if (x < 0 || x > 3) throw FormatError("label value out of range");
        m.labels.push_back(static_cast<BlockLabel>(x));
    }
    if (!m.valid()) throw FormatError("label map geometry does not match label count");
    return m;
}

/// Downsamples a label map by an integer factor via majority vote over each
/// factor x factor cell (ties broken by label_precedence).
inline LabelMap downsample_majority(const LabelMap& m, int factor) {
    if (factor < 1) throw ConfigError("downsample factor must be >= 1");
    LabelMap out;
    out.block_size = m.block_size * factor;
    out.rows = (m.rows + factor - 1) / factor;
    out.cols = (m.cols + factor - 1) / factor;
    out.labels.resize(static_cast<std::size_t>(out.rows) * out.cols);
    for (int r = 0; r < out.rows; ++r) {
        for (int c = 0; c < out.cols; ++c) {
            std::array<std::size_t, 4> counts{};
            for (int dr = 0; dr < factor; ++dr)
                for (int dc = 0; dc < factor; ++dc) {
                    const int sr = r * factor + dr, sc = c * factor + dc;
                    if (sr < m.rows && sc < m.cols)
                        counts[static_cast<int>(m.at(sr, sc))]++;
                }
            out.at(r, c) = majority_label(counts);
        }
    }
    return out;
}

/// Tints each block of img by its label (Background gray, Text red,
/// Graphics green, Picture blue) at a 50% blend over the luminance.
inline RasterImage render_overlay(const LumaImage& img, const LabelMap& map) {
    if (!img.valid() || !map.valid() || !map.covers(img.width, img.height))
        throw GeometryError("label map does not cover image");
    static constexpr std::array<std::array<int, 3>, 4> kTint = {{
        {128, 128, 128}, // Background
        {255, 0, 0},     // Text
        {0, 255, 0},     // Graphics
        {0, 0, 255},     // Picture
    }};
    RasterImage out;
    out.width = img.width;
    out.height = img.height;
    out.channels = 3;
    out.data.resize(static_cast<std::size_t>(img.width) * img.height * 3);
    for (int y = 0; y < img.height; ++y) {
        const int r = y / map.block_size;
        for (int x = 0; x < img.width; ++x) {
            const int c = x / map.block_size;
            const auto& tint = kTint[static_cast<int>(map.at(r, c))];
            const double luma = img.at(x, y);
            std::uint8_t* px = &out.data[(static_cast<std::size_t>(y) * img.width + x) * 3];
            for (int ch = 0; ch < 3; ++ch) {
                const long v = std::lround(0.5 * luma + 0.5 * tint[ch]);
                px[ch] = static_cast<std::uint8_t>(std::clamp(v, 0L, 255L));
            }
        }
    }
    return out;
}

} // namespace docseg
