#pragma once

#include <cstdint>
#include <vector>

#include "docseg/block_grid.hpp"
#include "docseg/errors.hpp"
#include "docseg/gradient.hpp"
#include "docseg/histogram.hpp"
#include "docseg/image.hpp"
#include "docseg/parallel.hpp"
#include "docseg/segmentation_result.hpp"

namespace docseg {

struct HistPipelineConfig {
    HistThresholds thresholds{};
    GradientThresholds gradient{};
    bool use_gradient = false; // re-test Graphics/Picture blocks with the gradient rule
    int block_size = 16;

    nlohmann::json to_json() const {
        return {
            {"pipeline", "hist"},
            {"hist",
             {{"t1", thresholds.t1},
              {"t2", thresholds.t2},
              {"t3", thresholds.t3},
              {"mode_t", thresholds.mode_t},
              {"a_window", thresholds.a_window},
              {"use_gradient", use_gradient},
              {"block_size", block_size}}},
            {"grad",
             {{"t1", gradient.t1},
              {"t2", gradient.t2},
              {"t3", gradient.t3},
              {"t4", gradient.t4},
              {"g_lo", gradient.g_lo},
              {"g_hi", gradient.g_hi}}},
        };
    }
};

/// Histogram pipeline: per-block intensity histograms, mode detection and
/// the four decision rules; optionally re-tests Graphics/Picture blocks with
/// the gradient-pixel rule, which relabels them Text or Picture.
inline SegmentationResult run_hist_pipeline(const LumaImage& img, const HistPipelineConfig& cfg) {
    if (!img.valid()) throw GeometryError("invalid luminance image");
    if (cfg.block_size < 1) throw ConfigError("block size must be >= 1");
    SegmentationResult result;
    result.config = cfg.to_json();
    detail::Stopwatch watch;

    const BlockGrid grid = tile_blocks(img, cfg.block_size);
    const int nblocks = grid.block_count();
    result.timings.push_back({"tile", watch.lap()});

    result.labels.rows = grid.rows;
    result.labels.cols = grid.cols;
    result.labels.block_size = cfg.block_size;
    result.labels.labels.assign(nblocks, BlockLabel::Background);

    parallel_for(nblocks, [&](std::size_t s) {
        const auto tile = grid.tile(static_cast<int>(s));
        const BlockHistogram h = block_histogram(tile, cfg.block_size);
        const auto modes = detect_modes(h, cfg.thresholds);
        result.labels.labels[s] = apply_decision_rules(modes, cfg.thresholds);
    });
    result.timings.push_back({"rules", watch.lap()});

    if (cfg.use_gradient) {
        parallel_for(nblocks, [&](std::size_t s) {
            const BlockLabel l = result.labels.labels[s];
            if (l == BlockLabel::Graphics || l == BlockLabel::Picture)
                result.labels.labels[s] =
                    gradient_classify(grid.tile(static_cast<int>(s)), cfg.block_size, cfg.gradient);
        });
    }
    result.timings.push_back({"gradient", watch.lap()});
    return result;
}

} // namespace docseg
