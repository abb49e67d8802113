#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "docseg/block_grid.hpp"
#include "docseg/cluster.hpp"
#include "docseg/dct.hpp"
#include "docseg/errors.hpp"
#include "docseg/gmm.hpp"
#include "docseg/image.hpp"
#include "docseg/parallel.hpp"
#include "docseg/segmentation_result.hpp"
#include "docseg/smap.hpp"
#include "docseg/two_color.hpp"

namespace docseg {

/// AC-energy thresholds and clustering-norm weight.
struct AcThresholds {
    double t1 = 20.0;
    double t2 = 70.0;
    double gamma = 15.0;
};

enum class Smoothness : std::uint8_t { Smooth, NonSmooth };

/// Two-threshold smoothness split: energy below t1 is Smooth, at or above t2
/// NonSmooth. Blocks in the [t1, t2) band take the majority first-pass label
/// of their 8-neighborhood; ties (and bands with no decided neighbor) go to
/// NonSmooth. Smooth blocks become Background downstream.
inline std::vector<Smoothness> classify_smoothness(const std::vector<double>& energies,
                                                   int rows, int cols,
                                                   const AcThresholds& th) {
    if (rows < 1 || cols < 1 || energies.size() != static_cast<std::size_t>(rows) * cols)
        throw GeometryError("energy grid geometry mismatch");
    if (th.t1 < 0 || th.t1 > th.t2) throw ConfigError("need 0 <= t1 <= t2");

    enum class Pass1 : std::uint8_t { Smooth, Band, NonSmooth };
    std::vector<Pass1> first(energies.size());
    for (std::size_t i = 0; i < energies.size(); ++i) {
        if (energies[i] < th.t1)
            first[i] = Pass1::Smooth;
        else if (energies[i] >= th.t2)
            first[i] = Pass1::NonSmooth;
        else
            first[i] = Pass1::Band;
    }

    std::vector<Smoothness> out(energies.size());
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) {
            const std::size_t i = static_cast<std::size_t>(r) * cols + c;
            if (first[i] == Pass1::Smooth) {
                out[i] = Smoothness::Smooth;
            } else if (first[i] == Pass1::NonSmooth) {
                out[i] = Smoothness::NonSmooth;
            } else {
                int smooth = 0, nonsmooth = 0;
                for (int dr = -1; dr <= 1; ++dr)
                    for (int dc = -1; dc <= 1; ++dc) {
                        if (dr == 0 && dc == 0) continue;
                        const int nr = r + dr, nc = c + dc;
                        if (nr < 0 || nr >= rows || nc < 0 || nc >= cols) continue;
                        const Pass1 p = first[static_cast<std::size_t>(nr) * cols + nc];
                        if (p == Pass1::Smooth) ++smooth;
                        else if (p == Pass1::NonSmooth) ++nonsmooth;
                    }
                out[i] = smooth > nonsmooth ? Smoothness::Smooth : Smoothness::NonSmooth;
            }
        }
    return out;
}

/// Minimum gap between the two clusters' mean D2 for the split to count as
/// text-vs-picture. Class identity lives in D2 (two-tone blocks project with
/// near-zero error, pictorial blocks do not); clusters that differ only in D1
/// are two flavors of the same class. 1.0 is the same watershed the
/// degenerate rule uses.
inline constexpr double kMinClusterD2Gap = 1.0;

inline bool cluster_split_is_real(const ClusterModel& cm) {
    return std::abs(cm.mean_d2(0) - cm.mean_d2(1)) >= kMinClusterD2Gap;
}

/// Single-class fallback: everything in one cluster centered on the global
/// feature mean, flagged degenerate so the degenerate labeling rule applies.
inline ClusterModel collapse_to_single_cluster(const std::vector<FeatureVector>& features) {
    ClusterModel cm;
    cm.degenerate = true;
    double s1 = 0, s2 = 0;
    for (const auto& f : features) {
        s1 += f.d1;
        s2 += f.d2;
    }
    const double n = static_cast<double>(features.size());
    cm.centroids[0] = {s1 / n, s2 / n};
    for (std::size_t i = 0; i < features.size(); ++i)
        cm.member_ids[0].push_back(static_cast<int>(i));
    return cm;
}

/// Full configuration of the AC pipeline run.
struct AcPipelineConfig {
    AcThresholds thresholds{};
    bool refine = true;        // GMM + multiscale MAP pass over foreground labels
    bool jpeg_quant = false;   // emulate dequantized JPEG coefficients
    int jpeg_quality = 75;
    std::uint64_t seed = 0;
    int gmm_components = 2;
    double smap_epsilon = 1e-3;
    double smap_theta_init = 0.5;

    nlohmann::json to_json() const {
        return {
            {"pipeline", "ac"},
            {"seed", seed},
            {"ac",
             {{"t1", thresholds.t1},
              {"t2", thresholds.t2},
              {"gamma", thresholds.gamma},
              {"refine", refine},
              {"jpeg_quant", jpeg_quant},
              {"jpeg_quality", jpeg_quality}}},
            {"smap",
             {{"components", gmm_components},
              {"epsilon", smap_epsilon},
              {"theta_init", smap_theta_init}}},
        };
    }
};

/// AC-coefficient pipeline: 8x8 DCT energies split background from
/// foreground, (D1, D2) features are clustered into text/picture, and the
/// optional refine stage re-labels the foreground with the GMM + multiscale
/// MAP pass.
inline SegmentationResult run_ac_pipeline(const LumaImage& img, const AcPipelineConfig& cfg) {
    if (!img.valid()) throw GeometryError("invalid luminance image");
    SegmentationResult result;
    result.config = cfg.to_json();
    detail::Stopwatch watch;

    const BlockGrid grid = tile_blocks(img, 8);
    const int nblocks = grid.block_count();
    result.timings.push_back({"tile", watch.lap()});

    std::vector<DctCoeffs> coeffs(nblocks);
    parallel_for(nblocks, [&](std::size_t s) {
        DctCoeffs c = block_dct8(grid.tile(static_cast<int>(s)));
        if (cfg.jpeg_quant) c = quantize_dequantize(c, cfg.jpeg_quality);
        coeffs[s] = c;
    });
    result.timings.push_back({"dct", watch.lap()});

    std::vector<double> energies(nblocks);
    for (int s = 0; s < nblocks; ++s) energies[s] = ac_energy(coeffs[s]);
    const std::vector<Smoothness> smooth =
        classify_smoothness(energies, grid.rows, grid.cols, cfg.thresholds);
    result.timings.push_back({"smoothness", watch.lap()});

    // features for foreground blocks; DC prediction runs in raster order
    // over the full grid, first block predicted from 0
    result.features.assign(nblocks, FeatureVector{});
    std::vector<int> fg_ids;
    fg_ids.reserve(nblocks);
    for (int s = 0; s < nblocks; ++s)
        if (smooth[s] == Smoothness::NonSmooth) fg_ids.push_back(s);
    parallel_for(fg_ids.size(), [&](std::size_t i) {
        const int s = fg_ids[i];
        const double prev_dc = s > 0 ? coeffs[s - 1].dc() : 0.0;
        const auto tile = grid.tile(s);
        const TwoColorProjection proj = two_color_project(tile, cfg.seed);
        result.features[s] = {feature_d1(coeffs[s], prev_dc), feature_d2(tile, proj)};
    });
    result.timings.push_back({"features", watch.lap()});

    result.labels.rows = grid.rows;
    result.labels.cols = grid.cols;
    result.labels.block_size = 8;
    result.labels.labels.assign(nblocks, BlockLabel::Background);

    std::vector<FeatureVector> fg_features;
    fg_features.reserve(fg_ids.size());
    for (int s : fg_ids) fg_features.push_back(result.features[s]);

    ClusterModel cm;
    if (!fg_ids.empty()) {
        cm = kmeans_features(fg_features, cfg.thresholds.gamma, cfg.seed);
        if (!cm.degenerate && !cluster_split_is_real(cm))
            cm = collapse_to_single_cluster(fg_features);
        const auto cluster_label = assign_text_picture(cm);
        for (int k = 0; k < 2; ++k)
            for (int idx : cm.member_ids[k])
                result.labels.labels[fg_ids[idx]] = cluster_label[k];
    }
    result.timings.push_back({"cluster", watch.lap()});

    if (cfg.refine && !fg_ids.empty() && !cm.degenerate) {
        std::vector<FeatureVector> text_feats, pic_feats;
        for (int s : fg_ids) {
            if (result.labels.labels[s] == BlockLabel::Text)
                text_feats.push_back(result.features[s]);
            else
                pic_feats.push_back(result.features[s]);
        }
        if (!text_feats.empty() && !pic_feats.empty()) {
            const GmmModel text_model = fit_gmm(text_feats, cfg.gmm_components, cfg.seed);
            const GmmModel pic_model = fit_gmm(pic_feats, cfg.gmm_components, cfg.seed + 1);

            std::vector<std::optional<FeatureVector>> fgrid(nblocks);
            for (int s : fg_ids) fgrid[s] = result.features[s];
            SmapParams sp;
            sp.levels = smap_levels(grid.rows, grid.cols);
            sp.theta_init = cfg.smap_theta_init;
            sp.epsilon = cfg.smap_epsilon;
            const auto refined =
                smap_refine(grid.rows, grid.cols, fgrid, text_model, pic_model, sp);
            for (int s : fg_ids)
                if (refined[s]) result.labels.labels[s] = *refined[s];
        }
    }
    result.timings.push_back({"refine", watch.lap()});
    return result;
}

/// Convenience overload matching the basic call shape.
inline SegmentationResult run_ac_pipeline(const LumaImage& img, const AcThresholds& th,
                                          bool refine, std::uint64_t seed) {
    AcPipelineConfig cfg;
    cfg.thresholds = th;
    cfg.refine = refine;
    cfg.seed = seed;
    return run_ac_pipeline(img, cfg);
}

} // namespace docseg
