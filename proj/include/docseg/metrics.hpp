#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "docseg/errors.hpp"
#include "docseg/label_map.hpp"
#include "docseg/segmentation_result.hpp"
#include "docseg/synthetic.hpp"

namespace docseg {

/// Block-level score of one page. false_positive is the complement of
/// accuracy (both in percent, summing to 100); per_class_fp is the stricter
/// rate of non-text blocks labeled text.
struct Metrics {
    double accuracy = 0;
    double false_positive = 0;
    double per_class_fp = 0;
    double wall_time = 0; // segmentation stages only
    std::string graphics_policy;

    nlohmann::json to_json() const {
        return {{"accuracy", accuracy},
                {"false_positive", false_positive},
                {"per_class_fp", per_class_fp},
                {"wall_time_seconds", wall_time},
                {"graphics_policy", graphics_policy}};
    }
};

/// Scores a segmentation against pixel truth at the result's block size.
/// Graphics blocks count as Text when graphics_as_text is set, else as
/// Picture (the policy is recorded in the metrics).
inline Metrics score(const SegmentationResult& result, const GroundTruth& truth,
                     bool graphics_as_text = false) {
    const LabelMap& got = result.labels;
    if (!got.valid() || !got.covers(truth.width, truth.height))
        throw GeometryError("segmentation does not cover the ground truth page");

    const LabelMap want = truth.block_truth(got.block_size);
    std::size_t correct = 0, text_fp = 0, non_text = 0;
    const std::size_t total = got.labels.size();
    for (std::size_t i = 0; i < total; ++i) {
        BlockLabel g = got.labels[i];
        if (g == BlockLabel::Graphics)
            g = graphics_as_text ? BlockLabel::Text : BlockLabel::Picture;
        const BlockLabel w = want.labels[i];
        if (g == w) ++correct;
        if (w != BlockLabel::Text) {
            ++non_text;
            if (g == BlockLabel::Text) ++text_fp;
        }
    }

    Metrics m;
    m.accuracy = 100.0 * static_cast<double>(correct) / static_cast<double>(total);
    m.false_positive = 100.0 - m.accuracy;
    m.per_class_fp =
        non_text == 0 ? 0.0 : 100.0 * static_cast<double>(text_fp) / static_cast<double>(non_text);
    m.wall_time = result.total_seconds();
    m.graphics_policy = graphics_as_text ? "graphics_as_text" : "graphics_as_picture";
    return m;
}

} // namespace docseg
