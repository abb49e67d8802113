#pragma once

#include <chrono>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "docseg/label_map.hpp"
#include "docseg/two_color.hpp"

namespace docseg {

struct StageTiming {
    std::string stage;
    double seconds = 0;
};

/// Output of either pipeline: block labels, per-block features (empty for
/// the histogram pipeline), stage timings, and the config snapshot that
/// produced the run.
struct SegmentationResult {
    LabelMap labels;
    std::vector<FeatureVector> features; // row-major per block; (0,0) at background
    std::vector<StageTiming> timings;
    nlohmann::json config;

    double total_seconds() const {
        double s = 0;
        for (const auto& t : timings) s += t.seconds;
        return s;
    }

    nlohmann::json to_json(bool include_features = false) const {
        nlohmann::json j;
        j["config"] = config;
        j["labels"] = label_map_to_json(labels);
        auto& times = j["timings"] = nlohmann::json::array();
        for (const auto& t : timings) times.push_back({{"stage", t.stage}, {"seconds", t.seconds}});
        j["total_seconds"] = total_seconds();
        if (include_features) {
            auto& f = j["features"] = nlohmann::json::array();
            for (const auto& v : features) f.push_back({v.d1, v.d2});
        }
        return j;
    }
};

namespace detail {

class Stopwatch {
public:
    Stopwatch() : start_(std::chrono::steady_clock::now()) {}
    /// Seconds since construction or the last lap() call.
    double lap() {
        const auto now = std::chrono::steady_clock::now();
        const double s = std::chrono::duration<double>(now - start_).count();
        start_ = now;
        return s;
    }

private:
    std::chrono::steady_clock::time_point start_;
};

} // namespace detail

} // namespace docseg
