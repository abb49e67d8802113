#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "docseg/ac_pipeline.hpp"
#include "docseg/errors.hpp"
#include "docseg/hist_pipeline.hpp"
#include "docseg/metrics.hpp"
#include "docseg/synthetic.hpp"

namespace docseg {

enum class PipelineKind { Ac, Hist };

inline std::string pipeline_name(PipelineKind k) { return k == PipelineKind::Ac ? "ac" : "hist"; }

/// Cross-validation outcome: the winning grid point plus per-fold and
/// per-grid-point statistics.
struct TuneResult {
    nlohmann::json best_thresholds;
    double best_mean_accuracy = 0;
    double best_stddev = 0;
    std::vector<double> best_fold_accuracy;
    nlohmann::json grid_report; // mean/stddev per grid point

    nlohmann::json to_json() const {
        return {{"best_thresholds", best_thresholds},
                {"mean_accuracy", best_mean_accuracy},
                {"stddev", best_stddev},
                {"fold_accuracy", best_fold_accuracy},
                {"grid", grid_report}};
    }
};

namespace detail {

/// Deterministic fold assignment: pages shuffled by seed, dealt round-robin
/// into k folds, so every page lands in exactly one validation fold.
inline std::vector<int> fold_assignment(std::size_t pages, int k, std::uint64_t seed) {
    std::vector<int> order(pages);
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 rng(seed ^ 0xf01df01df01df01dULL);
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<int> fold(pages);
    for (std::size_t i = 0; i < pages; ++i) fold[order[i]] = static_cast<int>(i % k);
    return fold;
}

struct FoldStats {
    double mean = 0;
    double stddev = 0;
    std::vector<double> per_fold;
};

inline FoldStats fold_stats(const std::vector<double>& page_accuracy,
                            const std::vector<int>& fold, int k) {
    FoldStats s;
    s.per_fold.assign(k, 0);
    std::vector<int> counts(k, 0);
    for (std::size_t i = 0; i < page_accuracy.size(); ++i) {
        s.per_fold[fold[i]] += page_accuracy[i];
        counts[fold[i]]++;
    }
    int used = 0;
    for (int f = 0; f < k; ++f) {
        if (counts[f] == 0) continue;
        s.per_fold[f] /= counts[f];
        s.mean += s.per_fold[f];
        ++used;
    }
    s.mean /= used;
    double var = 0;
    for (int f = 0; f < k; ++f)
        if (counts[f] > 0) var += (s.per_fold[f] - s.mean) * (s.per_fold[f] - s.mean);
    s.stddev = used > 1 ? std::sqrt(var / used) : 0.0;
    return s;
}

template <typename Thresholds>
std::vector<double> grid_point_key(const Thresholds& t);

template <>
inline std::vector<double> grid_point_key<AcThresholds>(const AcThresholds& t) {
    return {t.t1, t.t2, t.gamma};
}
template <>
inline std::vector<double> grid_point_key<HistThresholds>(const HistThresholds& t) {
    return {t.t1, t.t2, t.t3, t.mode_t, static_cast<double>(t.a_window)};
}

inline nlohmann::json thresholds_json(const AcThresholds& t) {
    return {{"t1", t.t1}, {"t2", t.t2}, {"gamma", t.gamma}};
}
inline nlohmann::json thresholds_json(const HistThresholds& t) {
    return {{"t1", t.t1},
            {"t2", t.t2},
            {"t3", t.t3},
            {"mode_t", t.mode_t},
            {"a_window", t.a_window}};
}

} // namespace detail

/// Default search grids, centered on the stock thresholds.
inline std::vector<AcThresholds> default_ac_grid(double gamma = 15.0) {
    std::vector<AcThresholds> g;
    for (double t1 : {10.0, 20.0, 40.0})
        for (double t2 : {40.0, 70.0, 120.0})
            if (t1 <= t2) g.push_back({t1, t2, gamma});
    return g;
}

inline std::vector<HistThresholds> default_hist_grid() {
    std::vector<HistThresholds> g;
    for (double t1 : {20.0, 30.0, 40.0})
        for (double t2 : {40.0, 45.0, 50.0}) g.push_back({t1, t2, 70.0, 0.05, 4});
    return g;
}

/// k-fold threshold selection: every grid point is scored on each validation
/// fold; the point with the best mean validation accuracy wins, ties going to
/// the lexicographically smallest thresholds.
template <typename Thresholds, typename RunPage>
TuneResult kfold_tune_impl(std::size_t pages, std::vector<Thresholds> grid, int k,
                           std::uint64_t seed, RunPage&& accuracy_for) {
    if (k < 2) throw ConfigError("k-fold tuning needs k >= 2");
    if (pages < static_cast<std::size_t>(k))
        throw ConfigError("corpus smaller than the number of folds");
    if (grid.empty()) throw ConfigError("empty threshold grid");

    std::sort(grid.begin(), grid.end(), [](const Thresholds& a, const Thresholds& b) {
        return detail::grid_point_key(a) < detail::grid_point_key(b);
    });
    const std::vector<int> fold = detail::fold_assignment(pages, k, seed);

    TuneResult result;
    result.grid_report = nlohmann::json::array();
    bool have_best = false;
    for (const auto& point : grid) {
        std::vector<double> acc(pages);
        for (std::size_t i = 0; i < pages; ++i) acc[i] = accuracy_for(point, i);
        const auto stats = detail::fold_stats(acc, fold, k);
        result.grid_report.push_back({{"thresholds", detail::thresholds_json(point)},
                                      {"mean_accuracy", stats.mean},
                                      {"stddev", stats.stddev}});
        if (!have_best || stats.mean > result.best_mean_accuracy) {
            have_best = true;
            result.best_mean_accuracy = stats.mean;
            result.best_stddev = stats.stddev;
            result.best_fold_accuracy = stats.per_fold;
            result.best_thresholds = detail::thresholds_json(point);
        }
    }
    return result;
}

inline TuneResult kfold_tune(const std::vector<CorpusPage>& corpus,
                             const std::vector<AcThresholds>& grid, int k,
                             const AcPipelineConfig& base, bool graphics_as_text = false) {
    return kfold_tune_impl(corpus.size(), grid, k, base.seed,
                           [&](const AcThresholds& th, std::size_t i) {
                               AcPipelineConfig cfg = base;
                               cfg.thresholds = th;
                               const auto result =
                                   run_ac_pipeline(to_luminance(corpus[i].image), cfg);
                               return score(result, corpus[i].truth, graphics_as_text).accuracy;
                           });
}

inline TuneResult kfold_tune(const std::vector<CorpusPage>& corpus,
                             const std::vector<HistThresholds>& grid, int k,
                             const HistPipelineConfig& base, std::uint64_t seed,
                             bool graphics_as_text = false) {
    return kfold_tune_impl(corpus.size(), grid, k, seed,
                           [&](const HistThresholds& th, std::size_t i) {
                               HistPipelineConfig cfg = base;
                               cfg.thresholds = th;
                               const auto result =
                                   run_hist_pipeline(to_luminance(corpus[i].image), cfg);
                               return score(result, corpus[i].truth, graphics_as_text).accuracy;
                           });
}

// ---------------------------------------------------------------------------
// Timing benchmark and the category comparison table
// ---------------------------------------------------------------------------

struct BenchmarkReport {
    int repetitions = 0;
    double ac_median_seconds = 0;
    double hist_median_seconds = 0;
    std::vector<double> ac_page_seconds;   // per-page median
    std::vector<double> hist_page_seconds; // per-page median
    bool hist_faster = false;

    nlohmann::json to_json() const {
        return {{"repetitions", repetitions},
                {"ac_median_seconds", ac_median_seconds},
                {"hist_median_seconds", hist_median_seconds},
                {"expected_ordering", "hist < ac"},
                {"matches_expected", hist_faster}};
    }
};

namespace detail {

inline double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

} // namespace detail

/// Runs both pipelines repetitions times per page (serialized) and reports
/// the median segmentation wall time per page per pipeline.
inline BenchmarkReport benchmark(const std::vector<CorpusPage>& corpus,
                                 const AcPipelineConfig& ac, const HistPipelineConfig& hist,
                                 int repetitions) {
    if (repetitions < 3) throw ConfigError("benchmark needs at least 3 repetitions");
    if (corpus.empty()) throw ConfigError("benchmark needs a non-empty corpus");
    BenchmarkReport rep;
    rep.repetitions = repetitions;
    for (const auto& page : corpus) {
        const LumaImage luma = to_luminance(page.image);
        std::vector<double> ac_times, hist_times;
        for (int r = 0; r < repetitions; ++r)
            ac_times.push_back(run_ac_pipeline(luma, ac).total_seconds());
        for (int r = 0; r < repetitions; ++r)
            hist_times.push_back(run_hist_pipeline(luma, hist).total_seconds());
        rep.ac_page_seconds.push_back(detail::median(ac_times));
        rep.hist_page_seconds.push_back(detail::median(hist_times));
    }
    rep.ac_median_seconds = detail::median(rep.ac_page_seconds);
    rep.hist_median_seconds = detail::median(rep.hist_page_seconds);
    rep.hist_faster = rep.hist_median_seconds < rep.ac_median_seconds;
    return rep;
}

/// Accuracy / false positive / time rows for one corpus category.
struct CategoryResult {
    std::string name;
    Metrics ac;
    Metrics hist;
    double ac_time = 0;
    double hist_time = 0;
};

/// Aligned plain-text table: three metric rows, one column pair (AC,
/// histogram) per category.
inline std::string format_comparison_table(const std::vector<CategoryResult>& categories) {
    std::ostringstream out;
    const int name_w = 16, col_w = 11;
    auto num = [&](double v) {
        std::ostringstream s;
        s.setf(std::ios::fixed);
        s.precision(v < 1.0 ? 4 : 2);
        s << v;
        return s.str();
    };

    out << std::string(name_w, ' ');
    for (const auto& c : categories) {
        std::string name = c.name;
        const int span = 2 * col_w;
        if (static_cast<int>(name.size()) > span - 2) name = name.substr(0, span - 2);
        out << "| " << name << std::string(span - 2 - name.size(), ' ');
    }
    out << "\n" << std::string(name_w, ' ');
    for (std::size_t i = 0; i < categories.size(); ++i) {
        out << "| ac" << std::string(col_w - 4, ' ');
        out << "hist" << std::string(col_w - 4, ' ');
    }
    out << "\n";

    const auto row = [&](const std::string& label, auto getter) {
        out << label << std::string(name_w - label.size(), ' ');
        for (const auto& c : categories) {
            const auto [a, h] = getter(c);
            std::string sa = num(a), sh = num(h);
            out << "| " << sa << std::string(col_w - 2 - sa.size(), ' ');
            out << sh << std::string(col_w - sh.size(), ' ');
        }
        out << "\n";
    };
    row("Accuracy", [](const CategoryResult& c) { return std::pair(c.ac.accuracy, c.hist.accuracy); });
    row("False positive",
        [](const CategoryResult& c) { return std::pair(c.ac.false_positive, c.hist.false_positive); });
    row("Time (seconds)", [](const CategoryResult& c) { return std::pair(c.ac_time, c.hist_time); });
    return out.str();
}

inline nlohmann::json comparison_report_json(const std::vector<CategoryResult>& categories) {
    nlohmann::json j;
    auto& arr = j["categories"] = nlohmann::json::array();
    for (const auto& c : categories)
        arr.push_back({{"name", c.name},
                       {"ac", c.ac.to_json()},
                       {"hist", c.hist.to_json()},
                       {"ac_time_seconds", c.ac_time},
                       {"hist_time_seconds", c.hist_time}});
    return j;
}

} // namespace docseg
