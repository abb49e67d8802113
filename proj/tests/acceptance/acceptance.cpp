// Acceptance suite: runs every gate end to end and prints one PASS/FAIL line
// per criterion. Exit code is the number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <docseg/docseg.hpp>

#include "../testutil.hpp"

using namespace docseg;

namespace {

int g_failures = 0;

void report(int id, const std::string& name, bool pass, const std::string& detail = "") {
    std::printf("[%s] %2d  %-34s %s\n", pass ? "PASS" : "FAIL", id, name.c_str(),
                detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// --- criterion 1 & 2: DCT against the direct definition, energy identity ---

void dct_criteria() {
    std::mt19937_64 rng(20240811);
    bool match = true, parseval = true;
    double max_err = 0;

    const auto t0 = std::chrono::steady_clock::now();
    std::vector<std::array<double, 64>> tiles(1000);
    for (auto& t : tiles) t = testutil::random_tile(rng);
    std::vector<DctCoeffs> cs(1000);
    for (int i = 0; i < 1000; ++i) cs[i] = block_dct8(std::span<const double>(tiles[i]));
    const double lib_time = seconds_since(t0);

    for (int i = 0; i < 1000; ++i) {
        const auto ref = testutil::dct2_reference(tiles[i]);
        for (int k = 0; k < 64; ++k) {
            const double err = std::abs(cs[i].zz[k] - ref[testutil::kZigzagReference[k]]);
            max_err = std::max(max_err, err);
            if (err > 1e-9) match = false;
        }
        const double expect = 64.0 * testutil::population_variance(tiles[i]);
        const double got = ac_energy(cs[i]);
        if (std::abs(got - expect) > 1e-6 * std::max(1.0, std::abs(expect)))
            parseval = false;
    }

    std::ostringstream d1;
    d1 << "1000 tiles, max |err| " << max_err << ", transform time " << lib_time << "s";
    report(1, "dct-vs-direct-definition", match && lib_time < 1.0, d1.str());
    report(2, "ac-energy-variance-identity", parseval, "1000 tiles, 1e-6 relative");
}

// --- criterion 3: piecewise encoding-length terms and the weighted norm ---

void feature_constants_criterion() {
    const bool f_ok = encoding_length_term(0) == 0.0 && encoding_length_term(1) == 0.0 &&
                      encoding_length_term(-1) == 0.0 && encoding_length_term(2) == 5.0 &&
                      encoding_length_term(-8) == 7.0;
    const bool norm_ok =
        std::abs(weighted_norm({3, 4}) - std::sqrt(249.0)) <= 1e-12;
    report(3, "piecewise-f-and-weighted-norm", f_ok && norm_ok,
           "f(0)=f(+-1)=0, f(2)=5, f(-8)=7, |(3,4)| = sqrt(249)");
}

// --- criterion 4: two-color exactness on two-tone and constant tiles ---

void two_color_criterion() {
    std::mt19937_64 rng(77);
    std::uniform_int_distribution<int> val(0, 255);
    bool ok = true;
    for (int trial = 0; trial < 2000; ++trial) {
        int a = val(rng), b = val(rng);
        if (a == b) b = (a + 1) % 256;
        std::array<std::uint8_t, 64> tile{};
        for (auto& v : tile) v = static_cast<std::uint8_t>(val(rng) % 2 ? a : b);
        tile[0] = static_cast<std::uint8_t>(a);
        tile[1] = static_cast<std::uint8_t>(b);
        const auto p = two_color_project(tile);
        if (feature_d2(tile, p) != 0.0) ok = false;
    }
    for (int v : {0, 17, 128, 255}) {
        std::array<std::uint8_t, 64> tile{};
        tile.fill(static_cast<std::uint8_t>(v));
        const auto p = two_color_project(tile);
        if (p.theta1 != p.theta2 || p.theta1 != v || feature_d2(tile, p) != 0.0) ok = false;
    }
    report(4, "two-color-exactness", ok, "2000 two-tone tiles d2 == 0, constants degenerate");
}

// --- criterion 5: the four worked decision-rule examples ---

void decision_rule_criterion() {
    const HistThresholds th{30, 45, 70, 0.05, 4};
    const auto modes = [](std::initializer_list<double> percents) {
        std::vector<Mode> out;
        int i = 0;
        for (double p : percents) out.push_back({i += 30, p / 100.0, 4});
        return out;
    };
    const bool ok = apply_decision_rules(modes({100}), th) == BlockLabel::Background &&
                    apply_decision_rules(modes({90, 10}), th) == BlockLabel::Text &&
                    apply_decision_rules(modes({60, 40}), th) == BlockLabel::Graphics &&
                    apply_decision_rules({}, th) == BlockLabel::Picture;
    report(5, "histogram-rule-table", ok,
           "100->bg, 90/10->text, 60/40->graphics, none->picture");
}

// --- criterion 6: literal gradient-rule traces ---

void gradient_criterion() {
    const GradientThresholds th{50, 45, 10, 4, 8, 64};
    std::vector<std::uint8_t> constant(256, 120);
    std::vector<std::uint8_t> checker(256), ramp(256);
    for (int y = 0; y < 16; ++y)
        for (int x = 0; x < 16; ++x) {
            checker[y * 16 + x] = ((x + y) % 2) ? 255 : 0;
            ramp[y * 16 + x] = static_cast<std::uint8_t>(x * 16);
        }
    const bool ok = gradient_classify(constant, 16, th) == BlockLabel::Text &&
                    gradient_classify(checker, 16, th) == BlockLabel::Picture &&
                    gradient_classify(ramp, 16, th) == BlockLabel::Picture;
    report(6, "gradient-rule-traces", ok, "constant->text, checker->picture, ramp->picture");
}

// --- criterion 7: SMAP uniform-prior reduction + GMM monotonicity ---

void smap_gmm_criterion() {
    std::mt19937_64 rng(909);
    std::uniform_real_distribution<double> ll(-12.0, 0.0);
    std::uniform_real_distribution<double> hole(0.0, 1.0);

    bool ml_ok = true;
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<std::optional<std::array<double, 2>>> grid(64);
        for (auto& cell : grid)
            if (hole(rng) >= 0.2) cell = std::array<double, 2>{ll(rng), ll(rng)};
        SmapParams p;
        p.levels = 3;
        p.theta_init = 0.5;
        p.estimate_theta = false;
        const LabelPyramid pyr = smap_label(8, 8, grid, p);
        for (int i = 0; i < 64; ++i) {
            if (!grid[i]) {
                if (pyr.levels[0].labels[i].has_value()) ml_ok = false;
                continue;
            }
            const int ml = (*grid[i])[1] > (*grid[i])[0] ? 1 : 0;
            if (!pyr.levels[0].labels[i] || *pyr.levels[0].labels[i] != ml) ml_ok = false;
        }
    }

    bool mono_ok = true;
    std::uniform_real_distribution<double> f(0.0, 6.0);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<FeatureVector> fs;
        const int n = 10 + trial * 5;
        for (int i = 0; i < n; ++i) fs.push_back({f(rng), f(rng)});
        const GmmModel m = fit_gmm(fs, 2, trial);
        for (std::size_t i = 1; i < m.ll_trace.size(); ++i)
            if (m.ll_trace[i] < m.ll_trace[i - 1]) mono_ok = false;
    }
    report(7, "smap-ml-reduction-gmm-monotone", ml_ok && mono_ok,
           "100 uniform-prior grids, 50 EM traces");
}

// --- criteria 8, 9, 11: corpus accuracy after tuning, timing trend, metric arithmetic ---

bool corpus_criteria(std::chrono::steady_clock::time_point suite_start) {
    const auto corpus = make_corpus(100, 20240811);

    AcPipelineConfig ac_base;
    HistPipelineConfig hist_base;

    const TuneResult ac_tuned = kfold_tune(corpus, default_ac_grid(), 10, ac_base);
    const TuneResult hist_tuned = kfold_tune(corpus, default_hist_grid(), 10, hist_base, 0);

    AcPipelineConfig ac_cfg = ac_base;
    ac_cfg.thresholds.t1 = ac_tuned.best_thresholds["t1"].get<double>();
    ac_cfg.thresholds.t2 = ac_tuned.best_thresholds["t2"].get<double>();
    HistPipelineConfig hist_cfg = hist_base;
    hist_cfg.thresholds.t1 = hist_tuned.best_thresholds["t1"].get<double>();
    hist_cfg.thresholds.t2 = hist_tuned.best_thresholds["t2"].get<double>();

    bool accuracy_ok = true, metrics_ok = true;
    std::ostringstream accuracy_detail;
    std::array<double, 4> ac_acc{}, hist_acc{};
    std::array<int, 4> count{};
    const auto rep = benchmark(corpus, ac_cfg, hist_cfg, 3);

    std::array<std::vector<double>, 4> ac_times, hist_times;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        const auto& page = corpus[i];
        const LumaImage luma = to_luminance(page.image);
        const auto ra = run_ac_pipeline(luma, ac_cfg);
        const auto rh = run_hist_pipeline(luma, hist_cfg);
        const Metrics ma = score(ra, page.truth);
        const Metrics mh = score(rh, page.truth);
        if (std::abs(ma.accuracy + ma.false_positive - 100.0) > 1e-9) metrics_ok = false;
        if (std::abs(mh.accuracy + mh.false_positive - 100.0) > 1e-9) metrics_ok = false;
        ac_acc[page.category] += ma.accuracy;
        hist_acc[page.category] += mh.accuracy;
        count[page.category]++;
        ac_times[page.category].push_back(rep.ac_page_seconds[i]);
        hist_times[page.category].push_back(rep.hist_page_seconds[i]);
    }

    std::vector<CategoryResult> table_rows;
    for (int c = 0; c < 4; ++c) {
        ac_acc[c] /= count[c];
        hist_acc[c] /= count[c];
        if (ac_acc[c] < 85.0 || hist_acc[c] < 85.0) accuracy_ok = false;
        accuracy_detail << "cat" << c << " " << std::round(ac_acc[c] * 100) / 100 << "/"
                        << std::round(hist_acc[c] * 100) / 100 << "  ";
        CategoryResult row;
        row.name = corpus_category_names()[c];
        row.ac.accuracy = ac_acc[c];
        row.ac.false_positive = 100.0 - ac_acc[c];
        row.hist.accuracy = hist_acc[c];
        row.hist.false_positive = 100.0 - hist_acc[c];
        std::sort(ac_times[c].begin(), ac_times[c].end());
        std::sort(hist_times[c].begin(), hist_times[c].end());
        row.ac_time = ac_times[c][ac_times[c].size() / 2];
        row.hist_time = hist_times[c][hist_times[c].size() / 2];
        table_rows.push_back(row);
    }

    const double elapsed = seconds_since(suite_start);
    std::ostringstream d8;
    d8 << accuracy_detail.str() << "(" << elapsed << "s elapsed)";
    report(8, "corpus-accuracy-after-tuning", accuracy_ok && elapsed < 300.0, d8.str());

    const std::string table = format_comparison_table(table_rows);
    std::ofstream("acceptance_table.txt") << table;
    std::cout << table;
    std::ostringstream d9;
    d9 << "hist " << rep.hist_median_seconds << "s vs ac " << rep.ac_median_seconds << "s";
    report(9, "hist-faster-than-ac", rep.hist_faster, d9.str());
    return metrics_ok;
}

// --- criterion 10: determinism across runs and worker counts ---

std::string run_fingerprint(const LumaImage& luma, const AcPipelineConfig& ac_cfg,
                            const HistPipelineConfig& hist_cfg) {
    const auto ra = run_ac_pipeline(luma, ac_cfg);
    const auto rh = run_hist_pipeline(luma, hist_cfg);
    const auto mask = text_mask(rh.labels, false, luma.width, luma.height);
    const auto regions = extract_regions(rh.labels, false, luma.width, luma.height);
    std::ostringstream s;
    s << label_map_to_json(ra.labels).dump() << label_map_to_json(rh.labels).dump();
    for (auto b : mask.bits) s << static_cast<int>(b);
    s << regions_to_json(regions).dump();
    return s.str();
}

void determinism_criterion() {
    SyntheticSpec spec;
    spec.with_figures = true;
    spec.layout = PageLayout::DoubleColumn;
    spec.seed = 1001;
    const auto page = generate_synthetic(spec);
    const LumaImage luma = to_luminance(page.first);
    AcPipelineConfig ac_cfg;
    ac_cfg.seed = 13;
    HistPipelineConfig hist_cfg;

    setenv("DOCSEG_THREADS", "1", 1);
    const std::string one_a = run_fingerprint(luma, ac_cfg, hist_cfg);
    const std::string one_b = run_fingerprint(luma, ac_cfg, hist_cfg);
    setenv("DOCSEG_THREADS", "4", 1);
    const std::string four = run_fingerprint(luma, ac_cfg, hist_cfg);
    unsetenv("DOCSEG_THREADS");
    const std::string any = run_fingerprint(luma, ac_cfg, hist_cfg);

    const bool ok = one_a == one_b && one_a == four && one_a == any;
    report(10, "bit-identical-determinism", ok, "two runs, 1 vs 4 workers");
}

} // namespace

int main() {
    const auto t0 = std::chrono::steady_clock::now();
    dct_criteria();
    feature_constants_criterion();
    two_color_criterion();
    decision_rule_criterion();
    gradient_criterion();
    smap_gmm_criterion();
    determinism_criterion();
    corpus_criteria(t0);
    std::printf("%s (%d criteria failed, %.1fs total)\n",
                g_failures == 0 ? "ACCEPTANCE PASSED" : "ACCEPTANCE FAILED", g_failures,
                seconds_since(t0));
    return g_failures;
}
