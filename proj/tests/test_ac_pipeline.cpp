#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <random>

#include <docseg/ac_pipeline.hpp>
#include <docseg/synthetic.hpp>
#include <docseg/metrics.hpp>

#include "testutil.hpp"

using namespace docseg;

namespace {

LumaImage constant_page(int w, int h, std::uint8_t v) {
    LumaImage img;
    img.width = w;
    img.height = h;
    img.data.assign(static_cast<std::size_t>(w) * h, v);
    return img;
}

/// Exhaustive best 2-partition of a small feature set under the weighted
/// norm, by SSE over all 2^(n-1) assignments.
std::array<FeatureVector, 2> best_two_partition(const std::vector<FeatureVector>& fs,
                                                double gamma) {
    const int n = static_cast<int>(fs.size());
    double best_sse = std::numeric_limits<double>::infinity();
    std::array<FeatureVector, 2> best{};
    for (unsigned mask = 1; mask < (1u << (n - 1)); ++mask) {
        double s1a = 0, s2a = 0, s1b = 0, s2b = 0;
        int na = 0, nb = 0;
        for (int i = 0; i < n; ++i) {
            if (i > 0 && (mask >> (i - 1)) & 1) {
                s1b += fs[i].d1;
                s2b += fs[i].d2;
                ++nb;
            } else {
                s1a += fs[i].d1;
                s2a += fs[i].d2;
                ++na;
            }
        }
        if (na == 0 || nb == 0) continue;
        const FeatureVector ma{s1a / na, s2a / na}, mb{s1b / nb, s2b / nb};
        double sse = 0;
        for (int i = 0; i < n; ++i) {
            const bool in_b = i > 0 && ((mask >> (i - 1)) & 1);
            const double d = weighted_distance(fs[i], in_b ? mb : ma, gamma);
            sse += d * d;
        }
        if (sse < best_sse) {
            best_sse = sse;
            best = {ma, mb};
        }
    }
    if (best[0].d1 > best[1].d1) std::swap(best[0], best[1]);
    return best;
}

} // namespace

TEST_CASE("classify_smoothness") {
    const AcThresholds th{20, 70, 15};

    SECTION("constant image is all smooth") {
        const std::vector<double> e(9, 0.0);
        for (auto s : classify_smoothness(e, 3, 3, th)) CHECK(s == Smoothness::Smooth);
    }
    SECTION("checkerboard energy is far beyond t2") {
        std::array<std::uint8_t, 64> tile{};
        for (int y = 0; y < 8; ++y)
            for (int x = 0; x < 8; ++x) tile[y * 8 + x] = ((x + y) % 2) ? 255 : 0;
        const double e = ac_energy(block_dct8(tile));
        CHECK_THAT(e, Catch::Matchers::WithinRel(64.0 * 127.5 * 127.5, 1e-6));
        const std::vector<double> grid{e};
        CHECK(classify_smoothness(grid, 1, 1, th)[0] == Smoothness::NonSmooth);
    }
    SECTION("band block takes the neighborhood majority") {
        std::vector<double> e(9, 0.0);
        e[4] = 50.0; // center in [t1, t2), all 8 neighbors smooth
        CHECK(classify_smoothness(e, 3, 3, th)[4] == Smoothness::Smooth);

        std::vector<double> e2(9, 100.0);
        e2[4] = 50.0; // all neighbors non-smooth
        CHECK(classify_smoothness(e2, 3, 3, th)[4] == Smoothness::NonSmooth);
    }
    SECTION("band ties resolve to non-smooth") {
        //  smooth | band | non-smooth in a row: one vote each
        const std::vector<double> e{0.0, 50.0, 100.0};
        CHECK(classify_smoothness(e, 1, 3, th)[1] == Smoothness::NonSmooth);
        // isolated band block with no decided neighbor
        const std::vector<double> lone{50.0};
        CHECK(classify_smoothness(lone, 1, 1, th)[0] == Smoothness::NonSmooth);
    }
    SECTION("empty grid throws") {
        CHECK_THROWS_AS(classify_smoothness({}, 0, 0, th), GeometryError);
    }
    SECTION("raising t1 never shrinks the smooth set") {
        std::mt19937_64 rng(11);
        std::uniform_real_distribution<double> d(0.0, 150.0);
        std::vector<double> e(64);
        for (auto& v : e) v = d(rng);
        AcThresholds lo{20, 70, 15}, hi{45, 70, 15};
        const auto a = classify_smoothness(e, 8, 8, lo);
        const auto b = classify_smoothness(e, 8, 8, hi);
        for (int i = 0; i < 64; ++i)
            if (a[i] == Smoothness::Smooth) CHECK(b[i] == Smoothness::Smooth);
    }
}

TEST_CASE("kmeans_features") {
    SECTION("perfectly separated points") {
        std::vector<FeatureVector> fs;
        for (int i = 0; i < 5; ++i) fs.push_back({0, 0});
        for (int i = 0; i < 5; ++i) fs.push_back({10, 0});
        const ClusterModel cm = kmeans_features(fs, 15.0, 1);
        CHECK_FALSE(cm.degenerate);
        const double lo = std::min(cm.mean_d1(0), cm.mean_d1(1));
        const double hi = std::max(cm.mean_d1(0), cm.mean_d1(1));
        CHECK(lo == 0.0);
        CHECK(hi == 10.0);
    }
    SECTION("identical features give a degenerate model") {
        const std::vector<FeatureVector> fs(6, FeatureVector{3, 0.5});
        const ClusterModel cm = kmeans_features(fs, 15.0, 1);
        CHECK(cm.degenerate);
        CHECK(cm.member_ids[0].size() == 6);
    }
    SECTION("fewer than two vectors give a degenerate model") {
        CHECK(kmeans_features({}, 15.0, 1).degenerate);
        CHECK(kmeans_features({FeatureVector{1, 1}}, 15.0, 1).degenerate);
    }
    SECTION("two Gaussian blobs: centroids match the exhaustive oracle") {
        std::mt19937_64 rng(4242);
        std::normal_distribution<double> n(0.0, 0.1);
        std::vector<FeatureVector> fs;
        for (int i = 0; i < 10; ++i) fs.push_back({1 + n(rng), 0.1 + n(rng)});
        for (int i = 0; i < 10; ++i) fs.push_back({6 + n(rng), 0.9 + n(rng)});
        const auto oracle = best_two_partition(fs, 15.0);
        const ClusterModel cm = kmeans_features(fs, 15.0, 9);
        FeatureVector lo = cm.centroids[0], hi = cm.centroids[1];
        if (lo.d1 > hi.d1) std::swap(lo, hi);
        CHECK_THAT(lo.d1, Catch::Matchers::WithinAbs(oracle[0].d1, 1e-9));
        CHECK_THAT(hi.d1, Catch::Matchers::WithinAbs(oracle[1].d1, 1e-9));
        CHECK_THAT(lo.d2, Catch::Matchers::WithinAbs(oracle[0].d2, 1e-9));
        CHECK_THAT(hi.d2, Catch::Matchers::WithinAbs(oracle[1].d2, 1e-9));
        CHECK(std::abs(lo.d1 - 1.0) < 0.2);
        CHECK(std::abs(hi.d1 - 6.0) < 0.2);
    }
    SECTION("converged assignment is a fixpoint") {
        std::mt19937_64 rng(77);
        std::uniform_real_distribution<double> d(0.0, 10.0);
        std::vector<FeatureVector> fs;
        for (int i = 0; i < 40; ++i) fs.push_back({d(rng), d(rng)});
        const ClusterModel cm = kmeans_features(fs, 15.0, 3);
        for (int k = 0; k < 2; ++k) {
            double s1 = 0, s2 = 0;
            for (int idx : cm.member_ids[k]) {
                const double dk = weighted_distance(fs[idx], cm.centroids[k], 15.0);
                const double dother = weighted_distance(fs[idx], cm.centroids[1 - k], 15.0);
                CHECK(dk <= dother + 1e-12);
                s1 += fs[idx].d1;
                s2 += fs[idx].d2;
            }
            const auto n = static_cast<double>(cm.member_ids[k].size());
            REQUIRE(n > 0);
            CHECK_THAT(cm.centroids[k].d1, Catch::Matchers::WithinAbs(s1 / n, 1e-9));
            CHECK_THAT(cm.centroids[k].d2, Catch::Matchers::WithinAbs(s2 / n, 1e-9));
        }
    }
}

TEST_CASE("assign_text_picture") {
    SECTION("dominant cluster (higher d1, lower d2) is text") {
        ClusterModel cm;
        cm.centroids = {FeatureVector{8, 0.2}, FeatureVector{3, 5.0}};
        const auto l = assign_text_picture(cm);
        CHECK(l[0] == BlockLabel::Text);
        CHECK(l[1] == BlockLabel::Picture);
    }
    SECTION("disagreeing orderings fall back to d1/(1+d2)") {
        ClusterModel cm;
        cm.centroids = {FeatureVector{8, 5.0}, FeatureVector{3, 0.2}};
        // scores: 8/6 = 1.33 vs 3/1.2 = 2.5
        const auto l = assign_text_picture(cm);
        CHECK(l[0] == BlockLabel::Picture);
        CHECK(l[1] == BlockLabel::Text);
    }
    SECTION("degenerate model labels by mean d2") {
        ClusterModel cm;
        cm.degenerate = true;
        cm.centroids[0] = {4, 0.0};
        CHECK(assign_text_picture(cm)[0] == BlockLabel::Text);
        cm.centroids[0] = {4, 3.0};
        CHECK(assign_text_picture(cm)[0] == BlockLabel::Picture);
    }
}

TEST_CASE("run_ac_pipeline") {
    SECTION("constant white page is all background") {
        const LumaImage img = constant_page(64, 64, 255);
        const auto r = run_ac_pipeline(img, AcThresholds{}, true, 0);
        for (auto l : r.labels.labels) CHECK(l == BlockLabel::Background);
        CHECK(r.labels.block_size == 8);
    }
    SECTION("blank page: refine on equals refine off") {
        const LumaImage img = constant_page(64, 64, 200);
        const auto on = run_ac_pipeline(img, AcThresholds{}, true, 0);
        const auto off = run_ac_pipeline(img, AcThresholds{}, false, 0);
        CHECK(on.labels.labels == off.labels.labels);
    }
    SECTION("never emits Graphics; config snapshot present") {
        SyntheticSpec spec;
        spec.with_figures = true;
        spec.seed = 3;
        const auto [img, truth] = generate_synthetic(spec);
        const auto r = run_ac_pipeline(to_luminance(img), AcPipelineConfig{});
        for (auto l : r.labels.labels) CHECK(l != BlockLabel::Graphics);
        CHECK(r.config.contains("ac"));
        CHECK(r.features.size() == r.labels.labels.size());
    }
    SECTION("mixed synthetic page beats 85% block accuracy") {
        SyntheticSpec spec;
        spec.with_figures = true;
        spec.seed = 11;
        const auto [img, truth] = generate_synthetic(spec);
        const auto r = run_ac_pipeline(to_luminance(img), AcPipelineConfig{});
        CHECK(score(r, truth).accuracy >= 85.0);
    }
    SECTION("adding a constant to all luminances keeps the background split") {
        SyntheticSpec spec;
        spec.seed = 19;
        spec.text_contrast = 100;
        auto [img, truth] = generate_synthetic(spec);
        LumaImage a = to_luminance(img);
        LumaImage b = a;
        for (auto& v : b.data)
            v = static_cast<std::uint8_t>(std::min(255, v + 10)); // no clipping: bg <= 245
        AcPipelineConfig cfg;
        cfg.refine = false;
        const auto ra = run_ac_pipeline(a, cfg);
        const auto rb = run_ac_pipeline(b, cfg);
        for (std::size_t i = 0; i < ra.labels.labels.size(); ++i)
            CHECK((ra.labels.labels[i] == BlockLabel::Background) ==
                  (rb.labels.labels[i] == BlockLabel::Background));
    }
    SECTION("deterministic across runs and worker counts") {
        SyntheticSpec spec;
        spec.with_figures = true;
        spec.seed = 23;
        const auto [img, truth] = generate_synthetic(spec);
        const LumaImage luma = to_luminance(img);
        AcPipelineConfig cfg;
        cfg.seed = 5;

        setenv("DOCSEG_THREADS", "1", 1);
        const auto r1 = run_ac_pipeline(luma, cfg);
        setenv("DOCSEG_THREADS", "4", 1);
        const auto r2 = run_ac_pipeline(luma, cfg);
        unsetenv("DOCSEG_THREADS");
        const auto r3 = run_ac_pipeline(luma, cfg);

        CHECK(r1.labels.labels == r2.labels.labels);
        CHECK(r1.labels.labels == r3.labels.labels);
        for (std::size_t i = 0; i < r1.features.size(); ++i) {
            CHECK(r1.features[i].d1 == r2.features[i].d1);
            CHECK(r1.features[i].d2 == r2.features[i].d2);
        }
    }
}
