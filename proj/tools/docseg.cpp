// docseg: block segmentation and text extraction for raster page images.
//
// Subcommands: segment, extract, compare, synth, tune, bench.
// Exit codes: 0 success, 2 unreadable/invalid input, 3 invalid configuration.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <docseg/docseg.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void write_text_atomic(const fs::path& path, const std::string& text) {
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw docseg::IOError("cannot write: " + path.string());
        out << text;
    }
    fs::rename(tmp, path);
}

void write_json_atomic(const fs::path& path, const json& j) {
    write_text_atomic(path, j.dump(2) + "\n");
}

docseg::RasterImage truth_to_image(const docseg::GroundTruth& t) {
    docseg::RasterImage img;
    img.width = t.width;
    img.height = t.height;
    img.channels = 1;
    img.data.resize(t.pixels.size());
    for (std::size_t i = 0; i < t.pixels.size(); ++i)
        img.data[i] = static_cast<std::uint8_t>(t.pixels[i]);
    return img;
}

docseg::GroundTruth truth_from_image(const docseg::RasterImage& img) {
    if (img.channels != 1) throw docseg::FormatError("truth image must be single-channel");
    docseg::GroundTruth t;
    t.width = img.width;
    t.height = img.height;
    t.pixels.resize(img.data.size());
    for (std::size_t i = 0; i < img.data.size(); ++i) {
        const int v = img.data[i];
        if (v != 0 && v != 1 && v != 2 && v != 3)
            throw docseg::FormatError("truth image pixel out of label range");
        t.pixels[i] = static_cast<docseg::BlockLabel>(v);
    }
    return t;
}

struct Flags {
    std::string pipeline = "hist";
    std::string config_path;
    std::string out_dir = ".";
    std::uint64_t seed = 0;
    bool seed_set = false;
    bool overlay = false;
    bool refine = false;
    bool no_refine = false;
    bool include_graphics = false;
    bool include_graphics_set = false;
    int block_size = 0; // 0: per-pipeline default
    bool dump_features = false;
};

docseg::Config resolve_config(const Flags& f) {
    docseg::Config cfg;
    if (!f.config_path.empty()) cfg = docseg::Config::from_file(f.config_path);
    if (f.seed_set) cfg.seed = f.seed;
    if (f.refine) cfg.ac_refine = true;
    if (f.no_refine) cfg.ac_refine = false;
    if (f.include_graphics_set) cfg.include_graphics = f.include_graphics;
    if (f.block_size > 0) cfg.hist_block_size = f.block_size;
    cfg.validate();
    return cfg;
}

docseg::SegmentationResult run_pipeline(const docseg::LumaImage& luma, const std::string& which,
                                        const docseg::Config& cfg) {
    if (which == "ac") return docseg::run_ac_pipeline(luma, cfg.ac_config());
    if (which == "hist") return docseg::run_hist_pipeline(luma, cfg.hist_config());
    throw docseg::ConfigError("unknown pipeline: " + which);
}

void print_label_summary(const docseg::LabelMap& m) {
    std::array<int, 4> counts{};
    for (auto l : m.labels) counts[static_cast<int>(l)]++;
    std::cout << m.rows << "x" << m.cols << " blocks of " << m.block_size
              << "px: background=" << counts[0] << " text=" << counts[1]
              << " graphics=" << counts[2] << " picture=" << counts[3] << "\n";
}

int cmd_segment(const std::string& input, const Flags& flags) {
    const docseg::Config cfg = resolve_config(flags);
    const auto img = docseg::load_image(input);
    const auto luma = docseg::to_luminance(img);
    const auto result = run_pipeline(luma, flags.pipeline, cfg);

    fs::create_directories(flags.out_dir);
    write_json_atomic(fs::path(flags.out_dir) / "labels.json",
                      docseg::label_map_to_json(result.labels));
    json rj = result.to_json(flags.dump_features);
    rj["config"] = cfg.to_json(); // full resolved snapshot for replay
    rj["config"]["pipeline"] = flags.pipeline;
    write_json_atomic(fs::path(flags.out_dir) / "result.json", rj);
    if (flags.overlay)
        docseg::save_image(docseg::render_overlay(luma, result.labels),
                           fs::path(flags.out_dir) / "overlay.png");
    print_label_summary(result.labels);
    return 0;
}

int cmd_extract(const std::string& input, const Flags& flags, const std::string& format) {
    const docseg::Config cfg = resolve_config(flags);
    const auto img = docseg::load_image(input);
    const auto luma = docseg::to_luminance(img);
    const auto result = run_pipeline(luma, flags.pipeline, cfg);

    const auto regions = docseg::extract_regions(result.labels, cfg.include_graphics,
                                                 luma.width, luma.height);
    const auto mask = docseg::text_mask(result.labels, cfg.include_graphics, luma.width,
                                        luma.height);
    fs::create_directories(flags.out_dir);
    docseg::RasterImage mask_img;
    mask_img.width = mask.width;
    mask_img.height = mask.height;
    mask_img.channels = 1;
    mask_img.data.resize(mask.bits.size());
    for (std::size_t i = 0; i < mask.bits.size(); ++i) mask_img.data[i] = mask.bits[i] ? 255 : 0;
    docseg::save_image(mask_img, fs::path(flags.out_dir) / "mask.pgm");
    docseg::export_regions(img, regions, flags.out_dir, format);
    write_json_atomic(fs::path(flags.out_dir) / "labels.json",
                      docseg::label_map_to_json(result.labels));
    std::cout << regions.size() << " text region(s) -> " << flags.out_dir << "\n";
    return 0;
}

int cmd_compare(const std::string& input, const Flags& flags) {
    const docseg::Config cfg = resolve_config(flags);
    const auto img = docseg::load_image(input);
    const auto luma = docseg::to_luminance(img);
    const auto ac = docseg::run_ac_pipeline(luma, cfg.ac_config());
    const auto hist = docseg::run_hist_pipeline(luma, cfg.hist_config());

    if (hist.labels.block_size % ac.labels.block_size != 0)
        throw docseg::ConfigError("hist block size must be a multiple of the AC block size");
    const int factor = hist.labels.block_size / ac.labels.block_size;
    const auto ac_coarse = docseg::downsample_majority(ac.labels, factor);

    std::size_t agree = 0;
    for (std::size_t i = 0; i < hist.labels.labels.size(); ++i) {
        docseg::BlockLabel h = hist.labels.labels[i];
        if (h == docseg::BlockLabel::Graphics)
            h = cfg.include_graphics ? docseg::BlockLabel::Text : docseg::BlockLabel::Picture;
        if (h == ac_coarse.labels[i]) ++agree;
    }
    const double agreement = 100.0 * static_cast<double>(agree) /
                             static_cast<double>(hist.labels.labels.size());

    json report;
    report["config"] = cfg.to_json();
    report["agreement_percent"] = agreement;
    report["agreement_block_size"] = hist.labels.block_size;
    report["ac"] = ac.to_json();
    report["hist"] = hist.to_json();
    fs::create_directories(flags.out_dir);
    write_json_atomic(fs::path(flags.out_dir) / "compare.json", report);
    write_json_atomic(fs::path(flags.out_dir) / "labels_ac.json",
                      docseg::label_map_to_json(ac.labels));
    write_json_atomic(fs::path(flags.out_dir) / "labels_hist.json",
                      docseg::label_map_to_json(hist.labels));
    std::cout << "agreement at " << hist.labels.block_size << "px blocks: " << agreement
              << "%  (ac " << ac.total_seconds() << "s, hist " << hist.total_seconds()
              << "s)\n";
    return 0;
}

int cmd_synth(const Flags& flags, int pages, int width, int height) {
    fs::create_directories(flags.out_dir);
    const auto corpus = docseg::make_corpus(pages, flags.seed, width, height);
    json manifest;
    manifest["seed"] = flags.seed;
    manifest["pages"] = json::array();
    char name[64];
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        const auto& page = corpus[i];
        std::snprintf(name, sizeof(name), "page_%03zu.pgm", i);
        const std::string image_name = name;
        std::snprintf(name, sizeof(name), "truth_%03zu.pgm", i);
        const std::string truth_name = name;
        docseg::save_image(page.image, fs::path(flags.out_dir) / image_name);
        docseg::save_image(truth_to_image(page.truth), fs::path(flags.out_dir) / truth_name);
        manifest["pages"].push_back(
            {{"id", i},
             {"image", image_name},
             {"truth", truth_name},
             {"category", docseg::corpus_category_names()[page.category]},
             {"layout", docseg::layout_name(page.spec.layout)},
             {"with_figures", page.spec.with_figures},
             {"width", page.spec.width},
             {"height", page.spec.height},
             {"text_contrast", page.spec.text_contrast},
             {"noise_sigma", page.spec.noise_sigma},
             {"page_seed", page.spec.seed}});
    }
    write_json_atomic(fs::path(flags.out_dir) / "manifest.json", manifest);
    std::cout << "wrote " << corpus.size() << " pages -> " << flags.out_dir << "\n";
    return 0;
}

std::vector<docseg::CorpusPage> load_corpus(const fs::path& manifest_path) {
    std::ifstream in(manifest_path);
    if (!in) throw docseg::IOError("cannot open manifest: " + manifest_path.string());
    json manifest;
    try {
        in >> manifest;
    } catch (const json::exception& e) {
        throw docseg::FormatError("manifest parse error: " + std::string(e.what()));
    }
    const fs::path dir = manifest_path.parent_path();
    std::vector<docseg::CorpusPage> corpus;
    for (const auto& p : manifest.at("pages")) {
        docseg::CorpusPage page;
        page.image = docseg::load_image(dir / p.at("image").get<std::string>());
        page.truth = truth_from_image(docseg::load_image(dir / p.at("truth").get<std::string>()));
        const std::string cat = p.at("category").get<std::string>();
        const auto& names = docseg::corpus_category_names();
        page.category =
            static_cast<int>(std::find(names.begin(), names.end(), cat) - names.begin());
        if (page.category >= 4) throw docseg::FormatError("unknown corpus category: " + cat);
        corpus.push_back(std::move(page));
    }
    if (corpus.empty()) throw docseg::FormatError("manifest lists no pages");
    return corpus;
}

int cmd_tune(const Flags& flags, const std::string& manifest, int folds) {
    const docseg::Config cfg = resolve_config(flags);
    const auto corpus = load_corpus(manifest);
    docseg::TuneResult result;
    if (flags.pipeline == "ac") {
        result = docseg::kfold_tune(corpus, docseg::default_ac_grid(cfg.ac.gamma), folds,
                                    cfg.ac_config(), cfg.include_graphics);
    } else if (flags.pipeline == "hist") {
        result = docseg::kfold_tune(corpus, docseg::default_hist_grid(), folds, cfg.hist_config(),
                                    cfg.seed, cfg.include_graphics);
    } else {
        throw docseg::ConfigError("unknown pipeline: " + flags.pipeline);
    }
    fs::create_directories(flags.out_dir);
    const fs::path out = fs::path(flags.out_dir) / ("tune_" + flags.pipeline + ".json");
    write_json_atomic(out, result.to_json());
    std::cout << flags.pipeline << " best " << result.best_thresholds.dump()
              << " mean accuracy " << result.best_mean_accuracy << " +- " << result.best_stddev
              << " -> " << out.string() << "\n";
    return 0;
}

int cmd_bench(const Flags& flags, const std::string& manifest, int repetitions) {
    const docseg::Config cfg = resolve_config(flags);
    const auto corpus = load_corpus(manifest);
    const auto report = docseg::benchmark(corpus, cfg.ac_config(), cfg.hist_config(), repetitions);

    // per-category accuracy/time rows for the comparison table
    std::vector<docseg::CategoryResult> categories;
    for (int c = 0; c < 4; ++c) {
        docseg::CategoryResult cat;
        cat.name = docseg::corpus_category_names()[c];
        int n = 0;
        std::vector<double> ac_times, hist_times;
        for (std::size_t i = 0; i < corpus.size(); ++i) {
            if (corpus[i].category != c) continue;
            const auto luma = docseg::to_luminance(corpus[i].image);
            const auto ra = docseg::run_ac_pipeline(luma, cfg.ac_config());
            const auto rh = docseg::run_hist_pipeline(luma, cfg.hist_config());
            const auto ma = docseg::score(ra, corpus[i].truth, cfg.include_graphics);
            const auto mh = docseg::score(rh, corpus[i].truth, cfg.include_graphics);
            cat.ac.accuracy += ma.accuracy;
            cat.hist.accuracy += mh.accuracy;
            cat.ac.per_class_fp += ma.per_class_fp;
            cat.hist.per_class_fp += mh.per_class_fp;
            ac_times.push_back(report.ac_page_seconds[i]);
            hist_times.push_back(report.hist_page_seconds[i]);
            ++n;
        }
        if (n == 0) continue;
        cat.ac.accuracy /= n;
        cat.hist.accuracy /= n;
        cat.ac.per_class_fp /= n;
        cat.hist.per_class_fp /= n;
        cat.ac.false_positive = 100.0 - cat.ac.accuracy;
        cat.hist.false_positive = 100.0 - cat.hist.accuracy;
        std::sort(ac_times.begin(), ac_times.end());
        std::sort(hist_times.begin(), hist_times.end());
        cat.ac_time = ac_times[ac_times.size() / 2];
        cat.hist_time = hist_times[hist_times.size() / 2];
        categories.push_back(std::move(cat));
    }

    json out = docseg::comparison_report_json(categories);
    out["benchmark"] = report.to_json();
    out["config"] = cfg.to_json();
    const std::string table = docseg::format_comparison_table(categories);
    fs::create_directories(flags.out_dir);
    write_json_atomic(fs::path(flags.out_dir) / "bench.json", out);
    write_text_atomic(fs::path(flags.out_dir) / "table.txt", table);
    std::cout << table;
    std::cout << "median seconds/page: ac " << report.ac_median_seconds << ", hist "
              << report.hist_median_seconds
              << (report.hist_faster ? "  (hist < ac)" : "  (hist >= ac)") << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Block-based page segmentation and text extraction"};
    app.require_subcommand(1);

    Flags flags;
    std::string input, format = ".pgm", manifest;
    int pages = 100, width = 512, height = 704, folds = 10, repetitions = 3;

    const auto add_common = [&](CLI::App* sub, bool with_pipeline = true) {
        if (with_pipeline)
            sub->add_option("--pipeline", flags.pipeline, "ac or hist")
                ->check(CLI::IsMember({"ac", "hist"}));
        sub->add_option("--config", flags.config_path, "JSON config file");
        sub->add_option("--out-dir", flags.out_dir, "output directory");
        sub->add_option("--seed", flags.seed, "RNG seed")
            ->each([&](const std::string&) { flags.seed_set = true; });
        sub->add_flag("--refine", flags.refine, "enable the AC refine stage");
        sub->add_flag("--no-refine", flags.no_refine, "disable the AC refine stage");
        sub->add_flag("--include-graphics{true}", flags.include_graphics,
                      "treat Graphics blocks as text")
            ->each([&](const std::string&) { flags.include_graphics_set = true; });
        sub->add_option("--block-size", flags.block_size, "histogram pipeline block size")
            ->check(CLI::PositiveNumber);
    };

    auto* segment = app.add_subcommand("segment", "segment one page image");
    segment->add_option("input", input, "page image (pgm/ppm/png)")->required();
    add_common(segment);
    segment->add_flag("--overlay", flags.overlay, "write a tinted overlay image");
    segment->add_flag("--features", flags.dump_features, "dump per-block [d1,d2] features");

    auto* extract = app.add_subcommand("extract", "extract text regions from one page");
    extract->add_option("input", input, "page image (pgm/ppm/png)")->required();
    add_common(extract);
    extract->add_option("--format", format, "region crop format: .pgm or .png")
        ->check(CLI::IsMember({".pgm", ".png"}));

    auto* compare = app.add_subcommand("compare", "run both pipelines and report agreement");
    compare->add_option("input", input, "page image (pgm/ppm/png)")->required();
    add_common(compare, false);

    auto* synth = app.add_subcommand("synth", "generate a ground-truthed synthetic corpus");
    add_common(synth, false);
    synth->add_option("--pages", pages, "number of pages")->check(CLI::PositiveNumber);
    synth->add_option("--width", width)->check(CLI::PositiveNumber);
    synth->add_option("--height", height)->check(CLI::PositiveNumber);

    auto* tune = app.add_subcommand("tune", "k-fold threshold selection on a corpus");
    tune->add_option("--corpus", manifest, "corpus manifest.json")->required();
    add_common(tune);
    tune->add_option("--folds", folds, "number of folds")->check(CLI::PositiveNumber);

    auto* bench = app.add_subcommand("bench", "timing + accuracy comparison on a corpus");
    bench->add_option("--corpus", manifest, "corpus manifest.json")->required();
    add_common(bench, false);
    bench->add_option("--repetitions", repetitions, "timing repetitions per page")
        ->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 3;
    }

    try {
        if (segment->parsed()) return cmd_segment(input, flags);
        if (extract->parsed()) return cmd_extract(input, flags, format);
        if (compare->parsed()) return cmd_compare(input, flags);
        if (synth->parsed()) return cmd_synth(flags, pages, width, height);
        if (tune->parsed()) return cmd_tune(flags, manifest, folds);
        if (bench->parsed()) return cmd_bench(flags, manifest, repetitions);
    } catch (const docseg::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 3;
    } catch (const docseg::IOError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const docseg::FormatError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const docseg::GeometryError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
