#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>

#include <nlohmann/json.hpp>

#include "docseg/ac_pipeline.hpp"
#include "docseg/errors.hpp"
#include "docseg/hist_pipeline.hpp"

namespace docseg {

/// Resolved run configuration: defaults, overridden by a JSON config file,
/// overridden by command-line flags. The snapshot of the fully resolved
/// config travels with every result so a run can be replayed exactly.
struct Config {
    std::uint64_t seed = 0;
    bool include_graphics = false;

    // ac.*
    AcThresholds ac{};
    bool ac_refine = true;
    bool ac_jpeg_quant = false;
    int ac_jpeg_quality = 75;

    // smap.*
    bool smap_enabled = true;
    int smap_components = 2;
    double smap_epsilon = 1e-3;
    double smap_theta_init = 0.5;

    // hist.* / grad.*
    HistThresholds hist{};
    bool hist_use_gradient = false;
    int hist_block_size = 16;
    GradientThresholds grad{};

    AcPipelineConfig ac_config() const {
        AcPipelineConfig c;
        c.thresholds = ac;
        c.refine = ac_refine && smap_enabled;
        c.jpeg_quant = ac_jpeg_quant;
        c.jpeg_quality = ac_jpeg_quality;
        c.seed = seed;
        c.gmm_components = smap_components;
        c.smap_epsilon = smap_epsilon;
        c.smap_theta_init = smap_theta_init;
        return c;
    }

    HistPipelineConfig hist_config() const {
        HistPipelineConfig c;
        c.thresholds = hist;
        c.gradient = grad;
        c.use_gradient = hist_use_gradient;
        c.block_size = hist_block_size;
        return c;
    }

    nlohmann::json to_json() const {
        return {
            {"seed", seed},
            {"include_graphics", include_graphics},
            {"ac",
             {{"t1", ac.t1},
              {"t2", ac.t2},
              {"gamma", ac.gamma},
              {"refine", ac_refine},
              {"jpeg_quant", ac_jpeg_quant},
              {"jpeg_quality", ac_jpeg_quality}}},
            {"smap",
             {{"enabled", smap_enabled},
              {"components", smap_components},
              {"epsilon", smap_epsilon},
              {"theta_init", smap_theta_init}}},
            {"hist",
             {{"t1", hist.t1},
              {"t2", hist.t2},
              {"t3", hist.t3},
              {"mode_t", hist.mode_t},
              {"a_window", hist.a_window},
              {"use_gradient", hist_use_gradient},
              {"block_size", hist_block_size}}},
            {"grad",
             {{"t1", grad.t1},
              {"t2", grad.t2},
              {"t3", grad.t3},
              {"t4", grad.t4},
              {"g_lo", grad.g_lo},
              {"g_hi", grad.g_hi}}},
        };
    }

    /// Merges a nested JSON object ({"ac": {"t1": ...}, ...}) over this
    /// config. Unknown keys and wrong types raise ConfigError.
    void apply_json(const nlohmann::json& j) {
        if (!j.is_object()) throw ConfigError("config must be a JSON object");
        for (const auto& [key, value] : j.items()) {
            if (key == "seed") {
                read(value, seed, "seed");
            } else if (key == "include_graphics") {
                read(value, include_graphics, "include_graphics");
            } else if (key == "ac") {
                section(value, "ac", [&](const std::string& k, const nlohmann::json& v) {
                    if (k == "t1") read(v, ac.t1, "ac.t1");
                    else if (k == "t2") read(v, ac.t2, "ac.t2");
                    else if (k == "gamma") read(v, ac.gamma, "ac.gamma");
                    else if (k == "refine") read(v, ac_refine, "ac.refine");
                    else if (k == "jpeg_quant") read(v, ac_jpeg_quant, "ac.jpeg_quant");
                    else if (k == "jpeg_quality") read(v, ac_jpeg_quality, "ac.jpeg_quality");
                    else throw ConfigError("unknown config key: ac." + k);
                });
            } else if (key == "smap") {
                section(value, "smap", [&](const std::string& k, const nlohmann::json& v) {
                    if (k == "enabled") read(v, smap_enabled, "smap.enabled");
                    else if (k == "components") read(v, smap_components, "smap.components");
                    else if (k == "epsilon") read(v, smap_epsilon, "smap.epsilon");
                    else if (k == "theta_init") read(v, smap_theta_init, "smap.theta_init");
                    else throw ConfigError("unknown config key: smap." + k);
                });
            } else if (key == "hist") {
                section(value, "hist", [&](const std::string& k, const nlohmann::json& v) {
                    if (k == "t1") read(v, hist.t1, "hist.t1");
                    else if (k == "t2") read(v, hist.t2, "hist.t2");
                    else if (k == "t3") read(v, hist.t3, "hist.t3");
                    else if (k == "mode_t") read(v, hist.mode_t, "hist.mode_t");
                    else if (k == "a_window") read(v, hist.a_window, "hist.a_window");
                    else if (k == "use_gradient") read(v, hist_use_gradient, "hist.use_gradient");
                    else if (k == "block_size") read(v, hist_block_size, "hist.block_size");
                    else throw ConfigError("unknown config key: hist." + k);
                });
            } else if (key == "grad") {
                section(value, "grad", [&](const std::string& k, const nlohmann::json& v) {
                    if (k == "t1") read(v, grad.t1, "grad.t1");
                    else if (k == "t2") read(v, grad.t2, "grad.t2");
                    else if (k == "t3") read(v, grad.t3, "grad.t3");
                    else if (k == "t4") read(v, grad.t4, "grad.t4");
                    else if (k == "g_lo") read(v, grad.g_lo, "grad.g_lo");
                    else if (k == "g_hi") read(v, grad.g_hi, "grad.g_hi");
                    else throw ConfigError("unknown config key: grad." + k);
                });
            } else {
                throw ConfigError("unknown config key: " + key);
            }
        }
        validate();
    }

    void validate() const {
        if (ac.t1 < 0 || ac.t1 > ac.t2) throw ConfigError("need 0 <= ac.t1 <= ac.t2");
        if (ac.gamma <= 0) throw ConfigError("ac.gamma must be > 0");
        if (smap_components < 1) throw ConfigError("smap.components must be >= 1");
        if (!(smap_theta_init > 0 && smap_theta_init < 1))
            throw ConfigError("smap.theta_init must lie in (0,1)");
        if (smap_epsilon <= 0) throw ConfigError("smap.epsilon must be > 0");
        if (hist.t1 < 0 || hist.t2 < 0 || hist.t3 < 0)
            throw ConfigError("hist thresholds must be >= 0");
        if (hist.mode_t < 0 || hist.mode_t > 1)
            throw ConfigError("hist.mode_t must lie in [0,1]");
        if (hist.a_window < 0) throw ConfigError("hist.a_window must be >= 0");
        if (hist_block_size < 1) throw ConfigError("hist.block_size must be >= 1");
        if (grad.t4 < 1) throw ConfigError("grad.t4 must be >= 1");
        if (grad.g_lo < 0 || grad.g_lo > grad.g_hi) throw ConfigError("need 0 <= g_lo <= g_hi");
    }

    static Config from_file(const std::filesystem::path& path) {
        std::ifstream in(path);
        if (!in) throw IOError("cannot open config: " + path.string());
        nlohmann::json j;
        try {
            in >> j;
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError("config parse error: " + std::string(e.what()));
        }
        Config c;
        c.apply_json(j);
        return c;
    }

private:
    template <typename T>
    static void read(const nlohmann::json& v, T& out, const char* name) {
        try {
            if constexpr (std::is_same_v<T, bool>) {
                if (!v.is_boolean()) throw ConfigError(std::string(name) + " must be a boolean");
            } else {
                if (!v.is_number()) throw ConfigError(std::string(name) + " must be a number");
            }
            out = v.get<T>();
        } catch (const nlohmann::json::exception&) {
            throw ConfigError(std::string("bad value for ") + name);
        }
    }

    template <typename Fn>
    static void section(const nlohmann::json& v, const char* name, Fn&& fn) {
        if (!v.is_object()) throw ConfigError(std::string(name) + " must be an object");
        for (const auto& [k, val] : v.items()) fn(k, val);
    }
};

} // namespace docseg
