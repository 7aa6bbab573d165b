#pragma once

#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "trendrank/errors.hpp"
#include "trendrank/lda.hpp"
#include "trendrank/rng.hpp"
#include "trendrank/yearmonth.hpp"

namespace trendrank {

inline constexpr const char* kToolVersion = "0.1.0";

struct ProviderSpec {
    std::string kind = "deterministic_fallback";  // or precomputed_file, static_sgns
    int dimension = 0;                            // 0 means the kind's default
    std::size_t window = 5;
    std::optional<std::uint64_t> seed;  // defaults to the run seed
    std::string vectors_dir;            // precomputed_file only
    int epochs = 5;
    int negative_samples = 5;
    double learning_rate = 0.025;

    int effective_dimension() const {
        if (dimension > 0) return dimension;
        return kind == "static_sgns" ? 100 : 32;
    }
};

struct RunConfig {
    std::string corpus_path;
    std::string cleaning_config_path;
    std::string trends_csv_path;
    std::string allow_list_path;
    std::string output_dir;
    std::optional<YearMonth> first_month;
    std::optional<YearMonth> last_month;
    std::size_t top_k_avg = 50;
    std::size_t top_k_max = 50;
    std::size_t cap = 25;
    std::vector<int> lda_grid{5, 10, 15, 20, 25, 30};
    LdaParams lda;  // topic count comes from the grid
    std::size_t coherence_top_m = 10;
    std::size_t coherence_window = 10;
    ProviderSpec provider;
    long threshold = 0;
    int horizon = 3;
    std::uint64_t seed = 0;
    int threads = 1;
};

namespace detail {

inline void reject_unknown_keys(const nlohmann::json& j, const char* scope,
                                std::initializer_list<const char*> known) {
    for (const auto& [key, value] : j.items()) {
        (void)value;
        bool ok = false;
        for (const char* k : known)
            if (key == k) ok = true;
        if (!ok) throw ConfigError(std::string(scope) + ": unknown key '" + key + "'");
    }
}

inline YearMonth config_month(const nlohmann::json& j, const char* key) {
    const auto text = j.at(key).get<std::string>();
    const auto m = try_parse_year_month(text);
    if (!m) throw ConfigError(std::string("months.") + key + ": bad month '" + text + "'");
    return *m;
}

}  // namespace detail

inline RunConfig parse_run_config(const nlohmann::json& j) {
    if (!j.is_object()) throw ConfigError("config root must be an object");
    detail::reject_unknown_keys(j, "config",
                                {"corpus_path", "cleaning_config_path", "trends_csv_path",
                                 "allow_list_path", "output_dir", "months", "keywords",
                                 "provider", "threshold", "horizon", "seed", "threads"});
    RunConfig cfg;
    try {
        cfg.corpus_path = j.value("corpus_path", "");
        cfg.cleaning_config_path = j.value("cleaning_config_path", "");
        cfg.trends_csv_path = j.value("trends_csv_path", "");
        cfg.allow_list_path = j.value("allow_list_path", "");
        cfg.output_dir = j.value("output_dir", "");
        cfg.threshold = j.value("threshold", 0L);
        cfg.horizon = j.value("horizon", 3);
        cfg.seed = j.value("seed", std::uint64_t{0});
        cfg.threads = j.value("threads", 1);

        if (j.contains("months")) {
            const auto& m = j.at("months");
            detail::reject_unknown_keys(m, "months", {"first", "last"});
            cfg.first_month = detail::config_month(m, "first");
            cfg.last_month = detail::config_month(m, "last");
        }

        if (j.contains("keywords")) {
            const auto& k = j.at("keywords");
            detail::reject_unknown_keys(
                k, "keywords", {"top_k_avg", "top_k_max", "cap", "lda", "coherence"});
            cfg.top_k_avg = k.value("top_k_avg", cfg.top_k_avg);
            cfg.top_k_max = k.value("top_k_max", cfg.top_k_max);
            cfg.cap = k.value("cap", cfg.cap);
            if (k.contains("lda")) {
                const auto& l = k.at("lda");
                detail::reject_unknown_keys(
                    l, "keywords.lda", {"grid", "alpha", "beta", "iterations", "burn_in", "thin"});
                if (l.contains("grid")) cfg.lda_grid = l.at("grid").get<std::vector<int>>();
                cfg.lda.alpha = l.value("alpha", cfg.lda.alpha);
                cfg.lda.beta = l.value("beta", cfg.lda.beta);
                cfg.lda.iterations = l.value("iterations", cfg.lda.iterations);
                cfg.lda.burn_in = l.value("burn_in", cfg.lda.burn_in);
                cfg.lda.thin = l.value("thin", cfg.lda.thin);
            }
            if (k.contains("coherence")) {
                const auto& c = k.at("coherence");
                detail::reject_unknown_keys(c, "keywords.coherence", {"top_m", "window"});
                cfg.coherence_top_m = c.value("top_m", cfg.coherence_top_m);
                cfg.coherence_window = c.value("window", cfg.coherence_window);
            }
        }

        if (j.contains("provider")) {
            const auto& p = j.at("provider");
            detail::reject_unknown_keys(p, "provider",
                                        {"kind", "dimension", "window", "seed", "vectors_dir",
                                         "epochs", "negative_samples", "learning_rate"});
            cfg.provider.kind = p.value("kind", cfg.provider.kind);
            cfg.provider.dimension = p.value("dimension", cfg.provider.dimension);
            cfg.provider.window = p.value("window", cfg.provider.window);
            if (p.contains("seed")) cfg.provider.seed = p.at("seed").get<std::uint64_t>();
            cfg.provider.vectors_dir = p.value("vectors_dir", cfg.provider.vectors_dir);
            cfg.provider.epochs = p.value("epochs", cfg.provider.epochs);
            cfg.provider.negative_samples =
                p.value("negative_samples", cfg.provider.negative_samples);
            cfg.provider.learning_rate = p.value("learning_rate", cfg.provider.learning_rate);
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(e.what());
    }

    if (cfg.provider.kind != "deterministic_fallback" && cfg.provider.kind != "precomputed_file" &&
        cfg.provider.kind != "static_sgns")
        throw ConfigError("provider.kind must be deterministic_fallback, precomputed_file, or "
                          "static_sgns");
    if (cfg.provider.effective_dimension() < 8)
        throw ConfigError("provider.dimension must be at least 8");
    if (cfg.provider.kind == "precomputed_file" && cfg.provider.vectors_dir.empty())
        throw ConfigError("provider.vectors_dir is required for precomputed_file");
    if (cfg.first_month && cfg.last_month && *cfg.last_month < *cfg.first_month)
        throw ConfigError("months.last precedes months.first");
    if (cfg.horizon < 2) throw ConfigError("horizon must be at least 2");
    if (cfg.threads < 1) throw ConfigError("threads must be at least 1");
    if (cfg.cap < 1) throw ConfigError("keywords.cap must be at least 1");
    for (int k : cfg.lda_grid)
        if (k < 2) throw ConfigError("keywords.lda.grid entries must be at least 2");
    if (cfg.lda_grid.empty()) throw ConfigError("keywords.lda.grid must be nonempty");
    return cfg;
}

inline RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file: " + path);
    nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
    if (j.is_discarded()) throw ConfigError("config file is not valid JSON: " + path);
    return parse_run_config(j);
}

/// Effective-config snapshot stored in the manifest.
inline nlohmann::ordered_json config_snapshot(const RunConfig& cfg) {
    nlohmann::ordered_json j;
    j["corpus_path"] = cfg.corpus_path;
    j["cleaning_config_path"] = cfg.cleaning_config_path;
    j["trends_csv_path"] = cfg.trends_csv_path;
    j["allow_list_path"] = cfg.allow_list_path;
    j["output_dir"] = cfg.output_dir;
    if (cfg.first_month && cfg.last_month) {
        j["months"]["first"] = cfg.first_month->str();
        j["months"]["last"] = cfg.last_month->str();
    }
    j["keywords"]["top_k_avg"] = cfg.top_k_avg;
    j["keywords"]["top_k_max"] = cfg.top_k_max;
    j["keywords"]["cap"] = cfg.cap;
    j["keywords"]["lda"]["grid"] = cfg.lda_grid;
    j["keywords"]["lda"]["alpha"] = cfg.lda.alpha;
    j["keywords"]["lda"]["beta"] = cfg.lda.beta;
    j["keywords"]["lda"]["iterations"] = cfg.lda.iterations;
    j["keywords"]["lda"]["burn_in"] = cfg.lda.burn_in;
    j["keywords"]["lda"]["thin"] = cfg.lda.thin;
    j["keywords"]["coherence"]["top_m"] = cfg.coherence_top_m;
    j["keywords"]["coherence"]["window"] = cfg.coherence_window;
    j["provider"]["kind"] = cfg.provider.kind;
    j["provider"]["dimension"] = cfg.provider.effective_dimension();
    j["provider"]["window"] = cfg.provider.window;
    j["provider"]["seed"] = cfg.provider.seed ? *cfg.provider.seed : cfg.seed;
    if (!cfg.provider.vectors_dir.empty()) j["provider"]["vectors_dir"] = cfg.provider.vectors_dir;
    if (cfg.provider.kind == "static_sgns") {
        j["provider"]["epochs"] = cfg.provider.epochs;
        j["provider"]["negative_samples"] = cfg.provider.negative_samples;
        j["provider"]["learning_rate"] = cfg.provider.learning_rate;
    }
    j["threshold"] = cfg.threshold;
    j["horizon"] = cfg.horizon;
    j["seed"] = cfg.seed;
    return j;
}

struct StageRecord {
    long wall_ms = 0;
    std::map<std::string, std::string> artifacts;  // relative path -> content digest
};

struct Manifest {
    std::string tool_version = kToolVersion;
    std::vector<YearMonth> months;
    nlohmann::ordered_json config;
    std::map<std::string, StageRecord> stages;
};

inline std::string content_digest(const std::string& content) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(content)));
    return buf;
}

inline nlohmann::ordered_json manifest_to_json(const Manifest& m) {
    nlohmann::ordered_json j;
    j["tool_version"] = m.tool_version;
    nlohmann::ordered_json months = nlohmann::ordered_json::array();
    for (const auto& month : m.months) months.push_back(month.str());
    j["months"] = months;
    j["config"] = m.config;
    nlohmann::ordered_json stages = nlohmann::ordered_json::object();
    for (const auto& [name, record] : m.stages) {
        nlohmann::ordered_json s;
        s["wall_ms"] = record.wall_ms;
        nlohmann::ordered_json artifacts = nlohmann::ordered_json::object();
        for (const auto& [path, digest] : record.artifacts) artifacts[path] = digest;
        s["artifacts"] = artifacts;
        stages[name] = s;
    }
    j["stages"] = stages;
    return j;
}

// The manifest is parsed as ordered_json so the stored config snapshot keeps
// its key order and compares equal to a freshly built snapshot.
inline Manifest manifest_from_json(const nlohmann::ordered_json& j) {
    Manifest m;
    try {
        m.tool_version = j.at("tool_version").get<std::string>();
        for (const auto& text : j.at("months")) {
            const auto month = try_parse_year_month(text.get<std::string>());
            if (!month) throw ConfigError("manifest months entry is not YYYY-MM");
            m.months.push_back(*month);
        }
        m.config = j.at("config");
        for (const auto& [name, s] : j.at("stages").items()) {
            StageRecord record;
            record.wall_ms = s.value("wall_ms", 0L);
            for (const auto& [path, digest] : s.at("artifacts").items())
                record.artifacts[path] = digest.get<std::string>();
            m.stages[name] = record;
        }
    } catch (const nlohmann::ordered_json::exception& e) {
        throw ConfigError(std::string("bad manifest: ") + e.what());
    }
    return m;
}

}  // namespace trendrank
