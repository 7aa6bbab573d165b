#include <cstdio>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "trendrank/pipeline.hpp"

namespace {

struct Options {
    std::string config_path;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;
    std::optional<long> top_k_avg;
    std::optional<long> top_k_max;
    std::optional<long> cap;
    std::optional<long> threshold;
    std::optional<int> horizon;
};

trendrank::RunConfig resolve_config(const Options& opt) {
    if (opt.config_path.empty()) throw trendrank::ConfigError("--config is required");
    auto cfg = trendrank::load_run_config(opt.config_path);
    if (!opt.out_dir.empty()) cfg.output_dir = opt.out_dir;
    if (opt.seed) cfg.seed = *opt.seed;
    if (opt.threads) cfg.threads = *opt.threads;
    if (opt.top_k_avg) cfg.top_k_avg = *opt.top_k_avg;
    if (opt.top_k_max) cfg.top_k_max = *opt.top_k_max;
    if (opt.cap) cfg.cap = *opt.cap;
    if (opt.threshold) cfg.threshold = *opt.threshold;
    if (opt.horizon) cfg.horizon = *opt.horizon;
    if (cfg.threads < 1) throw trendrank::ConfigError("threads must be >= 1");
    if (cfg.horizon < 2) throw trendrank::ConfigError("horizon must be >= 2");
    return cfg;
}

int exit_code_for(const trendrank::Error& e) {
    const std::string code = e.code();
    if (code == "config_error") return 2;
    if (code == "missing_stage" || code == "stale_artifact") return 3;
    return 4;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"contextual keyword trend detection pipeline"};
    app.require_subcommand(1);

    Options opt;
    app.add_option("--config", opt.config_path, "run configuration JSON");
    app.add_option("--out", opt.out_dir, "output directory (overrides config output_dir)");
    app.add_option("--seed", opt.seed, "master seed (overrides config seed)");
    app.add_option("--threads", opt.threads, "worker threads (overrides config threads)");

    auto* ingest = app.add_subcommand("ingest", "clean and partition the corpus by month");
    auto* keywords = app.add_subcommand("keywords", "extract the monthly keyword pools");
    keywords->add_option("--top_k_avg", opt.top_k_avg, "override keywords.top_k_avg");
    keywords->add_option("--top_k_max", opt.top_k_max, "override keywords.top_k_max");
    keywords->add_option("--cap", opt.cap, "override keywords.cap");
    auto* embed = app.add_subcommand("embed", "embed keyword occurrences per month");
    auto* rank = app.add_subcommand("rank", "rank keyword pairs by cosine similarity");
    auto* detect = app.add_subcommand("detect", "flag emerging pairs from rank deltas");
    detect->add_option("--threshold", opt.threshold, "override threshold");
    auto* evaluate = app.add_subcommand("evaluate", "score verdicts against trends gold");
    evaluate->add_option("--horizon", opt.horizon, "override horizon");
    auto* report = app.add_subcommand("report", "emit a per-pair figure-data CSV");
    std::string pair_text;
    report->add_option("pair", pair_text, "pair key, e.g. 'big data|machine learning'")
        ->required();
    auto* compare = app.add_subcommand("compare", "compare two completed runs");
    std::string dir_a, dir_b;
    compare->add_option("run_a", dir_a, "first run directory")->required();
    compare->add_option("run_b", dir_b, "second run directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        std::fprintf(stderr, "error: config_error: %s\n", e.what());
        return 2;
    }

    try {
        if (compare->parsed()) {
            std::fputs(trendrank::PipelineRun::compare(dir_a, dir_b).c_str(), stdout);
            return 0;
        }
        trendrank::PipelineRun run(resolve_config(opt));
        if (ingest->parsed()) {
            run.ingest();
        } else if (keywords->parsed()) {
            run.keywords();
        } else if (embed->parsed()) {
            run.embed();
        } else if (rank->parsed()) {
            run.rank();
        } else if (detect->parsed()) {
            run.detect();
        } else if (evaluate->parsed()) {
            run.evaluate();
        } else if (report->parsed()) {
            const auto pair = trendrank::try_parse_pair_key(pair_text);
            if (!pair) throw trendrank::ConfigError("bad pair key: " + pair_text);
            std::printf("%s\n", run.report(*pair).c_str());
        }
        return 0;
    } catch (const trendrank::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_code_for(e);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: unexpected: %s\n", e.what());
        return 4;
    }
}
