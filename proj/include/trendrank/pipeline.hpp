#pragma once

#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "trendrank/coherence.hpp"
#include "trendrank/config.hpp"
#include "trendrank/corpus_io.hpp"
#include "trendrank/embedding.hpp"
#include "trendrank/errors.hpp"
#include "trendrank/evaluation.hpp"
#include "trendrank/keywords.hpp"
#include "trendrank/ranking.hpp"
#include "trendrank/sgns.hpp"

namespace trendrank {

inline const std::vector<std::string>& stage_order() {
    static const std::vector<std::string> order{"ingest",  "keywords", "embed", "rank",
                                                "detect", "evaluate", "report"};
    return order;
}

// ---- artifact text formats ----

inline std::string keyword_table_text(const KeywordPool& pool) {
    std::ostringstream out;
    for (const auto& e : pool.entries)
        out << e.bigram.first << '\t' << e.bigram.second << '\t' << format_double(e.avg_tfidf)
            << '\t' << format_double(e.max_tfidf) << '\n';
    return out.str();
}

inline std::vector<KeywordEntry> parse_keyword_table(const std::string& text) {
    std::vector<KeywordEntry> entries;
    std::istringstream in(text);
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream fields(line);
        std::string first, second, avg, mx;
        if (!std::getline(fields, first, '\t') || !std::getline(fields, second, '\t') ||
            !std::getline(fields, avg, '\t') || !std::getline(fields, mx))
            throw MalformedRecord(line_no, "expected four tab-separated fields");
        KeywordEntry e;
        e.bigram = Bigram{first, second};
        try {
            e.avg_tfidf = std::stod(avg);
            e.max_tfidf = std::stod(mx);
        } catch (const std::exception&) {
            throw MalformedRecord(line_no, "bad tf-idf value");
        }
        entries.push_back(std::move(e));
    }
    return entries;
}

inline std::string topic_dump_text(const TopicCountSelection& sel, std::uint64_t seed,
                                   std::size_t top_m) {
    std::ostringstream out;
    out << "k=" << sel.topics << "\talpha=" << format_double(sel.model.alpha)
        << "\tbeta=" << format_double(sel.model.beta) << "\tseed=" << seed << "\tcoherence=";
    double best = 0.0;
    for (const auto& [k, score] : sel.curve)
        if (k == sel.topics) best = score;
    out << format_double(best) << '\n';
    for (int t = 0; t < sel.model.topics; ++t) {
        out << t;
        for (const auto& word : sel.model.top_words(t, top_m)) out << '\t' << word;
        out << '\n';
    }
    return out.str();
}

inline std::string ranking_text(const MonthRanking& ranking) {
    std::ostringstream out;
    for (const auto& e : ranking.entries)
        out << e.pair.key() << '\t' << format_double(e.similarity) << '\t' << e.rank << '\n';
    return out.str();
}

inline MonthRanking parse_ranking(const std::string& text, YearMonth month) {
    MonthRanking ranking;
    ranking.month = month;
    std::istringstream in(text);
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream fields(line);
        std::string key, sim, rank;
        if (!std::getline(fields, key, '\t') || !std::getline(fields, sim, '\t') ||
            !std::getline(fields, rank))
            throw MalformedRecord(line_no, "expected three tab-separated fields");
        const auto pair = try_parse_pair_key(key);
        if (!pair) throw MalformedRecord(line_no, "bad pair key: " + key);
        RankedPair rp;
        rp.pair = *pair;
        try {
            rp.similarity = std::stod(sim);
            rp.rank = std::stol(rank);
        } catch (const std::exception&) {
            throw MalformedRecord(line_no, "bad similarity or rank");
        }
        ranking.entries.push_back(std::move(rp));
    }
    return ranking;
}

inline std::string verdicts_csv_text(const std::map<PairKey, std::vector<DetectionVerdict>>& all) {
    std::ostringstream out;
    out << "pair,month,delta,threshold,emerging\n";
    for (const auto& [pair, verdicts] : all) {
        (void)pair;
        for (const auto& v : verdicts) {
            out << v.pair.key() << ',' << v.month.str() << ',';
            if (v.delta) out << *v.delta;
            out << ',' << v.threshold << ',' << (v.emerging ? "true" : "false") << '\n';
        }
    }
    return out.str();
}

inline std::vector<DetectionVerdict> parse_verdicts_csv(const std::string& text) {
    std::vector<DetectionVerdict> verdicts;
    std::istringstream in(text);
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line_no == 1 && line.rfind("pair,", 0) == 0) continue;
        std::istringstream fields(line);
        std::string pair_text, month_text, delta_text, threshold_text, emerging_text;
        if (!std::getline(fields, pair_text, ',') || !std::getline(fields, month_text, ',') ||
            !std::getline(fields, delta_text, ',') ||
            !std::getline(fields, threshold_text, ',') || !std::getline(fields, emerging_text))
            throw MalformedRecord(line_no, "expected five fields");
        const auto pair = try_parse_pair_key(pair_text);
        const auto month = try_parse_year_month(month_text);
        if (!pair || !month) throw MalformedRecord(line_no, "bad pair or month");
        DetectionVerdict v;
        v.pair = *pair;
        v.month = *month;
        try {
            if (!delta_text.empty()) v.delta = std::stol(delta_text);
            v.threshold = std::stol(threshold_text);
        } catch (const std::exception&) {
            throw MalformedRecord(line_no, "bad delta or threshold");
        }
        if (emerging_text != "true" && emerging_text != "false")
            throw MalformedRecord(line_no, "emerging must be true or false");
        v.emerging = emerging_text == "true";
        verdicts.push_back(std::move(v));
    }
    return verdicts;
}

inline std::string gold_csv_text(const GoldStandard& gold) {
    std::ostringstream out;
    out << "pair,month,slope,label\n";
    for (const auto& g : gold.instances)
        out << g.pair.key() << ',' << g.month.str() << ',' << format_double(g.slope) << ','
            << (g.label ? "true" : "false") << '\n';
    return out.str();
}

inline std::string roc_csv_text(const std::vector<RocPoint>& points) {
    std::ostringstream out;
    out << "threshold,fpr,tpr\n";
    for (const auto& p : points)
        out << format_double(p.threshold) << ',' << format_double(p.fpr) << ','
            << format_double(p.tpr) << '\n';
    return out.str();
}

inline std::string pair_slug(const PairKey& pair) {
    std::string slug = pair.a.composite() + "__" + pair.b.composite();
    return slug;
}

// ---- stage engine ----

class PipelineRun {
public:
    explicit PipelineRun(RunConfig cfg) : cfg_(std::move(cfg)) {
        if (cfg_.output_dir.empty()) throw ConfigError("output_dir is required");
        const auto snapshot = config_snapshot(cfg_);
        const auto path = manifest_path();
        if (std::filesystem::exists(path)) {
            std::ifstream in(path);
            const auto j = nlohmann::ordered_json::parse(in, nullptr, false);
            if (j.is_discarded()) throw ConfigError("manifest is not valid JSON: " + path);
            manifest_ = manifest_from_json(j);
            if (manifest_.tool_version != kToolVersion) {
                manifest_.stages.clear();
                manifest_.months.clear();
            } else {
                drop_stages_for_config_changes(snapshot);
            }
        }
        manifest_.tool_version = kToolVersion;
        manifest_.config = snapshot;
    }

    const Manifest& manifest() const { return manifest_; }
    const RunConfig& config() const { return cfg_; }

    void ingest() {
        const auto started = now();
        if (cfg_.corpus_path.empty()) throw ConfigError("corpus_path is required");
        if (cfg_.cleaning_config_path.empty())
            throw ConfigError("cleaning_config_path is required");
        const auto articles = trendrank::ingest(cfg_.corpus_path);
        auto cleaning = load_cleaning_config(cfg_.cleaning_config_path);

        std::vector<TokenDoc> surface_docs;
        for (const auto& a : articles) {
            auto doc = clean(a, cleaning);
            if (doc) surface_docs.push_back(std::move(*doc));
        }
        std::map<std::string, long> vocab;
        for (const auto& d : surface_docs)
            for (const auto& t : d.tokens) vocab[t]++;
        augment_lemma_table(cleaning, vocab);

        std::vector<TokenDoc> docs;
        for (const auto& a : articles) {
            auto doc = clean(a, cleaning);
            if (!doc) continue;
            if (cfg_.first_month && doc->month < *cfg_.first_month) continue;
            if (cfg_.last_month && *cfg_.last_month < doc->month) continue;
            docs.push_back(std::move(*doc));
        }
        auto buckets = partition(docs);

        std::vector<YearMonth> months;
        if (cfg_.first_month && cfg_.last_month) {
            months = month_range(*cfg_.first_month, *cfg_.last_month);
        } else {
            if (buckets.empty()) throw EmptyCorpus();
            months = month_range(buckets.begin()->first, buckets.rbegin()->first);
        }

        StageRecord record;
        for (const auto& month : months) {
            auto it = buckets.find(month);
            const MonthlyCorpus empty{month, {}, {}};
            const auto& corpus = it == buckets.end() ? empty : it->second;
            write_artifact(record, month_key("tokens", month, "tsv"), month_tokens_text(corpus));
        }
        manifest_.months = months;
        finish_stage("ingest", record, started);
    }

    void keywords() {
        const auto started = now();
        const auto tokens = validate_stage("ingest");
        const auto allow = load_allow_list();
        const auto months = need_months();

        struct MonthOut {
            std::string table;
            std::string topics;
        };
        std::vector<MonthOut> outs(months.size());
        run_months(months, [&](std::size_t i) {
            const auto& month = months[i];
            const auto corpus =
                parse_month_tokens(tokens.at(month_key("tokens", month, "tsv")), month);
            if (corpus.docs.empty()) throw EmptyCorpus();
            const auto scored = tfidf_candidates(corpus, cfg_.top_k_avg, cfg_.top_k_max);
            std::set<Bigram> candidates;
            for (const auto& s : scored) candidates.insert(s.bigram);
            const auto merged = merge_bigram_tokens(corpus, candidates);
            const auto stage_seed = derive_seed(cfg_.seed, "keywords", month.str());
            const auto sel = select_topic_count(merged, cfg_.lda_grid, cfg_.lda,
                                                cfg_.coherence_top_m, cfg_.coherence_window,
                                                stage_seed);
            const auto picks = lda_bigrams(sel.model, candidates, cfg_.coherence_top_m);
            const auto pool = build_pool(scored, picks, cfg_.cap, allow);
            outs[i].table = keyword_table_text(pool);
            outs[i].topics = topic_dump_text(sel, stage_seed, cfg_.coherence_top_m);
        });

        StageRecord record;
        for (std::size_t i = 0; i < months.size(); ++i) {
            write_artifact(record, month_key("keywords", months[i], "tsv"), outs[i].table);
            write_artifact(record, month_key("keywords", months[i], "topics.txt"),
                           outs[i].topics);
        }
        finish_stage("keywords", record, started);
    }

    void embed() {
        const auto started = now();
        const auto tokens = validate_stage("ingest");
        const auto keyword_files = validate_stage("keywords");
        const auto months = need_months();

        std::vector<std::string> outs(months.size());
        run_months(months, [&](std::size_t i) {
            const auto& month = months[i];
            const auto corpus =
                parse_month_tokens(tokens.at(month_key("tokens", month, "tsv")), month);
            const auto entries =
                parse_keyword_table(keyword_files.at(month_key("keywords", month, "tsv")));
            const auto provider = make_provider(corpus, month);
            std::vector<BigramEmbedding> embeddings;
            for (const auto& e : entries) {
                auto emb = embed_bigram(corpus, e.bigram, *provider);
                if (emb) embeddings.push_back(std::move(*emb));
            }
            outs[i] = embedding_dump_text(embeddings);
        });

        StageRecord record;
        for (std::size_t i = 0; i < months.size(); ++i)
            write_artifact(record, month_key("embed", months[i], "tsv"), outs[i]);
        finish_stage("embed", record, started);
    }

    void rank() {
        const auto started = now();
        const auto keyword_files = validate_stage("keywords");
        const auto embed_files = validate_stage("embed");
        const auto months = need_months();

        std::vector<std::string> outs(months.size());
        run_months(months, [&](std::size_t i) {
            const auto& month = months[i];
            const auto entries =
                parse_keyword_table(keyword_files.at(month_key("keywords", month, "tsv")));
            std::vector<Bigram> pool;
            for (const auto& e : entries) pool.push_back(e.bigram);
            std::map<Bigram, BigramEmbedding> embedded;
            for (auto& emb :
                 parse_embedding_dump(embed_files.at(month_key("embed", month, "tsv"))))
                embedded.emplace(emb.bigram, std::move(emb));
            outs[i] = ranking_text(rank_month(pool, embedded, month));
        });

        StageRecord record;
        for (std::size_t i = 0; i < months.size(); ++i)
            write_artifact(record, month_key("rank", months[i], "tsv"), outs[i]);
        finish_stage("rank", record, started);
    }

    void detect() {
        const auto started = now();
        const auto keyword_files = validate_stage("keywords");
        const auto rank_files = validate_stage("rank");
        const auto months = need_months();

        const auto rankings = load_rankings(keyword_files, rank_files, months);
        const auto all = detect_all(rankings, cfg_.threshold);

        StageRecord record;
        write_artifact(record, "detect/verdicts.csv", verdicts_csv_text(all));
        finish_stage("detect", record, started);
    }

    void evaluate() {
        const auto started = now();
        const auto detect_files = validate_stage("detect");
        if (cfg_.trends_csv_path.empty()) throw ConfigError("trends_csv_path is required");
        const auto verdicts = parse_verdicts_csv(detect_files.at("detect/verdicts.csv"));
        if (verdicts.empty()) throw EmptyEvaluation();
        const auto trends = load_interest_csv(cfg_.trends_csv_path);

        std::set<PairKey> pair_set;
        std::set<YearMonth> month_set;
        for (const auto& v : verdicts) {
            pair_set.insert(v.pair);
            month_set.insert(v.month);
        }
        const std::vector<PairKey> pairs(pair_set.begin(), pair_set.end());
        const std::vector<YearMonth> months(month_set.begin(), month_set.end());

        const auto gold = build_gold(trends, pairs, months, cfg_.horizon);
        const auto result = classify(verdicts, gold);
        const auto baseline = zero_rule(gold);
        const auto roc = roc_points(result.instances);
        const auto area = roc_auc(result.instances);

        nlohmann::ordered_json report;
        report["threshold"] = cfg_.threshold;
        report["horizon"] = cfg_.horizon;
        report["instances"] = result.instances.size();
        report["dropped"] = result.dropped;
        report["confusion"] = {{"tp", result.metrics.confusion.tp},
                               {"fp", result.metrics.confusion.fp},
                               {"tn", result.metrics.confusion.tn},
                               {"fn", result.metrics.confusion.fn}};
        report["true_class"] = {{"precision", result.metrics.true_class.precision},
                                {"recall", result.metrics.true_class.recall},
                                {"f1", result.metrics.true_class.f1}};
        report["false_class"] = {{"precision", result.metrics.false_class.precision},
                                 {"recall", result.metrics.false_class.recall},
                                 {"f1", result.metrics.false_class.f1}};
        report["macro"] = {{"precision", result.metrics.macro_precision},
                           {"recall", result.metrics.macro_recall},
                           {"f1", result.metrics.macro_f1}};
        report["auc"] = area;
        report["zero_rule"] = {{"precision", baseline.macro_precision},
                               {"recall", baseline.macro_recall},
                               {"f1", baseline.macro_f1}};
        report["auc_by_horizon"] = auc_by_horizon(trends, pairs, verdicts);

        StageRecord record;
        write_artifact(record, "evaluate/gold.csv", gold_csv_text(gold));
        write_artifact(record, "evaluate/roc.csv", roc_csv_text(roc));
        write_artifact(record, "evaluate/report.json", report.dump(2) + "\n");
        finish_stage("evaluate", record, started);
    }

    std::string report(const PairKey& pair) {
        const auto started = now();
        const auto keyword_files = validate_stage("keywords");
        const auto rank_files = validate_stage("rank");
        validate_stage("evaluate");
        if (cfg_.trends_csv_path.empty()) throw ConfigError("trends_csv_path is required");
        const auto months = need_months();
        const auto rankings = load_rankings(keyword_files, rank_files, months);

        bool known = false;
        for (const auto& r : rankings)
            if (r.rank_of(pair) || r.missing.count(pair)) known = true;
        if (!known) throw UnknownPair(pair.key());

        const auto trends = load_interest_csv(cfg_.trends_csv_path);
        const auto interest =
            pair_interest(trends.series_for(pair.a), trends.series_for(pair.b));
        const auto series = rank_deltas(rankings, pair);

        std::ostringstream out;
        out << "month,similarity,rank,inverted_rank,delta,trends_interest\n";
        for (std::size_t i = 0; i < rankings.size(); ++i) {
            const auto& month = rankings[i].month;
            out << month.str() << ',';
            const auto point = series.points.find(month);
            if (point != series.points.end()) {
                const long max_rank = static_cast<long>(rankings[i].entries.size());
                out << format_double(point->second.first) << ',' << point->second.second << ','
                    << (max_rank - point->second.second + 1);
            } else {
                out << ",,";
            }
            out << ',';
            const auto delta = series.deltas.find(month);
            if (delta != series.deltas.end() && delta->second) out << *delta->second;
            out << ',';
            const auto value = interest.points.find(month);
            if (value != interest.points.end()) out << format_double(value->second);
            out << '\n';
        }

        StageRecord record = manifest_.stages.count("report")
                                 ? manifest_.stages.at("report")
                                 : StageRecord{};
        const auto rel = "report/" + pair_slug(pair) + ".csv";
        write_artifact(record, rel, out.str());
        finish_stage("report", record, started);
        return out_path(rel);
    }

    static std::string compare(const std::string& dir_a, const std::string& dir_b) {
        const auto load = [](const std::string& dir) {
            const auto path = dir + "/manifest.json";
            std::ifstream in(path);
            if (!in) throw MissingStage("evaluate");
            const auto j = nlohmann::ordered_json::parse(in, nullptr, false);
            if (j.is_discarded()) throw ConfigError("manifest is not valid JSON: " + path);
            return manifest_from_json(j);
        };
        const auto ma = load(dir_a);
        const auto mb = load(dir_b);
        for (const auto* m : {&ma, &mb})
            if (!m->stages.count("evaluate")) throw MissingStage("evaluate");
        const auto& ga = ma.stages.at("evaluate").artifacts;
        const auto& gb = mb.stages.at("evaluate").artifacts;
        if (!ga.count("evaluate/gold.csv") || !gb.count("evaluate/gold.csv") ||
            ga.at("evaluate/gold.csv") != gb.at("evaluate/gold.csv"))
            throw GoldMismatch();

        const auto report = [](const std::string& dir) {
            std::ifstream in(dir + "/evaluate/report.json");
            if (!in) throw StaleArtifact(dir + "/evaluate/report.json");
            nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
            if (j.is_discarded()) throw StaleArtifact(dir + "/evaluate/report.json");
            return j;
        };
        const auto ra = report(dir_a);
        const auto rb = report(dir_b);

        const auto name = [](const std::string& dir) {
            const auto base = std::filesystem::path(dir).filename().string();
            return base.empty() ? dir : base;
        };
        const auto cell = [](const nlohmann::json& v) -> std::string {
            if (v.is_null()) return "n/a";
            char buf[32];
            std::snprintf(buf, sizeof(buf), "%.4f", v.get<double>());
            return buf;
        };

        std::ostringstream out;
        char line[160];
        std::snprintf(line, sizeof(line), "%-18s %12s %12s\n", "metric", name(dir_a).c_str(),
                      name(dir_b).c_str());
        out << line;
        const auto row = [&](const char* label, const nlohmann::json& va,
                             const nlohmann::json& vb) {
            std::snprintf(line, sizeof(line), "%-18s %12s %12s\n", label, cell(va).c_str(),
                          cell(vb).c_str());
            out << line;
        };
        row("macro_precision", ra["macro"]["precision"], rb["macro"]["precision"]);
        row("macro_recall", ra["macro"]["recall"], rb["macro"]["recall"]);
        row("macro_f1", ra["macro"]["f1"], rb["macro"]["f1"]);
        row("auc", ra["auc"], rb["auc"]);
        for (int h = 2; h <= 6; ++h) {
            const auto key = std::to_string(h);
            const auto label = "auc_horizon_" + key;
            row(label.c_str(), ra["auc_by_horizon"].value(key, nlohmann::json()),
                rb["auc_by_horizon"].value(key, nlohmann::json()));
        }
        return out.str();
    }

private:
    static std::chrono::steady_clock::time_point now() {
        return std::chrono::steady_clock::now();
    }

    std::string out_path(const std::string& rel) const { return cfg_.output_dir + "/" + rel; }

    std::string manifest_path() const { return out_path("manifest.json"); }

    static std::string month_key(const std::string& stage, YearMonth month,
                                 const std::string& ext) {
        return stage + "/" + month.str() + "." + ext;
    }

    std::vector<YearMonth> need_months() const {
        if (manifest_.months.empty()) throw MissingStage("ingest");
        return manifest_.months;
    }

    /// Snapshot keys a recorded stage depends on, its upstream included, so
    /// changing e.g. the threshold keeps ingest..rank but drops detect onward.
    static const std::vector<std::string>& snapshot_keys(const std::string& stage) {
        static const std::map<std::string, std::vector<std::string>> keys = {
            {"ingest", {"corpus_path", "cleaning_config_path", "months"}},
            {"keywords", {"seed", "keywords", "allow_list_path"}},
            {"embed", {"provider"}},
            {"rank", {}},
            {"detect", {"threshold"}},
            {"evaluate", {"trends_csv_path", "horizon"}},
            {"report", {}},
        };
        return keys.at(stage);
    }

    void drop_stages_for_config_changes(const nlohmann::ordered_json& snapshot) {
        bool changed = false;
        for (const auto& stage : stage_order()) {
            if (!changed) {
                for (const auto& key : snapshot_keys(stage)) {
                    const auto* a = manifest_.config.contains(key) ? &manifest_.config.at(key)
                                                                   : nullptr;
                    const auto* b = snapshot.contains(key) ? &snapshot.at(key) : nullptr;
                    if ((a == nullptr) != (b == nullptr) || (a && *a != *b)) {
                        changed = true;
                        break;
                    }
                }
            }
            if (changed) manifest_.stages.erase(stage);
        }
        if (changed && !manifest_.stages.count("ingest")) manifest_.months.clear();
    }

    void write_artifact(StageRecord& record, const std::string& rel,
                        const std::string& content) {
        const auto path = out_path(rel);
        std::filesystem::create_directories(std::filesystem::path(path).parent_path());
        std::ofstream out(path, std::ios::binary);
        if (!out) throw UnreadablePath(path);
        out << content;
        record.artifacts[rel] = content_digest(content);
    }

    /// Checks the stage's recorded artifacts against the files on disk and
    /// returns their contents keyed by relative path.
    std::map<std::string, std::string> validate_stage(const std::string& stage) const {
        auto it = manifest_.stages.find(stage);
        if (it == manifest_.stages.end()) throw MissingStage(stage);
        std::map<std::string, std::string> contents;
        for (const auto& [rel, digest] : it->second.artifacts) {
            std::ifstream in(out_path(rel), std::ios::binary);
            if (!in) throw StaleArtifact(rel);
            std::ostringstream buf;
            buf << in.rdbuf();
            auto content = buf.str();
            if (content_digest(content) != digest) throw StaleArtifact(rel);
            contents.emplace(rel, std::move(content));
        }
        return contents;
    }

    void finish_stage(const std::string& stage, StageRecord record,
                      std::chrono::steady_clock::time_point started) {
        record.wall_ms = std::chrono::duration_cast<std::chrono::milliseconds>(now() - started)
                             .count();
        manifest_.stages[stage] = std::move(record);
        bool after = false;
        for (const auto& name : stage_order()) {
            if (after && name != "report") manifest_.stages.erase(name);
            if (name == stage) after = true;
        }
        if (stage != "report") manifest_.stages.erase("report");
        save_manifest();
    }

    void save_manifest() const {
        std::filesystem::create_directories(cfg_.output_dir);
        std::ofstream out(manifest_path(), std::ios::binary);
        if (!out) throw UnreadablePath(manifest_path());
        out << manifest_to_json(manifest_).dump(2) << '\n';
    }

    std::vector<Bigram> load_allow_list() const {
        std::vector<Bigram> allow;
        if (cfg_.allow_list_path.empty()) return allow;
        std::ifstream in(cfg_.allow_list_path);
        if (!in) throw UnreadablePath(cfg_.allow_list_path);
        std::string line;
        long line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty() || line[0] == '#') continue;
            const auto bigram = try_parse_bigram(line);
            if (!bigram) throw MalformedRecord(line_no, "allow list line is not a bigram");
            allow.push_back(*bigram);
        }
        return allow;
    }

    std::unique_ptr<EmbeddingProvider> make_provider(const MonthlyCorpus& corpus,
                                                     YearMonth month) const {
        const auto dim = cfg_.provider.effective_dimension();
        const auto provider_seed = cfg_.provider.seed ? *cfg_.provider.seed : cfg_.seed;
        if (cfg_.provider.kind == "deterministic_fallback")
            return std::make_unique<FallbackProvider>(dim, provider_seed, cfg_.provider.window);
        if (cfg_.provider.kind == "static_sgns") {
            SgnsParams params;
            params.dim = dim;
            params.window = static_cast<int>(cfg_.provider.window);
            params.negatives = cfg_.provider.negative_samples;
            params.epochs = cfg_.provider.epochs;
            params.learning_rate = cfg_.provider.learning_rate;
            return std::make_unique<SgnsProvider>(
                train_sgns(corpus, params, derive_seed(cfg_.seed, "embed", month.str())));
        }
        return std::make_unique<PrecomputedProvider>(cfg_.provider.vectors_dir + "/" +
                                                     month.str() + ".vec");
    }

    std::vector<MonthRanking> load_rankings(
        const std::map<std::string, std::string>& keyword_files,
        const std::map<std::string, std::string>& rank_files,
        const std::vector<YearMonth>& months) const {
        std::vector<MonthRanking> rankings;
        rankings.reserve(months.size());
        for (const auto& month : months) {
            auto ranking =
                parse_ranking(rank_files.at(month_key("rank", month, "tsv")), month);
            const auto entries =
                parse_keyword_table(keyword_files.at(month_key("keywords", month, "tsv")));
            std::set<PairKey> ranked;
            for (const auto& e : ranking.entries) ranked.insert(e.pair);
            for (std::size_t i = 0; i < entries.size(); ++i)
                for (std::size_t j = i + 1; j < entries.size(); ++j) {
                    const auto pair = PairKey::make(entries[i].bigram, entries[j].bigram);
                    if (!ranked.count(pair)) ranking.missing.insert(pair);
                }
            rankings.push_back(std::move(ranking));
        }
        return rankings;
    }

    nlohmann::ordered_json auc_by_horizon(const InterestData& trends,
                                          const std::vector<PairKey>& pairs,
                                          const std::vector<DetectionVerdict>& verdicts) const {
        nlohmann::ordered_json out = nlohmann::ordered_json::object();
        std::map<std::string, InterestSeries> pair_cache;
        for (const auto& pair : pairs)
            pair_cache.emplace(pair.key(),
                               pair_interest(trends.series_for(pair.a),
                                             trends.series_for(pair.b)));
        for (int h = 2; h <= 6; ++h) {
            std::vector<EvalInstance> instances;
            for (const auto& v : verdicts) {
                const auto& series = pair_cache.at(v.pair.key());
                bool complete = true;
                std::vector<double> future;
                for (int i = 1; i <= h; ++i) {
                    auto it = series.points.find(v.month.plus(i));
                    if (it == series.points.end()) {
                        complete = false;
                        break;
                    }
                    future.push_back(it->second);
                }
                if (!complete) continue;
                EvalInstance inst;
                inst.pair = v.pair;
                inst.month = v.month;
                inst.predicted = v.emerging;
                inst.label = interest_slope(future) > 0.0;
                inst.delta = v.delta;
                instances.push_back(std::move(inst));
            }
            bool has_pos = false, has_neg = false;
            for (const auto& inst : instances) (inst.label ? has_pos : has_neg) = true;
            if (instances.empty() || !has_pos || !has_neg)
                out[std::to_string(h)] = nullptr;
            else
                out[std::to_string(h)] = roc_auc(instances);
        }
        return out;
    }

    template <class Fn>
    void run_months(const std::vector<YearMonth>& months, Fn&& fn) const {
        const auto n = months.size();
        const auto workers =
            std::min<std::size_t>(static_cast<std::size_t>(std::max(1, cfg_.threads)), n);
        if (workers <= 1) {
            for (std::size_t i = 0; i < n; ++i) fn(i);
            return;
        }
        std::vector<std::exception_ptr> errors(n);
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w)
            pool.emplace_back([&]() {
                for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
                    try {
                        fn(i);
                    } catch (...) {
                        errors[i] = std::current_exception();
                    }
                }
            });
        for (auto& t : pool) t.join();
        for (const auto& e : errors)
            if (e) std::rethrow_exception(e);
    }

    RunConfig cfg_;
    Manifest manifest_;
};

}  // namespace trendrank
