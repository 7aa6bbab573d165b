#pragma once

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "trendrank/corpus.hpp"
#include "trendrank/rng.hpp"

namespace testsupport {

inline std::string make_temp_dir(const std::string& tag) {
    static std::atomic<int> counter{0};
    const auto dir = std::filesystem::temp_directory_path() /
                     ("trendrank_" + tag + "_" + std::to_string(::getpid()) + "_" +
                      std::to_string(counter.fetch_add(1)));
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir.string();
}

inline void write_file(const std::string& path, const std::string& content) {
    std::filesystem::create_directories(std::filesystem::path(path).parent_path());
    std::ofstream out(path, std::ios::binary);
    out << content;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

inline trendrank::TokenDoc make_doc(std::string id, trendrank::YearMonth month,
                                    std::vector<std::string> tokens) {
    trendrank::TokenDoc doc;
    doc.article_id = std::move(id);
    doc.month = month;
    doc.tokens = std::move(tokens);
    return doc;
}

inline trendrank::MonthlyCorpus make_corpus(trendrank::YearMonth month,
                                            std::vector<std::vector<std::string>> docs) {
    std::vector<trendrank::TokenDoc> out;
    int n = 0;
    for (auto& tokens : docs)
        out.push_back(make_doc("d" + std::to_string(n++), month, std::move(tokens)));
    auto buckets = trendrank::partition(out);
    if (buckets.empty()) return trendrank::MonthlyCorpus{month, {}, {}};
    return buckets.begin()->second;
}

// ---- independent oracles ----

/// Least-squares slope fit the long way: solve the 2x2 normal equations.
inline double ols_slope_oracle(const std::vector<double>& y) {
    const double n = static_cast<double>(y.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double x = static_cast<double>(i + 1);
        sx += x;
        sy += y[i];
        sxx += x * x;
        sxy += x * y[i];
    }
    const double det = n * sxx - sx * sx;
    return (n * sxy - sx * sy) / det;
}

/// Mann-Whitney statistic: fraction of positive/negative pairs where the
/// positive scores higher, ties counted half.
inline double mann_whitney_oracle(const std::vector<double>& pos,
                                  const std::vector<double>& neg) {
    double wins = 0;
    for (double p : pos)
        for (double n : neg) {
            if (p > n)
                wins += 1;
            else if (p == n)
                wins += 0.5;
        }
    return wins / (static_cast<double>(pos.size()) * static_cast<double>(neg.size()));
}

struct OracleScore {
    double avg = 0;
    double max = 0;
};

/// Brute-force tf-idf per bigram: enumerate every bigram of every doc and
/// recompute tf and idf from first principles.
inline std::map<std::string, OracleScore> tfidf_oracle(const trendrank::MonthlyCorpus& corpus) {
    const auto docs = corpus.docs;
    std::map<std::string, OracleScore> out;
    std::map<std::string, int> df;
    std::vector<std::map<std::string, int>> per_doc(docs.size());
    for (std::size_t d = 0; d < docs.size(); ++d) {
        const auto& toks = docs[d].tokens;
        for (std::size_t i = 0; i + 1 < toks.size(); ++i) per_doc[d][toks[i] + " " + toks[i + 1]]++;
        for (const auto& [key, tf] : per_doc[d]) {
            (void)tf;
            df[key]++;
        }
    }
    for (const auto& [key, n] : df) {
        const double idf =
            std::log((1.0 + static_cast<double>(docs.size())) / (1.0 + static_cast<double>(n))) +
            1.0;
        double sum = 0, mx = 0;
        int occurring = 0;
        for (std::size_t d = 0; d < docs.size(); ++d) {
            auto it = per_doc[d].find(key);
            if (it == per_doc[d].end()) continue;
            const double score = static_cast<double>(it->second) * idf;
            sum += score;
            mx = std::max(mx, score);
            ++occurring;
        }
        out[key] = {sum / occurring, mx};
    }
    return out;
}

/// Quadratic scan for a bigram's occurrences, independent of the library scan.
inline std::vector<std::pair<std::string, std::size_t>> occurrence_oracle(
    const trendrank::MonthlyCorpus& corpus, const std::string& first,
    const std::string& second) {
    std::vector<std::pair<std::string, std::size_t>> out;
    for (const auto& doc : corpus.docs)
        for (std::size_t i = 0; i + 1 < doc.tokens.size(); ++i)
            if (doc.tokens[i] == first && doc.tokens[i + 1] == second)
                out.emplace_back(doc.article_id, i);
    return out;
}

// ---- end-to-end fixture ----

struct FixturePaths {
    std::string dir;
    std::string corpus;
    std::string cleaning;
    std::string trends;
    std::string allow;
    std::string config;
    std::string out_dir;
};

namespace detail {

struct Theme {
    std::string first;
    std::string second;
    std::vector<std::string> ctx;
};

inline const std::vector<Theme>& themes() {
    static const std::vector<Theme> all{
        {"solar", "panel",
         {"sunlight", "photovoltaic", "inverter", "rooftop", "gridline", "module", "installer",
          "irradiance"}},
        {"wind", "turbine",
         {"blade", "offshore", "rotor", "gearbox", "nacelle", "gust", "farmland", "capacity"}},
        {"gene", "therapy",
         {"genome", "dose", "trial", "mutation", "protein", "enzyme", "patient", "infusion"}},
        {"stem", "cell",
         {"tissue", "marrow", "donor", "culture", "graft", "biopsy", "sample", "clinic"}},
        {"supply", "chain",
         {"warehouse", "container", "port", "inventory", "logistics", "shipment", "customs",
          "pallet"}},
        {"freight", "rate",
         {"cargo", "vessel", "tonnage", "route", "charter", "harbor", "manifest", "voyage"}},
        {"cloud", "computing",
         {"datacenter", "server", "cluster", "virtual", "instance", "latency", "uptime",
          "migration"}},
        {"remote", "work",
         {"office", "employee", "meeting", "schedule", "productivity", "commute", "laptop",
          "household"}},
    };
    return all;
}

inline const std::vector<std::string>& neutral_words() {
    static const std::vector<std::string> words{"economy", "policy",  "market", "region",
                                               "sector",  "outlook", "survey", "index",
                                               "growth",  "revenue", "budget", "forecast"};
    return words;
}

// Block layouts chosen so no ordered context pair repeats within a document.
inline const int kLeft[4][3] = {{0, 1, 2}, {5, 6, 7}, {1, 4, 6}, {7, 5, 3}};
inline const int kRight[4][2] = {{3, 4}, {0, 2}, {0, 3}, {6, 1}};
inline const int kCoPairs[4][2] = {{4, 2}, {7, 0}, {3, 6}, {2, 5}};

inline const char* filler_stops[4] = {"the", "of", "to", "and"};

inline void append_block(std::vector<std::string>& words, const Theme& t, int j) {
    words.push_back(filler_stops[j % 4]);
    for (int s : kLeft[j]) words.push_back(t.ctx[s]);
    words.push_back(t.first);
    words.push_back(t.second);
    words.push_back("in");
    for (int s : kRight[j]) words.push_back(t.ctx[s]);
}

inline void append_co_block(std::vector<std::string>& words, const Theme& cloud,
                            const Theme& remote, int j) {
    words.push_back(filler_stops[j % 4]);
    for (int s : kCoPairs[j]) words.push_back(cloud.ctx[s]);
    words.push_back(cloud.first);
    words.push_back(cloud.second);
    words.push_back(remote.first);
    words.push_back(remote.second);
    for (int s : kCoPairs[j]) words.push_back(remote.ctx[s]);
}

inline std::string join(const std::vector<std::string>& words) {
    std::string out;
    for (std::size_t i = 0; i < words.size(); ++i) {
        if (i) out += ' ';
        out += words[i];
    }
    return out;
}

}  // namespace detail

/// Synthetic 13-month news corpus with eight recurring keyword themes. The
/// "cloud computing" / "remote work" pair shares no context before 2020-01
/// and co-occurs tightly from then on; every trends series for the other
/// themes declines while the planted pair's interest rises after the onset.
inline FixturePaths write_e2e_fixture(const std::string& tag) {
    using trendrank::YearMonth;
    FixturePaths paths;
    paths.dir = make_temp_dir(tag);
    paths.corpus = paths.dir + "/articles.jsonl";
    paths.cleaning = paths.dir + "/cleaning.ini";
    paths.trends = paths.dir + "/trends.csv";
    paths.allow = paths.dir + "/allow.txt";
    paths.config = paths.dir + "/config.json";
    paths.out_dir = paths.dir + "/run";

    const auto& themes = detail::themes();
    const auto& cloud = themes[6];
    const auto& remote = themes[7];
    const auto months = trendrank::month_range(YearMonth{2019, 7}, YearMonth{2020, 7});

    std::ostringstream corpus;
    int doc_counter = 0;
    const auto emit = [&](YearMonth month, const std::string& slug,
                          const std::vector<std::string>& words) {
        ++doc_counter;
        std::string body = detail::join(words);
        if (doc_counter % 3 == 0) body += " Subscribe to our newsletter for daily updates.";
        std::string title = slug + " briefing";
        char stamp[32];
        std::snprintf(stamp, sizeof(stamp), "%04d-%02d-15T09:00:00Z", month.year, month.month);
        nlohmann::json j{{"id", slug + "-" + month.str()},
                         {"published_at", stamp},
                         {"title", title},
                         {"body", body}};
        corpus << j.dump() << '\n';
    };

    for (std::size_t mi = 0; mi < months.size(); ++mi) {
        const auto month = months[mi];
        const bool onset = mi >= 6;
        for (int t = 0; t < 6; ++t) {
            std::vector<std::string> words;
            for (int j = 0; j < 4; ++j) detail::append_block(words, themes[t], j);
            emit(month, themes[t].first + "-" + themes[t].second, words);
        }

        std::vector<std::string> cloud_words;
        detail::append_block(cloud_words, cloud, 0);
        detail::append_block(cloud_words, cloud, 1);
        if (onset) {
            detail::append_co_block(cloud_words, cloud, remote, 2);
            detail::append_co_block(cloud_words, cloud, remote, 3);
        } else {
            detail::append_block(cloud_words, cloud, 2);
            detail::append_block(cloud_words, cloud, 3);
        }
        emit(month, "cloud-story", cloud_words);

        std::vector<std::string> remote_words;
        detail::append_block(remote_words, remote, 0);
        detail::append_block(remote_words, remote, 1);
        if (onset) {
            detail::append_co_block(remote_words, cloud, remote, 2);
            detail::append_co_block(remote_words, cloud, remote, 3);
        } else {
            detail::append_block(remote_words, remote, 2);
            detail::append_block(remote_words, remote, 3);
        }
        emit(month, "remote-story", remote_words);

        std::vector<std::string> mixed;
        if (onset) {
            for (int j = 0; j < 4; ++j) detail::append_co_block(mixed, cloud, remote, j);
        } else {
            detail::append_block(mixed, cloud, 0);
            detail::append_block(mixed, cloud, 1);
            for (const auto& w : detail::neutral_words()) mixed.push_back(w);
            detail::append_block(mixed, remote, 0);
            detail::append_block(mixed, remote, 1);
        }
        emit(month, "workplace-mixed", mixed);

        if (mi < 3) {
            std::vector<std::string> neutral;
            for (const auto& w : detail::neutral_words()) neutral.push_back(w);
            neutral.push_back("analysts");
            neutral.push_back("quarter");
            emit(month, "macro-note", neutral);
        }
    }
    write_file(paths.corpus, corpus.str());

    std::ostringstream cleaning;
    cleaning << "[boilerplate]\n"
             << "Subscribe to our newsletter.*$\n"
             << "[glossary]\n"
             << "briefing\n"
             << "[stopwords]\n";
    for (const char* w : {"the", "a", "of", "to", "and", "in", "for", "with", "on", "our"})
        cleaning << w << '\n';
    cleaning << "[lemmas]\n"
             << "analysts\tanalyst\n";
    write_file(paths.cleaning, cleaning.str());

    std::ostringstream trends;
    trends << "month,keyword,interest\n";
    const auto trend_months = trendrank::month_range(YearMonth{2019, 7}, YearMonth{2020, 10});
    for (std::size_t i = 0; i < trend_months.size(); ++i) {
        const auto m = trend_months[i].str();
        const double planted = 30.0 + 4.0 * std::max<double>(0.0, static_cast<double>(i) - 5.0);
        trends << m << ",cloud computing," << planted << '\n';
        trends << m << ",remote work," << planted << '\n';
        for (int t = 0; t < 6; ++t)
            trends << m << ',' << themes[t].first << ' ' << themes[t].second << ','
                   << (95.0 - 6.0 * static_cast<double>(i) - t) << '\n';
    }
    write_file(paths.trends, trends.str());

    write_file(paths.allow, "cloud computing\nremote work\n");

    nlohmann::json config{
        {"corpus_path", paths.corpus},
        {"cleaning_config_path", paths.cleaning},
        {"trends_csv_path", paths.trends},
        {"allow_list_path", paths.allow},
        {"output_dir", paths.out_dir},
        {"months", {{"first", "2019-07"}, {"last", "2020-07"}}},
        {"keywords",
         {{"top_k_avg", 50},
          {"top_k_max", 50},
          {"cap", 25},
          {"lda", {{"grid", {2, 3}}, {"iterations", 120}, {"burn_in", 40}, {"thin", 8}}},
          {"coherence", {{"top_m", 10}, {"window", 10}}}}},
        {"provider", {{"kind", "deterministic_fallback"}, {"dimension", 32}, {"window", 5}}},
        {"threshold", 0},
        {"horizon", 3},
        {"seed", 7},
        {"threads", 2}};
    write_file(paths.config, config.dump(2) + "\n");
    return paths;
}

inline int run_cli(const std::string& args, std::string* output = nullptr) {
    const std::string cmd = std::string(TRENDRANK_CLI_PATH) + " " + args + " 2>&1";
    FILE* pipe = ::popen(cmd.c_str(), "r");
    if (!pipe) return -1;
    std::string captured;
    char buf[4096];
    while (std::size_t n = std::fread(buf, 1, sizeof(buf), pipe)) captured.append(buf, n);
    const int status = ::pclose(pipe);
    if (output) *output = captured;
    if (WIFEXITED(status)) return WEXITSTATUS(status);
    return -1;
}

}  // namespace testsupport
