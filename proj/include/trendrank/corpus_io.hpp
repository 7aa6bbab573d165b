#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "trendrank/corpus.hpp"
#include "trendrank/errors.hpp"

namespace trendrank {

/// Reads a JSON Lines article file: one {"id","published_at","title","body"}
/// object per line. Order is preserved; duplicate ids are rejected.
inline std::vector<Article> ingest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UnreadablePath(path);

    std::vector<Article> articles;
    std::unordered_set<std::string> seen;
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object())
            throw MalformedRecord(line_no, "not a JSON object");
        for (const char* field : {"id", "published_at", "title", "body"})
            if (!j.contains(field) || !j[field].is_string())
                throw MalformedRecord(line_no, std::string("missing string field '") + field + "'");

        Article a;
        a.id = j["id"].get<std::string>();
        a.published_at = j["published_at"].get<std::string>();
        a.title = j["title"].get<std::string>();
        a.body = j["body"].get<std::string>();
        if (a.id.empty()) throw MalformedRecord(line_no, "empty id");
        auto month = try_parse_timestamp_month(a.published_at);
        if (!month) throw MalformedRecord(line_no, "bad published_at: " + a.published_at);
        a.month = *month;
        if (!seen.insert(a.id).second) throw DuplicateId(a.id);
        articles.push_back(std::move(a));
    }
    return articles;
}

/// Cleaning config file: INI-style sections [boilerplate], [glossary],
/// [stopwords], [lemmas]. Pattern/term lines are taken verbatim; lemma lines
/// are "surface<TAB>lemma". '#' starts a comment line.
inline CleaningConfig load_cleaning_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UnreadablePath(path);

    CleaningConfig cfg;
    std::string line, section;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        if (line.front() == '[' && line.back() == ']') {
            section = line.substr(1, line.size() - 2);
            continue;
        }
        if (section == "boilerplate") {
            cfg.boilerplate_patterns.push_back(line);
        } else if (section == "glossary") {
            cfg.glossary_stoplist.insert(line);
        } else if (section == "stopwords") {
            cfg.stopword_list.insert(line);
        } else if (section == "lemmas") {
            auto tab = line.find('\t');
            if (tab == std::string::npos || tab == 0 || tab + 1 >= line.size())
                throw MalformedRecord(line_no, "lemma line is not 'surface<TAB>lemma'");
            cfg.lemma_table[line.substr(0, tab)] = line.substr(tab + 1);
        } else {
            throw MalformedRecord(line_no, "line outside a known section");
        }
    }
    return cfg;
}

/// Per-month token file: "article_id<TAB>tok1 tok2 ...". Docs in corpus order.
inline std::string month_tokens_text(const MonthlyCorpus& corpus) {
    std::ostringstream out;
    for (const auto& doc : corpus.docs) {
        out << doc.article_id << '\t';
        for (std::size_t i = 0; i < doc.tokens.size(); ++i) {
            if (i) out << ' ';
            out << doc.tokens[i];
        }
        out << '\n';
    }
    return out.str();
}

inline void write_month_tokens(const MonthlyCorpus& corpus, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw UnreadablePath(path);
    out << month_tokens_text(corpus);
}

inline MonthlyCorpus parse_month_tokens(const std::string& text, YearMonth month) {
    std::vector<TokenDoc> docs;
    std::istringstream in(text);
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        auto tab = line.find('\t');
        if (tab == std::string::npos) throw MalformedRecord(line_no, "missing tab");
        TokenDoc doc;
        doc.article_id = line.substr(0, tab);
        doc.month = month;
        std::istringstream toks(line.substr(tab + 1));
        std::string t;
        while (toks >> t) doc.tokens.push_back(t);
        docs.push_back(std::move(doc));
    }
    auto buckets = partition(docs);
    if (buckets.empty()) return MonthlyCorpus{month, {}, {}};
    return buckets.begin()->second;
}

inline MonthlyCorpus read_month_tokens(const std::string& path, YearMonth month) {
    std::ifstream in(path);
    if (!in) throw UnreadablePath(path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_month_tokens(buf.str(), month);
}

}  // namespace trendrank
