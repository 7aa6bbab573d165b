#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <vector>

#include "trendrank/bigram.hpp"
#include "trendrank/corpus.hpp"
#include "trendrank/lda.hpp"
#include "trendrank/tfidf.hpp"

namespace trendrank {

/// Rewrites each document so candidate bigrams become single composite tokens
/// ("cloud computing" -> "cloud_computing"). Merging is greedy left to right;
/// a merged pair cannot share tokens with the next merge.
inline MonthlyCorpus merge_bigram_tokens(const MonthlyCorpus& corpus,
                                         const std::set<Bigram>& candidates) {
    std::vector<TokenDoc> merged;
    merged.reserve(corpus.docs.size());
    for (const auto& doc : corpus.docs) {
        TokenDoc out;
        out.article_id = doc.article_id;
        out.month = doc.month;
        std::size_t i = 0;
        while (i < doc.tokens.size()) {
            if (i + 1 < doc.tokens.size() &&
                candidates.count(Bigram{doc.tokens[i], doc.tokens[i + 1]})) {
                out.tokens.push_back(doc.tokens[i] + "_" + doc.tokens[i + 1]);
                i += 2;
            } else {
                out.tokens.push_back(doc.tokens[i]);
                i += 1;
            }
        }
        merged.push_back(std::move(out));
    }
    auto buckets = partition(merged);
    if (buckets.empty()) return MonthlyCorpus{corpus.month, {}, {}};
    return buckets.begin()->second;
}

/// Candidate bigrams whose composite token reaches any topic's top_m words.
inline std::set<Bigram> lda_bigrams(const LdaModel& model, const std::set<Bigram>& candidates,
                                    std::size_t top_m) {
    std::map<std::string, Bigram> by_composite;
    for (const auto& b : candidates) by_composite.emplace(b.composite(), b);

    std::set<Bigram> out;
    for (int t = 0; t < model.topics; ++t)
        for (const auto& word : model.top_words(t, top_m)) {
            auto it = by_composite.find(word);
            if (it != by_composite.end()) out.insert(it->second);
        }
    return out;
}

struct KeywordEntry {
    Bigram bigram;
    double avg_tfidf = 0.0;
    double max_tfidf = 0.0;
    bool from_allow_list = false;
};

struct KeywordPool {
    std::vector<KeywordEntry> entries;  // avg tf-idf descending, then key
    bool empty_intersection = false;
};

/// Month keyword pool: the intersection of the tf-idf candidates and the
/// topic-model picks, capped by average tf-idf, then any allow-list bigrams
/// that are missing. Allow-list entries keep their scores when known.
inline KeywordPool build_pool(const std::vector<ScoredBigram>& candidates,
                              const std::set<Bigram>& lda_picks, std::size_t cap,
                              const std::vector<Bigram>& allow_list) {
    std::map<Bigram, ScoredBigram> scored;
    for (const auto& c : candidates) scored.emplace(c.bigram, c);

    std::vector<KeywordEntry> intersection;
    for (const auto& c : candidates)
        if (lda_picks.count(c.bigram))
            intersection.push_back({c.bigram, c.avg_tfidf, c.max_tfidf, false});

    auto order = [](const KeywordEntry& a, const KeywordEntry& b) {
        if (a.avg_tfidf != b.avg_tfidf) return a.avg_tfidf > b.avg_tfidf;
        return a.bigram < b.bigram;
    };
    std::sort(intersection.begin(), intersection.end(), order);

    KeywordPool pool;
    pool.empty_intersection = intersection.empty();
    if (intersection.size() > cap) intersection.resize(cap);
    std::set<Bigram> present;
    for (const auto& e : intersection) {
        present.insert(e.bigram);
        pool.entries.push_back(e);
    }
    for (const auto& b : allow_list) {
        if (present.count(b)) continue;
        present.insert(b);
        KeywordEntry e;
        e.bigram = b;
        e.from_allow_list = true;
        auto it = scored.find(b);
        if (it != scored.end()) {
            e.avg_tfidf = it->second.avg_tfidf;
            e.max_tfidf = it->second.max_tfidf;
        }
        pool.entries.push_back(e);
    }
    std::sort(pool.entries.begin(), pool.entries.end(), order);
    return pool;
}

}  // namespace trendrank
