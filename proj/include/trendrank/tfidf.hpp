#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

#include "trendrank/bigram.hpp"
#include "trendrank/corpus.hpp"
#include "trendrank/errors.hpp"

namespace trendrank {

/// Adjacent token pairs, overlaps allowed: [a,b,c] yields (a,b) and (b,c).
inline std::vector<Bigram> extract_bigrams(const TokenDoc& doc) {
    std::vector<Bigram> out;
    if (doc.tokens.size() < 2) return out;
    out.reserve(doc.tokens.size() - 1);
    for (std::size_t i = 0; i + 1 < doc.tokens.size(); ++i)
        out.push_back(Bigram{doc.tokens[i], doc.tokens[i + 1]});
    return out;
}

inline long bigram_tf(const Bigram& bigram, const TokenDoc& doc) {
    long n = 0;
    for (std::size_t i = 0; i + 1 < doc.tokens.size(); ++i)
        if (doc.tokens[i] == bigram.first && doc.tokens[i + 1] == bigram.second) ++n;
    return n;
}

/// Smoothed idf over the month's documents.
inline double bigram_idf(long doc_count, long df) {
    return std::log((1.0 + static_cast<double>(doc_count)) /
                    (1.0 + static_cast<double>(df))) +
           1.0;
}

struct ScoredBigram {
    Bigram bigram;
    double avg_tfidf = 0.0;
    double max_tfidf = 0.0;
};

/// Scores every bigram in the month: tf-idf per document, then the average
/// over documents the bigram occurs in and the maximum over all documents.
inline std::vector<ScoredBigram> score_bigrams(const MonthlyCorpus& corpus) {
    if (corpus.docs.empty()) throw EmptyCorpus();

    struct Tally {
        long df = 0;
        std::vector<long> tfs;
    };
    std::map<Bigram, Tally> tallies;
    for (const auto& doc : corpus.docs) {
        std::map<Bigram, long> counts;
        for (std::size_t i = 0; i + 1 < doc.tokens.size(); ++i)
            ++counts[Bigram{doc.tokens[i], doc.tokens[i + 1]}];
        for (const auto& [bigram, tf] : counts) {
            auto& t = tallies[bigram];
            ++t.df;
            t.tfs.push_back(tf);
        }
    }

    const long n_docs = static_cast<long>(corpus.docs.size());
    std::vector<ScoredBigram> scored;
    scored.reserve(tallies.size());
    for (const auto& [bigram, tally] : tallies) {
        const double idf = bigram_idf(n_docs, tally.df);
        double sum = 0.0, mx = 0.0;
        for (long tf : tally.tfs) {
            const double s = static_cast<double>(tf) * idf;
            sum += s;
            mx = std::max(mx, s);
        }
        scored.push_back({bigram, sum / static_cast<double>(tally.tfs.size()), mx});
    }
    return scored;
}

/// Union of the top_k_avg bigrams by average tf-idf and the top_k_max by
/// maximum tf-idf. Ordered by average descending, then bigram key ascending.
inline std::vector<ScoredBigram> tfidf_candidates(const MonthlyCorpus& corpus,
                                                  std::size_t top_k_avg,
                                                  std::size_t top_k_max) {
    if (top_k_avg < 1 || top_k_max < 1)
        throw ConfigError("tf-idf candidate counts must be at least 1");
    auto scored = score_bigrams(corpus);

    auto by_avg = [](const ScoredBigram& a, const ScoredBigram& b) {
        if (a.avg_tfidf != b.avg_tfidf) return a.avg_tfidf > b.avg_tfidf;
        return a.bigram < b.bigram;
    };
    auto by_max = [](const ScoredBigram& a, const ScoredBigram& b) {
        if (a.max_tfidf != b.max_tfidf) return a.max_tfidf > b.max_tfidf;
        return a.bigram < b.bigram;
    };

    std::map<Bigram, ScoredBigram> picked;
    auto take_top = [&](auto cmp, std::size_t top_k) {
        auto order = scored;
        std::sort(order.begin(), order.end(), cmp);
        const std::size_t n = std::min(top_k, order.size());
        for (std::size_t i = 0; i < n; ++i) picked.emplace(order[i].bigram, order[i]);
    };
    take_top(by_avg, top_k_avg);
    take_top(by_max, top_k_max);

    std::vector<ScoredBigram> out;
    out.reserve(picked.size());
    for (const auto& [bigram, s] : picked) out.push_back(s);
    std::sort(out.begin(), out.end(), by_avg);
    return out;
}

}  // namespace trendrank
