#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "trendrank/bigram.hpp"
#include "trendrank/embedding.hpp"
#include "trendrank/errors.hpp"

namespace trendrank {

inline double cosine(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size())
        throw DimensionMismatch(std::to_string(a.size()) + " vs " + std::to_string(b.size()));
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na == 0.0 || nb == 0.0) throw ZeroVector();
    return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
}

struct RankedPair {
    PairKey pair;
    double similarity = 0.0;
    long rank = 0;
};

struct MonthRanking {
    YearMonth month{};
    std::vector<RankedPair> entries;       // similarity descending, then pair key
    std::set<PairKey> missing;             // pool pairs lacking an embedding

    std::optional<long> rank_of(const PairKey& key) const {
        for (const auto& e : entries)
            if (e.pair == key) return e.rank;
        return std::nullopt;
    }

    std::optional<double> similarity_of(const PairKey& key) const {
        for (const auto& e : entries)
            if (e.pair == key) return e.similarity;
        return std::nullopt;
    }
};

/// Ranks all pairs of the pool's embedded keywords by cosine similarity.
/// Rank 1 is the most similar pair; rank is the 1-based list position, with
/// equal similarities ordered by pair key, so ranks are exactly 1..n.
inline MonthRanking rank_month(const std::vector<Bigram>& pool,
                               const std::map<Bigram, BigramEmbedding>& embedded,
                               YearMonth month) {
    if (pool.size() < 2) throw ConfigError("keyword pool must hold at least two keywords");

    std::vector<const BigramEmbedding*> have;
    std::vector<Bigram> absent;
    for (const auto& b : pool) {
        auto it = embedded.find(b);
        if (it != embedded.end()) have.push_back(&it->second);
        else absent.push_back(b);
    }
    if (have.size() < 2) throw FewerThanTwoEmbedded();

    MonthRanking ranking;
    ranking.month = month;
    for (std::size_t i = 0; i < have.size(); ++i)
        for (std::size_t j = i + 1; j < have.size(); ++j) {
            RankedPair rp;
            rp.pair = PairKey::make(have[i]->bigram, have[j]->bigram);
            rp.similarity = cosine(have[i]->vec, have[j]->vec);
            ranking.entries.push_back(std::move(rp));
        }
    std::sort(ranking.entries.begin(), ranking.entries.end(),
              [](const RankedPair& a, const RankedPair& b) {
                  if (a.similarity != b.similarity) return a.similarity > b.similarity;
                  return a.pair < b.pair;
              });
    for (std::size_t i = 0; i < ranking.entries.size(); ++i)
        ranking.entries[i].rank = static_cast<long>(i + 1);

    for (std::size_t i = 0; i < absent.size(); ++i) {
        for (std::size_t j = i + 1; j < absent.size(); ++j)
            ranking.missing.insert(PairKey::make(absent[i], absent[j]));
        for (const auto* e : have) ranking.missing.insert(PairKey::make(absent[i], e->bigram));
    }
    return ranking;
}

struct PairRankSeries {
    PairKey pair;
    std::map<YearMonth, std::pair<double, long>> points;  // (similarity, rank)
    std::map<YearMonth, std::optional<long>> deltas;      // keyed from the second month on
};

/// Rank movement per month: previous rank minus current rank, so a positive
/// delta means the pair climbed toward rank 1. The delta for a month is
/// absent unless the pair is ranked in both it and the month before.
inline PairRankSeries rank_deltas(const std::vector<MonthRanking>& rankings,
                                  const PairKey& pair) {
    PairRankSeries series;
    series.pair = pair;
    for (std::size_t i = 0; i < rankings.size(); ++i) {
        if (i > 0 && rankings[i - 1].month.next() != rankings[i].month)
            throw NonConsecutiveMonths(rankings[i - 1].month.str(), rankings[i].month.str());
        const auto rank = rankings[i].rank_of(pair);
        if (rank) series.points[rankings[i].month] = {*rankings[i].similarity_of(pair), *rank};
        if (i > 0) {
            const auto prev = rankings[i - 1].rank_of(pair);
            series.deltas[rankings[i].month] =
                prev && rank ? std::optional<long>(*prev - *rank) : std::nullopt;
        }
    }
    return series;
}

struct DetectionVerdict {
    PairKey pair;
    YearMonth month{};
    std::optional<long> delta;
    long threshold = 0;
    bool emerging = false;
};

/// One verdict per delta month. A pair is emerging when its delta is defined
/// and strictly exceeds the threshold; an absent delta is never emerging.
inline std::vector<DetectionVerdict> detect(const PairRankSeries& series, long threshold) {
    std::vector<DetectionVerdict> verdicts;
    verdicts.reserve(series.deltas.size());
    for (const auto& [month, delta] : series.deltas) {
        DetectionVerdict v;
        v.pair = series.pair;
        v.month = month;
        v.delta = delta;
        v.threshold = threshold;
        v.emerging = delta.has_value() && *delta > threshold;
        verdicts.push_back(std::move(v));
    }
    return verdicts;
}

/// Verdicts for every pool pair of every month, pair key order.
inline std::map<PairKey, std::vector<DetectionVerdict>> detect_all(
    const std::vector<MonthRanking>& rankings, long threshold) {
    std::set<PairKey> pairs;
    for (const auto& ranking : rankings) {
        for (const auto& e : ranking.entries) pairs.insert(e.pair);
        for (const auto& p : ranking.missing) pairs.insert(p);
    }
    std::map<PairKey, std::vector<DetectionVerdict>> out;
    for (const auto& pair : pairs)
        out.emplace(pair, detect(rank_deltas(rankings, pair), threshold));
    return out;
}

}  // namespace trendrank
