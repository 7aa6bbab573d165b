#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdint>
#include <map>
#include <vector>

#include "support.hpp"
#include "trendrank/ranking.hpp"

using namespace trendrank;

namespace {

Bigram bg(const std::string& key) { return *try_parse_bigram(key); }

BigramEmbedding emb(const std::string& key, YearMonth month, std::vector<double> vec) {
    BigramEmbedding e;
    e.bigram = bg(key);
    e.month = month;
    e.occurrences = 1;
    e.vec = std::move(vec);
    return e;
}

std::map<Bigram, BigramEmbedding> table(std::vector<BigramEmbedding> embs) {
    std::map<Bigram, BigramEmbedding> out;
    for (auto& e : embs) out.emplace(e.bigram, std::move(e));
    return out;
}

const YearMonth kJan{2020, 1};
const YearMonth kFeb{2020, 2};

}  // namespace

TEST_CASE("cosine matches the textbook value", "[ranking]") {
    const double got = cosine({1, 2, 3}, {4, 5, 6});
    CHECK(got == Catch::Approx(32.0 / (std::sqrt(14.0) * std::sqrt(77.0))).epsilon(1e-12));
    CHECK(cosine({1, 0}, {0, 1}) == 0.0);
    CHECK(cosine({2, 0}, {5, 0}) == 1.0);
    CHECK(cosine({1, 0}, {-3, 0}) == -1.0);
}

TEST_CASE("cosine clamps rounding overshoot and rejects bad input", "[ranking]") {
    const std::vector<double> v{0.1, 0.2, 0.3, 0.4};
    CHECK(cosine(v, v) <= 1.0);
    CHECK_THROWS_AS(cosine({1, 2}, {1, 2, 3}), DimensionMismatch);
    CHECK_THROWS_AS(cosine({0, 0}, {1, 2}), ZeroVector);
    CHECK_THROWS_AS(cosine({1, 2}, {0, 0}), ZeroVector);
}

TEST_CASE("rank 1 goes to the most similar pair", "[ranking]") {
    const std::vector<Bigram> pool{bg("aa bb"), bg("cc dd"), bg("ee ff")};
    const auto embedded = table({
        emb("aa bb", kJan, {1, 0}),
        emb("cc dd", kJan, {1, 0.2}),
        emb("ee ff", kJan, {0, 1}),
    });
    const auto ranking = rank_month(pool, embedded, kJan);
    REQUIRE(ranking.entries.size() == 3);
    CHECK(ranking.entries[0].pair == PairKey::make(bg("aa bb"), bg("cc dd")));
    CHECK(ranking.entries[0].rank == 1);
    CHECK(ranking.entries[1].pair == PairKey::make(bg("cc dd"), bg("ee ff")));
    CHECK(ranking.entries[2].pair == PairKey::make(bg("aa bb"), bg("ee ff")));
    CHECK(ranking.entries[2].rank == 3);
    CHECK(ranking.missing.empty());
    CHECK(*ranking.rank_of(PairKey::make(bg("aa bb"), bg("cc dd"))) == 1);
    CHECK_FALSE(ranking.rank_of(PairKey::make(bg("aa bb"), bg("zz zz"))).has_value());
}

TEST_CASE("a pool of n keywords yields n choose 2 pairs", "[ranking]") {
    std::vector<Bigram> pool;
    std::vector<BigramEmbedding> embs;
    Rng rng(11);
    for (int i = 0; i < 10; ++i) {
        const auto key = "kw" + std::to_string(i) + " mate";
        pool.push_back(bg(key));
        std::vector<double> vec(4);
        for (auto& x : vec) x = rng.uniform_range(-1.0, 1.0);
        embs.push_back(emb(key, kJan, vec));
    }
    const auto ranking = rank_month(pool, table(std::move(embs)), kJan);
    REQUIRE(ranking.entries.size() == 45);
    for (std::size_t i = 0; i < ranking.entries.size(); ++i) {
        CHECK(ranking.entries[i].rank == static_cast<long>(i + 1));
        if (i > 0)
            CHECK(ranking.entries[i - 1].similarity >= ranking.entries[i].similarity);
    }
}

TEST_CASE("equal similarities still get distinct ranks, key order", "[ranking]") {
    const std::vector<Bigram> pool{bg("aa bb"), bg("cc dd"), bg("ee ff")};
    // all three vectors identical: every pair has similarity 1
    const auto embedded = table({
        emb("aa bb", kJan, {1, 1}),
        emb("cc dd", kJan, {1, 1}),
        emb("ee ff", kJan, {1, 1}),
    });
    const auto ranking = rank_month(pool, embedded, kJan);
    REQUIRE(ranking.entries.size() == 3);
    CHECK(ranking.entries[0].pair == PairKey::make(bg("aa bb"), bg("cc dd")));
    CHECK(ranking.entries[1].pair == PairKey::make(bg("aa bb"), bg("ee ff")));
    CHECK(ranking.entries[2].pair == PairKey::make(bg("cc dd"), bg("ee ff")));
    CHECK(ranking.entries[0].rank == 1);
    CHECK(ranking.entries[1].rank == 2);
    CHECK(ranking.entries[2].rank == 3);
}

TEST_CASE("ranking rejects tiny pools and sparse embeddings", "[ranking]") {
    CHECK_THROWS_AS(rank_month({bg("aa bb")}, {}, kJan), ConfigError);
    const std::vector<Bigram> pool{bg("aa bb"), bg("cc dd"), bg("ee ff")};
    const auto embedded = table({emb("aa bb", kJan, {1, 0})});
    CHECK_THROWS_AS(rank_month(pool, embedded, kJan), FewerThanTwoEmbedded);
}

TEST_CASE("pairs touching an unembedded keyword land in the missing set", "[ranking]") {
    const std::vector<Bigram> pool{bg("aa bb"), bg("cc dd"), bg("ee ff"), bg("gg hh")};
    const auto embedded = table({
        emb("aa bb", kJan, {1, 0}),
        emb("cc dd", kJan, {0, 1}),
    });
    const auto ranking = rank_month(pool, embedded, kJan);
    CHECK(ranking.entries.size() == 1);
    REQUIRE(ranking.missing.size() == 5);
    CHECK(ranking.missing.count(PairKey::make(bg("ee ff"), bg("gg hh"))) == 1);
    CHECK(ranking.missing.count(PairKey::make(bg("aa bb"), bg("ee ff"))) == 1);
    CHECK(ranking.missing.count(PairKey::make(bg("cc dd"), bg("gg hh"))) == 1);
    CHECK(ranking.missing.count(PairKey::make(bg("aa bb"), bg("cc dd"))) == 0);
}

TEST_CASE("deltas are previous rank minus current rank", "[ranking]") {
    const std::vector<Bigram> pool{bg("aa bb"), bg("cc dd"), bg("ee ff")};
    const auto jan = rank_month(pool,
                                table({
                                    emb("aa bb", kJan, {1, 0}),
                                    emb("cc dd", kJan, {1, 0.2}),
                                    emb("ee ff", kJan, {0, 1}),
                                }),
                                kJan);
    // February flips ee ff toward aa bb
    const auto feb = rank_month(pool,
                                table({
                                    emb("aa bb", kFeb, {1, 0}),
                                    emb("cc dd", kFeb, {0, 1}),
                                    emb("ee ff", kFeb, {1, 0.1}),
                                }),
                                kFeb);
    const auto key = PairKey::make(bg("aa bb"), bg("ee ff"));
    const auto series = rank_deltas({jan, feb}, key);
    REQUIRE(series.points.size() == 2);
    CHECK(series.points.at(kJan).second == 3);
    CHECK(series.points.at(kFeb).second == 1);
    REQUIRE(series.deltas.count(kFeb) == 1);
    CHECK(series.deltas.count(kJan) == 0);
    CHECK(*series.deltas.at(kFeb) == 2);
}

TEST_CASE("a delta is absent when either month lacks the pair", "[ranking]") {
    const std::vector<Bigram> pool{bg("aa bb"), bg("cc dd"), bg("ee ff")};
    const auto jan = rank_month(pool,
                                table({
                                    emb("aa bb", kJan, {1, 0}),
                                    emb("cc dd", kJan, {0, 1}),
                                }),
                                kJan);
    const auto feb = rank_month(pool,
                                table({
                                    emb("aa bb", kFeb, {1, 0}),
                                    emb("cc dd", kFeb, {0, 1}),
                                    emb("ee ff", kFeb, {1, 1}),
                                }),
                                kFeb);
    const auto series = rank_deltas({jan, feb}, PairKey::make(bg("aa bb"), bg("ee ff")));
    REQUIRE(series.deltas.count(kFeb) == 1);
    CHECK_FALSE(series.deltas.at(kFeb).has_value());
    const auto verdicts = detect(series, -100);
    REQUIRE(verdicts.size() == 1);
    CHECK_FALSE(verdicts[0].emerging);
}

TEST_CASE("rank_deltas refuses a gap in the month sequence", "[ranking]") {
    const std::vector<Bigram> pool{bg("aa bb"), bg("cc dd")};
    const auto embedded = table({
        emb("aa bb", kJan, {1, 0}),
        emb("cc dd", kJan, {0, 1}),
    });
    const auto jan = rank_month(pool, embedded, kJan);
    const auto mar = rank_month(pool, embedded, YearMonth{2020, 3});
    CHECK_THROWS_AS(rank_deltas({jan, mar}, PairKey::make(bg("aa bb"), bg("cc dd"))),
                    NonConsecutiveMonths);
}

TEST_CASE("emerging needs a delta strictly above the threshold", "[ranking]") {
    PairRankSeries series;
    series.pair = PairKey::make(bg("aa bb"), bg("cc dd"));
    series.deltas[kFeb] = 0;
    series.deltas[YearMonth{2020, 3}] = 1;
    series.deltas[YearMonth{2020, 4}] = std::nullopt;

    auto verdicts = detect(series, 0);
    REQUIRE(verdicts.size() == 3);
    CHECK_FALSE(verdicts[0].emerging);  // delta 0 at threshold 0
    CHECK(verdicts[1].emerging);        // delta 1
    CHECK_FALSE(verdicts[2].emerging);  // no delta

    verdicts = detect(series, -1);
    CHECK(verdicts[0].emerging);  // delta 0 > -1
    CHECK_FALSE(verdicts[2].emerging);
}

TEST_CASE("detect_all covers ranked and missing pairs alike", "[ranking]") {
    const std::vector<Bigram> pool{bg("aa bb"), bg("cc dd"), bg("ee ff")};
    const auto jan = rank_month(pool,
                                table({
                                    emb("aa bb", kJan, {1, 0}),
                                    emb("cc dd", kJan, {0, 1}),
                                }),
                                kJan);
    const auto feb = rank_month(pool,
                                table({
                                    emb("aa bb", kFeb, {1, 0}),
                                    emb("cc dd", kFeb, {0, 1}),
                                }),
                                kFeb);
    const auto all = detect_all({jan, feb}, 0);
    CHECK(all.size() == 3);
    for (const auto& [pair, verdicts] : all) {
        REQUIRE(verdicts.size() == 1);
        CHECK(verdicts[0].month == kFeb);
    }
    CHECK(all.count(PairKey::make(bg("aa bb"), bg("ee ff"))) == 1);
}

TEST_CASE("order and deltas survive positive per-vector rescaling", "[ranking]") {
    Rng rng(31);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<Bigram> pool;
        std::vector<BigramEmbedding> base, scaled;
        const int n = 3 + static_cast<int>(rng.uniform_int(4));
        for (int i = 0; i < n; ++i) {
            const auto key = "kw" + std::to_string(i) + " mate";
            pool.push_back(bg(key));
            std::vector<double> vec(3);
            for (auto& x : vec) x = rng.uniform_range(-1.0, 1.0);
            if (std::abs(vec[0]) < 1e-6) vec[0] = 0.5;
            base.push_back(emb(key, kJan, vec));
            const double s = rng.uniform_range(0.1, 9.0);
            for (auto& x : vec) x *= s;
            scaled.push_back(emb(key, kJan, vec));
        }
        const auto a = rank_month(pool, table(std::move(base)), kJan);
        const auto b = rank_month(pool, table(std::move(scaled)), kJan);
        REQUIRE(a.entries.size() == b.entries.size());
        for (std::size_t i = 0; i < a.entries.size(); ++i) {
            CHECK(a.entries[i].pair == b.entries[i].pair);
            CHECK(a.entries[i].rank == b.entries[i].rank);
        }
    }
}

TEST_CASE("raising the threshold never flags more pairs", "[ranking]") {
    Rng rng(57);
    std::vector<MonthRanking> rankings;
    YearMonth month{2020, 1};
    const std::vector<Bigram> pool{bg("aa bb"), bg("cc dd"), bg("ee ff"), bg("gg hh")};
    for (int m = 0; m < 6; ++m) {
        std::vector<BigramEmbedding> embs;
        for (const auto& b : pool) {
            std::vector<double> vec(3);
            for (auto& x : vec) x = rng.uniform_range(-1.0, 1.0);
            if (std::abs(vec[0]) < 1e-6) vec[0] = 0.5;
            embs.push_back(emb(b.key(), month, vec));
        }
        rankings.push_back(rank_month(pool, table(std::move(embs)), month));
        month = month.next();
    }
    std::size_t prev_flagged = SIZE_MAX;
    for (long threshold = -3; threshold <= 3; ++threshold) {
        std::size_t flagged = 0;
        for (const auto& [pair, verdicts] : detect_all(rankings, threshold))
            for (const auto& v : verdicts)
                if (v.emerging) ++flagged;
        CHECK(flagged <= prev_flagged);
        prev_flagged = flagged;
    }
}
