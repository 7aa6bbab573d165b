#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "trendrank/bigram.hpp"
#include "trendrank/corpus.hpp"
#include "trendrank/errors.hpp"
#include "trendrank/rng.hpp"

namespace trendrank {

struct Occurrence {
    std::string doc_id;
    std::size_t position = 0;  // index of the bigram's first token
};

inline std::vector<Occurrence> find_occurrences(const MonthlyCorpus& corpus,
                                                const Bigram& bigram) {
    std::vector<Occurrence> out;
    for (const auto& doc : corpus.docs)
        for (std::size_t i = 0; i + 1 < doc.tokens.size(); ++i)
            if (doc.tokens[i] == bigram.first && doc.tokens[i + 1] == bigram.second)
                out.push_back({doc.article_id, i});
    return out;
}

/// Supplies a context-dependent vector for one token position of a document.
class EmbeddingProvider {
public:
    virtual ~EmbeddingProvider() = default;
    virtual int dim() const = 0;
    virtual std::vector<double> token_vector(const TokenDoc& doc, std::size_t position) const = 0;
};

struct BigramEmbedding {
    Bigram bigram;
    YearMonth month{};
    long occurrences = 0;
    std::vector<double> vec;
};

/// Month vector for a bigram: each occurrence contributes the mean of its two
/// token vectors, and the bigram vector is the mean over occurrences. Bigrams
/// absent from the month yield nothing.
inline std::optional<BigramEmbedding> embed_bigram(const MonthlyCorpus& corpus,
                                                   const Bigram& bigram,
                                                   const EmbeddingProvider& provider) {
    const auto d = static_cast<std::size_t>(provider.dim());
    std::vector<double> sum(d, 0.0);
    long occurrences = 0;
    for (const auto& doc : corpus.docs) {
        for (std::size_t i = 0; i + 1 < doc.tokens.size(); ++i) {
            if (doc.tokens[i] != bigram.first || doc.tokens[i + 1] != bigram.second) continue;
            const auto a = provider.token_vector(doc, i);
            const auto b = provider.token_vector(doc, i + 1);
            if (a.size() != d || b.size() != d)
                throw DimensionMismatch("provider returned a vector of the wrong dimension");
            for (std::size_t j = 0; j < d; ++j) sum[j] += 0.5 * (a[j] + b[j]);
            ++occurrences;
        }
    }
    if (occurrences == 0) return std::nullopt;
    BigramEmbedding out;
    out.bigram = bigram;
    out.month = corpus.month;
    out.occurrences = occurrences;
    out.vec.resize(d);
    for (std::size_t j = 0; j < d; ++j)
        out.vec[j] = sum[j] / static_cast<double>(occurrences);
    return out;
}

/// Vectors loaded from a file: "d=<int>" header, then
/// "doc_id<TAB>position<TAB>token<TAB>f1 f2 ... fd" lines.
class PrecomputedProvider : public EmbeddingProvider {
public:
    explicit PrecomputedProvider(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw UnreadablePath(path);
        std::string line;
        if (!std::getline(in, line)) throw BadHeader(path + ": empty file");
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.rfind("d=", 0) != 0) throw BadHeader(path + ": expected 'd=<int>'");
        try {
            dim_ = std::stoi(line.substr(2));
        } catch (const std::exception&) {
            throw BadHeader(path + ": expected 'd=<int>'");
        }
        if (dim_ <= 0) throw BadHeader(path + ": dimension must be positive");

        long line_no = 1;
        while (std::getline(in, line)) {
            ++line_no;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty()) continue;
            std::istringstream fields(line);
            std::string doc_id, pos_text, token, values_text;
            if (!std::getline(fields, doc_id, '\t') || !std::getline(fields, pos_text, '\t') ||
                !std::getline(fields, token, '\t') || !std::getline(fields, values_text))
                throw MalformedRecord(line_no, "expected four tab-separated fields");
            std::size_t position = 0;
            try {
                position = static_cast<std::size_t>(std::stoul(pos_text));
            } catch (const std::exception&) {
                throw MalformedRecord(line_no, "bad position: " + pos_text);
            }
            std::vector<double> vec;
            vec.reserve(static_cast<std::size_t>(dim_));
            std::istringstream values(values_text);
            double v;
            while (values >> v) vec.push_back(v);
            if (static_cast<int>(vec.size()) != dim_)
                throw DimensionMismatch("line " + std::to_string(line_no) + " has " +
                                        std::to_string(vec.size()) + " values, expected " +
                                        std::to_string(dim_));
            vectors_[{doc_id, position}] = {token, std::move(vec)};
        }
    }

    int dim() const override { return dim_; }

    std::vector<double> token_vector(const TokenDoc& doc, std::size_t position) const override {
        auto it = vectors_.find({doc.article_id, position});
        if (it == vectors_.end() || position >= doc.tokens.size() ||
            it->second.first != doc.tokens[position])
            throw MissingVector(doc.article_id, position);
        return it->second.second;
    }

private:
    int dim_ = 0;
    std::map<std::pair<std::string, std::size_t>, std::pair<std::string, std::vector<double>>>
        vectors_;
};

/// Hash-seeded context vectors with no training: every token gets a fixed
/// random unit vector, and a position's vector is the normalized sum of the
/// base vectors inside a centered window. Identical documents therefore embed
/// identically no matter which month they appear in.
class FallbackProvider : public EmbeddingProvider {
public:
    FallbackProvider(int dim, std::uint64_t seed, std::size_t window)
        : dim_(dim), seed_(seed), window_(window) {
        if (dim <= 0) throw ConfigError("embedding dimension must be positive");
        if (window == 0) throw ConfigError("context window must be positive");
    }

    int dim() const override { return dim_; }

    std::vector<double> base_vector(const std::string& token) const {
        Rng rng(derive_seed(seed_, "tokvec", token));
        std::vector<double> v(static_cast<std::size_t>(dim_));
        for (auto& x : v) x = rng.gaussian();
        normalize(v);
        return v;
    }

    std::vector<double> token_vector(const TokenDoc& doc, std::size_t position) const override {
        if (position >= doc.tokens.size())
            throw MissingVector(doc.article_id, position);
        const std::size_t left = (window_ - 1) / 2;
        const std::size_t lo = position > left ? position - left : 0;
        const std::size_t hi = std::min(doc.tokens.size(), position + (window_ - left));
        std::vector<double> sum(static_cast<std::size_t>(dim_), 0.0);
        for (std::size_t i = lo; i < hi; ++i) {
            const auto base = base_vector(doc.tokens[i]);
            for (std::size_t j = 0; j < sum.size(); ++j) sum[j] += base[j];
        }
        if (!normalize(sum)) return base_vector(doc.tokens[position]);
        return sum;
    }

private:
    static bool normalize(std::vector<double>& v) {
        double norm = 0.0;
        for (double x : v) norm += x * x;
        norm = std::sqrt(norm);
        if (norm < 1e-12) return false;
        for (auto& x : v) x /= norm;
        return true;
    }

    int dim_ = 0;
    std::uint64_t seed_ = 0;
    std::size_t window_ = 0;
};

inline std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

/// Dump format: "first second<TAB>YYYY-MM<TAB>occurrences<TAB>f1 f2 ... fd".
inline std::string embedding_dump_text(const std::vector<BigramEmbedding>& embeddings) {
    std::ostringstream out;
    for (const auto& e : embeddings) {
        out << e.bigram.key() << '\t' << e.month.str() << '\t' << e.occurrences << '\t';
        for (std::size_t j = 0; j < e.vec.size(); ++j) {
            if (j) out << ' ';
            out << format_double(e.vec[j]);
        }
        out << '\n';
    }
    return out.str();
}

inline std::vector<BigramEmbedding> parse_embedding_dump(const std::string& text) {
    std::vector<BigramEmbedding> out;
    std::istringstream in(text);
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream fields(line);
        std::string key, month_text, occ_text, values_text;
        if (!std::getline(fields, key, '\t') || !std::getline(fields, month_text, '\t') ||
            !std::getline(fields, occ_text, '\t') || !std::getline(fields, values_text))
            throw MalformedRecord(line_no, "expected four tab-separated fields");
        auto bigram = try_parse_bigram(key);
        auto month = try_parse_year_month(month_text);
        if (!bigram || !month) throw MalformedRecord(line_no, "bad bigram or month");
        BigramEmbedding e;
        e.bigram = *bigram;
        e.month = *month;
        try {
            e.occurrences = std::stol(occ_text);
        } catch (const std::exception&) {
            throw MalformedRecord(line_no, "bad occurrence count: " + occ_text);
        }
        std::istringstream values(values_text);
        double v;
        while (values >> v) e.vec.push_back(v);
        if (e.vec.empty()) throw MalformedRecord(line_no, "empty vector");
        out.push_back(std::move(e));
    }
    return out;
}

}  // namespace trendrank
