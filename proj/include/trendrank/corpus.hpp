#pragma once

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>
#include <regex>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "trendrank/errors.hpp"
#include "trendrank/yearmonth.hpp"

namespace trendrank {

/// One raw news item as ingested.
struct Article {
    std::string id;
    std::string published_at;  // "YYYY-MM-DDTHH:MM:SSZ"
    YearMonth month;
    std::string title;
    std::string body;
};

/// Cleaned, tokenized document. Token order is the article's surface order.
struct TokenDoc {
    std::string article_id;
    YearMonth month;
    std::vector<std::string> tokens;
};

/// All surviving documents of one calendar month plus the month vocabulary.
/// vocab is an ordered map so every consumer iterates it deterministically.
struct MonthlyCorpus {
    YearMonth month;
    std::vector<TokenDoc> docs;
    std::map<std::string, long> vocab;

    std::size_t token_count() const {
        std::size_t n = 0;
        for (const auto& d : docs) n += d.tokens.size();
        return n;
    }
};

struct CleaningConfig {
    std::vector<std::string> boilerplate_patterns;  // ECMAScript regexes, applied in order
    std::unordered_set<std::string> glossary_stoplist;
    std::unordered_set<std::string> stopword_list;
    std::unordered_map<std::string, std::string> lemma_table;
    std::size_t min_tokens = 10;
};

/// Lowercases, splits on non-alphanumeric bytes, drops pure-digit tokens and
/// tokens shorter than two characters.
inline std::vector<std::string> tokenize(const std::string& text) {
    std::vector<std::string> tokens;
    std::string cur;
    bool all_digit = true;
    auto flush = [&] {
        if (cur.size() >= 2 && !all_digit) tokens.push_back(cur);
        cur.clear();
        all_digit = true;
    };
    for (unsigned char c : text) {
        if (std::isalnum(c)) {
            if (!std::isdigit(c)) all_digit = false;
            cur.push_back(static_cast<char>(std::tolower(c)));
        } else {
            flush();
        }
    }
    flush();
    return tokens;
}

/// The fixed five-step cleaning pipeline: strip boilerplate from title+body,
/// tokenize, stop-remove on surface forms, lemmatize, then apply the
/// min-token cutoff. Total: rejection is the empty optional.
inline std::optional<TokenDoc> clean(const Article& article, const CleaningConfig& cfg) {
    std::string text = article.title + " " + article.body;
    for (const auto& pat : cfg.boilerplate_patterns) {
        std::regex re(pat, std::regex::ECMAScript);
        text = std::regex_replace(text, re, " ");
    }

    std::vector<std::string> tokens = tokenize(text);

    std::vector<std::string> kept;
    kept.reserve(tokens.size());
    for (auto& t : tokens) {
        if (cfg.stopword_list.count(t) || cfg.glossary_stoplist.count(t)) continue;
        kept.push_back(std::move(t));
    }

    for (auto& t : kept) {
        auto it = cfg.lemma_table.find(t);
        if (it != cfg.lemma_table.end()) t = it->second;
    }

    if (kept.size() < cfg.min_tokens) return std::nullopt;
    return TokenDoc{article.id, article.month, std::move(kept)};
}

/// Buckets documents by month and recomputes per-bucket vocabularies.
inline std::map<YearMonth, MonthlyCorpus> partition(const std::vector<TokenDoc>& docs) {
    std::map<YearMonth, MonthlyCorpus> buckets;
    for (const auto& doc : docs) {
        auto& bucket = buckets[doc.month];
        bucket.month = doc.month;
        for (const auto& t : doc.tokens) bucket.vocab[t]++;
        bucket.docs.push_back(doc);
    }
    return buckets;
}

/// Extends cfg.lemma_table with plural/-ing/-ed suffix strips for every
/// vocab token whose stripped form (or stripped+e) is itself in vocab.
/// Entries already present win; the table never maps a token to itself.
inline void augment_lemma_table(CleaningConfig& cfg,
                                const std::map<std::string, long>& vocab) {
    auto in_vocab = [&](const std::string& w) { return vocab.count(w) != 0; };
    for (const auto& [token, n] : vocab) {
        (void)n;
        if (cfg.lemma_table.count(token)) continue;
        std::string lemma;
        auto ends = [&](const char* suf) {
            std::size_t len = std::char_traits<char>::length(suf);
            return token.size() > len + 1 && token.compare(token.size() - len, len, suf) == 0;
        };
        auto stem = [&](std::size_t strip) { return token.substr(0, token.size() - strip); };
        if (ends("ing")) {
            if (in_vocab(stem(3))) lemma = stem(3);
            else if (in_vocab(stem(3) + "e")) lemma = stem(3) + "e";
        } else if (ends("ed")) {
            if (in_vocab(stem(2))) lemma = stem(2);
            else if (in_vocab(stem(1))) lemma = stem(1);  // "-ed" where base ends in e
        } else if (ends("es")) {
            if (in_vocab(stem(2))) lemma = stem(2);
            else if (in_vocab(stem(1))) lemma = stem(1);
        } else if (ends("s") && token[token.size() - 2] != 's') {
            if (in_vocab(stem(1))) lemma = stem(1);
        }
        if (!lemma.empty() && lemma != token) cfg.lemma_table.emplace(token, lemma);
    }
}

}  // namespace trendrank
