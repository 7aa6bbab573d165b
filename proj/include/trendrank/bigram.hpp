#pragma once

#include <compare>
#include <optional>
#include <string>

namespace trendrank {

/// Ordered pair of adjacent tokens; the keyword unit everywhere.
struct Bigram {
    std::string first;
    std::string second;

    auto operator<=>(const Bigram&) const = default;

    /// Canonical key "first second".
    std::string key() const { return first + " " + second; }

    /// Single-token form "first_second" used when bigrams are folded into a
    /// unigram vocabulary.
    std::string composite() const { return first + "_" + second; }
};

inline std::optional<Bigram> try_parse_bigram(const std::string& key) {
    auto sp = key.find(' ');
    if (sp == std::string::npos || sp == 0 || sp + 1 >= key.size()) return std::nullopt;
    if (key.find(' ', sp + 1) != std::string::npos) return std::nullopt;
    return Bigram{key.substr(0, sp), key.substr(sp + 1)};
}

/// Unordered keyword pair stored in canonical (a < b) order.
struct PairKey {
    Bigram a;
    Bigram b;

    auto operator<=>(const PairKey&) const = default;

    static PairKey make(Bigram x, Bigram y) {
        if (y < x) std::swap(x, y);
        return PairKey{std::move(x), std::move(y)};
    }

    /// Textual form "a1 a2|b1 b2". Contains no commas, safe in CSV fields.
    std::string key() const { return a.key() + "|" + b.key(); }
};

inline std::optional<PairKey> try_parse_pair_key(const std::string& key) {
    auto bar = key.find('|');
    if (bar == std::string::npos) return std::nullopt;
    auto a = try_parse_bigram(key.substr(0, bar));
    auto b = try_parse_bigram(key.substr(bar + 1));
    if (!a || !b || *a == *b) return std::nullopt;
    return PairKey::make(*a, *b);
}

}  // namespace trendrank
