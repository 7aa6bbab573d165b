#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "trendrank/corpus.hpp"
#include "trendrank/errors.hpp"
#include "trendrank/lda.hpp"
#include "trendrank/rng.hpp"

namespace trendrank {

inline constexpr double kNpmiEpsilon = 1e-12;

/// Binary word presence over sliding token windows. A document shorter than
/// the window size counts as a single window.
struct WindowStats {
    long total_windows = 0;
    std::map<std::string, long> word_windows;
    std::map<std::pair<std::string, std::string>, long> pair_windows;

    double probability(const std::string& w) const {
        auto it = word_windows.find(w);
        const long n = it == word_windows.end() ? 0 : it->second;
        return total_windows > 0 ? static_cast<double>(n) / static_cast<double>(total_windows)
                                 : 0.0;
    }

    double joint_probability(const std::string& a, const std::string& b) const {
        auto key = a < b ? std::make_pair(a, b) : std::make_pair(b, a);
        auto it = pair_windows.find(key);
        const long n = it == pair_windows.end() ? 0 : it->second;
        return total_windows > 0 ? static_cast<double>(n) / static_cast<double>(total_windows)
                                 : 0.0;
    }
};

inline WindowStats build_window_stats(const MonthlyCorpus& corpus,
                                      const std::set<std::string>& words,
                                      std::size_t window) {
    if (window == 0) throw ConfigError("window size must be positive");
    WindowStats stats;
    for (const auto& doc : corpus.docs) {
        const std::size_t len = doc.tokens.size();
        if (len == 0) continue;
        const std::size_t span = std::min(window, len);
        const std::size_t n_windows = len - span + 1;
        for (std::size_t start = 0; start < n_windows; ++start) {
            std::vector<std::string> present;
            for (std::size_t i = start; i < start + span; ++i)
                if (words.count(doc.tokens[i])) present.push_back(doc.tokens[i]);
            std::sort(present.begin(), present.end());
            present.erase(std::unique(present.begin(), present.end()), present.end());
            ++stats.total_windows;
            for (std::size_t i = 0; i < present.size(); ++i) {
                ++stats.word_windows[present[i]];
                for (std::size_t j = i + 1; j < present.size(); ++j)
                    ++stats.pair_windows[{present[i], present[j]}];
            }
        }
    }
    return stats;
}

/// Normalized pointwise mutual information in [-1, 1]. A pair that never
/// shares a window scores exactly -1.
inline double npmi(const WindowStats& stats, const std::string& a, const std::string& b) {
    if (stats.total_windows == 0) return 0.0;
    const double p_ab = stats.joint_probability(a, b);
    if (p_ab == 0.0) return -1.0;
    const double p_a = stats.probability(a);
    const double p_b = stats.probability(b);
    const double pmi =
        std::log((p_ab + kNpmiEpsilon) / ((p_a + kNpmiEpsilon) * (p_b + kNpmiEpsilon)));
    const double value = pmi / (-std::log(p_ab + kNpmiEpsilon));
    return std::clamp(value, -1.0, 1.0);
}

/// Mean pairwise npmi over a word list; fewer than two distinct words give 0.
inline double topic_coherence(const WindowStats& stats, const std::vector<std::string>& words) {
    std::vector<std::string> distinct = words;
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    if (distinct.size() < 2) return 0.0;
    double sum = 0.0;
    long pairs = 0;
    for (std::size_t i = 0; i < distinct.size(); ++i)
        for (std::size_t j = i + 1; j < distinct.size(); ++j) {
            sum += npmi(stats, distinct[i], distinct[j]);
            ++pairs;
        }
    return sum / static_cast<double>(pairs);
}

inline double model_coherence(const MonthlyCorpus& corpus, const LdaModel& model,
                              std::size_t top_m, std::size_t window) {
    if (top_m < 2) throw ConfigError("coherence needs at least two top words per topic");
    if (window < 2) throw ConfigError("coherence window must be at least 2");
    std::set<std::string> all_words;
    std::vector<std::vector<std::string>> topic_words;
    topic_words.reserve(static_cast<std::size_t>(model.topics));
    for (int t = 0; t < model.topics; ++t) {
        auto words = model.top_words(t, top_m);
        for (const auto& w : words) all_words.insert(w);
        topic_words.push_back(std::move(words));
    }
    const auto stats = build_window_stats(corpus, all_words, window);
    double sum = 0.0;
    for (const auto& words : topic_words) sum += topic_coherence(stats, words);
    return sum / static_cast<double>(model.topics);
}

struct TopicCountSelection {
    int topics = 0;
    LdaModel model;
    std::vector<std::pair<int, double>> curve;  // (k, mean coherence) per fitted k
};

/// Fits one model per grid value (seed + k per fit) and keeps the most
/// coherent; ties go to the smaller topic count.
inline TopicCountSelection select_topic_count(const MonthlyCorpus& corpus,
                                              const std::vector<int>& grid, LdaParams params,
                                              std::size_t top_m, std::size_t window,
                                              std::uint64_t seed) {
    if (grid.empty()) throw ConfigError("topic grid is empty");
    if (corpus.docs.empty()) throw EmptyCorpus();

    TopicCountSelection best;
    double best_score = 0.0;
    bool have_best = false;
    std::vector<int> ks = grid;
    std::sort(ks.begin(), ks.end());
    ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
    for (int k : ks) {
        if (k < 2) throw ConfigError("topic grid entries must be at least 2");
        LdaParams p = params;
        p.topics = k;
        auto model = fit_lda(corpus, p, seed + static_cast<std::uint64_t>(k));
        const double score = model_coherence(corpus, model, top_m, window);
        best.curve.emplace_back(k, score);
        if (!have_best || score > best_score) {
            have_best = true;
            best_score = score;
            best.topics = k;
            best.model = std::move(model);
        }
    }
    return best;
}

}  // namespace trendrank
