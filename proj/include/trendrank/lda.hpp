#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "trendrank/corpus.hpp"
#include "trendrank/errors.hpp"
#include "trendrank/rng.hpp"

namespace trendrank {

struct LdaParams {
    int topics = 20;
    double alpha = 0.0;  // 0 means 50/topics
    double beta = 0.01;
    int iterations = 500;
    int burn_in = 200;
    int thin = 10;

    double effective_alpha() const {
        return alpha > 0.0 ? alpha : 50.0 / static_cast<double>(topics);
    }
};

struct LdaModel {
    int topics = 0;
    double alpha = 0.0;
    double beta = 0.0;
    std::vector<std::string> vocab;
    std::map<std::string, int> vocab_index;
    std::vector<std::vector<double>> theta;  // docs x topics
    std::vector<std::vector<double>> phi;    // topics x vocab
    int retained_samples = 0;

    /// Top m vocabulary words of a topic by phi, ties by word ascending.
    std::vector<std::string> top_words(int topic, std::size_t m) const {
        std::vector<int> idx(vocab.size());
        for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<int>(i);
        const auto& row = phi[static_cast<std::size_t>(topic)];
        std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
            if (row[static_cast<std::size_t>(a)] != row[static_cast<std::size_t>(b)])
                return row[static_cast<std::size_t>(a)] > row[static_cast<std::size_t>(b)];
            return vocab[static_cast<std::size_t>(a)] < vocab[static_cast<std::size_t>(b)];
        });
        std::vector<std::string> out;
        const std::size_t n = std::min(m, idx.size());
        out.reserve(n);
        for (std::size_t i = 0; i < n; ++i) out.push_back(vocab[static_cast<std::size_t>(idx[i])]);
        return out;
    }
};

/// Collapsed Gibbs sampler over one month of token documents. Exposed as a
/// class so the count bookkeeping can be checked sweep by sweep.
class LdaSampler {
public:
    LdaSampler(const MonthlyCorpus& corpus, LdaParams params, std::uint64_t seed)
        : params_(params), rng_(seed) {
        if (params_.topics < 2) throw ConfigError("topic count must be at least 2");
        if (params_.burn_in < 0 || params_.thin < 1)
            throw ConfigError("burn-in must be nonnegative and thinning positive");
        if (corpus.docs.empty()) throw EmptyCorpus();
        for (const auto& [word, count] : corpus.vocab) {
            (void)count;
            vocab_index_.emplace(word, static_cast<int>(vocab_.size()));
            vocab_.push_back(word);
        }
        const int k = params_.topics;
        if (static_cast<int>(vocab_.size()) < k) throw DegenerateVocab(vocab_.size(), k);

        docs_.reserve(corpus.docs.size());
        for (const auto& doc : corpus.docs) {
            std::vector<int> ids;
            ids.reserve(doc.tokens.size());
            for (const auto& tok : doc.tokens) ids.push_back(vocab_index_.at(tok));
            docs_.push_back(std::move(ids));
        }

        const auto v = vocab_.size();
        doc_topic_.assign(docs_.size(), std::vector<long>(static_cast<std::size_t>(k), 0));
        topic_word_.assign(static_cast<std::size_t>(k), std::vector<long>(v, 0));
        topic_total_.assign(static_cast<std::size_t>(k), 0);
        assignments_.resize(docs_.size());
        for (std::size_t d = 0; d < docs_.size(); ++d) {
            assignments_[d].resize(docs_[d].size());
            for (std::size_t i = 0; i < docs_[d].size(); ++i) {
                const int t = static_cast<int>(rng_.uniform_int(static_cast<std::uint64_t>(k)));
                assignments_[d][i] = t;
                ++doc_topic_[d][static_cast<std::size_t>(t)];
                ++topic_word_[static_cast<std::size_t>(t)][static_cast<std::size_t>(docs_[d][i])];
                ++topic_total_[static_cast<std::size_t>(t)];
            }
        }

        acc_doc_topic_.assign(docs_.size(), std::vector<double>(static_cast<std::size_t>(k), 0.0));
        acc_topic_word_.assign(static_cast<std::size_t>(k), std::vector<double>(v, 0.0));
    }

    void sweep() {
        const int k = params_.topics;
        const double alpha = params_.effective_alpha();
        const double beta = params_.beta;
        const double v_beta = beta * static_cast<double>(vocab_.size());
        std::vector<double> weights(static_cast<std::size_t>(k));
        for (std::size_t d = 0; d < docs_.size(); ++d) {
            for (std::size_t i = 0; i < docs_[d].size(); ++i) {
                const int w = docs_[d][i];
                const int old_t = assignments_[d][i];
                --doc_topic_[d][static_cast<std::size_t>(old_t)];
                --topic_word_[static_cast<std::size_t>(old_t)][static_cast<std::size_t>(w)];
                --topic_total_[static_cast<std::size_t>(old_t)];

                double total = 0.0;
                for (int t = 0; t < k; ++t) {
                    const auto ts = static_cast<std::size_t>(t);
                    const double wgt =
                        (static_cast<double>(doc_topic_[d][ts]) + alpha) *
                        (static_cast<double>(topic_word_[ts][static_cast<std::size_t>(w)]) + beta) /
                        (static_cast<double>(topic_total_[ts]) + v_beta);
                    total += wgt;
                    weights[ts] = total;
                }
                const double u = rng_.uniform() * total;
                int new_t = k - 1;
                for (int t = 0; t < k; ++t)
                    if (u < weights[static_cast<std::size_t>(t)]) {
                        new_t = t;
                        break;
                    }

                assignments_[d][i] = new_t;
                ++doc_topic_[d][static_cast<std::size_t>(new_t)];
                ++topic_word_[static_cast<std::size_t>(new_t)][static_cast<std::size_t>(w)];
                ++topic_total_[static_cast<std::size_t>(new_t)];
            }
        }
        ++sweeps_done_;
        if (sweeps_done_ > params_.burn_in &&
            (sweeps_done_ - params_.burn_in - 1) % params_.thin == 0) {
            for (std::size_t d = 0; d < docs_.size(); ++d)
                for (int t = 0; t < k; ++t)
                    acc_doc_topic_[d][static_cast<std::size_t>(t)] +=
                        static_cast<double>(doc_topic_[d][static_cast<std::size_t>(t)]);
            for (int t = 0; t < k; ++t)
                for (std::size_t w = 0; w < vocab_.size(); ++w)
                    acc_topic_word_[static_cast<std::size_t>(t)][w] +=
                        static_cast<double>(topic_word_[static_cast<std::size_t>(t)][w]);
            ++retained_;
        }
    }

    LdaModel finish() const {
        const int k = params_.topics;
        const double alpha = params_.effective_alpha();
        const double beta = params_.beta;
        LdaModel model;
        model.topics = k;
        model.alpha = alpha;
        model.beta = beta;
        model.vocab = vocab_;
        model.vocab_index = vocab_index_;
        model.retained_samples = retained_;

        // Fall back to the final state when no sweep was retained.
        const double denom = retained_ > 0 ? static_cast<double>(retained_) : 1.0;
        auto avg_doc = [&](std::size_t d, int t) {
            if (retained_ > 0) return acc_doc_topic_[d][static_cast<std::size_t>(t)] / denom;
            return static_cast<double>(doc_topic_[d][static_cast<std::size_t>(t)]);
        };
        auto avg_word = [&](int t, std::size_t w) {
            if (retained_ > 0) return acc_topic_word_[static_cast<std::size_t>(t)][w] / denom;
            return static_cast<double>(topic_word_[static_cast<std::size_t>(t)][w]);
        };

        model.theta.assign(docs_.size(), std::vector<double>(static_cast<std::size_t>(k), 0.0));
        for (std::size_t d = 0; d < docs_.size(); ++d) {
            double row_sum = 0.0;
            for (int t = 0; t < k; ++t) row_sum += avg_doc(d, t);
            const double den = row_sum + alpha * static_cast<double>(k);
            for (int t = 0; t < k; ++t)
                model.theta[d][static_cast<std::size_t>(t)] = (avg_doc(d, t) + alpha) / den;
        }

        model.phi.assign(static_cast<std::size_t>(k), std::vector<double>(vocab_.size(), 0.0));
        for (int t = 0; t < k; ++t) {
            double row_sum = 0.0;
            for (std::size_t w = 0; w < vocab_.size(); ++w) row_sum += avg_word(t, w);
            const double den = row_sum + beta * static_cast<double>(vocab_.size());
            for (std::size_t w = 0; w < vocab_.size(); ++w)
                model.phi[static_cast<std::size_t>(t)][w] = (avg_word(t, w) + beta) / den;
        }
        return model;
    }

    const std::vector<std::vector<long>>& doc_topic_counts() const { return doc_topic_; }
    const std::vector<std::vector<long>>& topic_word_counts() const { return topic_word_; }
    const std::vector<long>& topic_totals() const { return topic_total_; }
    const std::vector<std::vector<int>>& doc_word_ids() const { return docs_; }
    int sweeps_done() const { return sweeps_done_; }
    int retained() const { return retained_; }

private:
    LdaParams params_;
    Rng rng_;
    std::vector<std::string> vocab_;
    std::map<std::string, int> vocab_index_;
    std::vector<std::vector<int>> docs_;
    std::vector<std::vector<int>> assignments_;
    std::vector<std::vector<long>> doc_topic_;
    std::vector<std::vector<long>> topic_word_;
    std::vector<long> topic_total_;
    std::vector<std::vector<double>> acc_doc_topic_;
    std::vector<std::vector<double>> acc_topic_word_;
    int sweeps_done_ = 0;
    int retained_ = 0;
};

inline LdaModel fit_lda(const MonthlyCorpus& corpus, LdaParams params, std::uint64_t seed) {
    if (params.iterations <= params.burn_in)
        throw ConfigError("iterations must exceed burn-in");
    LdaSampler sampler(corpus, params, seed);
    for (int s = 0; s < params.iterations; ++s) sampler.sweep();
    return sampler.finish();
}

}  // namespace trendrank
