#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "trendrank/corpus.hpp"
#include "trendrank/embedding.hpp"
#include "trendrank/errors.hpp"
#include "trendrank/rng.hpp"

namespace trendrank {

struct SgnsParams {
    int dim = 100;
    int window = 5;  // positions either side of the center word
    int negatives = 5;
    int epochs = 5;
    double learning_rate = 0.025;
    double unigram_power = 0.75;
};

inline double sigmoid(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

/// Logistic loss of one (center, context) pair with label 1 for an observed
/// pair and 0 for a negative sample.
inline double sgns_pair_loss(const std::vector<double>& center, const std::vector<double>& context,
                             int label) {
    double s = 0.0;
    for (std::size_t i = 0; i < center.size(); ++i) s += center[i] * context[i];
    const double p = sigmoid(label == 1 ? s : -s);
    return -std::log(std::max(p, 1e-300));
}

inline void sgns_pair_grads(const std::vector<double>& center, const std::vector<double>& context,
                            int label, std::vector<double>& grad_center,
                            std::vector<double>& grad_context) {
    double s = 0.0;
    for (std::size_t i = 0; i < center.size(); ++i) s += center[i] * context[i];
    const double g = sigmoid(s) - static_cast<double>(label);
    grad_center.resize(center.size());
    grad_context.resize(center.size());
    for (std::size_t i = 0; i < center.size(); ++i) {
        grad_center[i] = g * context[i];
        grad_context[i] = g * center[i];
    }
}

struct SgnsModel {
    int dim = 0;
    std::vector<std::string> vocab;
    std::map<std::string, int> vocab_index;
    std::vector<std::vector<double>> input;    // word vectors used downstream
    std::vector<std::vector<double>> context;  // output-side vectors

    const std::vector<double>* vector_for(const std::string& token) const {
        auto it = vocab_index.find(token);
        if (it == vocab_index.end()) return nullptr;
        return &input[static_cast<std::size_t>(it->second)];
    }
};

/// Skip-gram with negative sampling over one month of documents. Negatives
/// come from the unigram distribution raised to unigram_power; the learning
/// rate decays linearly over all center positions of all epochs.
inline SgnsModel train_sgns(const MonthlyCorpus& corpus, SgnsParams params, std::uint64_t seed) {
    if (corpus.docs.empty()) throw EmptyCorpus();

    SgnsModel model;
    model.dim = params.dim;
    for (const auto& [word, count] : corpus.vocab) {
        (void)count;
        model.vocab_index.emplace(word, static_cast<int>(model.vocab.size()));
        model.vocab.push_back(word);
    }
    if (model.vocab.empty()) throw EmptyCorpus();

    const auto v = model.vocab.size();
    const auto d = static_cast<std::size_t>(params.dim);

    std::vector<std::vector<int>> docs;
    docs.reserve(corpus.docs.size());
    long total_positions = 0;
    for (const auto& doc : corpus.docs) {
        std::vector<int> ids;
        ids.reserve(doc.tokens.size());
        for (const auto& tok : doc.tokens) ids.push_back(model.vocab_index.at(tok));
        total_positions += static_cast<long>(ids.size());
        docs.push_back(std::move(ids));
    }

    std::vector<double> cumulative(v, 0.0);
    {
        double running = 0.0;
        for (std::size_t w = 0; w < v; ++w) {
            running += std::pow(static_cast<double>(corpus.vocab.at(model.vocab[w])),
                                params.unigram_power);
            cumulative[w] = running;
        }
    }

    Rng rng(seed);
    const double init_bound = 0.5 / static_cast<double>(params.dim);
    model.input.assign(v, std::vector<double>(d, 0.0));
    model.context.assign(v, std::vector<double>(d, 0.0));
    for (auto& row : model.input)
        for (auto& x : row) x = rng.uniform_range(-init_bound, init_bound);

    const double lr0 = params.learning_rate;
    const double lr_floor = lr0 * 1e-4;
    const long total_steps = std::max<long>(1, total_positions * params.epochs);
    long step = 0;
    std::vector<double> center_grad(d);

    auto draw_negative = [&]() {
        const double u = rng.uniform() * cumulative.back();
        const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
        const auto idx = static_cast<std::size_t>(it - cumulative.begin());
        return static_cast<int>(std::min(idx, v - 1));
    };

    for (int epoch = 0; epoch < params.epochs; ++epoch) {
        for (const auto& ids : docs) {
            for (std::size_t pos = 0; pos < ids.size(); ++pos) {
                const double lr = std::max(
                    lr_floor, lr0 * (1.0 - static_cast<double>(step) /
                                               static_cast<double>(total_steps)));
                ++step;
                const int center = ids[pos];
                auto& vw = model.input[static_cast<std::size_t>(center)];
                const std::size_t lo =
                    pos > static_cast<std::size_t>(params.window)
                        ? pos - static_cast<std::size_t>(params.window)
                        : 0;
                const std::size_t hi =
                    std::min(ids.size(), pos + static_cast<std::size_t>(params.window) + 1);
                for (std::size_t cpos = lo; cpos < hi; ++cpos) {
                    if (cpos == pos) continue;
                    const int target = ids[cpos];
                    std::fill(center_grad.begin(), center_grad.end(), 0.0);

                    auto train_pair = [&](int ctx, int label) {
                        auto& uc = model.context[static_cast<std::size_t>(ctx)];
                        double s = 0.0;
                        for (std::size_t i = 0; i < d; ++i) s += vw[i] * uc[i];
                        const double g = (sigmoid(s) - static_cast<double>(label)) * lr;
                        for (std::size_t i = 0; i < d; ++i) {
                            center_grad[i] += g * uc[i];
                            uc[i] -= g * vw[i];
                        }
                    };

                    train_pair(target, 1);
                    for (int n = 0; n < params.negatives; ++n) {
                        const int neg = draw_negative();
                        if (neg == target) continue;
                        train_pair(neg, 0);
                    }
                    for (std::size_t i = 0; i < d; ++i) vw[i] -= center_grad[i];
                }
            }
        }
    }
    return model;
}

/// Serves the trained input vectors as (position-independent) token vectors.
class SgnsProvider : public EmbeddingProvider {
public:
    explicit SgnsProvider(SgnsModel model) : model_(std::move(model)) {}

    int dim() const override { return model_.dim; }

    std::vector<double> token_vector(const TokenDoc& doc, std::size_t position) const override {
        if (position >= doc.tokens.size())
            throw MissingVector(doc.article_id, position);
        const auto* vec = model_.vector_for(doc.tokens[position]);
        if (!vec) throw MissingVector(doc.article_id, position);
        return *vec;
    }

    const SgnsModel& model() const { return model_; }

private:
    SgnsModel model_;
};

}  // namespace trendrank
