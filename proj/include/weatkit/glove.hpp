#pragma once

#include "weatkit/cooc.hpp"
#include "weatkit/embedding.hpp"
#include "weatkit/types.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace weatkit {

struct GloveConfig {
    int dimension = 100;
    double x_max = 100.0;
    double alpha = 0.75;
    double learning_rate = 0.05;
    int epochs = 30;
    int window_radius = 10;
    std::int64_t min_count = 5;
    std::uint64_t seed = 42;
    int worker_count = 1;
    bool sum_context = true;  // final vector = main + context; off = main only

    void validate() const;  // throws std::invalid_argument
    std::string summary() const;
};

/// Weighting function f(x) = min((x / x_max)^alpha, 1).
double glove_weight(double x, double x_max, double alpha);

/// Model parameters: one main and one context row per vocabulary word.
struct GloveParams {
    Mat main;      // V x dim
    Mat context;   // V x dim
    Vec main_bias;     // V
    Vec context_bias;  // V

    static GloveParams random_init(int vocab_size, int dimension, std::uint64_t seed);
};

struct GloveGradients {
    Mat main;
    Mat context;
    Vec main_bias;
    Vec context_bias;
};

/// Full-batch loss J = sum over stored ordered entries of
/// f(X_ij) * (w_i . c_j + b_i + b~_j - log X_ij)^2, with its exact gradient.
/// Throws std::domain_error on a nonpositive co-occurrence entry.
std::pair<double, GloveGradients> glove_loss_and_grad(const GloveParams& params,
                                                      const CoocMatrix& cooc,
                                                      const GloveConfig& config);

/// Loss only (shares the objective above).
double glove_loss(const GloveParams& params, const CoocMatrix& cooc, const GloveConfig& config);

struct TrainStats {
    std::vector<double> epoch_mean_loss;  // mean per-entry loss, evaluated as visited
};

/// AdaGrad SGD over shuffled co-occurrence entries. worker_count == 1 with a
/// fixed seed is bit-deterministic; more workers update the shared
/// parameters without synchronization (hogwild) and are not deterministic.
EmbeddingModel train_glove(const CoocMatrix& cooc, const Vocabulary& vocab,
                           const GloveConfig& config, TrainStats* stats = nullptr);

}  // namespace weatkit
