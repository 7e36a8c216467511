#include "weatkit/glove.hpp"

#include "weatkit/rng.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace weatkit {

void GloveConfig::validate() const {
    if (dimension < 1) throw std::invalid_argument("glove: dimension must be positive");
    if (x_max <= 0.0) throw std::invalid_argument("glove: x_max must be positive");
    if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("glove: alpha must be in (0, 1]");
    if (learning_rate <= 0.0) throw std::invalid_argument("glove: learning_rate must be positive");
    if (epochs < 1) throw std::invalid_argument("glove: epochs must be positive");
    if (window_radius < 1) throw std::invalid_argument("glove: window_radius must be positive");
    if (min_count < 1) throw std::invalid_argument("glove: min_count must be positive");
    if (worker_count < 1) throw std::invalid_argument("glove: worker_count must be positive");
}

std::string GloveConfig::summary() const {
    std::ostringstream os;
    os << "dim=" << dimension << " x_max=" << x_max << " alpha=" << alpha
       << " lr=" << learning_rate << " epochs=" << epochs << " window=" << window_radius
       << " min_count=" << min_count << " seed=" << seed << " workers=" << worker_count
       << " sum_context=" << (sum_context ? 1 : 0);
    return os.str();
}

double glove_weight(double x, double x_max, double alpha) {
    if (x >= x_max) return 1.0;
    return std::pow(x / x_max, alpha);
}

GloveParams GloveParams::random_init(int vocab_size, int dimension, std::uint64_t seed) {
    GloveParams params;
    params.main.resize(vocab_size, dimension);
    params.context.resize(vocab_size, dimension);
    params.main_bias.resize(vocab_size);
    params.context_bias.resize(vocab_size);

    SplitMix64 rng(seed);
    const double scale = 1.0 / static_cast<double>(dimension);
    auto draw = [&]() { return (rng.uniform01() - 0.5) * scale; };
    for (int i = 0; i < vocab_size; ++i) {
        for (int k = 0; k < dimension; ++k) params.main(i, k) = draw();
    }
    for (int i = 0; i < vocab_size; ++i) {
        for (int k = 0; k < dimension; ++k) params.context(i, k) = draw();
    }
    for (int i = 0; i < vocab_size; ++i) params.main_bias(i) = draw();
    for (int i = 0; i < vocab_size; ++i) params.context_bias(i) = draw();
    return params;
}

namespace {

struct PreparedEntry {
    int row;
    int col;
    double fx;
    double log_x;
};

std::vector<PreparedEntry> prepare_entries(const CoocMatrix& cooc, const GloveConfig& config) {
    std::vector<PreparedEntry> prepared;
    const auto entries = cooc.ordered_entries();
    prepared.reserve(entries.size());
    for (const auto& e : entries) {
        if (e.value <= 0.0) {
            throw std::domain_error("glove: nonpositive co-occurrence entry at (" +
                                    std::to_string(e.row) + ", " + std::to_string(e.col) + ")");
        }
        prepared.push_back({e.row, e.col,
                            glove_weight(e.value, config.x_max, config.alpha),
                            std::log(e.value)});
    }
    return prepared;
}

}  // namespace

std::pair<double, GloveGradients> glove_loss_and_grad(const GloveParams& params,
                                                      const CoocMatrix& cooc,
                                                      const GloveConfig& config) {
    const auto vocab_size = params.main.rows();
    const auto dim = params.main.cols();
    if (params.context.rows() != vocab_size || params.context.cols() != dim ||
        params.main_bias.size() != vocab_size || params.context_bias.size() != vocab_size) {
        throw std::invalid_argument("glove: parameter shape mismatch");
    }

    GloveGradients grads;
    grads.main = Mat::Zero(vocab_size, dim);
    grads.context = Mat::Zero(vocab_size, dim);
    grads.main_bias = Vec::Zero(vocab_size);
    grads.context_bias = Vec::Zero(vocab_size);

    double loss = 0.0;
    for (const auto& e : prepare_entries(cooc, config)) {
        const double diff = params.main.row(e.row).dot(params.context.row(e.col)) +
                            params.main_bias(e.row) + params.context_bias(e.col) - e.log_x;
        loss += e.fx * diff * diff;
        const double g = 2.0 * e.fx * diff;
        grads.main.row(e.row) += g * params.context.row(e.col);
        grads.context.row(e.col) += g * params.main.row(e.row);
        grads.main_bias(e.row) += g;
        grads.context_bias(e.col) += g;
    }
    return {loss, std::move(grads)};
}

double glove_loss(const GloveParams& params, const CoocMatrix& cooc, const GloveConfig& config) {
    double loss = 0.0;
    for (const auto& e : prepare_entries(cooc, config)) {
        const double diff = params.main.row(e.row).dot(params.context.row(e.col)) +
                            params.main_bias(e.row) + params.context_bias(e.col) - e.log_x;
        loss += e.fx * diff * diff;
    }
    return loss;
}

namespace {

using RowArray = Eigen::Array<double, 1, Eigen::Dynamic>;

/// One SGD pass over entries[begin, end); returns the accumulated
/// (pre-update) loss of the visited entries.
double sgd_span(const std::vector<PreparedEntry>& entries,
                const std::vector<std::size_t>& order, std::size_t begin, std::size_t end,
                GloveParams& params, GloveParams& accum, double learning_rate) {
    double loss = 0.0;
    for (std::size_t t = begin; t < end; ++t) {
        const PreparedEntry& e = entries[order[t]];
        const double diff = params.main.row(e.row).dot(params.context.row(e.col)) +
                            params.main_bias(e.row) + params.context_bias(e.col) - e.log_x;
        if (!std::isfinite(diff)) continue;
        loss += e.fx * diff * diff;
        const double g = 2.0 * e.fx * diff;

        const RowArray grad_main = g * params.context.row(e.col).array();
        const RowArray grad_context = g * params.main.row(e.row).array();
        params.main.row(e.row).array() -=
            learning_rate * grad_main / accum.main.row(e.row).array().sqrt();
        params.context.row(e.col).array() -=
            learning_rate * grad_context / accum.context.row(e.col).array().sqrt();
        accum.main.row(e.row).array() += grad_main.square();
        accum.context.row(e.col).array() += grad_context.square();

        params.main_bias(e.row) -= learning_rate * g / std::sqrt(accum.main_bias(e.row));
        params.context_bias(e.col) -= learning_rate * g / std::sqrt(accum.context_bias(e.col));
        accum.main_bias(e.row) += g * g;
        accum.context_bias(e.col) += g * g;
    }
    return loss;
}

}  // namespace

EmbeddingModel train_glove(const CoocMatrix& cooc, const Vocabulary& vocab,
                           const GloveConfig& config, TrainStats* stats) {
    config.validate();
    if (cooc.empty()) throw std::runtime_error("train_glove: empty co-occurrence matrix");
    if (vocab.size() == 0) throw std::runtime_error("train_glove: empty vocabulary");

    const int vocab_size = static_cast<int>(vocab.size());
    const auto entries = prepare_entries(cooc, config);
    for (const auto& e : entries) {
        if (e.row >= vocab_size || e.col >= vocab_size) {
            throw std::invalid_argument("train_glove: co-occurrence index outside the vocabulary");
        }
    }

    GloveParams params = GloveParams::random_init(vocab_size, config.dimension, config.seed);
    GloveParams accum;
    accum.main = Mat::Ones(vocab_size, config.dimension);
    accum.context = Mat::Ones(vocab_size, config.dimension);
    accum.main_bias = Vec::Ones(vocab_size);
    accum.context_bias = Vec::Ones(vocab_size);

    std::vector<std::size_t> order(entries.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    if (stats) stats->epoch_mean_loss.clear();
    const int workers = std::max(1, std::min<int>(config.worker_count,
                                                  static_cast<int>(entries.size())));
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        SplitMix64 shuffle_rng(SplitMix64::derive(config.seed, 0x5u + static_cast<std::uint64_t>(epoch)));
        deterministic_shuffle(order, shuffle_rng);

        double epoch_loss = 0.0;
        if (workers == 1) {
            epoch_loss = sgd_span(entries, order, 0, order.size(), params, accum,
                                  config.learning_rate);
        } else {
            // Hogwild: threads race on the shared parameters.
            std::vector<double> losses(static_cast<std::size_t>(workers), 0.0);
            std::vector<std::thread> pool;
            pool.reserve(static_cast<std::size_t>(workers));
            const std::size_t chunk = (order.size() + workers - 1) / workers;
            for (int w = 0; w < workers; ++w) {
                const std::size_t begin = std::min(order.size(), static_cast<std::size_t>(w) * chunk);
                const std::size_t end = std::min(order.size(), begin + chunk);
                pool.emplace_back([&, w, begin, end]() {
                    losses[static_cast<std::size_t>(w)] =
                        sgd_span(entries, order, begin, end, params, accum, config.learning_rate);
                });
            }
            for (auto& t : pool) t.join();
            for (double l : losses) epoch_loss += l;
        }
        if (stats) {
            stats->epoch_mean_loss.push_back(entries.empty() ? 0.0
                                                             : epoch_loss / static_cast<double>(entries.size()));
        }
    }

    Mat vectors = config.sum_context ? Mat(params.main + params.context) : params.main;

    ModelProvenance prov;
    prov.kind = ModelProvenance::Kind::Trained;
    prov.seed = config.seed;
    prov.config_summary = config.summary();
    return EmbeddingModel(vocab.words, std::move(vectors), std::move(prov));
}

}  // namespace weatkit
