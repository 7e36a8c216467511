#include "weatkit/cooc.hpp"

#include <algorithm>
#include <stdexcept>
#include <thread>

namespace weatkit {

std::uint64_t CoocMatrix::key(int i, int j) {
    const auto a = static_cast<std::uint32_t>(std::min(i, j));
    const auto b = static_cast<std::uint32_t>(std::max(i, j));
    return (static_cast<std::uint64_t>(a) << 32) | b;
}

void CoocMatrix::add(int i, int j, double w) {
    if (w <= 0.0) throw std::invalid_argument("CoocMatrix::add: weight must be positive");
    // The diagonal carries both ordered directions of a same-word pair.
    cells_[key(i, j)] += (i == j) ? 2.0 * w : w;
}

double CoocMatrix::weight(int i, int j) const {
    auto it = cells_.find(key(i, j));
    return it == cells_.end() ? 0.0 : it->second;
}

std::vector<CoocMatrix::Entry> CoocMatrix::ordered_entries() const {
    std::vector<Entry> entries;
    entries.reserve(cells_.size() * 2);
    for (const auto& [k, v] : cells_) {
        const int i = static_cast<int>(k >> 32);
        const int j = static_cast<int>(k & 0xffffffffULL);
        entries.push_back({i, j, v});
        if (i != j) entries.push_back({j, i, v});
    }
    std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
        if (a.row != b.row) return a.row < b.row;
        return a.col < b.col;
    });
    return entries;
}

double CoocMatrix::total_mass() const {
    double mass = 0.0;
    for (const auto& [k, v] : cells_) {
        const int i = static_cast<int>(k >> 32);
        const int j = static_cast<int>(k & 0xffffffffULL);
        mass += (i == j) ? v : 2.0 * v;
    }
    return mass;
}

void CoocMatrix::merge(const CoocMatrix& other) {
    for (const auto& [k, v] : other.cells_) cells_[k] += v;
}

namespace {

void accumulate_posts(const TokenizedCorpus& corpus, std::size_t begin, std::size_t end,
                      const Vocabulary& vocab, int window_radius, bool distance_weighting,
                      CoocMatrix& out) {
    std::vector<int> ids;
    for (std::size_t p = begin; p < end; ++p) {
        for (const auto& sentence : corpus[p].sentences) {
            const std::size_t len = sentence.size();
            ids.resize(len);
            for (std::size_t t = 0; t < len; ++t) ids[t] = vocab.find(sentence[t]);
            for (std::size_t t = 1; t < len; ++t) {
                if (ids[t] < 0) continue;
                const std::size_t lo =
                    t > static_cast<std::size_t>(window_radius) ? t - window_radius : 0;
                for (std::size_t s = lo; s < t; ++s) {
                    if (ids[s] < 0) continue;
                    const double d = static_cast<double>(t - s);
                    out.add(ids[s], ids[t], distance_weighting ? 1.0 / d : 1.0);
                }
            }
        }
    }
}

}  // namespace

CoocMatrix build_cooc(const TokenizedCorpus& corpus, const Vocabulary& vocab,
                      int window_radius, bool distance_weighting, int worker_count) {
    if (window_radius < 1) throw std::invalid_argument("build_cooc: window_radius must be >= 1");

    CoocMatrix result(window_radius, distance_weighting);
    const std::size_t n = corpus.size();
    const int workers =
        std::max(1, std::min<int>(worker_count, n == 0 ? 1 : static_cast<int>(n)));
    if (workers == 1) {
        accumulate_posts(corpus, 0, n, vocab, window_radius, distance_weighting, result);
        return result;
    }

    std::vector<CoocMatrix> partials(static_cast<std::size_t>(workers),
                                     CoocMatrix(window_radius, distance_weighting));
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    const std::size_t chunk = (n + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
        const std::size_t begin = std::min(n, static_cast<std::size_t>(w) * chunk);
        const std::size_t end = std::min(n, begin + chunk);
        pool.emplace_back([&, w, begin, end]() {
            accumulate_posts(corpus, begin, end, vocab, window_radius, distance_weighting,
                             partials[static_cast<std::size_t>(w)]);
        });
    }
    for (auto& t : pool) t.join();
    for (const auto& partial : partials) result.merge(partial);
    return result;
}

}  // namespace weatkit
