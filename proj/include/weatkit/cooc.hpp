#pragma once

#include "weatkit/vocab.hpp"

#include <cstdint>
#include <unordered_map>
#include <vector>

namespace weatkit {

/// Sparse symmetric co-occurrence counts over vocabulary indices. One cell
/// is stored per unordered pair; lookups are symmetric and the diagonal
/// holds the full (doubled) same-word mass, matching the usual GloVe input
/// convention where each ordered direction of a pair is counted once.
class CoocMatrix {
public:
    struct Entry {
        int row;
        int col;
        double value;
    };

    CoocMatrix(int window_radius, bool distance_weighting)
        : window_radius_(window_radius), distance_weighting_(distance_weighting) {}

    /// Symmetric accumulate: adds w to the (i,j) and (j,i) direction alike.
    void add(int i, int j, double w);

    /// Weight of the ordered direction (i,j); 0 when the pair never co-occurred.
    double weight(int i, int j) const;

    bool empty() const { return cells_.empty(); }
    std::size_t pair_count() const { return cells_.size(); }

    /// Every stored ordered direction: (i,j) and (j,i) for off-diagonal
    /// cells, the diagonal once. Sorted by (row, col) so iteration order is
    /// identical on every platform.
    std::vector<Entry> ordered_entries() const;

    /// Sum of weights over all ordered directions.
    double total_mass() const;

    int window_radius() const { return window_radius_; }
    bool distance_weighting() const { return distance_weighting_; }

    void merge(const CoocMatrix& other);

private:
    static std::uint64_t key(int i, int j);

    std::unordered_map<std::uint64_t, double> cells_;
    int window_radius_;
    bool distance_weighting_;
};

/// Counts co-occurrences of in-vocabulary tokens within window_radius
/// positions of each other, never crossing a sentence boundary. Every
/// ordered token pair at distance d contributes 1/d when distance_weighting
/// is on, else 1. Posts are sharded across workers and the per-worker maps
/// merged in worker order.
CoocMatrix build_cooc(const TokenizedCorpus& corpus, const Vocabulary& vocab,
                      int window_radius, bool distance_weighting,
                      int worker_count = 1);

}  // namespace weatkit
