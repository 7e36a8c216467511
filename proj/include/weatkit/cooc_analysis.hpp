#pragma once

#include "weatkit/preprocess.hpp"
#include "weatkit/weat.hpp"

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace weatkit {

struct IdentityCoocReport {
    std::string identity_label;
    // Per-identity-word total corpus frequency, in list order.
    std::vector<std::pair<std::string, std::int64_t>> word_frequency;
    // Neighbor counts ranked by count descending, ties lexicographic
    // ascending, truncated to top_k.
    std::vector<std::pair<std::string, std::int64_t>> top_neighbors;
    int window_radius = 10;
    int top_k = 100;
};

/// Exact token-equality counts over all sentences; absent words appear with
/// count 0.
std::map<std::string, std::int64_t> identity_frequencies(const TokenizedCorpus& corpus,
                                                         const std::vector<std::string>& words);

/// For every occurrence of an identity word, every other token within
/// `radius` positions in the same sentence counts as a neighbor; counts are
/// aggregated over the whole identity list. Adjacent identity words count
/// each other; a token never pairs with itself at the same position.
/// Posts are sharded across workers; integer count merges commute, so the
/// result is independent of the shard layout.
IdentityCoocReport window_cooc_top(const TokenizedCorpus& corpus, const WordList& identity,
                                   int radius = 10, int top_k = 100, int worker_count = 1);

enum class PairCountMode {
    OccurrenceProduct,  // sentence with m concept and n association hits adds m*n
    BinaryPerSentence,  // each (concept word, association word) pair adds 1 per sentence
};

/// Sentence-level co-occurrence totals between the two concept lists and the
/// two association lists of a test, aggregated into four cells.
struct PairCoocCounts {
    std::string test_name;
    std::array<std::string, 2> concept_labels;
    std::array<std::string, 2> assoc_labels;
    // cells[concept_side][assoc_side]; side 0 = first list.
    std::array<std::array<std::int64_t, 2>, 2> cells{{{0, 0}, {0, 0}}};
    PairCountMode mode = PairCountMode::OccurrenceProduct;
};

PairCoocCounts sentence_pair_counts(const TokenizedCorpus& corpus, const WeatTest& test,
                                    PairCountMode mode = PairCountMode::OccurrenceProduct,
                                    int worker_count = 1);

}  // namespace weatkit
