#include "weatkit/cooc_analysis.hpp"

#include <algorithm>
#include <thread>
#include <unordered_map>
#include <unordered_set>

namespace weatkit {

namespace {

/// Shards posts into contiguous blocks, runs `count` per block, merges the
/// per-block results with `merge` in block order.
template <typename Partial, typename CountFn, typename MergeFn>
Partial sharded_count(const TokenizedCorpus& corpus, int worker_count, CountFn count,
                      MergeFn merge) {
    const std::size_t n = corpus.size();
    const int workers = std::max(1, std::min<int>(worker_count, n == 0 ? 1 : static_cast<int>(n)));
    if (workers == 1) {
        Partial total{};
        count(0, n, total);
        return total;
    }
    std::vector<Partial> partials(static_cast<std::size_t>(workers));
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    const std::size_t chunk = (n + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
        const std::size_t begin = std::min(n, static_cast<std::size_t>(w) * chunk);
        const std::size_t end = std::min(n, begin + chunk);
        pool.emplace_back(
            [&, w, begin, end]() { count(begin, end, partials[static_cast<std::size_t>(w)]); });
    }
    for (auto& t : pool) t.join();
    Partial total{};
    for (auto& partial : partials) merge(total, partial);
    return total;
}

}  // namespace

std::map<std::string, std::int64_t> identity_frequencies(const TokenizedCorpus& corpus,
                                                         const std::vector<std::string>& words) {
    std::map<std::string, std::int64_t> counts;
    for (const auto& w : words) counts.emplace(w, 0);
    for (const auto& post : corpus) {
        for (const auto& sentence : post.sentences) {
            for (const auto& token : sentence) {
                auto it = counts.find(token);
                if (it != counts.end()) ++it->second;
            }
        }
    }
    return counts;
}

IdentityCoocReport window_cooc_top(const TokenizedCorpus& corpus, const WordList& identity,
                                   int radius, int top_k, int worker_count) {
    if (radius < 1) throw std::invalid_argument("window_cooc_top: radius must be >= 1");
    if (top_k < 1) throw std::invalid_argument("window_cooc_top: top_k must be >= 1");

    // Duplicate identity words would double-count their windows.
    std::vector<std::string> unique_words;
    std::unordered_set<std::string> seen;
    for (const auto& w : identity.words) {
        if (seen.insert(w).second) unique_words.push_back(w);
    }

    using CountMap = std::unordered_map<std::string, std::int64_t>;
    const CountMap neighbor_counts = sharded_count<CountMap>(
        corpus, worker_count,
        [&](std::size_t begin, std::size_t end, CountMap& local) {
            for (std::size_t p = begin; p < end; ++p) {
                for (const auto& sentence : corpus[p].sentences) {
                    const std::size_t len = sentence.size();
                    for (std::size_t pos = 0; pos < len; ++pos) {
                        if (!seen.count(sentence[pos])) continue;
                        const std::size_t lo = pos > static_cast<std::size_t>(radius)
                                                   ? pos - static_cast<std::size_t>(radius)
                                                   : 0;
                        const std::size_t hi =
                            std::min(len, pos + static_cast<std::size_t>(radius) + 1);
                        for (std::size_t q = lo; q < hi; ++q) {
                            if (q == pos) continue;
                            ++local[sentence[q]];
                        }
                    }
                }
            }
        },
        [](CountMap& total, const CountMap& partial) {
            for (const auto& [word, count] : partial) total[word] += count;
        });

    std::vector<std::pair<std::string, std::int64_t>> ranked(neighbor_counts.begin(),
                                                             neighbor_counts.end());
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    if (ranked.size() > static_cast<std::size_t>(top_k)) {
        ranked.resize(static_cast<std::size_t>(top_k));
    }

    IdentityCoocReport report;
    report.identity_label = identity.label;
    report.window_radius = radius;
    report.top_k = top_k;
    const auto freqs = identity_frequencies(corpus, unique_words);
    for (const auto& w : unique_words) report.word_frequency.emplace_back(w, freqs.at(w));
    report.top_neighbors = std::move(ranked);
    return report;
}

PairCoocCounts sentence_pair_counts(const TokenizedCorpus& corpus, const WeatTest& test,
                                    PairCountMode mode, int worker_count) {
    test.validate();

    PairCoocCounts out;
    out.test_name = test.name;
    out.concept_labels = {test.target_x.label, test.target_y.label};
    out.assoc_labels = {test.assoc_a.label, test.assoc_b.label};
    out.mode = mode;

    // word -> list memberships; a word may sit in several lists.
    struct Membership {
        bool concept_side[2] = {false, false};
        bool assoc_side[2] = {false, false};
    };
    std::unordered_map<std::string, Membership> members;
    auto mark = [&members](const WordList& list, bool is_concept, int side) {
        for (const auto& w : list.words) {
            auto& m = members[w];
            (is_concept ? m.concept_side : m.assoc_side)[side] = true;
        }
    };
    mark(test.target_x, true, 0);
    mark(test.target_y, true, 1);
    mark(test.assoc_a, false, 0);
    mark(test.assoc_b, false, 1);

    using Cells = std::array<std::array<std::int64_t, 2>, 2>;
    out.cells = sharded_count<Cells>(
        corpus, worker_count,
        [&](std::size_t begin, std::size_t end, Cells& local) {
            for (std::size_t p = begin; p < end; ++p) {
                for (const auto& sentence : corpus[p].sentences) {
                    std::unordered_map<std::string, std::int64_t> hits;
                    bool any = false;
                    for (const auto& token : sentence) {
                        auto it = members.find(token);
                        if (it == members.end()) continue;
                        any = true;
                        ++hits[token];
                    }
                    if (!any) continue;

                    std::int64_t occ_concept[2] = {0, 0};
                    std::int64_t occ_assoc[2] = {0, 0};
                    std::int64_t distinct_concept[2] = {0, 0};
                    std::int64_t distinct_assoc[2] = {0, 0};
                    for (const auto& [word, count] : hits) {
                        const Membership& m = members.at(word);
                        for (int side = 0; side < 2; ++side) {
                            if (m.concept_side[side]) {
                                occ_concept[side] += count;
                                ++distinct_concept[side];
                            }
                            if (m.assoc_side[side]) {
                                occ_assoc[side] += count;
                                ++distinct_assoc[side];
                            }
                        }
                    }

                    for (int c = 0; c < 2; ++c) {
                        for (int a = 0; a < 2; ++a) {
                            if (mode == PairCountMode::OccurrenceProduct) {
                                // the sum of m*n over pairs factorizes into
                                // the product of per-side occurrence totals
                                local[c][a] += occ_concept[c] * occ_assoc[a];
                            } else {
                                local[c][a] += distinct_concept[c] * distinct_assoc[a];
                            }
                        }
                    }
                }
            }
        },
        [](Cells& total, const Cells& partial) {
            for (int c = 0; c < 2; ++c) {
                for (int a = 0; a < 2; ++a) total[c][a] += partial[c][a];
            }
        });
    return out;
}

}  // namespace weatkit
