#include "weatkit/vocab.hpp"

#include <algorithm>
#include <stdexcept>

namespace weatkit {

Vocabulary build_vocabulary(const TokenizedCorpus& corpus, std::int64_t min_count) {
    if (min_count < 1) throw std::invalid_argument("build_vocabulary: min_count must be >= 1");

    std::unordered_map<std::string, std::int64_t> counts;
    for (const auto& post : corpus) {
        for (const auto& sentence : post.sentences) {
            for (const auto& token : sentence) ++counts[token];
        }
    }
    if (counts.empty()) throw std::runtime_error("build_vocabulary: corpus has no tokens");

    std::vector<std::pair<std::string, std::int64_t>> retained;
    retained.reserve(counts.size());
    for (auto& [word, count] : counts) {
        if (count >= min_count) retained.emplace_back(word, count);
    }
    std::sort(retained.begin(), retained.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });

    Vocabulary vocab;
    vocab.min_count = min_count;
    vocab.words.reserve(retained.size());
    vocab.frequency.reserve(retained.size());
    vocab.index.reserve(retained.size());
    for (auto& [word, count] : retained) {
        vocab.index.emplace(word, static_cast<int>(vocab.words.size()));
        vocab.words.push_back(std::move(word));
        vocab.frequency.push_back(count);
    }
    return vocab;
}

}  // namespace weatkit
