#pragma once

#include "weatkit/preprocess.hpp"
#include "weatkit/types.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace weatkit {

/// Dense word/index bijection over the tokens of a corpus. Indices are
/// assigned by descending frequency, ties broken lexicographically.
struct Vocabulary {
    using IndexMap = std::unordered_map<std::string, int, StringHash, std::equal_to<>>;

    std::vector<std::string> words;       // index -> word
    IndexMap index;                       // word -> index
    std::vector<std::int64_t> frequency;  // index -> corpus frequency
    std::int64_t min_count = 1;

    std::size_t size() const { return words.size(); }

    /// Index of `word`, or -1 when absent.
    int find(std::string_view word) const {
        auto it = index.find(word);
        return it == index.end() ? -1 : it->second;
    }
};

/// Retains exactly the words occurring at least min_count times.
/// Throws std::runtime_error on a corpus with no tokens.
Vocabulary build_vocabulary(const TokenizedCorpus& corpus, std::int64_t min_count);

}  // namespace weatkit
