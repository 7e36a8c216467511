#pragma once

#include "weatkit/corpus.hpp"

#include <filesystem>
#include <string>
#include <unordered_set>
#include <vector>

namespace weatkit {

struct CleaningConfig {
    std::unordered_set<std::string> stopword_set;   // lowercase
    std::unordered_set<std::string> protected_words;  // exempt from stopword removal
    bool remove_urls = true;
    bool remove_punctuation = true;
    bool remove_stopwords = true;
};

struct TokenizedPost {
    std::string post_id;
    std::vector<std::vector<std::string>> sentences;
};

using TokenizedCorpus = std::vector<TokenizedPost>;

/// Frozen cleaning pipeline, applied in this order:
///   1. split into sentences on runs of [.!?] followed by whitespace or end;
///   2. per sentence, delete URL spans (http://, https:// or www. up to the
///      next whitespace) when remove_urls is set;
///   3. lowercase ASCII letters;
///   4. tokenize: maximal runs of [a-z0-9'] (bytes >= 0x80 pass through and
///      count as word characters) when remove_punctuation is set, otherwise
///      whitespace-separated chunks;
///   5. drop stopwords not in protected_words when remove_stopwords is set;
///   6. drop sentences left with no tokens.
/// Pure function of (post, config); identical output on every platform.
TokenizedPost preprocess_post(const Post& post, const CleaningConfig& config);

TokenizedCorpus preprocess_corpus(const Corpus& corpus, const CleaningConfig& config,
                                  int worker_count = 1);

/// Stopword file: one lowercase word per line, UTF-8.
std::unordered_set<std::string> load_stopwords(const std::filesystem::path& path);

/// The bundled English stopword list (same content as data/stopwords_en.txt).
const std::unordered_set<std::string>& default_stopwords();

std::int64_t token_count(const TokenizedCorpus& corpus);

}  // namespace weatkit
