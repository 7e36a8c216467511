#include "weatkit/preprocess.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>
#include <thread>

namespace weatkit {

namespace {

bool is_space(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

bool is_terminal(char c) { return c == '.' || c == '!' || c == '?'; }

char lower1(char c) { return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c; }

/// Word character for the frozen token pattern: [a-z0-9'] plus any byte of a
/// UTF-8 multibyte sequence.
bool is_token_char(char c) {
    const unsigned char u = static_cast<unsigned char>(c);
    if (u >= 0x80) return true;
    return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '\'';
}

bool prefix_matches_ci(std::string_view text, std::size_t pos, std::string_view prefix) {
    if (pos + prefix.size() > text.size()) return false;
    for (std::size_t i = 0; i < prefix.size(); ++i) {
        if (lower1(text[pos + i]) != prefix[i]) return false;
    }
    return true;
}

bool starts_url(std::string_view text, std::size_t pos) {
    return prefix_matches_ci(text, pos, "http://") || prefix_matches_ci(text, pos, "https://") ||
           prefix_matches_ci(text, pos, "www.");
}

/// Deletes every span starting with http://, https:// or www. at a
/// whitespace boundary, up to the next whitespace.
std::string strip_urls(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    std::size_t i = 0;
    while (i < text.size()) {
        const bool at_boundary = (i == 0) || is_space(text[i - 1]);
        if (at_boundary && starts_url(text, i)) {
            while (i < text.size() && !is_space(text[i])) ++i;
            continue;
        }
        out.push_back(text[i]);
        ++i;
    }
    return out;
}

std::vector<std::string_view> split_sentences(std::string_view text) {
    std::vector<std::string_view> sentences;
    std::size_t start = 0;
    std::size_t i = 0;
    while (i < text.size()) {
        if (is_terminal(text[i])) {
            std::size_t run_end = i;
            while (run_end + 1 < text.size() && is_terminal(text[run_end + 1])) ++run_end;
            if (run_end + 1 >= text.size() || is_space(text[run_end + 1])) {
                sentences.push_back(text.substr(start, run_end + 1 - start));
                i = run_end + 1;
                start = i;
                continue;
            }
            i = run_end + 1;
            continue;
        }
        ++i;
    }
    if (start < text.size()) sentences.push_back(text.substr(start));
    return sentences;
}

std::vector<std::string> tokenize_sentence(std::string_view sentence, const CleaningConfig& config) {
    std::vector<std::string> tokens;
    std::string current;
    auto flush = [&]() {
        if (current.empty()) return;
        if (!config.remove_stopwords || !config.stopword_set.count(current) ||
            config.protected_words.count(current)) {
            tokens.push_back(current);
        }
        current.clear();
    };
    for (char raw : sentence) {
        const char c = lower1(raw);
        const bool keep = config.remove_punctuation ? is_token_char(c) : !is_space(c);
        if (keep) {
            current.push_back(c);
        } else {
            flush();
        }
    }
    flush();
    return tokens;
}

}  // namespace

TokenizedPost preprocess_post(const Post& post, const CleaningConfig& config) {
    TokenizedPost out;
    out.post_id = post.id;
    for (std::string_view sentence : split_sentences(post.text)) {
        std::string cleaned = config.remove_urls ? strip_urls(sentence) : std::string(sentence);
        auto tokens = tokenize_sentence(cleaned, config);
        if (!tokens.empty()) out.sentences.push_back(std::move(tokens));
    }
    return out;
}

TokenizedCorpus preprocess_corpus(const Corpus& corpus, const CleaningConfig& config,
                                  int worker_count) {
    TokenizedCorpus out(corpus.posts.size());
    if (corpus.posts.empty()) return out;

    const std::size_t n = corpus.posts.size();
    const int workers = std::max(1, std::min<int>(worker_count, static_cast<int>(n)));
    if (workers == 1) {
        for (std::size_t i = 0; i < n; ++i) out[i] = preprocess_post(corpus.posts[i], config);
        return out;
    }

    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&, w]() {
            for (std::size_t i = static_cast<std::size_t>(w); i < n;
                 i += static_cast<std::size_t>(workers)) {
                out[i] = preprocess_post(corpus.posts[i], config);
            }
        });
    }
    for (auto& t : pool) t.join();
    return out;
}

std::unordered_set<std::string> load_stopwords(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open stopword file: " + path.string());
    std::unordered_set<std::string> words;
    std::string line;
    while (std::getline(in, line)) {
        while (!line.empty() && (is_space(line.back()))) line.pop_back();
        std::size_t start = 0;
        while (start < line.size() && is_space(line[start])) ++start;
        if (start > 0) line.erase(0, start);
        if (line.empty()) continue;
        for (char& c : line) c = lower1(c);
        words.insert(line);
    }
    return words;
}

const std::unordered_set<std::string>& default_stopwords() {
    static const std::unordered_set<std::string> words = {
        "a", "about", "above", "after", "again", "against", "all", "am", "an", "and", "any",
        "are", "aren't", "as", "at", "be", "because", "been", "before", "being", "below",
        "between", "both", "but", "by", "can", "can't", "cannot", "could", "couldn't", "did",
        "didn't", "do", "does", "doesn't", "doing", "don't", "down", "during", "each", "few",
        "for", "from", "further", "had", "hadn't", "has", "hasn't", "have", "haven't",
        "having", "he", "he'd", "he'll", "he's", "her", "here", "here's", "hers", "herself",
        "him", "himself", "his", "how", "how's", "i", "i'd", "i'll", "i'm", "i've", "if",
        "in", "into", "is", "isn't", "it", "it's", "its", "itself", "let's", "me", "more",
        "most", "mustn't", "my", "myself", "no", "nor", "not", "of", "off", "on", "once",
        "only", "or", "other", "ought", "our", "ours", "ourselves", "out", "over", "own",
        "same", "shan't", "she", "she'd", "she'll", "she's", "should", "shouldn't", "so",
        "some", "such", "than", "that", "that's", "the", "their", "theirs", "them",
        "themselves", "then", "there", "there's", "these", "they", "they'd", "they'll",
        "they're", "they've", "this", "those", "through", "to", "too", "under", "until",
        "up", "very", "was", "wasn't", "we", "we'd", "we'll", "we're", "we've", "were",
        "weren't", "what", "what's", "when", "when's", "where", "where's", "which", "while",
        "who", "who's", "whom", "why", "why's", "with", "won't", "would", "wouldn't", "you",
        "you'd", "you'll", "you're", "you've", "your", "yours", "yourself", "yourselves"};
    return words;
}

std::int64_t token_count(const TokenizedCorpus& corpus) {
    std::int64_t n = 0;
    for (const auto& post : corpus) {
        for (const auto& sentence : post.sentences) n += static_cast<std::int64_t>(sentence.size());
    }
    return n;
}

}  // namespace weatkit
