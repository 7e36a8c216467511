#pragma once

#include "weatkit/types.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace weatkit {

struct ModelProvenance {
    enum class Kind { Trained, Loaded };
    Kind kind = Kind::Loaded;
    std::string name;            // model label used in reports
    std::string source;          // file path or corpus name
    std::uint64_t seed = 0;      // training seed (trained models)
    std::string corpus_hash;     // hex fingerprint of the training corpus
    std::string config_summary;  // one-line training config echo
};

/// Fixed-dimension word -> dense vector map. Immutable once built.
class EmbeddingModel {
public:
    EmbeddingModel() = default;

    /// Takes one row of `vectors` per word. Throws on duplicate words or a
    /// row/word count mismatch.
    EmbeddingModel(std::vector<std::string> words, Mat vectors, ModelProvenance provenance);

    int dimension() const { return static_cast<int>(vectors_.cols()); }
    std::size_t size() const { return words_.size(); }
    bool contains(std::string_view word) const { return row_of(word) >= 0; }

    /// Row index of `word`, or -1 when absent.
    int row_of(std::string_view word) const;

    Mat::ConstRowXpr vector(int row) const { return vectors_.row(row); }
    Mat::ConstRowXpr vector_of(std::string_view word) const;  // throws on OOV

    const Mat& matrix() const { return vectors_; }
    const std::vector<std::string>& words() const { return words_; }
    const ModelProvenance& provenance() const { return provenance_; }

    /// Copy with every vector multiplied by `factor`.
    EmbeddingModel scaled(Scalar factor) const;

private:
    std::vector<std::string> words_;
    std::unordered_map<std::string, int, StringHash, std::equal_to<>> index_;
    Mat vectors_;
    ModelProvenance provenance_;
};

/// Cosine similarity between two words of the model. Throws std::runtime_error
/// naming the word when it is absent, std::domain_error on a zero-norm vector.
Scalar cosine_similarity(const EmbeddingModel& model, std::string_view w1, std::string_view w2);

struct VectorLoadReport {
    std::int64_t line_count = 0;
    std::int64_t duplicate_count = 0;
    bool header_skipped = false;
    std::vector<std::string> warnings;
};

/// Text vector format: one line per word, the word followed by D decimal
/// components separated by single spaces, no header. A first line consisting
/// of exactly two integers is treated as an "N D" header and skipped. The
/// dimension is inferred from the first data line and enforced afterwards;
/// later duplicates of a word are dropped with a warning.
EmbeddingModel load_embeddings_text(const std::filesystem::path& path,
                                    VectorLoadReport* report = nullptr);

/// Writes the same text format with shortest round-trip decimal components,
/// so save-then-load reproduces every vector bit-exactly.
void save_embeddings_text(const EmbeddingModel& model, const std::filesystem::path& path);

/// save_embeddings_text plus a `<path>.meta.json` sidecar carrying the
/// provenance (config, seed, corpus hash).
void save_model(const EmbeddingModel& model, const std::filesystem::path& path);

}  // namespace weatkit
