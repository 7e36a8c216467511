#pragma once

#include "weatkit/corpus.hpp"
#include "weatkit/embedding.hpp"
#include "weatkit/glove.hpp"
#include "weatkit/preprocess.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace weatkit {

enum class BiasType { Ethnicity, Gender, Age, Other };

/// Which pair of lists iterates in the outer means of the effect size. The
/// default iterates the concept/target lists and differences the
/// association lists inside s(w, A, B); IterateAssociations is the
/// mirrored reading.
enum class RoleConvention { IterateTargets, IterateAssociations };

/// Which pair of lists names the social groups; drives the co-occurrence
/// analyses (e.g. name lists vs. male/female term lists).
enum class IdentitySide { Targets, Associations };

struct WordList {
    std::string label;
    std::vector<std::string> words;
};

struct WeatTest {
    std::string name;
    BiasType bias_type = BiasType::Other;
    WordList target_x, target_y;  // compared concepts
    WordList assoc_a, assoc_b;    // compared associations
    RoleConvention role_convention = RoleConvention::IterateTargets;
    IdentitySide identity_side = IdentitySide::Targets;

    void validate() const;  // non-empty lowercase lists
    bool equal_target_sizes() const { return target_x.words.size() == target_y.words.size(); }

    /// The two lists naming the social groups, per identity_side.
    std::pair<const WordList*, const WordList*> identity_lists() const;
};

/// One test per JSON file: fields name, bias_type, target_x/target_y/
/// assoc_a/assoc_b ({label, words}), role_convention, identity_side.
WeatTest load_weat_test(const std::filesystem::path& path);

struct ListOovReport {
    std::string label;
    std::vector<std::string> kept;
    std::vector<std::string> dropped;
};

struct OovReport {
    ListOovReport target_x, target_y, assoc_a, assoc_b;
    std::size_t dropped_total() const;
};

/// Splits `list` into the words present in the model (order preserved) and
/// the rest. Deciding n/a from |kept| is the caller's job.
std::pair<std::vector<std::string>, std::vector<std::string>> filter_oov(
    const std::vector<std::string>& list, const EmbeddingModel& model);

/// s(w, A, B) = mean_{a in A} cos(w, a) - mean_{b in B} cos(w, b).
/// Every word must be in the model; A and B must be non-empty.
double association_diff(const EmbeddingModel& model, std::string_view w,
                        const std::vector<std::string>& a_words,
                        const std::vector<std::string>& b_words);

struct WeatResult {
    std::string test_name;
    std::string model_name;
    std::optional<double> effect_size;  // nullopt = n/a
    std::string na_reason;              // "oov" | "degenerate" | ""
    OovReport oov;
    bool unequal_sizes = false;  // |X| != |Y| after filtering: |d|<=2 bound not guaranteed
    std::optional<double> p_value;
    std::optional<double> stability_mean;
    std::optional<double> stability_std;
    std::vector<std::optional<double>> per_split;

    bool is_na() const { return !effect_size.has_value(); }
};

/// Effect size d = (mean_X s - mean_Y s) / popstd_{X u Y} s after per-list
/// OOV filtering. n/a when any list keeps fewer than min_kept words, or when
/// every s value is identical (zero standard deviation).
WeatResult effect_size(const EmbeddingModel& model, const WeatTest& test, int min_kept = 2);

/// One-sided p: the fraction of size-preserving repartitions of the kept
/// X u Y pool whose effect size is >= the observed one. Exhaustive when the
/// partition count fits in `iterations`, Monte-Carlo with `seed` otherwise.
/// Throws std::runtime_error when the observed effect size is n/a.
double permutation_pvalue(const EmbeddingModel& model, const WeatTest& test,
                          std::int64_t iterations, std::uint64_t seed, int min_kept = 2);

/// k GloVe models trained on random_splits of the corpus, shared across
/// tests. Splits too small to train throw inside and must be handled by the
/// caller; preprocessing uses `cleaning`.
std::vector<EmbeddingModel> train_split_models(const Corpus& corpus,
                                               const CleaningConfig& cleaning,
                                               const GloveConfig& config, int k,
                                               double fraction, std::uint64_t seed);

struct StabilityResult {
    std::optional<double> mean;
    std::optional<double> std_dev;  // sample standard deviation over usable splits
    std::vector<std::optional<double>> per_split;
    int usable = 0;
};

/// Effect-size spread over the split models; splits scoring n/a are
/// excluded from mean/std and reported as nullopt. std_dev is n/a with
/// fewer than two usable splits.
StabilityResult stability_over_models(const std::vector<EmbeddingModel>& split_models,
                                      const WeatTest& test, int min_kept = 2);

/// Convenience composition of train_split_models + stability_over_models.
StabilityResult stability_std(const Corpus& corpus, const CleaningConfig& cleaning,
                              const GloveConfig& config, const WeatTest& test, int k,
                              double fraction, std::uint64_t seed, int min_kept = 2);

}  // namespace weatkit
