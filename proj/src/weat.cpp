#include "weatkit/weat.hpp"

#include "weatkit/rng.hpp"
#include "weatkit/vocab.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>

namespace weatkit {

namespace {

using nlohmann::json;

BiasType parse_bias_type(const std::string& s) {
    if (s == "ethnicity") return BiasType::Ethnicity;
    if (s == "gender") return BiasType::Gender;
    if (s == "age") return BiasType::Age;
    if (s == "other") return BiasType::Other;
    throw std::runtime_error("unknown bias_type \"" + s + "\"");
}

WordList parse_word_list(const json& j, const char* field) {
    auto it = j.find(field);
    if (it == j.end() || !it->is_object()) {
        throw std::runtime_error(std::string("missing word list \"") + field + "\"");
    }
    WordList list;
    list.label = it->value("label", std::string(field));
    auto words = it->find("words");
    if (words == it->end() || !words->is_array()) {
        throw std::runtime_error(std::string("word list \"") + field + "\" has no words array");
    }
    for (const auto& w : *words) list.words.push_back(w.get<std::string>());
    return list;
}

bool is_lowercase(const std::string& w) {
    return std::none_of(w.begin(), w.end(), [](char c) { return c >= 'A' && c <= 'Z'; });
}

double mean(const std::vector<double>& values) {
    return std::accumulate(values.begin(), values.end(), 0.0) /
           static_cast<double>(values.size());
}

bool all_equal(const std::vector<double>& values) {
    for (double v : values) {
        if (v != values.front()) return false;
    }
    return true;
}

// The all_equal short-circuits return the mathematically exact 0 where naive
// summation of k identical doubles can be an ulp off.
double population_std(const std::vector<double>& values) {
    if (all_equal(values)) return 0.0;
    const double m = mean(values);
    double acc = 0.0;
    for (double v : values) acc += (v - m) * (v - m);
    return std::sqrt(acc / static_cast<double>(values.size()));
}

double sample_std(const std::vector<double>& values) {
    if (all_equal(values)) return 0.0;
    const double m = mean(values);
    double acc = 0.0;
    for (double v : values) acc += (v - m) * (v - m);
    return std::sqrt(acc / static_cast<double>(values.size() - 1));
}

}  // namespace

void WeatTest::validate() const {
    const WordList* lists[] = {&target_x, &target_y, &assoc_a, &assoc_b};
    for (const WordList* list : lists) {
        if (list->words.empty()) {
            throw std::invalid_argument("test \"" + name + "\": list \"" + list->label +
                                        "\" is empty");
        }
        for (const auto& w : list->words) {
            if (w.empty() || !is_lowercase(w)) {
                throw std::invalid_argument("test \"" + name + "\": word \"" + w +
                                            "\" must be non-empty lowercase");
            }
        }
    }
}

std::pair<const WordList*, const WordList*> WeatTest::identity_lists() const {
    if (identity_side == IdentitySide::Targets) return {&target_x, &target_y};
    return {&assoc_a, &assoc_b};
}

WeatTest load_weat_test(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open test file: " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw std::runtime_error(path.string() + ": malformed JSON: " + e.what());
    }

    WeatTest test;
    test.name = j.value("name", path.stem().string());
    test.bias_type = parse_bias_type(j.value("bias_type", std::string("other")));
    test.target_x = parse_word_list(j, "target_x");
    test.target_y = parse_word_list(j, "target_y");
    test.assoc_a = parse_word_list(j, "assoc_a");
    test.assoc_b = parse_word_list(j, "assoc_b");
    const std::string convention = j.value("role_convention", std::string("iterate_targets"));
    if (convention == "iterate_targets") {
        test.role_convention = RoleConvention::IterateTargets;
    } else if (convention == "iterate_associations") {
        test.role_convention = RoleConvention::IterateAssociations;
    } else {
        throw std::runtime_error(path.string() + ": unknown role_convention \"" + convention + "\"");
    }
    const std::string side = j.value("identity_side", std::string("targets"));
    if (side == "targets") {
        test.identity_side = IdentitySide::Targets;
    } else if (side == "associations") {
        test.identity_side = IdentitySide::Associations;
    } else {
        throw std::runtime_error(path.string() + ": unknown identity_side \"" + side + "\"");
    }
    test.validate();
    return test;
}

std::size_t OovReport::dropped_total() const {
    return target_x.dropped.size() + target_y.dropped.size() + assoc_a.dropped.size() +
           assoc_b.dropped.size();
}

std::pair<std::vector<std::string>, std::vector<std::string>> filter_oov(
    const std::vector<std::string>& list, const EmbeddingModel& model) {
    std::vector<std::string> kept, dropped;
    for (const auto& w : list) {
        (model.contains(w) ? kept : dropped).push_back(w);
    }
    return {std::move(kept), std::move(dropped)};
}

double association_diff(const EmbeddingModel& model, std::string_view w,
                        const std::vector<std::string>& a_words,
                        const std::vector<std::string>& b_words) {
    if (a_words.empty() || b_words.empty()) {
        throw std::invalid_argument("association_diff: empty association list");
    }
    double a_acc = 0.0;
    for (const auto& a : a_words) a_acc += cosine_similarity(model, w, a);
    double b_acc = 0.0;
    for (const auto& b : b_words) b_acc += cosine_similarity(model, w, b);
    return a_acc / static_cast<double>(a_words.size()) -
           b_acc / static_cast<double>(b_words.size());
}

namespace {

ListOovReport make_list_report(const WordList& list, const EmbeddingModel& model) {
    ListOovReport rep;
    rep.label = list.label;
    auto [kept, dropped] = filter_oov(list.words, model);
    rep.kept = std::move(kept);
    rep.dropped = std::move(dropped);
    return rep;
}

struct ResolvedLists {
    // Outer lists iterated in the two means; inner lists differenced in s.
    const std::vector<std::string>*outer_1, *outer_2, *inner_a, *inner_b;
};

ResolvedLists resolve_roles(const WeatTest& test, const OovReport& oov) {
    if (test.role_convention == RoleConvention::IterateTargets) {
        return {&oov.target_x.kept, &oov.target_y.kept, &oov.assoc_a.kept, &oov.assoc_b.kept};
    }
    return {&oov.assoc_a.kept, &oov.assoc_b.kept, &oov.target_x.kept, &oov.target_y.kept};
}

}  // namespace

WeatResult effect_size(const EmbeddingModel& model, const WeatTest& test, int min_kept) {
    test.validate();
    if (min_kept < 1) throw std::invalid_argument("effect_size: min_kept must be >= 1");

    WeatResult result;
    result.test_name = test.name;
    result.model_name = model.provenance().name;
    result.oov.target_x = make_list_report(test.target_x, model);
    result.oov.target_y = make_list_report(test.target_y, model);
    result.oov.assoc_a = make_list_report(test.assoc_a, model);
    result.oov.assoc_b = make_list_report(test.assoc_b, model);

    const std::size_t kept_sizes[] = {
        result.oov.target_x.kept.size(), result.oov.target_y.kept.size(),
        result.oov.assoc_a.kept.size(), result.oov.assoc_b.kept.size()};
    for (std::size_t kept : kept_sizes) {
        if (kept < static_cast<std::size_t>(min_kept)) {
            result.na_reason = "oov";
            return result;
        }
    }

    const ResolvedLists lists = resolve_roles(test, result.oov);
    result.unequal_sizes = lists.outer_1->size() != lists.outer_2->size();

    std::vector<double> s_first, s_second;
    s_first.reserve(lists.outer_1->size());
    s_second.reserve(lists.outer_2->size());
    for (const auto& w : *lists.outer_1) {
        s_first.push_back(association_diff(model, w, *lists.inner_a, *lists.inner_b));
    }
    for (const auto& w : *lists.outer_2) {
        s_second.push_back(association_diff(model, w, *lists.inner_a, *lists.inner_b));
    }

    std::vector<double> pooled;
    pooled.reserve(s_first.size() + s_second.size());
    pooled.insert(pooled.end(), s_first.begin(), s_first.end());
    pooled.insert(pooled.end(), s_second.begin(), s_second.end());

    const double spread = population_std(pooled);
    if (spread == 0.0) {
        result.na_reason = "degenerate";
        return result;
    }
    result.effect_size = (mean(s_first) - mean(s_second)) / spread;
    return result;
}

namespace {

/// Number of ways to choose k of n, clamped to avoid overflow.
std::uint64_t choose_clamped(std::uint64_t n, std::uint64_t k, std::uint64_t clamp) {
    if (k > n) return 0;
    k = std::min(k, n - k);
    std::uint64_t result = 1;
    for (std::uint64_t i = 1; i <= k; ++i) {
        if (result > clamp / (n - k + i)) return clamp;  // would overflow past clamp
        result = result * (n - k + i) / i;
        if (result >= clamp) return clamp;
    }
    return result;
}

double partition_statistic(const std::vector<double>& s_values,
                           const std::vector<std::size_t>& first_indices, double total,
                           double pooled_std) {
    double first_sum = 0.0;
    for (std::size_t idx : first_indices) first_sum += s_values[idx];
    const double n1 = static_cast<double>(first_indices.size());
    const double n2 = static_cast<double>(s_values.size()) - n1;
    const double mean1 = first_sum / n1;
    const double mean2 = (total - first_sum) / n2;
    return (mean1 - mean2) / pooled_std;
}

bool next_combination(std::vector<std::size_t>& combo, std::size_t n) {
    const std::size_t k = combo.size();
    std::size_t i = k;
    while (i > 0) {
        --i;
        if (combo[i] != i + n - k) {
            ++combo[i];
            for (std::size_t j = i + 1; j < k; ++j) combo[j] = combo[j - 1] + 1;
            return true;
        }
    }
    return false;
}

// Guards >= comparisons against ULP noise on exactly tied partitions.
constexpr double kStatTie = 1e-12;

}  // namespace

double permutation_pvalue(const EmbeddingModel& model, const WeatTest& test,
                          std::int64_t iterations, std::uint64_t seed, int min_kept) {
    if (iterations < 1) throw std::invalid_argument("permutation_pvalue: iterations must be >= 1");
    const WeatResult observed = effect_size(model, test, min_kept);
    if (observed.is_na()) {
        throw std::runtime_error("permutation_pvalue: effect size is n/a for test \"" + test.name +
                                 "\"");
    }

    const ResolvedLists lists = resolve_roles(test, observed.oov);
    std::vector<double> s_values;
    s_values.reserve(lists.outer_1->size() + lists.outer_2->size());
    for (const auto& w : *lists.outer_1) {
        s_values.push_back(association_diff(model, w, *lists.inner_a, *lists.inner_b));
    }
    for (const auto& w : *lists.outer_2) {
        s_values.push_back(association_diff(model, w, *lists.inner_a, *lists.inner_b));
    }

    const std::size_t n = s_values.size();
    const std::size_t n1 = lists.outer_1->size();
    const double total = std::accumulate(s_values.begin(), s_values.end(), 0.0);
    const double pooled_std = population_std(s_values);

    // Observed statistic via the same partition path, so the identity
    // partition compares bit-for-bit.
    std::vector<std::size_t> identity(n1);
    for (std::size_t i = 0; i < n1; ++i) identity[i] = i;
    const double observed_stat = partition_statistic(s_values, identity, total, pooled_std);

    const std::uint64_t partitions =
        choose_clamped(n, n1, static_cast<std::uint64_t>(iterations) + 1);

    std::int64_t hits = 0;
    std::int64_t trials = 0;
    if (partitions <= static_cast<std::uint64_t>(iterations)) {
        // Exhaustive: every size-n1 subset becomes the first list once.
        std::vector<std::size_t> combo = identity;
        do {
            ++trials;
            if (partition_statistic(s_values, combo, total, pooled_std) >=
                observed_stat - kStatTie) {
                ++hits;
            }
        } while (next_combination(combo, n));
        return static_cast<double>(hits) / static_cast<double>(trials);
    }

    SplitMix64 rng(seed);
    std::vector<std::size_t> indices(n);
    for (std::size_t i = 0; i < n; ++i) indices[i] = i;
    std::vector<std::size_t> first(n1);
    for (std::int64_t it = 0; it < iterations; ++it) {
        // Partial Fisher-Yates; the first n1 slots form the repartitioned list.
        for (std::size_t i = 0; i < n1; ++i) {
            const std::size_t j = i + static_cast<std::size_t>(rng.uniform_below(n - i));
            std::swap(indices[i], indices[j]);
        }
        first.assign(indices.begin(), indices.begin() + static_cast<std::ptrdiff_t>(n1));
        if (partition_statistic(s_values, first, total, pooled_std) >= observed_stat - kStatTie) {
            ++hits;
        }
        ++trials;
    }
    return static_cast<double>(hits) / static_cast<double>(trials);
}

std::vector<EmbeddingModel> train_split_models(const Corpus& corpus,
                                               const CleaningConfig& cleaning,
                                               const GloveConfig& config, int k,
                                               double fraction, std::uint64_t seed) {
    const auto splits = random_splits(corpus, k, fraction, seed);
    std::vector<EmbeddingModel> models;
    models.reserve(splits.size());
    for (std::size_t s = 0; s < splits.size(); ++s) {
        const TokenizedCorpus tokenized =
            preprocess_corpus(splits[s], cleaning, config.worker_count);
        const Vocabulary vocab = build_vocabulary(tokenized, config.min_count);
        const CoocMatrix cooc = build_cooc(tokenized, vocab, config.window_radius, true,
                                           config.worker_count);
        models.push_back(train_glove(cooc, vocab, config));
    }
    return models;
}

StabilityResult stability_over_models(const std::vector<EmbeddingModel>& split_models,
                                      const WeatTest& test, int min_kept) {
    StabilityResult result;
    std::vector<double> usable;
    for (const auto& model : split_models) {
        const WeatResult r = effect_size(model, test, min_kept);
        result.per_split.push_back(r.effect_size);
        if (r.effect_size) usable.push_back(*r.effect_size);
    }
    result.usable = static_cast<int>(usable.size());
    if (!usable.empty()) result.mean = mean(usable);
    if (usable.size() >= 2) result.std_dev = sample_std(usable);
    return result;
}

StabilityResult stability_std(const Corpus& corpus, const CleaningConfig& cleaning,
                              const GloveConfig& config, const WeatTest& test, int k,
                              double fraction, std::uint64_t seed, int min_kept) {
    return stability_over_models(train_split_models(corpus, cleaning, config, k, fraction, seed),
                                 test, min_kept);
}

}  // namespace weatkit
