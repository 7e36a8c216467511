#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "weatkit/rng.hpp"
#include "weatkit/weat.hpp"

#include "test_util.hpp"

#include <cmath>
#include <numeric>

using namespace weatkit;
using testutil::TempDir;

namespace {

EmbeddingModel model_from(const std::vector<std::pair<std::string, std::vector<double>>>& rows) {
    const int dim = static_cast<int>(rows.front().second.size());
    Mat vectors(static_cast<Eigen::Index>(rows.size()), dim);
    std::vector<std::string> words;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        words.push_back(rows[i].first);
        for (int k = 0; k < dim; ++k) vectors(static_cast<Eigen::Index>(i), k) = rows[i].second[k];
    }
    return EmbeddingModel(std::move(words), std::move(vectors), ModelProvenance{});
}

WeatTest make_test(std::vector<std::string> x, std::vector<std::string> y,
                   std::vector<std::string> a, std::vector<std::string> b) {
    WeatTest test;
    test.name = "unit";
    test.target_x = {"x", std::move(x)};
    test.target_y = {"y", std::move(y)};
    test.assoc_a = {"a", std::move(a)};
    test.assoc_b = {"b", std::move(b)};
    return test;
}

// ---------------------------------------------------------------------------
// Independent oracle: plain double-loop reimplementation without Eigen.
// ---------------------------------------------------------------------------

using NaiveModel = std::vector<std::pair<std::string, std::vector<double>>>;

const std::vector<double>* naive_lookup(const NaiveModel& model, const std::string& word) {
    for (const auto& [w, v] : model) {
        if (w == word) return &v;
    }
    return nullptr;
}

double naive_cos(const std::vector<double>& a, const std::vector<double>& b) {
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

double naive_s(const NaiveModel& model, const std::string& w, const std::vector<std::string>& a,
               const std::vector<std::string>& b) {
    double sa = 0.0;
    for (const auto& word : a) sa += naive_cos(*naive_lookup(model, w), *naive_lookup(model, word));
    double sb = 0.0;
    for (const auto& word : b) sb += naive_cos(*naive_lookup(model, w), *naive_lookup(model, word));
    return sa / static_cast<double>(a.size()) - sb / static_cast<double>(b.size());
}

std::optional<double> naive_effect_size(const NaiveModel& model, const std::vector<std::string>& x,
                                        const std::vector<std::string>& y,
                                        const std::vector<std::string>& a,
                                        const std::vector<std::string>& b) {
    std::vector<double> s_all;
    double sum_x = 0.0;
    for (const auto& w : x) {
        const double s = naive_s(model, w, a, b);
        s_all.push_back(s);
        sum_x += s;
    }
    double sum_y = 0.0;
    for (const auto& w : y) {
        const double s = naive_s(model, w, a, b);
        s_all.push_back(s);
        sum_y += s;
    }
    const double mean_all =
        std::accumulate(s_all.begin(), s_all.end(), 0.0) / static_cast<double>(s_all.size());
    double var = 0.0;
    for (double s : s_all) var += (s - mean_all) * (s - mean_all);
    const double pop_std = std::sqrt(var / static_cast<double>(s_all.size()));
    if (pop_std == 0.0) return std::nullopt;
    return (sum_x / static_cast<double>(x.size()) - sum_y / static_cast<double>(y.size())) / pop_std;
}

NaiveModel random_naive_model(SplitMix64& rng, const std::vector<std::string>& words, int dim) {
    NaiveModel model;
    for (const auto& w : words) {
        std::vector<double> v(static_cast<std::size_t>(dim));
        double norm = 0.0;
        do {
            norm = 0.0;
            for (auto& c : v) {
                c = rng.uniform01() * 2.0 - 1.0;
                norm += c * c;
            }
        } while (norm < 1e-6);
        model.emplace_back(w, std::move(v));
    }
    return model;
}

std::vector<std::string> indexed_words(const std::string& prefix, int n) {
    std::vector<std::string> words;
    for (int i = 0; i < n; ++i) words.push_back(prefix + std::to_string(i));
    return words;
}

}  // namespace

TEST_CASE("filter_oov partitions a list, preserving order") {
    const EmbeddingModel model = model_from({{"cat", {1, 0}}, {"dog", {0, 1}}});
    const auto [kept, dropped] = filter_oov({"dog", "fox", "cat", "owl"}, model);
    CHECK(kept == std::vector<std::string>{"dog", "cat"});
    CHECK(dropped == std::vector<std::string>{"fox", "owl"});

    const auto [all_kept, none] = filter_oov({"cat", "dog"}, model);
    CHECK(none.empty());
    CHECK(all_kept.size() == 2);
}

TEST_CASE("filter_oov shape of the heavy-OOV scenario") {
    // 50-word list, 41 absent: 9 kept, 41 dropped
    std::vector<std::pair<std::string, std::vector<double>>> rows;
    for (int i = 0; i < 9; ++i) rows.push_back({"name" + std::to_string(i), {1.0, double(i)}});
    const EmbeddingModel model = model_from(rows);
    std::vector<std::string> list = indexed_words("name", 50);
    const auto [kept, dropped] = filter_oov(list, model);
    CHECK(kept.size() == 9);
    CHECK(dropped.size() == 41);
}

TEST_CASE("association_diff: hand-computed cases and antisymmetry") {
    const EmbeddingModel model = model_from(
        {{"w", {1, 0}}, {"a1", {1, 0}}, {"b1", {0, 1}}, {"mid", {1, 1}}});

    CHECK(association_diff(model, "w", {"a1"}, {"b1"}) == doctest::Approx(1.0));
    // equidistant word scores zero
    CHECK(association_diff(model, "mid", {"a1"}, {"b1"}) == doctest::Approx(0.0));
    // s(w, A, B) == -s(w, B, A)
    SplitMix64 rng(55);
    const auto words = indexed_words("v", 6);
    const NaiveModel naive = random_naive_model(rng, words, 3);
    std::vector<std::pair<std::string, std::vector<double>>> rows(naive.begin(), naive.end());
    const EmbeddingModel rand_model = model_from(rows);
    const double forward = association_diff(rand_model, "v0", {"v1", "v2"}, {"v3", "v4"});
    const double backward = association_diff(rand_model, "v0", {"v3", "v4"}, {"v1", "v2"});
    CHECK(forward == doctest::Approx(-backward).epsilon(1e-12));
}

TEST_CASE("effect_size: maximally separated 2-D configuration scores d = 2") {
    const EmbeddingModel model = model_from(
        {{"x1", {1, 0}}, {"y1", {0, 1}}, {"a1", {1, 0}}, {"b1", {0, 1}}});
    const WeatTest test = make_test({"x1"}, {"y1"}, {"a1"}, {"b1"});
    const WeatResult result = effect_size(model, test, 1);
    REQUIRE(result.effect_size.has_value());
    CHECK(*result.effect_size == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("effect_size: fully symmetric configuration scores d = 0") {
    const EmbeddingModel model = model_from({{"x1", {1, 0}},
                                             {"x2", {0, 1}},
                                             {"y1", {1, 0}},
                                             {"y2", {0, 1}},
                                             {"a1", {1, 0}},
                                             {"b1", {0, 1}}});
    const WeatTest test = make_test({"x1", "x2"}, {"y1", "y2"}, {"a1"}, {"b1"});
    const WeatResult result = effect_size(model, test, 1);
    REQUIRE(result.effect_size.has_value());
    CHECK(*result.effect_size == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("effect_size: swapping X/Y or A/B negates d") {
    SplitMix64 rng(99);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<std::string> words;
        for (const auto& p : {"x", "y", "a", "b"}) {
            for (int i = 0; i < 3; ++i) words.push_back(std::string(p) + std::to_string(i));
        }
        const int dim = 2 + static_cast<int>(rng.uniform_below(4));
        const NaiveModel naive = random_naive_model(rng, words, dim);
        const EmbeddingModel model = model_from({naive.begin(), naive.end()});

        const auto x = indexed_words("x", 3), y = indexed_words("y", 3);
        const auto a = indexed_words("a", 3), b = indexed_words("b", 3);
        const auto base = effect_size(model, make_test(x, y, a, b), 1);
        const auto swapped_targets = effect_size(model, make_test(y, x, a, b), 1);
        const auto swapped_assocs = effect_size(model, make_test(x, y, b, a), 1);
        if (!base.effect_size) continue;
        REQUIRE(swapped_targets.effect_size.has_value());
        REQUIRE(swapped_assocs.effect_size.has_value());
        CHECK(*swapped_targets.effect_size ==
              doctest::Approx(-*base.effect_size).epsilon(1e-12));
        CHECK(*swapped_assocs.effect_size == doctest::Approx(-*base.effect_size).epsilon(1e-12));
    }
}

TEST_CASE("effect_size matches the naive double-loop oracle to 1e-12") {
    SplitMix64 rng(2718);
    for (int trial = 0; trial < 100; ++trial) {
        const int nx = 1 + static_cast<int>(rng.uniform_below(4));
        const int ny = 1 + static_cast<int>(rng.uniform_below(4));
        const int na = 1 + static_cast<int>(rng.uniform_below(4));
        const int nb = 1 + static_cast<int>(rng.uniform_below(4));
        const int dim = 2 + static_cast<int>(rng.uniform_below(4));  // <= 5

        std::vector<std::string> words;
        const auto x = indexed_words("x", nx), y = indexed_words("y", ny);
        const auto a = indexed_words("a", na), b = indexed_words("b", nb);
        for (const auto* list : {&x, &y, &a, &b}) words.insert(words.end(), list->begin(), list->end());

        const NaiveModel naive = random_naive_model(rng, words, dim);
        const EmbeddingModel model = model_from({naive.begin(), naive.end()});

        const auto expected = naive_effect_size(naive, x, y, a, b);
        const auto actual = effect_size(model, make_test(x, y, a, b), 1);
        REQUIRE(expected.has_value() == actual.effect_size.has_value());
        if (expected) {
            CHECK(std::abs(*actual.effect_size - *expected) <= 1e-12);
        }
    }
}

TEST_CASE("effect_size: |d| <= 2 + 1e-9 for equal-size lists") {
    SplitMix64 rng(31415);
    int checked = 0;
    for (int trial = 0; trial < 300; ++trial) {
        const int n = 2 + static_cast<int>(rng.uniform_below(3));
        const int dim = 2 + static_cast<int>(rng.uniform_below(4));
        std::vector<std::string> words;
        const auto x = indexed_words("x", n), y = indexed_words("y", n);
        const auto a = indexed_words("a", 3), b = indexed_words("b", 3);
        for (const auto* list : {&x, &y, &a, &b}) words.insert(words.end(), list->begin(), list->end());
        const NaiveModel naive = random_naive_model(rng, words, dim);
        const EmbeddingModel model = model_from({naive.begin(), naive.end()});
        const auto result = effect_size(model, make_test(x, y, a, b), 1);
        if (!result.effect_size) continue;
        CHECK(std::abs(*result.effect_size) <= 2.0 + 1e-9);
        ++checked;
    }
    CHECK(checked > 250);
}

TEST_CASE("effect_size: positive scaling of the model leaves d unchanged") {
    SplitMix64 rng(616);
    std::vector<std::string> words;
    const auto x = indexed_words("x", 3), y = indexed_words("y", 3);
    const auto a = indexed_words("a", 3), b = indexed_words("b", 3);
    for (const auto* list : {&x, &y, &a, &b}) words.insert(words.end(), list->begin(), list->end());
    const NaiveModel naive = random_naive_model(rng, words, 4);
    const EmbeddingModel model = model_from({naive.begin(), naive.end()});
    const WeatTest test = make_test(x, y, a, b);

    const auto base = effect_size(model, test, 1);
    REQUIRE(base.effect_size.has_value());
    for (double factor : {1e-3, 0.5, 3.0, 1e4}) {
        const auto scaled = effect_size(model.scaled(factor), test, 1);
        REQUIRE(scaled.effect_size.has_value());
        CHECK(std::abs(*scaled.effect_size - *base.effect_size) < 1e-9);
    }
}

TEST_CASE("effect_size: n/a on OOV below min_kept, with a per-list report") {
    const EmbeddingModel model = model_from(
        {{"x1", {1, 0}}, {"y1", {0, 1}}, {"y2", {1, 1}}, {"a1", {1, 0}}, {"b1", {0, 1}}});
    WeatTest test = make_test({"x1", "x2", "x3"}, {"y1", "y2"}, {"a1"}, {"b1"});
    const WeatResult result = effect_size(model, test, /*min_kept=*/2);
    CHECK(result.is_na());
    CHECK(result.na_reason == "oov");
    CHECK(result.oov.target_x.kept == std::vector<std::string>{"x1"});
    CHECK(result.oov.target_x.dropped == std::vector<std::string>{"x2", "x3"});
    CHECK(result.oov.target_y.dropped.empty());

    // same test passes with min_kept = 1
    const WeatResult relaxed = effect_size(model, test, 1);
    CHECK_FALSE(relaxed.is_na());
}

TEST_CASE("effect_size: zero spread is n/a with the degenerate flag") {
    // every word identical: all s values equal -> zero standard deviation
    const EmbeddingModel model = model_from(
        {{"x1", {1, 0}}, {"x2", {1, 0}}, {"y1", {1, 0}}, {"y2", {1, 0}}, {"a1", {1, 0}},
         {"b1", {0, 1}}});
    const WeatTest test = make_test({"x1", "x2"}, {"y1", "y2"}, {"a1"}, {"b1"});
    const WeatResult result = effect_size(model, test, 1);
    CHECK(result.is_na());
    CHECK(result.na_reason == "degenerate");
}

TEST_CASE("effect_size flags unequal list sizes after filtering") {
    const EmbeddingModel model = model_from({{"x1", {1.0, 0.2}},
                                             {"x2", {0.3, 0.9}},
                                             {"y1", {0.1, 1.0}},
                                             {"a1", {1, 0}},
                                             {"b1", {0, 1}}});
    const WeatTest test = make_test({"x1", "x2"}, {"y1"}, {"a1"}, {"b1"});
    const WeatResult result = effect_size(model, test, 1);
    CHECK(result.unequal_sizes);
}

TEST_CASE("role_convention=iterate_associations mirrors swapping the list roles") {
    SplitMix64 rng(4242);
    std::vector<std::string> words;
    const auto x = indexed_words("x", 3), y = indexed_words("y", 3);
    const auto a = indexed_words("a", 3), b = indexed_words("b", 3);
    for (const auto* list : {&x, &y, &a, &b}) words.insert(words.end(), list->begin(), list->end());
    const NaiveModel naive = random_naive_model(rng, words, 3);
    const EmbeddingModel model = model_from({naive.begin(), naive.end()});

    WeatTest swapped_roles = make_test(x, y, a, b);
    swapped_roles.role_convention = RoleConvention::IterateAssociations;
    const auto alt = effect_size(model, swapped_roles, 1);

    // equivalent to iterating the association lists as outer concepts
    const auto reference = effect_size(model, make_test(a, b, x, y), 1);
    REQUIRE(alt.effect_size.has_value() == reference.effect_size.has_value());
    if (alt.effect_size) {
        CHECK(*alt.effect_size == doctest::Approx(*reference.effect_size).epsilon(1e-12));
    }
}

// ---------------------------------------------------------------------------
// permutation p-values
// ---------------------------------------------------------------------------

namespace {

/// Exhaustive oracle: recompute the statistic for every subset choice with
/// plain loops.
double oracle_exhaustive_pvalue(const NaiveModel& model, const std::vector<std::string>& x,
                                const std::vector<std::string>& y,
                                const std::vector<std::string>& a,
                                const std::vector<std::string>& b) {
    std::vector<std::string> pool(x);
    pool.insert(pool.end(), y.begin(), y.end());
    const std::size_t n = pool.size(), nx = x.size();

    auto stat_of = [&](const std::vector<std::string>& first,
                       const std::vector<std::string>& second) {
        std::vector<double> s_all;
        double sum1 = 0.0, sum2 = 0.0;
        for (const auto& w : first) {
            const double s = naive_s(model, w, a, b);
            s_all.push_back(s);
            sum1 += s;
        }
        for (const auto& w : second) {
            const double s = naive_s(model, w, a, b);
            s_all.push_back(s);
            sum2 += s;
        }
        const double m = std::accumulate(s_all.begin(), s_all.end(), 0.0) /
                         static_cast<double>(s_all.size());
        double var = 0.0;
        for (double s : s_all) var += (s - m) * (s - m);
        const double pop_std = std::sqrt(var / static_cast<double>(s_all.size()));
        return (sum1 / static_cast<double>(first.size()) -
                sum2 / static_cast<double>(second.size())) /
               pop_std;
    };
    const double observed = stat_of(x, y);

    int hits = 0, total = 0;
    std::vector<int> mask(n, 0);
    std::fill(mask.begin(), mask.begin() + static_cast<std::ptrdiff_t>(nx), 1);
    std::sort(mask.begin(), mask.end());
    do {
        std::vector<std::string> first, second;
        for (std::size_t i = 0; i < n; ++i) (mask[i] ? first : second).push_back(pool[i]);
        ++total;
        if (stat_of(first, second) >= observed - 1e-12) ++hits;
    } while (std::next_permutation(mask.begin(), mask.end()));
    return static_cast<double>(hits) / static_cast<double>(total);
}

}  // namespace

TEST_CASE("permutation_pvalue: exhaustive enumeration matches the oracle") {
    SplitMix64 rng(808);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<std::string> words;
        // unequal sizes on half the trials: repartitions preserve them
        const auto x = indexed_words("x", 2 + trial % 2), y = indexed_words("y", 2);
        const auto a = indexed_words("a", 2), b = indexed_words("b", 2);
        for (const auto* list : {&x, &y, &a, &b}) words.insert(words.end(), list->begin(), list->end());
        const NaiveModel naive = random_naive_model(rng, words, 3);
        const EmbeddingModel model = model_from({naive.begin(), naive.end()});
        const WeatTest test = make_test(x, y, a, b);

        const auto observed = effect_size(model, test, 1);
        if (!observed.effect_size) continue;

        const double p = permutation_pvalue(model, test, 1000, 1, 1);
        const double expected = oracle_exhaustive_pvalue(naive, x, y, a, b);
        CHECK(p == doctest::Approx(expected).epsilon(1e-12));
        CHECK(p >= 0.0);
        CHECK(p <= 1.0);
    }
}

TEST_CASE("permutation_pvalue: d = 0 symmetric case counts over all C(4,2) partitions") {
    const EmbeddingModel model = model_from({{"x1", {1, 0}},
                                             {"x2", {0, 1}},
                                             {"y1", {1, 0}},
                                             {"y2", {0, 1}},
                                             {"a1", {1, 0}},
                                             {"b1", {0, 1}}});
    const WeatTest test = make_test({"x1", "x2"}, {"y1", "y2"}, {"a1"}, {"b1"});
    const double p = permutation_pvalue(model, test, 100, 1, 1);
    // s values {+1,-1,+1,-1}, observed d = 0. Of the C(4,2) = 6 partitions,
    // four mixed ones score 0 and {+1,+1} scores +2; only {-1,-1} stays
    // below the observed statistic, so p = 5/6.
    CHECK(p == doctest::Approx(5.0 / 6.0));
    const double expected = oracle_exhaustive_pvalue(
        {{"x1", {1, 0}}, {"x2", {0, 1}}, {"y1", {1, 0}}, {"y2", {0, 1}}, {"a1", {1, 0}},
         {"b1", {0, 1}}},
        {"x1", "x2"}, {"y1", "y2"}, {"a1"}, {"b1"});
    CHECK(p == doctest::Approx(expected));
}

TEST_CASE("permutation_pvalue: maximal separation attains the minimum 1/6") {
    const EmbeddingModel model = model_from({{"x1", {1, 0}},
                                             {"x2", {0.999, 0.001}},
                                             {"y1", {0, 1}},
                                             {"y2", {0.001, 0.999}},
                                             {"a1", {1, 0}},
                                             {"b1", {0, 1}}});
    const WeatTest test = make_test({"x1", "x2"}, {"y1", "y2"}, {"a1"}, {"b1"});
    const double p = permutation_pvalue(model, test, 100, 1, 1);
    CHECK(p == doctest::Approx(1.0 / 6.0));
}

TEST_CASE("permutation_pvalue: Monte-Carlo converges to the exhaustive value") {
    SplitMix64 rng(121);
    std::vector<std::string> words;
    const auto x = indexed_words("x", 10), y = indexed_words("y", 10);
    const auto a = indexed_words("a", 3), b = indexed_words("b", 3);
    for (const auto* list : {&x, &y, &a, &b}) words.insert(words.end(), list->begin(), list->end());
    const NaiveModel naive = random_naive_model(rng, words, 3);
    const EmbeddingModel model = model_from({naive.begin(), naive.end()});
    const WeatTest test = make_test(x, y, a, b);

    // C(20,10) = 184756: exhaustive under a 200k budget, Monte-Carlo under 20k
    const double exhaustive = permutation_pvalue(model, test, 200000, 1, 1);
    const double monte_carlo = permutation_pvalue(model, test, 20000, 7, 1);
    CHECK(std::abs(monte_carlo - exhaustive) <= 0.02);
    CHECK(monte_carlo >= 0.0);
    CHECK(monte_carlo <= 1.0);
}

TEST_CASE("permutation_pvalue rejects n/a effect sizes") {
    const EmbeddingModel model = model_from({{"x1", {1, 0}}, {"a1", {1, 0}}, {"b1", {0, 1}}});
    const WeatTest test = make_test({"x1"}, {"missing"}, {"a1"}, {"b1"});
    CHECK_THROWS_AS(permutation_pvalue(model, test, 100, 1, 1), std::runtime_error);
}

// ---------------------------------------------------------------------------
// stability over random splits
// ---------------------------------------------------------------------------

namespace {

Corpus cluster_raw_corpus(int posts, std::uint64_t seed) {
    SplitMix64 rng(seed);
    const std::vector<std::string> xs = {"x1", "x2"}, as = {"a1", "a2"};
    const std::vector<std::string> ys = {"y1", "y2"}, bs = {"b1", "b2"};
    Corpus corpus;
    for (int i = 0; i < posts; ++i) {
        const auto& c1 = (i % 2 == 0) ? xs : ys;
        const auto& c2 = (i % 2 == 0) ? as : bs;
        std::string text;
        for (int s = 0; s < 3; ++s) {
            text += c1[rng.uniform_below(2)] + " " + c2[rng.uniform_below(2)] + " " +
                    c1[rng.uniform_below(2)] + " " + c2[rng.uniform_below(2)] + ". ";
        }
        corpus.posts.push_back({"p" + std::to_string(i), text, std::nullopt, std::nullopt});
    }
    return corpus;
}

GloveConfig small_glove() {
    GloveConfig config;
    config.dimension = 8;
    config.epochs = 8;
    config.min_count = 1;
    config.window_radius = 5;
    config.seed = 5;
    config.worker_count = 1;
    return config;
}

}  // namespace

TEST_CASE("stability_std: fraction 1.0 with deterministic training gives std 0 exactly") {
    const Corpus corpus = cluster_raw_corpus(60, 17);
    const WeatTest test = make_test({"x1", "x2"}, {"y1", "y2"}, {"a1", "a2"}, {"b1", "b2"});
    const StabilityResult result =
        stability_std(corpus, CleaningConfig{}, small_glove(), test, 5, 1.0, 3, 2);
    REQUIRE(result.usable == 5);
    REQUIRE(result.std_dev.has_value());
    CHECK(*result.std_dev == 0.0);
    REQUIRE(result.per_split.size() == 5);
    for (const auto& split_score : result.per_split) {
        REQUIRE(split_score.has_value());
        CHECK(*split_score == *result.per_split[0]);
    }
}

TEST_CASE("stability_std: five random splits report five scores and a non-negative std") {
    const Corpus corpus = cluster_raw_corpus(80, 29);
    const WeatTest test = make_test({"x1", "x2"}, {"y1", "y2"}, {"a1", "a2"}, {"b1", "b2"});
    const StabilityResult result =
        stability_std(corpus, CleaningConfig{}, small_glove(), test, 5, 0.5, 11, 2);
    CHECK(result.per_split.size() == 5);
    CHECK(result.usable >= 2);
    REQUIRE(result.std_dev.has_value());
    CHECK(*result.std_dev >= 0.0);
}

TEST_CASE("stability_over_models: n/a splits are excluded and reported") {
    // four usable models, one model missing the test words entirely
    std::vector<EmbeddingModel> models;
    SplitMix64 rng(3333);
    std::vector<std::string> words = {"x1", "x2", "y1", "y2", "a1", "a2", "b1", "b2"};
    for (int m = 0; m < 4; ++m) {
        const NaiveModel naive = random_naive_model(rng, words, 3);
        models.push_back(model_from({naive.begin(), naive.end()}));
    }
    models.push_back(model_from({{"unrelated", {1.0, 0.0, 0.0}}, {"noise", {0.0, 1.0, 0.0}}}));

    const WeatTest test = make_test({"x1", "x2"}, {"y1", "y2"}, {"a1", "a2"}, {"b1", "b2"});
    const StabilityResult result = stability_over_models(models, test, 2);
    REQUIRE(result.per_split.size() == 5);
    CHECK(result.usable == 4);
    CHECK_FALSE(result.per_split[4].has_value());
    CHECK(result.std_dev.has_value());
}

TEST_CASE("stability_over_models: fewer than two usable splits has no std") {
    std::vector<EmbeddingModel> models;
    models.push_back(model_from({{"unrelated", {1.0, 0.0}}}));
    models.push_back(model_from({{"unrelated", {1.0, 0.0}}}));
    const WeatTest test = make_test({"x1"}, {"y1"}, {"a1"}, {"b1"});
    const StabilityResult result = stability_over_models(models, test, 1);
    CHECK(result.usable == 0);
    CHECK_FALSE(result.std_dev.has_value());
    CHECK_FALSE(result.mean.has_value());
}

// ---------------------------------------------------------------------------
// test definition files
// ---------------------------------------------------------------------------

TEST_CASE("load_weat_test parses the file format and validates lists") {
    TempDir dir;
    const auto file = dir.write("t.json", R"({
        "name": "toy",
        "bias_type": "gender",
        "target_x": {"label": "lx", "words": ["alpha", "beta"]},
        "target_y": {"label": "ly", "words": ["gamma", "delta"]},
        "assoc_a": {"label": "la", "words": ["one"]},
        "assoc_b": {"label": "lb", "words": ["two"]},
        "role_convention": "iterate_targets",
        "identity_side": "targets"
    })");
    const WeatTest test = load_weat_test(file);
    CHECK(test.name == "toy");
    CHECK(test.bias_type == BiasType::Gender);
    CHECK(test.target_x.words == std::vector<std::string>{"alpha", "beta"});
    CHECK(test.identity_lists().first == &test.target_x);

    const auto bad = dir.write("bad.json", R"({
        "name": "bad",
        "bias_type": "gender",
        "target_x": {"label": "lx", "words": ["Upper"]},
        "target_y": {"label": "ly", "words": ["ok"]},
        "assoc_a": {"label": "la", "words": ["one"]},
        "assoc_b": {"label": "lb", "words": ["two"]}
    })");
    CHECK_THROWS_AS(load_weat_test(bad), std::invalid_argument);

    const auto empty_list = dir.write("empty.json", R"({
        "name": "empty",
        "bias_type": "age",
        "target_x": {"label": "lx", "words": []},
        "target_y": {"label": "ly", "words": ["ok"]},
        "assoc_a": {"label": "la", "words": ["one"]},
        "assoc_b": {"label": "lb", "words": ["two"]}
    })");
    CHECK_THROWS_AS(load_weat_test(empty_list), std::invalid_argument);
}

#ifdef WEATKIT_DATA_DIR
TEST_CASE("shipped lexicons load, validate and contain the canonical example words") {
    const std::filesystem::path lexicons = std::filesystem::path(WEATKIT_DATA_DIR) / "lexicons";
    struct Expectation {
        const char* file;
        BiasType type;
        std::vector<std::string> expected_words;
    };
    const std::vector<Expectation> expectations = {
        {"weat3.json", BiasType::Ethnicity, {"sara", "alonzo", "freedom", "hatred"}},
        {"weat4.json", BiasType::Ethnicity, {"brad", "darnell", "freedom", "hatred"}},
        {"weat5.json", BiasType::Ethnicity, {"brad", "darnell", "joy", "agony"}},
        {"weat6.json", BiasType::Gender, {"john", "amy", "executive", "children"}},
        {"weat7.json", BiasType::Gender, {"algebra", "poetry", "man", "woman"}},
        {"weat8.json", BiasType::Gender, {"physics", "symphony", "father", "mother"}},
        {"weat10.json", BiasType::Age, {"tiffany", "bernice", "joy", "agony"}},
    };
    for (const auto& expectation : expectations) {
        const WeatTest test = load_weat_test(lexicons / expectation.file);
        CHECK(test.bias_type == expectation.type);
        std::unordered_set<std::string> all;
        for (const WordList* list : {&test.target_x, &test.target_y, &test.assoc_a, &test.assoc_b}) {
            all.insert(list->words.begin(), list->words.end());
        }
        for (const auto& word : expectation.expected_words) {
            INFO(expectation.file << " should contain " << word);
            CHECK(all.count(word) == 1);
        }
    }
    // equal-size target lists keep the |d| <= 2 bound applicable
    for (const auto& expectation : expectations) {
        const WeatTest test = load_weat_test(lexicons / expectation.file);
        CHECK(test.equal_target_sizes());
    }
}
#endif
