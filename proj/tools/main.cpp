#include "weatkit/cooc_analysis.hpp"
#include "weatkit/report.hpp"
#include "weatkit/version.hpp"
#include "weatkit/weat.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

struct GloveFlags {
    std::optional<int> dimension, epochs, window_radius, worker_count;
    std::optional<double> x_max, alpha, learning_rate;
    std::optional<std::int64_t> min_count;
    std::optional<std::uint64_t> seed;
    bool main_only = false;

    void add_to(CLI::App* cmd) {
        cmd->add_option("--dimension", dimension, "Vector dimension (default 100)");
        cmd->add_option("--x_max", x_max, "Weighting cutoff (default 100)");
        cmd->add_option("--alpha", alpha, "Weighting exponent (default 0.75)");
        cmd->add_option("--learning_rate", learning_rate, "AdaGrad learning rate (default 0.05)");
        cmd->add_option("--epochs", epochs, "Training epochs (default 30)");
        cmd->add_option("--window_radius", window_radius, "Training window radius (default 10)");
        cmd->add_option("--min_count", min_count, "Vocabulary frequency threshold (default 5)");
        cmd->add_option("--seed", seed, "Training seed (default 42)");
        cmd->add_option("--worker_count", worker_count, "Training workers; 1 = deterministic");
        cmd->add_flag("--main_only", main_only, "Use the main vectors only (no context sum)");
    }

    void apply(weatkit::GloveConfig& config) const {
        if (dimension) config.dimension = *dimension;
        if (x_max) config.x_max = *x_max;
        if (alpha) config.alpha = *alpha;
        if (learning_rate) config.learning_rate = *learning_rate;
        if (epochs) config.epochs = *epochs;
        if (window_radius) config.window_radius = *window_radius;
        if (min_count) config.min_count = *min_count;
        if (seed) config.seed = *seed;
        if (worker_count) config.worker_count = *worker_count;
        if (main_only) config.sum_context = false;
    }
};

weatkit::CleaningConfig make_cleaning(const std::optional<std::string>& stopwords_path,
                                      const std::vector<weatkit::WeatTest>& tests,
                                      bool remove_stopwords) {
    weatkit::CleaningConfig cleaning;
    cleaning.stopword_set = stopwords_path ? weatkit::load_stopwords(*stopwords_path)
                                           : weatkit::default_stopwords();
    for (const auto& test : tests) {
        for (const weatkit::WordList* list :
             {&test.target_x, &test.target_y, &test.assoc_a, &test.assoc_b}) {
            cleaning.protected_words.insert(list->words.begin(), list->words.end());
        }
    }
    cleaning.remove_stopwords = remove_stopwords;
    return cleaning;
}

std::string hash_hex(std::uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

int cmd_ingest(const std::string& posts, const std::optional<std::string>& users) {
    const weatkit::Corpus corpus = weatkit::load_corpus(
        posts, users ? std::optional<fs::path>(*users) : std::nullopt);
    std::int64_t metadata_less = 0;
    for (const auto& post : corpus.posts) {
        if (!corpus.profile_of(post)) ++metadata_less;
    }
    ordered_json out;
    out["posts"] = corpus.posts.size();
    out["users"] = corpus.users.size();
    out["metadata_less_posts"] = metadata_less;
    out["corpus_hash"] = hash_hex(weatkit::corpus_fingerprint(corpus));
    std::cout << out.dump(2) << "\n";
    return 0;
}

int cmd_train(const std::string& posts, const std::optional<std::string>& users,
              const std::string& output, const std::optional<std::string>& stopwords,
              bool no_embedding_stopwords, const std::vector<std::string>& protect_tests,
              const GloveFlags& flags) {
    weatkit::GloveConfig config;
    flags.apply(config);
    config.validate();

    std::vector<weatkit::WeatTest> tests;
    for (const auto& path : protect_tests) tests.push_back(weatkit::load_weat_test(path));

    const weatkit::Corpus corpus = weatkit::load_corpus(
        posts, users ? std::optional<fs::path>(*users) : std::nullopt);
    weatkit::CleaningConfig cleaning = make_cleaning(stopwords, tests, !no_embedding_stopwords);

    const auto tokenized = weatkit::preprocess_corpus(corpus, cleaning, config.worker_count);
    const auto vocab = weatkit::build_vocabulary(tokenized, config.min_count);
    const auto cooc = weatkit::build_cooc(tokenized, vocab, config.window_radius, true,
                                          config.worker_count);
    weatkit::TrainStats stats;
    weatkit::EmbeddingModel model = weatkit::train_glove(cooc, vocab, config, &stats);

    weatkit::ModelProvenance prov = model.provenance();
    prov.name = fs::path(output).stem().string();
    prov.source = posts;
    prov.corpus_hash = hash_hex(weatkit::corpus_fingerprint(corpus));
    weatkit::save_model(weatkit::EmbeddingModel(model.words(), model.matrix(), prov), output);

    ordered_json out;
    out["model"] = output;
    out["vocabulary"] = vocab.size();
    out["cooc_pairs"] = cooc.pair_count();
    out["final_epoch_loss"] = stats.epoch_mean_loss.empty() ? 0.0 : stats.epoch_mean_loss.back();
    std::cout << out.dump(2) << "\n";
    return 0;
}

int cmd_weat(const std::string& model_path, const std::vector<std::string>& test_paths,
             int min_kept, const std::optional<std::int64_t>& pvalue_iterations,
             std::uint64_t pvalue_seed) {
    const weatkit::EmbeddingModel model = weatkit::load_embeddings_text(model_path);
    std::cout << "model,test,status,effect_size,p_value,oov_dropped\n";
    for (const auto& path : test_paths) {
        const weatkit::WeatTest test = weatkit::load_weat_test(path);
        const weatkit::WeatResult result = weatkit::effect_size(model, test, min_kept);
        std::string p_value;
        if (pvalue_iterations && !result.is_na()) {
            char buf[32];
            std::snprintf(buf, sizeof(buf), "%.4f",
                          weatkit::permutation_pvalue(model, test, *pvalue_iterations,
                                                      pvalue_seed, min_kept));
            p_value = buf;
        }
        std::cout << fs::path(model_path).stem().string() << ',' << test.name << ','
                  << (result.is_na() ? "n/a" : "ok") << ','
                  << weatkit::format_effect(result.effect_size) << ',' << p_value << ','
                  << result.oov.dropped_total() << "\n";
    }
    return 0;
}

int cmd_cooc(const std::string& posts, const std::vector<std::string>& test_paths,
             const std::optional<std::string>& stopwords, int radius, int top_k,
             const std::string& pair_mode, const std::string& output_dir) {
    std::vector<weatkit::WeatTest> tests;
    for (const auto& path : test_paths) tests.push_back(weatkit::load_weat_test(path));

    const weatkit::Corpus corpus = weatkit::load_corpus(posts);
    const weatkit::CleaningConfig cleaning = make_cleaning(stopwords, tests, true);
    const auto tokenized = weatkit::preprocess_corpus(corpus, cleaning, 1);

    const weatkit::PairCountMode mode = pair_mode == "binary"
                                            ? weatkit::PairCountMode::BinaryPerSentence
                                            : weatkit::PairCountMode::OccurrenceProduct;

    weatkit::AuditReport report;
    report.tool_version = weatkit::kToolVersion;
    report.stopword_mode = "analysis-only";
    const std::string model_name = fs::path(posts).stem().string();
    for (const auto& test : tests) {
        report.test_names.push_back(test.name);
        const auto [first_identity, second_identity] = test.identity_lists();
        for (const weatkit::WordList* identity : {first_identity, second_identity}) {
            const auto cooc_report =
                weatkit::window_cooc_top(tokenized, *identity, radius, top_k);
            for (const auto& [word, count] : cooc_report.word_frequency) {
                report.frequency_rows.push_back(
                    {model_name, test.name, identity->label, word, count});
            }
            report.neighbor_tables.push_back({model_name, test.name, cooc_report});
        }
        weatkit::PairCountRow pair_row;
        pair_row.model = model_name;
        pair_row.counts = weatkit::sentence_pair_counts(tokenized, test, mode);
        report.pair_rows.push_back(std::move(pair_row));
    }

    fs::create_directories(output_dir);
    weatkit::render_report(report, "csv", output_dir);
    weatkit::render_neighbor_texts(report, output_dir);
    std::cout << "wrote " << output_dir << "\n";
    return 0;
}

struct AuditFlags {
    std::optional<std::string> output_dir, stopwords, pair_mode;
    std::vector<std::string> formats;
    std::optional<int> min_kept, radius, top_k, stability_k;
    std::optional<double> stability_fraction;
    std::optional<std::uint64_t> stability_seed, pvalue_seed;
    std::optional<std::int64_t> pvalue_iterations;
    bool no_embedding_stopwords = false;
    bool no_save_models = false;

    void add_to(CLI::App* cmd) {
        cmd->add_option("--output_dir", output_dir, "Override the configured output directory");
        cmd->add_option("--formats", formats, "Override output formats (csv json markdown)");
        cmd->add_option("--stopwords", stopwords, "Override the stopword list file");
        cmd->add_option("--min_kept", min_kept, "Minimum kept words per list (default 2)");
        cmd->add_option("--radius", radius, "Analysis window radius (default 10)");
        cmd->add_option("--top_k", top_k, "Neighbors kept per list (default 100)");
        cmd->add_option("--pair_mode", pair_mode, "product | binary");
        cmd->add_option("--stability_k", stability_k, "Number of random splits");
        cmd->add_option("--stability_fraction", stability_fraction, "Split sample fraction");
        cmd->add_option("--stability_seed", stability_seed, "Split sampling seed");
        cmd->add_option("--pvalue_iterations", pvalue_iterations, "Permutation budget");
        cmd->add_option("--pvalue_seed", pvalue_seed, "Permutation Monte-Carlo seed");
        cmd->add_flag("--no_embedding_stopwords", no_embedding_stopwords,
                      "Keep stopwords when training embeddings");
        cmd->add_flag("--no_save_models", no_save_models, "Skip writing trained vector files");
    }

    void apply(weatkit::PipelineConfig& config) const {
        if (output_dir) config.output_dir = *output_dir;
        if (!formats.empty()) config.formats = formats;
        if (stopwords) config.stopwords_path = *stopwords;
        if (min_kept) config.min_kept = *min_kept;
        if (radius) config.cooc.radius = *radius;
        if (top_k) config.cooc.top_k = *top_k;
        if (pair_mode) {
            config.cooc.pair_mode = *pair_mode == "binary"
                                        ? weatkit::PairCountMode::BinaryPerSentence
                                        : weatkit::PairCountMode::OccurrenceProduct;
        }
        if (stability_k || stability_fraction || stability_seed) {
            weatkit::StabilityConfig s =
                config.stability.value_or(weatkit::StabilityConfig{});
            if (stability_k) s.k = *stability_k;
            if (stability_fraction) s.fraction = *stability_fraction;
            if (stability_seed) s.seed = *stability_seed;
            config.stability = s;
        }
        if (pvalue_iterations || pvalue_seed) {
            weatkit::PvalueConfig p = config.pvalue.value_or(weatkit::PvalueConfig{});
            if (pvalue_iterations) p.iterations = *pvalue_iterations;
            if (pvalue_seed) p.seed = *pvalue_seed;
            config.pvalue = p;
        }
        if (no_embedding_stopwords) config.apply_stopwords_for_embedding = false;
        if (no_save_models) config.save_models = false;
    }
};

int cmd_audit(const std::string& config_path, const GloveFlags& flags,
              const AuditFlags& audit_flags) {
    weatkit::PipelineConfig config = weatkit::load_pipeline_config(config_path);
    flags.apply(config.glove);
    audit_flags.apply(config);
    config.validate();

    const weatkit::AuditReport report = weatkit::run_pipeline(config);
    std::size_t errors = 0, na = 0;
    for (const auto& row : report.weat_rows) {
        if (row.status == "error") ++errors;
        if (row.status == "n/a") ++na;
    }
    ordered_json out;
    out["output_dir"] = config.output_dir.string();
    out["models"] = report.models.size();
    out["tests"] = report.test_names.size();
    out["rows"] = report.weat_rows.size();
    out["na_rows"] = na;
    out["error_rows"] = errors;
    std::cout << out.dump(2) << "\n";
    return 0;
}

int cmd_report(const std::string& input, const std::string& output_dir,
               const std::vector<std::string>& formats) {
    const weatkit::AuditReport report = weatkit::load_report_json(input);
    for (const auto& format : formats) weatkit::render_report(report, format, output_dir);
    weatkit::render_neighbor_texts(report, output_dir);
    std::cout << "wrote " << output_dir << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Corpus social-bias audit: GloVe training, WEAT scoring, co-occurrence mining"};
    app.set_version_flag("--version", weatkit::kToolVersion);
    app.require_subcommand(1);

    auto* ingest = app.add_subcommand("ingest", "Validate corpus files and print counts");
    std::string ingest_posts;
    std::optional<std::string> ingest_users;
    ingest->add_option("--posts", ingest_posts, "Line-delimited JSON posts file")->required();
    ingest->add_option("--users", ingest_users, "Line-delimited JSON users file");

    auto* train = app.add_subcommand("train", "Train a GloVe model from a corpus");
    std::string train_posts, train_output;
    std::optional<std::string> train_users, train_stopwords;
    std::vector<std::string> train_protect;
    bool train_no_stop = false;
    GloveFlags train_flags;
    train->add_option("--posts", train_posts, "Posts file")->required();
    train->add_option("--users", train_users, "Users file");
    train->add_option("--output", train_output, "Output vector file")->required();
    train->add_option("--stopwords", train_stopwords, "Stopword list (default: bundled)");
    train->add_option("--protect", train_protect,
                      "Test definition file(s) whose words survive stopword removal");
    train->add_flag("--no_embedding_stopwords", train_no_stop,
                    "Keep stopwords when training embeddings");
    train_flags.add_to(train);

    auto* weat = app.add_subcommand("weat", "Score WEAT tests against a vector file");
    std::string weat_model;
    std::vector<std::string> weat_tests;
    int weat_min_kept = 2;
    std::optional<std::int64_t> weat_pvalue_iterations;
    std::uint64_t weat_pvalue_seed = 1;
    weat->add_option("--model", weat_model, "Vector file")->required();
    weat->add_option("--test", weat_tests, "Test definition file(s)")->required();
    weat->add_option("--min_kept", weat_min_kept, "Minimum kept words per list (default 2)");
    weat->add_option("--pvalue_iterations", weat_pvalue_iterations,
                     "Enable permutation p-values with this budget");
    weat->add_option("--pvalue_seed", weat_pvalue_seed, "Monte-Carlo seed");

    auto* cooc = app.add_subcommand("cooc", "Run the co-occurrence analyses for tests");
    std::string cooc_posts, cooc_output = "cooc_out", cooc_pair_mode = "product";
    std::vector<std::string> cooc_tests;
    std::optional<std::string> cooc_stopwords;
    int cooc_radius = 10, cooc_top_k = 100;
    cooc->add_option("--posts", cooc_posts, "Posts file")->required();
    cooc->add_option("--test", cooc_tests, "Test definition file(s)")->required();
    cooc->add_option("--stopwords", cooc_stopwords, "Stopword list (default: bundled)");
    cooc->add_option("--radius", cooc_radius, "Window radius (default 10)");
    cooc->add_option("--top_k", cooc_top_k, "Neighbors kept per list (default 100)");
    cooc->add_option("--pair_mode", cooc_pair_mode, "product | binary");
    cooc->add_option("--output_dir", cooc_output, "Output directory");

    auto* audit = app.add_subcommand("audit", "Run the full pipeline from a config file");
    std::string audit_config;
    GloveFlags audit_glove_flags;
    AuditFlags audit_flags;
    audit->add_option("--config", audit_config, "Pipeline config (JSON)")->required();
    audit_flags.add_to(audit);
    audit_glove_flags.add_to(audit);

    auto* report = app.add_subcommand("report", "Re-render a saved report.json");
    std::string report_input, report_output = "report_out";
    std::vector<std::string> report_formats = {"csv", "json", "markdown"};
    report->add_option("--input", report_input, "Saved report.json")->required();
    report->add_option("--output_dir", report_output, "Output directory");
    report->add_option("--formats", report_formats, "Formats to render");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*ingest) return cmd_ingest(ingest_posts, ingest_users);
        if (*train) {
            return cmd_train(train_posts, train_users, train_output, train_stopwords,
                             train_no_stop, train_protect, train_flags);
        }
        if (*weat) {
            return cmd_weat(weat_model, weat_tests, weat_min_kept, weat_pvalue_iterations,
                            weat_pvalue_seed);
        }
        if (*cooc) {
            return cmd_cooc(cooc_posts, cooc_tests, cooc_stopwords, cooc_radius, cooc_top_k,
                            cooc_pair_mode, cooc_output);
        }
        if (*audit) return cmd_audit(audit_config, audit_glove_flags, audit_flags);
        if (*report) return cmd_report(report_input, report_output, report_formats);
    } catch (const std::exception& e) {
        nlohmann::ordered_json err;
        err["error"] = e.what();
        std::cerr << err.dump() << "\n";
        return 1;
    }
    return 0;
}
