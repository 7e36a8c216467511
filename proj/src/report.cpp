#include "weatkit/report.hpp"

#include "weatkit/version.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

namespace weatkit {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

std::filesystem::path resolve(const std::filesystem::path& base, const std::filesystem::path& p) {
    return p.is_absolute() ? p : base / p;
}

GroupSpec parse_group_spec(const json& j) {
    GroupSpec spec;
    spec.label = j.value("label", std::string());
    const std::string attr = j.value("attribute", std::string());
    if (attr == "gender") {
        spec.attribute = GroupAttribute::Gender;
    } else if (attr == "ethnicity") {
        spec.attribute = GroupAttribute::Ethnicity;
    } else if (attr == "age") {
        spec.attribute = GroupAttribute::Age;
    } else {
        throw std::runtime_error("group spec \"" + spec.label + "\": unknown attribute \"" + attr +
                                 "\"");
    }
    if (auto it = j.find("values"); it != j.end()) {
        for (const auto& v : *it) spec.accepted_values.push_back(v.get<std::string>());
    }
    if (auto it = j.find("age_rule"); it != j.end()) {
        AgeRule rule;
        rule.threshold = it->value("threshold", 23);
        rule.reference_year = it->value("reference_year", 2017);
        const std::string side = it->value("side", std::string("below"));
        if (side == "below") {
            rule.side = AgeSide::Below;
        } else if (side == "at_or_above") {
            rule.side = AgeSide::AtOrAbove;
        } else {
            throw std::runtime_error("group spec \"" + spec.label + "\": unknown age side \"" +
                                     side + "\"");
        }
        spec.age_rule = rule;
    }
    if (auto it = j.find("max_age"); it != j.end() && !it->is_null()) {
        spec.max_age_filter = it->get<int>();
    }
    if (spec.label.empty()) throw std::runtime_error("group spec without a label");
    spec.validate();
    return spec;
}

ordered_json group_spec_to_json(const GroupSpec& spec) {
    ordered_json j;
    j["label"] = spec.label;
    switch (spec.attribute) {
        case GroupAttribute::Gender: j["attribute"] = "gender"; break;
        case GroupAttribute::Ethnicity: j["attribute"] = "ethnicity"; break;
        case GroupAttribute::Age: j["attribute"] = "age"; break;
    }
    if (!spec.accepted_values.empty()) j["values"] = spec.accepted_values;
    if (spec.age_rule) {
        j["age_rule"] = {{"threshold", spec.age_rule->threshold},
                         {"side", spec.age_rule->side == AgeSide::Below ? "below" : "at_or_above"},
                         {"reference_year", spec.age_rule->reference_year}};
    }
    if (spec.max_age_filter) j["max_age"] = *spec.max_age_filter;
    return j;
}

ordered_json config_to_json(const PipelineConfig& c) {
    ordered_json j;
    j["corpora"] = ordered_json::array();
    for (const auto& entry : c.corpora) {
        ordered_json e;
        e["name"] = entry.name;
        e["posts"] = entry.posts_path.string();
        if (entry.users_path) e["users"] = entry.users_path->string();
        j["corpora"].push_back(e);
    }
    j["group_specs"] = ordered_json::array();
    for (const auto& spec : c.group_specs) j["group_specs"].push_back(group_spec_to_json(spec));
    j["glove"] = {{"dimension", c.glove.dimension},
                  {"x_max", c.glove.x_max},
                  {"alpha", c.glove.alpha},
                  {"learning_rate", c.glove.learning_rate},
                  {"epochs", c.glove.epochs},
                  {"window_radius", c.glove.window_radius},
                  {"min_count", c.glove.min_count},
                  {"seed", c.glove.seed},
                  {"worker_count", c.glove.worker_count},
                  {"sum_context", c.glove.sum_context}};
    j["tests"] = ordered_json::array();
    for (const auto& t : c.test_files) j["tests"].push_back(t.string());
    j["baselines"] = ordered_json::array();
    for (const auto& b : c.baselines) {
        j["baselines"].push_back({{"name", b.name}, {"vectors", b.vectors_path.string()}});
    }
    if (c.stability) {
        j["stability"] = {{"k", c.stability->k},
                          {"fraction", c.stability->fraction},
                          {"seed", c.stability->seed}};
    }
    if (c.pvalue) {
        j["pvalue"] = {{"iterations", c.pvalue->iterations}, {"seed", c.pvalue->seed}};
    }
    j["cooc"] = {{"radius", c.cooc.radius},
                 {"top_k", c.cooc.top_k},
                 {"pair_mode",
                  c.cooc.pair_mode == PairCountMode::OccurrenceProduct ? "product" : "binary"}};
    if (c.stopwords_path) j["stopwords"] = c.stopwords_path->string();
    j["apply_stopwords_for_embedding"] = c.apply_stopwords_for_embedding;
    j["min_kept"] = c.min_kept;
    j["output_dir"] = c.output_dir.string();
    j["formats"] = c.formats;
    j["save_models"] = c.save_models;
    return j;
}

std::string csv_escape(const std::string& field) {
    if (field.find_first_of(",\"\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char ch : field) {
        if (ch == '"') out += "\"\"";
        else out += ch;
    }
    out += "\"";
    return out;
}

std::string format_optional(const std::optional<double>& value, const char* fmt) {
    if (!value) return "";
    char buf[64];
    std::snprintf(buf, sizeof(buf), fmt, *value);
    return buf;
}

std::string sanitize_filename(const std::string& name) {
    std::string out;
    out.reserve(name.size());
    for (char c : name) {
        const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                        (c >= '0' && c <= '9') || c == '-' || c == '.';
        out.push_back(ok ? c : '_');
    }
    return out;
}

std::string hash_hex(std::uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace

void PipelineConfig::validate() const {
    if (corpora.empty() && baselines.empty()) {
        throw std::invalid_argument("pipeline: no corpora and no baselines configured");
    }
    std::unordered_set<std::string> names;
    for (const auto& entry : corpora) {
        if (entry.name.empty()) throw std::invalid_argument("pipeline: corpus without a name");
        if (entry.posts_path.empty()) {
            throw std::invalid_argument("pipeline: corpus \"" + entry.name + "\" has no posts path");
        }
        if (!names.insert(entry.name).second) {
            throw std::invalid_argument("pipeline: duplicate corpus name \"" + entry.name + "\"");
        }
    }
    for (const auto& b : baselines) {
        if (b.name.empty()) throw std::invalid_argument("pipeline: baseline without a name");
        if (b.vectors_path.empty()) {
            throw std::invalid_argument("pipeline: baseline \"" + b.name + "\" has no vectors path");
        }
        if (!names.insert(b.name).second) {
            throw std::invalid_argument("pipeline: duplicate model name \"" + b.name + "\"");
        }
    }
    if (test_files.empty()) throw std::invalid_argument("pipeline: no tests configured");
    if (output_dir.empty()) throw std::invalid_argument("pipeline: output_dir is required");
    glove.validate();
    for (const auto& spec : group_specs) spec.validate();
    if (min_kept < 1) throw std::invalid_argument("pipeline: min_kept must be >= 1");
    if (cooc.radius < 1) throw std::invalid_argument("pipeline: cooc radius must be >= 1");
    if (cooc.top_k < 1) throw std::invalid_argument("pipeline: cooc top_k must be >= 1");
    if (stability) {
        if (stability->k < 1) throw std::invalid_argument("pipeline: stability k must be >= 1");
        if (!(stability->fraction > 0.0 && stability->fraction <= 1.0)) {
            throw std::invalid_argument("pipeline: stability fraction must be in (0, 1]");
        }
    }
    if (pvalue && pvalue->iterations < 1) {
        throw std::invalid_argument("pipeline: pvalue iterations must be >= 1");
    }
    static const std::unordered_set<std::string> known = {"csv", "json", "markdown"};
    for (const auto& f : formats) {
        if (!known.count(f)) throw std::invalid_argument("pipeline: unknown format \"" + f + "\"");
    }
}

PipelineConfig load_pipeline_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw std::runtime_error(path.string() + ": malformed JSON: " + e.what());
    }
    const std::filesystem::path base = path.parent_path();

    PipelineConfig config;
    if (auto it = j.find("corpora"); it != j.end()) {
        for (const auto& e : *it) {
            CorpusConfigEntry entry;
            entry.name = e.value("name", std::string());
            const std::string posts_raw = e.value("posts", std::string());
            if (posts_raw.empty()) {
                throw std::runtime_error("corpus \"" + entry.name + "\" has no posts path");
            }
            entry.posts_path = resolve(base, posts_raw);
            if (e.contains("users") && !e["users"].is_null()) {
                entry.users_path = resolve(base, e["users"].get<std::string>());
            }
            config.corpora.push_back(std::move(entry));
        }
    }
    if (auto it = j.find("group_specs"); it != j.end()) {
        for (const auto& e : *it) config.group_specs.push_back(parse_group_spec(e));
    }
    if (auto it = j.find("glove"); it != j.end()) {
        const json& g = *it;
        config.glove.dimension = g.value("dimension", config.glove.dimension);
        config.glove.x_max = g.value("x_max", config.glove.x_max);
        config.glove.alpha = g.value("alpha", config.glove.alpha);
        config.glove.learning_rate = g.value("learning_rate", config.glove.learning_rate);
        config.glove.epochs = g.value("epochs", config.glove.epochs);
        config.glove.window_radius = g.value("window_radius", config.glove.window_radius);
        config.glove.min_count = g.value("min_count", config.glove.min_count);
        config.glove.seed = g.value("seed", config.glove.seed);
        config.glove.worker_count = g.value("worker_count", config.glove.worker_count);
        config.glove.sum_context = g.value("sum_context", config.glove.sum_context);
    }
    if (auto it = j.find("tests"); it != j.end()) {
        for (const auto& t : *it) config.test_files.push_back(resolve(base, t.get<std::string>()));
    }
    if (auto it = j.find("baselines"); it != j.end()) {
        for (const auto& b : *it) {
            const std::string name = b.value("name", std::string());
            const std::string vectors_raw = b.value("vectors", std::string());
            if (vectors_raw.empty()) {
                throw std::runtime_error("baseline \"" + name + "\" has no vectors path");
            }
            config.baselines.push_back({name, resolve(base, vectors_raw)});
        }
    }
    if (auto it = j.find("stability"); it != j.end() && !it->is_null()) {
        StabilityConfig s;
        s.k = it->value("k", s.k);
        s.fraction = it->value("fraction", s.fraction);
        s.seed = it->value("seed", s.seed);
        config.stability = s;
    }
    if (auto it = j.find("pvalue"); it != j.end() && !it->is_null()) {
        PvalueConfig p;
        p.iterations = it->value("iterations", p.iterations);
        p.seed = it->value("seed", p.seed);
        config.pvalue = p;
    }
    if (auto it = j.find("cooc"); it != j.end()) {
        config.cooc.radius = it->value("radius", config.cooc.radius);
        config.cooc.top_k = it->value("top_k", config.cooc.top_k);
        const std::string mode = it->value("pair_mode", std::string("product"));
        if (mode == "product") {
            config.cooc.pair_mode = PairCountMode::OccurrenceProduct;
        } else if (mode == "binary") {
            config.cooc.pair_mode = PairCountMode::BinaryPerSentence;
        } else {
            throw std::runtime_error("unknown pair_mode \"" + mode + "\"");
        }
    }
    if (j.contains("stopwords") && !j["stopwords"].is_null()) {
        config.stopwords_path = resolve(base, j["stopwords"].get<std::string>());
    }
    config.apply_stopwords_for_embedding =
        j.value("apply_stopwords_for_embedding", config.apply_stopwords_for_embedding);
    config.min_kept = j.value("min_kept", config.min_kept);
    if (j.contains("output_dir")) config.output_dir = resolve(base, j["output_dir"].get<std::string>());
    if (j.contains("formats")) config.formats = j["formats"].get<std::vector<std::string>>();
    config.save_models = j.value("save_models", config.save_models);
    config.validate();
    return config;
}

std::uint64_t config_hash(const PipelineConfig& config) {
    const std::string canonical = config_to_json(config).dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : canonical) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string format_effect(const std::optional<double>& value) {
    if (!value) return "n/a";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.4f", *value);
    return buf;
}

namespace {

struct ModelInput {
    std::string name;
    std::string kind;  // "trained" | "baseline"
    std::string source;
    std::string error;  // load/slice failure carried into every cell
    std::vector<std::string> warnings;
    const Corpus* corpus = nullptr;                   // trained
    const std::filesystem::path* vectors = nullptr;   // baseline
};

/// Builds one model, fills its WEAT rows and analyses into the report, and
/// releases everything before the next model.
void process_model(const ModelInput& input, const std::vector<WeatTest>& tests,
                   const CleaningConfig& train_cleaning, const CleaningConfig& analysis_cleaning,
                   const PipelineConfig& config, AuditReport& report) {
    ModelInfo info;
    info.name = input.name;
    info.kind = input.kind;
    info.source = input.source;
    info.error = input.error;
    info.warnings = input.warnings;
    if (input.kind == "trained") info.config_summary = config.glove.summary();

    std::optional<EmbeddingModel> model;
    std::optional<TokenizedCorpus> analysis_tokens;
    if (info.error.empty()) {
        try {
            if (input.kind == "trained") {
                info.corpus_hash = hash_hex(corpus_fingerprint(*input.corpus));
                TokenizedCorpus train_tokens =
                    preprocess_corpus(*input.corpus, train_cleaning, config.glove.worker_count);
                const Vocabulary vocab = build_vocabulary(train_tokens, config.glove.min_count);
                const CoocMatrix cooc = build_cooc(train_tokens, vocab,
                                                   config.glove.window_radius, true,
                                                   config.glove.worker_count);
                EmbeddingModel trained = train_glove(cooc, vocab, config.glove);

                ModelProvenance prov = trained.provenance();
                prov.name = input.name;
                prov.source = input.source;
                prov.corpus_hash = info.corpus_hash;
                model = EmbeddingModel(trained.words(), trained.matrix(), std::move(prov));

                if (train_cleaning.remove_stopwords == analysis_cleaning.remove_stopwords) {
                    analysis_tokens = std::move(train_tokens);
                } else {
                    analysis_tokens = preprocess_corpus(*input.corpus, analysis_cleaning,
                                                        config.glove.worker_count);
                }
                if (config.save_models) {
                    const auto model_dir = config.output_dir / "models";
                    std::filesystem::create_directories(model_dir);
                    save_model(*model, model_dir / (sanitize_filename(info.name) + ".vec"));
                }
            } else {
                VectorLoadReport load_report;
                EmbeddingModel loaded = load_embeddings_text(*input.vectors, &load_report);
                ModelProvenance prov = loaded.provenance();
                prov.name = input.name;
                model = EmbeddingModel(loaded.words(), loaded.matrix(), std::move(prov));
                info.warnings.insert(info.warnings.end(), load_report.warnings.begin(),
                                     load_report.warnings.end());
            }
        } catch (const std::exception& e) {
            info.error = e.what();
            model.reset();
            analysis_tokens.reset();
        }
    }

    std::vector<EmbeddingModel> split_models;
    if (config.stability && model && input.kind == "trained") {
        try {
            split_models = train_split_models(*input.corpus, train_cleaning, config.glove,
                                              config.stability->k, config.stability->fraction,
                                              config.stability->seed);
        } catch (const std::exception& e) {
            info.warnings.push_back(std::string("stability splits failed: ") + e.what());
        }
    }

    for (const auto& test : tests) {
        WeatRow row;
        row.model = info.name;
        row.test = test.name;
        if (!model) {
            row.status = "error";
            row.detail = info.error;
            report.weat_rows.push_back(std::move(row));
            continue;
        }
        try {
            const WeatResult result = effect_size(*model, test, config.min_kept);
            row.effect_size = result.effect_size;
            row.unequal_sizes = result.unequal_sizes;
            row.oov_dropped = {static_cast<std::int64_t>(result.oov.target_x.dropped.size()),
                               static_cast<std::int64_t>(result.oov.target_y.dropped.size()),
                               static_cast<std::int64_t>(result.oov.assoc_a.dropped.size()),
                               static_cast<std::int64_t>(result.oov.assoc_b.dropped.size())};
            row.oov_dropped_words = {result.oov.target_x.dropped, result.oov.target_y.dropped,
                                     result.oov.assoc_a.dropped, result.oov.assoc_b.dropped};
            if (result.is_na()) {
                row.status = "n/a";
                row.detail = result.na_reason;
            } else {
                row.status = "ok";
                if (config.pvalue) {
                    row.p_value =
                        permutation_pvalue(*model, test, config.pvalue->iterations,
                                           config.pvalue->seed, config.min_kept);
                }
            }
            if (!split_models.empty()) {
                const StabilityResult stab = stability_over_models(split_models, test,
                                                                   config.min_kept);
                row.stability_mean = stab.mean;
                row.stability_std = stab.std_dev;
                row.per_split = stab.per_split;
            }
        } catch (const std::exception& e) {
            row.status = "error";
            row.detail = e.what();
        }
        report.weat_rows.push_back(std::move(row));
    }

    if (model && analysis_tokens) {
        for (const auto& test : tests) {
            try {
                const auto [first_identity, second_identity] = test.identity_lists();
                for (const WordList* identity : {first_identity, second_identity}) {
                    const IdentityCoocReport cooc_report =
                        window_cooc_top(*analysis_tokens, *identity, config.cooc.radius,
                                        config.cooc.top_k, config.glove.worker_count);
                    for (const auto& [word, count] : cooc_report.word_frequency) {
                        report.frequency_rows.push_back(
                            {info.name, test.name, identity->label, word, count});
                    }
                    report.neighbor_tables.push_back({info.name, test.name, cooc_report});
                }
                PairCountRow pair_row;
                pair_row.model = info.name;
                pair_row.counts = sentence_pair_counts(*analysis_tokens, test,
                                                       config.cooc.pair_mode,
                                                       config.glove.worker_count);
                report.pair_rows.push_back(std::move(pair_row));
            } catch (const std::exception& e) {
                info.warnings.push_back(std::string("cooc analysis failed for test ") +
                                        test.name + ": " + e.what());
            }
        }
    }

    report.models.push_back(std::move(info));
}

}  // namespace

AuditReport run_pipeline(const PipelineConfig& config) {
    config.validate();
    std::filesystem::create_directories(config.output_dir);

    const std::unordered_set<std::string> stopwords =
        config.stopwords_path ? load_stopwords(*config.stopwords_path) : default_stopwords();

    std::vector<WeatTest> tests;
    tests.reserve(config.test_files.size());
    for (const auto& file : config.test_files) tests.push_back(load_weat_test(file));

    // Every test word survives cleaning, so frequency and pair analyses see
    // the words the tests score.
    std::unordered_set<std::string> protected_words;
    for (const auto& test : tests) {
        for (const WordList* list : {&test.target_x, &test.target_y, &test.assoc_a, &test.assoc_b}) {
            protected_words.insert(list->words.begin(), list->words.end());
        }
    }

    CleaningConfig analysis_cleaning;
    analysis_cleaning.stopword_set = stopwords;
    analysis_cleaning.protected_words = protected_words;
    CleaningConfig train_cleaning = analysis_cleaning;
    train_cleaning.remove_stopwords = config.apply_stopwords_for_embedding;

    AuditReport report;
    report.tool_version = kToolVersion;
    report.config_hash_hex = hash_hex(config_hash(config));
    report.stopword_mode =
        config.apply_stopwords_for_embedding ? "analysis+embedding" : "analysis-only";
    for (const auto& test : tests) report.test_names.push_back(test.name);

    // One corpus resident at a time; each model is built, evaluated, and
    // released before the next.
    for (const auto& entry : config.corpora) {
        Corpus corpus;
        std::string load_error;
        try {
            corpus = load_corpus(entry.posts_path, entry.users_path);
        } catch (const std::exception& e) {
            load_error = e.what();
        }

        ModelInput full;
        full.name = entry.name;
        full.kind = "trained";
        full.source = entry.posts_path.string();
        full.error = load_error;
        full.corpus = &corpus;
        process_model(full, tests, train_cleaning, analysis_cleaning, config, report);

        for (const auto& spec : config.group_specs) {
            ModelInput input;
            input.name = entry.name + ":" + spec.label;
            input.kind = "trained";
            input.source = entry.posts_path.string();
            input.error = load_error;
            Corpus slice;
            if (load_error.empty()) {
                try {
                    slice = slice_by_group(corpus, spec, &input.warnings);
                    input.corpus = &slice;
                } catch (const std::exception& e) {
                    input.error = e.what();
                }
            }
            process_model(input, tests, train_cleaning, analysis_cleaning, config, report);
        }
    }

    for (const auto& baseline : config.baselines) {
        ModelInput input;
        input.name = baseline.name;
        input.kind = "baseline";
        input.source = baseline.vectors_path.string();
        input.vectors = &baseline.vectors_path;
        process_model(input, tests, train_cleaning, analysis_cleaning, config, report);
    }

    for (const auto& format : config.formats) {
        render_report(report, format, config.output_dir);
    }
    render_neighbor_texts(report, config.output_dir);
    return report;
}

namespace {

ordered_json optional_to_json(const std::optional<double>& v) {
    if (!v) return nullptr;
    return *v;
}

std::optional<double> optional_from_json(const json& j) {
    if (j.is_null()) return std::nullopt;
    return j.get<double>();
}

ordered_json report_to_json(const AuditReport& report) {
    ordered_json j;
    j["tool_version"] = report.tool_version;
    j["config_hash"] = report.config_hash_hex;
    j["stopword_mode"] = report.stopword_mode;
    j["models"] = ordered_json::array();
    for (const auto& m : report.models) {
        j["models"].push_back({{"name", m.name},
                               {"kind", m.kind},
                               {"source", m.source},
                               {"config", m.config_summary},
                               {"corpus_hash", m.corpus_hash},
                               {"error", m.error},
                               {"warnings", m.warnings}});
    }
    j["tests"] = report.test_names;
    j["weat"] = ordered_json::array();
    for (const auto& row : report.weat_rows) {
        ordered_json r;
        r["model"] = row.model;
        r["test"] = row.test;
        r["status"] = row.status;
        r["detail"] = row.detail;
        r["effect_size"] = optional_to_json(row.effect_size);
        r["p_value"] = optional_to_json(row.p_value);
        r["stability_mean"] = optional_to_json(row.stability_mean);
        r["stability_std"] = optional_to_json(row.stability_std);
        r["per_split"] = ordered_json::array();
        for (const auto& v : row.per_split) r["per_split"].push_back(optional_to_json(v));
        r["oov_dropped"] = row.oov_dropped;
        r["oov_dropped_words"] = row.oov_dropped_words;
        r["unequal_sizes"] = row.unequal_sizes;
        j["weat"].push_back(std::move(r));
    }
    j["frequencies"] = ordered_json::array();
    for (const auto& f : report.frequency_rows) {
        j["frequencies"].push_back({{"model", f.model},
                                    {"test", f.test},
                                    {"list", f.list_label},
                                    {"word", f.word},
                                    {"count", f.count}});
    }
    j["pair_counts"] = ordered_json::array();
    for (const auto& p : report.pair_rows) {
        j["pair_counts"].push_back(
            {{"model", p.model},
             {"test", p.counts.test_name},
             {"concept_labels", p.counts.concept_labels},
             {"assoc_labels", p.counts.assoc_labels},
             {"cells", p.counts.cells},
             {"mode",
              p.counts.mode == PairCountMode::OccurrenceProduct ? "product" : "binary"}});
    }
    j["neighbors"] = ordered_json::array();
    for (const auto& n : report.neighbor_tables) {
        ordered_json e;
        e["model"] = n.model;
        e["test"] = n.test;
        e["list"] = n.report.identity_label;
        e["window_radius"] = n.report.window_radius;
        e["top_k"] = n.report.top_k;
        e["word_frequency"] = ordered_json::array();
        for (const auto& [w, c] : n.report.word_frequency) {
            e["word_frequency"].push_back({w, c});
        }
        e["top"] = ordered_json::array();
        for (const auto& [w, c] : n.report.top_neighbors) {
            e["top"].push_back({w, c});
        }
        j["neighbors"].push_back(std::move(e));
    }
    return j;
}

AuditReport report_from_json(const json& j) {
    AuditReport report;
    report.tool_version = j.value("tool_version", std::string());
    report.config_hash_hex = j.value("config_hash", std::string());
    report.stopword_mode = j.value("stopword_mode", std::string());
    for (const auto& m : j.value("models", json::array())) {
        ModelInfo info;
        info.name = m.value("name", std::string());
        info.kind = m.value("kind", std::string());
        info.source = m.value("source", std::string());
        info.config_summary = m.value("config", std::string());
        info.corpus_hash = m.value("corpus_hash", std::string());
        info.error = m.value("error", std::string());
        info.warnings = m.value("warnings", std::vector<std::string>());
        report.models.push_back(std::move(info));
    }
    report.test_names = j.value("tests", std::vector<std::string>());
    for (const auto& r : j.value("weat", json::array())) {
        WeatRow row;
        row.model = r.value("model", std::string());
        row.test = r.value("test", std::string());
        row.status = r.value("status", std::string());
        row.detail = r.value("detail", std::string());
        row.effect_size = optional_from_json(r.at("effect_size"));
        row.p_value = optional_from_json(r.at("p_value"));
        row.stability_mean = optional_from_json(r.at("stability_mean"));
        row.stability_std = optional_from_json(r.at("stability_std"));
        for (const auto& v : r.value("per_split", json::array())) {
            row.per_split.push_back(optional_from_json(v));
        }
        const auto dropped = r.value("oov_dropped", std::vector<std::int64_t>{0, 0, 0, 0});
        for (std::size_t i = 0; i < 4 && i < dropped.size(); ++i) row.oov_dropped[i] = dropped[i];
        const auto dropped_words =
            r.value("oov_dropped_words", std::vector<std::vector<std::string>>(4));
        for (std::size_t i = 0; i < 4 && i < dropped_words.size(); ++i) {
            row.oov_dropped_words[i] = dropped_words[i];
        }
        row.unequal_sizes = r.value("unequal_sizes", false);
        report.weat_rows.push_back(std::move(row));
    }
    for (const auto& f : j.value("frequencies", json::array())) {
        report.frequency_rows.push_back({f.value("model", std::string()),
                                         f.value("test", std::string()),
                                         f.value("list", std::string()),
                                         f.value("word", std::string()),
                                         f.value("count", std::int64_t{0})});
    }
    for (const auto& p : j.value("pair_counts", json::array())) {
        PairCountRow row;
        row.model = p.value("model", std::string());
        row.counts.test_name = p.value("test", std::string());
        const auto concept_labels = p.value("concept_labels", std::vector<std::string>(2));
        const auto assoc_labels = p.value("assoc_labels", std::vector<std::string>(2));
        for (std::size_t i = 0; i < 2; ++i) {
            row.counts.concept_labels[i] = concept_labels[i];
            row.counts.assoc_labels[i] = assoc_labels[i];
        }
        const auto cells = p.value("cells", std::vector<std::vector<std::int64_t>>(2));
        for (std::size_t c = 0; c < 2; ++c) {
            for (std::size_t a = 0; a < 2; ++a) row.counts.cells[c][a] = cells[c][a];
        }
        row.counts.mode = p.value("mode", std::string("product")) == "binary"
                              ? PairCountMode::BinaryPerSentence
                              : PairCountMode::OccurrenceProduct;
        report.pair_rows.push_back(std::move(row));
    }
    for (const auto& n : j.value("neighbors", json::array())) {
        NeighborTable table;
        table.model = n.value("model", std::string());
        table.test = n.value("test", std::string());
        table.report.identity_label = n.value("list", std::string());
        table.report.window_radius = n.value("window_radius", 10);
        table.report.top_k = n.value("top_k", 100);
        for (const auto& pair : n.value("word_frequency", json::array())) {
            table.report.word_frequency.emplace_back(pair.at(0).get<std::string>(),
                                                     pair.at(1).get<std::int64_t>());
        }
        for (const auto& pair : n.value("top", json::array())) {
            table.report.top_neighbors.emplace_back(pair.at(0).get<std::string>(),
                                                    pair.at(1).get<std::int64_t>());
        }
        report.neighbor_tables.push_back(std::move(table));
    }
    return report;
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write: " + path.string());
    out << content;
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::string render_weat_csv(const AuditReport& report) {
    std::ostringstream os;
    os << "model,test,status,effect_size,p_value,stability_mean,stability_std,"
          "oov_dropped_x,oov_dropped_y,oov_dropped_a,oov_dropped_b,detail\n";
    for (const auto& row : report.weat_rows) {
        os << csv_escape(row.model) << ',' << csv_escape(row.test) << ',' << row.status << ','
           << (row.status == "error" ? "" : format_effect(row.effect_size)) << ','
           << format_optional(row.p_value, "%.4f") << ','
           << format_optional(row.stability_mean, "%.4f") << ','
           << format_optional(row.stability_std, "%.4f") << ',' << row.oov_dropped[0] << ','
           << row.oov_dropped[1] << ',' << row.oov_dropped[2] << ',' << row.oov_dropped[3] << ','
           << csv_escape(row.detail) << '\n';
    }
    return os.str();
}

std::string render_frequencies_csv(const AuditReport& report) {
    std::ostringstream os;
    os << "model,test,list,word,count\n";
    for (const auto& f : report.frequency_rows) {
        os << csv_escape(f.model) << ',' << csv_escape(f.test) << ',' << csv_escape(f.list_label)
           << ',' << csv_escape(f.word) << ',' << f.count << '\n';
    }
    return os.str();
}

std::string render_pairs_csv(const AuditReport& report) {
    std::ostringstream os;
    os << "model,test,concept_list,count_first_assoc,count_second_assoc\n";
    for (const auto& p : report.pair_rows) {
        for (std::size_t side = 0; side < 2; ++side) {
            os << csv_escape(p.model) << ',' << csv_escape(p.counts.test_name) << ','
               << csv_escape(p.counts.concept_labels[side]) << ',' << p.counts.cells[side][0]
               << ',' << p.counts.cells[side][1] << '\n';
        }
    }
    return os.str();
}

std::string render_markdown(const AuditReport& report) {
    std::ostringstream os;
    os << "# Corpus bias audit\n\n";
    os << "- tool version: " << report.tool_version << "\n";
    os << "- config hash: `" << report.config_hash_hex << "`\n";
    os << "- stopword mode: " << report.stopword_mode << "\n\n";

    os << "## Models\n\n";
    os << "| Model | Kind | Config | Status |\n|---|---|---|---|\n";
    for (const auto& m : report.models) {
        os << "| " << m.name << " | " << m.kind << " | " << m.config_summary << " | "
           << (m.error.empty() ? "ok" : "error: " + m.error) << " |\n";
    }
    os << "\n## WEAT effect sizes\n\n";
    os << "Higher absolute value = larger measured bias; the highest absolute value per column "
          "is bold.\n\n";

    // column-wise max |d|
    std::vector<double> col_max(report.test_names.size(), -1.0);
    auto col_of = [&](const std::string& test) {
        for (std::size_t i = 0; i < report.test_names.size(); ++i) {
            if (report.test_names[i] == test) return static_cast<std::ptrdiff_t>(i);
        }
        return static_cast<std::ptrdiff_t>(-1);
    };
    for (const auto& row : report.weat_rows) {
        const auto c = col_of(row.test);
        if (c >= 0 && row.effect_size) {
            col_max[static_cast<std::size_t>(c)] =
                std::max(col_max[static_cast<std::size_t>(c)], std::abs(*row.effect_size));
        }
    }

    os << "| Model |";
    for (const auto& t : report.test_names) os << ' ' << t << " |";
    os << "\n|---|";
    for (std::size_t i = 0; i < report.test_names.size(); ++i) os << "---|";
    os << '\n';
    for (const auto& m : report.models) {
        os << "| " << m.name << " |";
        for (const auto& t : report.test_names) {
            const WeatRow* found = nullptr;
            for (const auto& row : report.weat_rows) {
                if (row.model == m.name && row.test == t) {
                    found = &row;
                    break;
                }
            }
            if (!found) {
                os << " |";
                continue;
            }
            if (found->status == "error") {
                os << " error |";
            } else if (!found->effect_size) {
                os << " n/a |";
            } else {
                const auto c = col_of(t);
                const bool bold = c >= 0 && std::abs(*found->effect_size) ==
                                                col_max[static_cast<std::size_t>(c)];
                os << ' ' << (bold ? "**" : "") << format_effect(found->effect_size)
                   << (bold ? "**" : "") << " |";
            }
        }
        os << '\n';
    }

    if (!report.pair_rows.empty()) {
        os << "\n## Sentence-level pair co-occurrences\n\n";
        os << "Cells are `first:second` counts against the two association lists.\n\n";
        os << "| Model | Test | Concept list | Counts |\n|---|---|---|---|\n";
        for (const auto& p : report.pair_rows) {
            for (std::size_t side = 0; side < 2; ++side) {
                os << "| " << p.model << " | " << p.counts.test_name << " | "
                   << p.counts.concept_labels[side] << " | " << p.counts.cells[side][0] << ':'
                   << p.counts.cells[side][1] << " |\n";
            }
        }
    }

    if (!report.frequency_rows.empty()) {
        os << "\n## Identity word frequencies\n\n";
        os << "| Model | Test | List | Word | Count |\n|---|---|---|---|---|\n";
        for (const auto& f : report.frequency_rows) {
            os << "| " << f.model << " | " << f.test << " | " << f.list_label << " | " << f.word
               << " | " << f.count << " |\n";
        }
    }
    os << '\n';
    return os.str();
}

}  // namespace

void render_report(const AuditReport& report, const std::string& format,
                   const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    if (format == "csv") {
        write_text_file(dir / "weat.csv", render_weat_csv(report));
        write_text_file(dir / "frequencies.csv", render_frequencies_csv(report));
        write_text_file(dir / "pair_counts.csv", render_pairs_csv(report));
    } else if (format == "json") {
        write_text_file(dir / "report.json", report_to_json(report).dump(2) + "\n");
    } else if (format == "markdown") {
        write_text_file(dir / "report.md", render_markdown(report));
    } else {
        throw std::invalid_argument("unknown report format \"" + format + "\"");
    }
}

void render_neighbor_texts(const AuditReport& report, const std::filesystem::path& dir) {
    if (report.neighbor_tables.empty()) return;
    const auto neighbor_dir = dir / "neighbors";
    std::filesystem::create_directories(neighbor_dir);
    for (const auto& table : report.neighbor_tables) {
        const std::string filename = sanitize_filename(table.model) + "__" +
                                     sanitize_filename(table.test) + "__" +
                                     sanitize_filename(table.report.identity_label) + ".txt";
        std::ostringstream os;
        os << "# model: " << table.model << "\n# test: " << table.test
           << "\n# list: " << table.report.identity_label
           << "\n# window_radius: " << table.report.window_radius
           << "\n# top_k: " << table.report.top_k << "\n";
        for (const auto& [word, count] : table.report.top_neighbors) {
            os << word << ' ' << count << '\n';
        }
        write_text_file(neighbor_dir / filename, os.str());
    }
}

AuditReport load_report_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open report: " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw std::runtime_error(path.string() + ": malformed JSON: " + e.what());
    }
    return report_from_json(j);
}

}  // namespace weatkit
