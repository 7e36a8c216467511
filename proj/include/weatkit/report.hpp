#pragma once

#include "weatkit/cooc_analysis.hpp"
#include "weatkit/corpus.hpp"
#include "weatkit/glove.hpp"
#include "weatkit/weat.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace weatkit {

struct CorpusConfigEntry {
    std::string name;
    std::filesystem::path posts_path;
    std::optional<std::filesystem::path> users_path;
};

struct BaselineEntry {
    std::string name;
    std::filesystem::path vectors_path;
};

struct StabilityConfig {
    int k = 5;
    double fraction = 0.5;
    std::uint64_t seed = 1;
};

struct PvalueConfig {
    std::int64_t iterations = 10000;
    std::uint64_t seed = 1;
};

struct CoocAnalysisConfig {
    int radius = 10;
    int top_k = 100;
    PairCountMode pair_mode = PairCountMode::OccurrenceProduct;
};

struct PipelineConfig {
    std::vector<CorpusConfigEntry> corpora;
    std::vector<GroupSpec> group_specs;
    GloveConfig glove;
    std::vector<std::filesystem::path> test_files;
    std::vector<BaselineEntry> baselines;
    std::optional<StabilityConfig> stability;
    std::optional<PvalueConfig> pvalue;
    CoocAnalysisConfig cooc;
    std::optional<std::filesystem::path> stopwords_path;  // nullopt = built-in list
    bool apply_stopwords_for_embedding = true;
    int min_kept = 2;
    std::filesystem::path output_dir;
    std::vector<std::string> formats = {"csv", "json", "markdown"};
    bool save_models = true;

    void validate() const;
};

/// Config file is JSON; relative paths resolve against the config file's
/// directory. Every field has the default above.
PipelineConfig load_pipeline_config(const std::filesystem::path& path);

/// FNV-1a over the canonical serialized config; changes iff a field changes.
std::uint64_t config_hash(const PipelineConfig& config);

struct WeatRow {
    std::string model;
    std::string test;
    std::string status;  // "ok" | "n/a" | "error"
    std::string detail;  // n/a reason or error message
    std::optional<double> effect_size;
    std::optional<double> p_value;
    std::optional<double> stability_mean;
    std::optional<double> stability_std;
    std::vector<std::optional<double>> per_split;
    std::array<std::int64_t, 4> oov_dropped{0, 0, 0, 0};          // x, y, a, b
    std::array<std::vector<std::string>, 4> oov_dropped_words{};  // x, y, a, b
    bool unequal_sizes = false;
};

struct FrequencyRow {
    std::string model;
    std::string test;
    std::string list_label;
    std::string word;
    std::int64_t count = 0;
};

struct PairCountRow {
    std::string model;
    PairCoocCounts counts;
};

struct NeighborTable {
    std::string model;
    std::string test;
    IdentityCoocReport report;
};

struct ModelInfo {
    std::string name;
    std::string kind;  // "trained" | "baseline"
    std::string source;
    std::string config_summary;
    std::string corpus_hash;
    std::string error;  // non-empty when the model failed to build/load
    std::vector<std::string> warnings;
};

struct AuditReport {
    std::string tool_version;
    std::string config_hash_hex;
    std::string stopword_mode;  // "analysis+embedding" | "analysis-only"
    std::vector<ModelInfo> models;
    std::vector<std::string> test_names;
    std::vector<WeatRow> weat_rows;  // exactly |models| x |tests| rows
    std::vector<FrequencyRow> frequency_rows;
    std::vector<PairCountRow> pair_rows;
    std::vector<NeighborTable> neighbor_tables;
};

/// Runs the full audit: per corpus and group slice, preprocess -> vocab ->
/// cooc -> train -> every test -> co-occurrence analyses; per baseline,
/// load -> every test. A failing stage marks its (model, test) cells as
/// errors instead of aborting the run. Artifacts land under
/// config.output_dir. Deterministic given seeds and worker_count == 1.
AuditReport run_pipeline(const PipelineConfig& config);

/// Renders `report` under `dir` in the requested format: "csv" (weat.csv,
/// frequencies.csv, pair_counts.csv), "json" (report.json, reparseable), or
/// "markdown" (report.md with the per-column max |d| bolded). Neighbor
/// lists are always written as plain text under neighbors/.
void render_report(const AuditReport& report, const std::string& format,
                   const std::filesystem::path& dir);

/// Plain-text neighbor lists under dir/neighbors/, one file per
/// (model, test, identity list).
void render_neighbor_texts(const AuditReport& report, const std::filesystem::path& dir);

/// Reparse a rendered report.json.
AuditReport load_report_json(const std::filesystem::path& path);

std::string format_effect(const std::optional<double>& value);  // 4 decimals or "n/a"

}  // namespace weatkit
