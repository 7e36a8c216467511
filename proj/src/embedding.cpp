#include "weatkit/embedding.hpp"

#include <json.hpp>

#include <charconv>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <system_error>

namespace weatkit {

EmbeddingModel::EmbeddingModel(std::vector<std::string> words, Mat vectors,
                               ModelProvenance provenance)
    : words_(std::move(words)), vectors_(std::move(vectors)), provenance_(std::move(provenance)) {
    if (static_cast<std::size_t>(vectors_.rows()) != words_.size()) {
        throw std::invalid_argument("EmbeddingModel: row/word count mismatch");
    }
    index_.reserve(words_.size());
    for (std::size_t i = 0; i < words_.size(); ++i) {
        if (!index_.emplace(words_[i], static_cast<int>(i)).second) {
            throw std::invalid_argument("EmbeddingModel: duplicate word \"" + words_[i] + "\"");
        }
    }
}

int EmbeddingModel::row_of(std::string_view word) const {
    auto it = index_.find(word);
    return it == index_.end() ? -1 : it->second;
}

Mat::ConstRowXpr EmbeddingModel::vector_of(std::string_view word) const {
    const int row = row_of(word);
    if (row < 0) throw std::runtime_error("word not in model: \"" + std::string(word) + "\"");
    return vectors_.row(row);
}

EmbeddingModel EmbeddingModel::scaled(Scalar factor) const {
    return EmbeddingModel(words_, Mat(vectors_ * factor), provenance_);
}

Scalar cosine_similarity(const EmbeddingModel& model, std::string_view w1, std::string_view w2) {
    const auto a = model.vector_of(w1);
    const auto b = model.vector_of(w2);
    const Scalar na = a.norm();
    const Scalar nb = b.norm();
    if (na == 0.0) throw std::domain_error("zero-norm vector for word \"" + std::string(w1) + "\"");
    if (nb == 0.0) throw std::domain_error("zero-norm vector for word \"" + std::string(w2) + "\"");
    return a.dot(b) / (na * nb);
}

namespace {

bool parse_double(std::string_view field, double& out) {
    const char* begin = field.data();
    const char* end = begin + field.size();
    auto [ptr, ec] = std::from_chars(begin, end, out);
    return ec == std::errc() && ptr == end;
}

bool is_integer_field(std::string_view field) {
    if (field.empty()) return false;
    for (char c : field) {
        if (c < '0' || c > '9') return false;
    }
    return true;
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
        std::size_t start = i;
        while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
        if (i > start) fields.push_back(line.substr(start, i - start));
    }
    return fields;
}

}  // namespace

EmbeddingModel load_embeddings_text(const std::filesystem::path& path, VectorLoadReport* report) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open vector file: " + path.string());

    VectorLoadReport local;
    VectorLoadReport& rep = report ? *report : local;

    std::vector<std::string> words;
    std::vector<double> flat;
    std::unordered_map<std::string, int> seen;
    int dimension = -1;

    std::string line;
    std::int64_t line_no = 0;
    bool first_content_line = true;
    while (std::getline(in, line)) {
        ++line_no;
        auto fields = split_fields(line);
        if (fields.empty()) continue;
        if (first_content_line) {
            first_content_line = false;
            // Compatibility: a leading "N D" integer pair is a header.
            if (fields.size() == 2 && is_integer_field(fields[0]) && is_integer_field(fields[1])) {
                rep.header_skipped = true;
                continue;
            }
        }
        if (fields.size() < 2) {
            throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                                     ": expected a word and at least one component");
        }
        const int components = static_cast<int>(fields.size()) - 1;
        if (dimension < 0) {
            dimension = components;
        } else if (components != dimension) {
            throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                                     ": expected " + std::to_string(dimension) +
                                     " components, got " + std::to_string(components));
        }
        std::string word(fields[0]);
        if (seen.count(word)) {
            ++rep.duplicate_count;
            if (rep.warnings.size() < 16) {
                rep.warnings.push_back("duplicate word \"" + word + "\" at line " +
                                       std::to_string(line_no) + "; first occurrence kept");
            }
            continue;
        }
        for (int k = 0; k < components; ++k) {
            double v = 0.0;
            if (!parse_double(fields[static_cast<std::size_t>(k) + 1], v)) {
                throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                                         ": non-numeric component \"" +
                                         std::string(fields[static_cast<std::size_t>(k) + 1]) + "\"");
            }
            flat.push_back(v);
        }
        seen.emplace(std::move(word), static_cast<int>(words.size()));
        words.push_back(std::string(fields[0]));
        ++rep.line_count;
    }

    if (dimension < 0) {
        throw std::runtime_error("vector file has no entries: " + path.string());
    }

    Mat vectors(static_cast<Eigen::Index>(words.size()), dimension);
    for (std::size_t i = 0; i < words.size(); ++i) {
        for (int k = 0; k < dimension; ++k) {
            vectors(static_cast<Eigen::Index>(i), k) = flat[i * static_cast<std::size_t>(dimension) +
                                                            static_cast<std::size_t>(k)];
        }
    }

    ModelProvenance prov;
    prov.kind = ModelProvenance::Kind::Loaded;
    prov.source = path.string();
    return EmbeddingModel(std::move(words), std::move(vectors), std::move(prov));
}

void save_embeddings_text(const EmbeddingModel& model, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write vector file: " + path.string());
    char buf[64];
    for (std::size_t i = 0; i < model.size(); ++i) {
        out << model.words()[i];
        const auto row = model.vector(static_cast<int>(i));
        for (Eigen::Index k = 0; k < row.size(); ++k) {
            // Shortest decimal that round-trips the exact double.
            auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), row(k));
            if (ec != std::errc()) throw std::runtime_error("failed to format component");
            out << ' ';
            out.write(buf, ptr - buf);
        }
        out << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

void save_model(const EmbeddingModel& model, const std::filesystem::path& path) {
    save_embeddings_text(model, path);

    const ModelProvenance& prov = model.provenance();
    nlohmann::ordered_json meta;
    meta["kind"] = prov.kind == ModelProvenance::Kind::Trained ? "trained" : "loaded";
    meta["name"] = prov.name;
    meta["source"] = prov.source;
    meta["seed"] = prov.seed;
    meta["corpus_hash"] = prov.corpus_hash;
    meta["config"] = prov.config_summary;
    meta["dimension"] = model.dimension();
    meta["words"] = model.size();

    std::filesystem::path meta_path = path;
    meta_path += ".meta.json";
    std::ofstream out(meta_path);
    if (!out) throw std::runtime_error("cannot write sidecar: " + meta_path.string());
    out << meta.dump(2) << '\n';
}

}  // namespace weatkit
