#include "weatkit/corpus.hpp"

#include "weatkit/rng.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <unordered_set>

namespace weatkit {

namespace {

using nlohmann::json;

std::string lower_ascii(std::string s) {
    for (char& c : s) {
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    }
    return s;
}

[[noreturn]] void line_error(const std::filesystem::path& path, std::int64_t line_no,
                             const std::string& what) {
    throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": " + what);
}

std::optional<std::string> opt_string(const json& rec, const char* field) {
    auto it = rec.find(field);
    if (it == rec.end() || it->is_null()) return std::nullopt;
    if (!it->is_string()) throw std::runtime_error(std::string("field \"") + field + "\" must be a string");
    return it->get<std::string>();
}

std::optional<Gender> parse_gender(const json& rec) {
    auto raw = opt_string(rec, "gender");
    if (!raw || raw->empty()) return std::nullopt;
    const std::string g = lower_ascii(*raw);
    if (g == "female") return Gender::Female;
    if (g == "male") return Gender::Male;
    return Gender::Other;
}

std::optional<int> parse_birth_year(const json& rec) {
    auto it = rec.find("birth_year");
    if (it == rec.end() || it->is_null()) return std::nullopt;
    int year = 0;
    if (it->is_number_integer()) {
        year = it->get<int>();
    } else if (it->is_string()) {
        try {
            year = std::stoi(it->get<std::string>());
        } catch (const std::exception&) {
            throw std::runtime_error("birth_year is not an integer");
        }
    } else {
        throw std::runtime_error("birth_year is not an integer");
    }
    if (year < 1000 || year > 9999) {
        throw std::runtime_error("birth_year " + std::to_string(year) + " is not a 4-digit year");
    }
    return year;
}

const char* gender_name(Gender g) {
    switch (g) {
        case Gender::Female: return "female";
        case Gender::Male: return "male";
        case Gender::Other: return "other";
    }
    return "other";
}

}  // namespace

void GroupSpec::validate() const {
    const bool has_values = !accepted_values.empty();
    const bool has_rule = age_rule.has_value();
    if (attribute == GroupAttribute::Age) {
        if (!has_rule || has_values) {
            throw std::invalid_argument("group spec \"" + label + "\": age slicing needs age_rule and no accepted_values");
        }
    } else {
        if (has_rule || !has_values) {
            throw std::invalid_argument("group spec \"" + label + "\": gender/ethnicity slicing needs accepted_values and no age_rule");
        }
    }
}

Corpus load_corpus(const std::filesystem::path& posts_path,
                   const std::optional<std::filesystem::path>& users_path) {
    Corpus corpus;

    std::ifstream posts_in(posts_path);
    if (!posts_in) {
        throw std::runtime_error("cannot open posts file: " + posts_path.string());
    }

    std::unordered_set<std::string> seen_ids;
    std::string line;
    std::int64_t line_no = 0;
    while (std::getline(posts_in, line)) {
        ++line_no;
        if (line.empty()) continue;
        json rec;
        try {
            rec = json::parse(line);
        } catch (const json::exception& e) {
            line_error(posts_path, line_no, std::string("malformed JSON: ") + e.what());
        }
        try {
            Post post;
            auto id = opt_string(rec, "id");
            if (!id || id->empty()) throw std::runtime_error("missing required field \"id\"");
            post.id = *id;
            auto it = rec.find("text");
            if (it == rec.end() || !it->is_string()) {
                throw std::runtime_error("missing required field \"text\"");
            }
            post.text = it->get<std::string>();
            post.user_id = opt_string(rec, "user_id");
            post.debate_id = opt_string(rec, "debate_id");
            if (!seen_ids.insert(post.id).second) {
                throw std::runtime_error("duplicate post id \"" + post.id + "\"");
            }
            corpus.posts.push_back(std::move(post));
        } catch (const std::runtime_error& e) {
            line_error(posts_path, line_no, e.what());
        }
    }

    if (users_path) {
        std::ifstream users_in(*users_path);
        if (!users_in) {
            throw std::runtime_error("cannot open users file: " + users_path->string());
        }
        line_no = 0;
        while (std::getline(users_in, line)) {
            ++line_no;
            if (line.empty()) continue;
            json rec;
            try {
                rec = json::parse(line);
            } catch (const json::exception& e) {
                line_error(*users_path, line_no, std::string("malformed JSON: ") + e.what());
            }
            try {
                UserProfile user;
                auto id = opt_string(rec, "user_id");
                if (!id || id->empty()) throw std::runtime_error("missing required field \"user_id\"");
                user.user_id = *id;
                user.gender = parse_gender(rec);
                user.ethnicity = opt_string(rec, "ethnicity");
                user.birth_year = parse_birth_year(rec);
                if (!corpus.users.emplace(user.user_id, std::move(user)).second) {
                    throw std::runtime_error("duplicate user id \"" + *id + "\"");
                }
            } catch (const std::runtime_error& e) {
                line_error(*users_path, line_no, e.what());
            }
        }
    }

    return corpus;
}

std::optional<int> age_of(const UserProfile& user, int reference_year) {
    if (!user.birth_year) return std::nullopt;
    const int age = reference_year - *user.birth_year;
    if (age < 0) return std::nullopt;
    return age;
}

Corpus slice_by_group(const Corpus& corpus, const GroupSpec& spec,
                      std::vector<std::string>* warnings) {
    spec.validate();

    std::vector<std::string> values;
    values.reserve(spec.accepted_values.size());
    for (const auto& v : spec.accepted_values) values.push_back(lower_ascii(v));

    auto has_attribute = [&](const UserProfile& user) {
        switch (spec.attribute) {
            case GroupAttribute::Gender: return user.gender.has_value();
            case GroupAttribute::Ethnicity: return user.ethnicity.has_value();
            case GroupAttribute::Age: return user.birth_year.has_value();
        }
        return false;
    };

    auto matches = [&](const UserProfile& user) {
        switch (spec.attribute) {
            case GroupAttribute::Gender: {
                if (!user.gender) return false;
                const std::string name = gender_name(*user.gender);
                return std::find(values.begin(), values.end(), name) != values.end();
            }
            case GroupAttribute::Ethnicity: {
                if (!user.ethnicity) return false;
                const std::string eth = lower_ascii(*user.ethnicity);
                return std::find(values.begin(), values.end(), eth) != values.end();
            }
            case GroupAttribute::Age: {
                const auto age = age_of(user, spec.age_rule->reference_year);
                if (!age) return false;
                if (spec.max_age_filter && *age > *spec.max_age_filter) return false;
                return spec.age_rule->side == AgeSide::Below ? *age < spec.age_rule->threshold
                                                             : *age >= spec.age_rule->threshold;
            }
        }
        return false;
    };

    Corpus out;
    out.users = corpus.users;
    for (const Post& post : corpus.posts) {
        const UserProfile* user = corpus.profile_of(post);
        if (user && matches(*user)) out.posts.push_back(post);
    }

    if (warnings) {
        bool any_attribute = false;
        for (const auto& [id, user] : corpus.users) {
            if (has_attribute(user)) {
                any_attribute = true;
                break;
            }
        }
        if (!any_attribute) {
            warnings->push_back("slice \"" + spec.label + "\": no user in the corpus has the sliced attribute");
        } else if (out.posts.empty()) {
            warnings->push_back("slice \"" + spec.label + "\": no post matched");
        }
    }
    return out;
}

std::vector<Corpus> random_splits(const Corpus& corpus, int k, double fraction,
                                  std::uint64_t seed) {
    if (corpus.posts.empty()) throw std::invalid_argument("random_splits: empty corpus");
    if (k < 1) throw std::invalid_argument("random_splits: k must be >= 1");
    if (!(fraction > 0.0 && fraction <= 1.0)) {
        throw std::invalid_argument("random_splits: fraction must be in (0, 1]");
    }

    const std::size_t n = corpus.posts.size();
    const auto sample_size =
        static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(n)));

    std::vector<Corpus> splits;
    splits.reserve(static_cast<std::size_t>(k));
    for (int s = 0; s < k; ++s) {
        SplitMix64 rng(SplitMix64::derive(seed, static_cast<std::uint64_t>(s)));
        std::vector<std::size_t> indices(n);
        for (std::size_t i = 0; i < n; ++i) indices[i] = i;
        // Partial Fisher-Yates: the first sample_size slots become the sample.
        for (std::size_t i = 0; i < sample_size; ++i) {
            const std::size_t j = i + static_cast<std::size_t>(rng.uniform_below(n - i));
            std::swap(indices[i], indices[j]);
        }
        indices.resize(sample_size);
        std::sort(indices.begin(), indices.end());  // keep corpus order

        Corpus split;
        split.users = corpus.users;
        split.posts.reserve(sample_size);
        for (std::size_t idx : indices) split.posts.push_back(corpus.posts[idx]);
        splits.push_back(std::move(split));
    }
    return splits;
}

std::uint64_t corpus_fingerprint(const Corpus& corpus) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto mix = [&h](const std::string& s) {
        for (unsigned char c : s) {
            h ^= c;
            h *= 0x100000001b3ULL;
        }
        h ^= 0xff;
        h *= 0x100000001b3ULL;
    };
    for (const Post& post : corpus.posts) {
        mix(post.id);
        mix(post.text);
    }
    return h;
}

}  // namespace weatkit
