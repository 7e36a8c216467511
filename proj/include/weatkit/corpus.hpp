#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace weatkit {

enum class Gender { Female, Male, Other };

struct Post {
    std::string id;
    std::string text;
    std::optional<std::string> user_id;
    std::optional<std::string> debate_id;
};

struct UserProfile {
    std::string user_id;
    std::optional<Gender> gender;
    std::optional<std::string> ethnicity;  // free-form self identification
    std::optional<int> birth_year;         // 4-digit year
};

/// Immutable after load; safe to share across threads.
struct Corpus {
    std::vector<Post> posts;
    std::unordered_map<std::string, UserProfile> users;

    /// Profile of the post's author, or nullptr if the post has no usable
    /// metadata (no user_id, or an id absent from the user table).
    const UserProfile* profile_of(const Post& post) const {
        if (!post.user_id) return nullptr;
        auto it = users.find(*post.user_id);
        return it == users.end() ? nullptr : &it->second;
    }
};

enum class GroupAttribute { Gender, Ethnicity, Age };
enum class AgeSide { Below, AtOrAbove };

struct AgeRule {
    int threshold = 23;
    AgeSide side = AgeSide::Below;
    int reference_year = 2017;
};

struct GroupSpec {
    std::string label;
    GroupAttribute attribute = GroupAttribute::Gender;
    // Exactly one of the two, matching the attribute:
    std::vector<std::string> accepted_values;  // gender / ethnicity, lowercase
    std::optional<AgeRule> age_rule;           // age
    // Optional plausibility cap on computed age; off by default.
    std::optional<int> max_age_filter;

    void validate() const;  // throws std::invalid_argument on a malformed spec
};

/// Load a corpus from line-delimited JSON. One post per line with fields
/// {"id","text","user_id"?,"debate_id"?}; the optional users file has one
/// record per line with fields {"user_id","gender"?,"ethnicity"?,"birth_year"?}.
/// Throws std::runtime_error naming the offending line on malformed input,
/// duplicate ids, or unreadable files.
Corpus load_corpus(const std::filesystem::path& posts_path,
                   const std::optional<std::filesystem::path>& users_path = std::nullopt);

/// Posts whose author matches the spec. Users lacking the sliced attribute
/// are always excluded, as are posts without metadata. Produces an empty
/// corpus (plus a warning) rather than an error when nothing matches.
Corpus slice_by_group(const Corpus& corpus, const GroupSpec& spec,
                      std::vector<std::string>* warnings = nullptr);

/// k independent uniform samples of ceil(fraction * |posts|) posts each,
/// drawn without replacement. Sampled posts keep their original corpus
/// order, so fraction = 1.0 reproduces the corpus exactly. Deterministic
/// for a fixed (corpus, k, fraction, seed) on every platform.
std::vector<Corpus> random_splits(const Corpus& corpus, int k, double fraction,
                                  std::uint64_t seed);

/// Age at the reference year, or nullopt when birth_year is missing or in
/// the future (negative age).
std::optional<int> age_of(const UserProfile& user, int reference_year);

/// FNV-1a over post ids and texts; used to fingerprint training inputs.
std::uint64_t corpus_fingerprint(const Corpus& corpus);

}  // namespace weatkit
