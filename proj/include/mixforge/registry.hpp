#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace mixforge {

constexpr std::uint64_t kDefaultSelectionThreshold = 90'000'000;

enum class ResourceClass { HighResourceNonAfrican, African, Excluded };

std::string_view to_string(ResourceClass c);

// One language of the corpus: identity, per-source raw token counts and
// the synthetic-token column. Codes are ISO-639-3 plus a script suffix,
// normalized to the pattern [a-z]{3}_[A-Z][a-z]{3}.
struct LanguageRecord {
    std::string code;
    std::map<std::string, std::uint64_t> per_source_tokens;
    std::uint64_t raw_total = 0;
    ResourceClass resource_class = ResourceClass::African;
    std::uint64_t synthetic_tokens = 0;
    bool benchmark_covered = false;

    // Code without the script suffix ("swh_Latn" -> "swh").
    std::string bare_code() const;
};

enum class GroupName { HrlPt, AfrPt, AfrNpt };

std::string_view to_string(GroupName g);

struct LanguageGroup {
    GroupName name;
    std::set<std::string> members; // bare codes
};

struct Registry {
    std::vector<LanguageRecord> records; // file order
    std::vector<LanguageGroup> groups;
    std::vector<std::string> warnings; // code normalizations applied at load
    std::uint64_t selection_threshold = kDefaultSelectionThreshold;

    const LanguageRecord* find(std::string_view code) const;
    std::map<std::string, std::uint64_t> raw_counts_included() const;
    std::vector<std::string> synthetic_eligible() const; // African + synthetic > 0, registry order
};

// Registry file format: UTF-8 CSV with header
//   code,fineweb2,wura,madlad400,synthetic,class_hint
// class_hint is "hrl" or "african", optionally suffixed "+bench" for
// languages covered by the evaluation benchmarks.
Registry load_registry(const std::filesystem::path& path,
                       std::uint64_t selection_threshold = kDefaultSelectionThreshold);

// Group lookup by language code (bare or with script suffix). Benchmark
// macrolanguage aliases are folded to the registry codes (swa -> swh,
// orm -> gaz). Returns nullopt for codes listed in no group.
std::optional<GroupName> group_of(std::string_view code, const std::vector<LanguageGroup>& groups);

// True if `code` matches [a-z]{3}_[A-Z][a-z]{3}.
bool valid_code(std::string_view code);

// Source ids: fineweb2, wura, madlad400, cornstack, finemath, nllb,
// synthetic, or "other:<label>".
bool valid_source_name(std::string_view name);

// Lowercases the language part and capitalizes the script part;
// returns nullopt when the shape is not 3+4 letters at all.
std::optional<std::string> normalize_code(std::string_view code);

// English display names for prompt rendering, keyed by bare code.
const std::map<std::string, std::string>& language_display_names();

} // namespace mixforge
