#include "mixforge/registry.hpp"
#include "mixforge/errors.hpp"
#include "mixforge/util.hpp"

#include <algorithm>
#include <cctype>

namespace mixforge {

std::string_view to_string(ResourceClass c) {
    switch (c) {
    case ResourceClass::HighResourceNonAfrican: return "high_resource_non_african";
    case ResourceClass::African: return "african";
    case ResourceClass::Excluded: return "excluded";
    }
    return "?";
}

std::string_view to_string(GroupName g) {
    switch (g) {
    case GroupName::HrlPt: return "HRL_PT";
    case GroupName::AfrPt: return "AFR_PT";
    case GroupName::AfrNpt: return "AFR_NPT";
    }
    return "?";
}

std::string LanguageRecord::bare_code() const {
    auto pos = code.find('_');
    return pos == std::string::npos ? code : code.substr(0, pos);
}

const LanguageRecord* Registry::find(std::string_view code) const {
    for (const auto& r : records)
        if (r.code == code) return &r;
    return nullptr;
}

std::map<std::string, std::uint64_t> Registry::raw_counts_included() const {
    std::map<std::string, std::uint64_t> out;
    for (const auto& r : records)
        if (r.raw_total >= selection_threshold) out[r.code] = r.raw_total;
    return out;
}

std::vector<std::string> Registry::synthetic_eligible() const {
    std::vector<std::string> out;
    for (const auto& r : records)
        if (r.resource_class == ResourceClass::African && r.synthetic_tokens > 0) out.push_back(r.code);
    return out;
}

bool valid_code(std::string_view code) {
    if (code.size() != 8 || code[3] != '_') return false;
    for (int i = 0; i < 3; ++i)
        if (!std::islower(static_cast<unsigned char>(code[i]))) return false;
    if (!std::isupper(static_cast<unsigned char>(code[4]))) return false;
    for (int i = 5; i < 8; ++i)
        if (!std::islower(static_cast<unsigned char>(code[i]))) return false;
    return true;
}

std::optional<std::string> normalize_code(std::string_view code) {
    if (code.size() != 8 || code[3] != '_') return std::nullopt;
    std::string out(code);
    for (int i = 0; i < 3; ++i) {
        if (!std::isalpha(static_cast<unsigned char>(out[i]))) return std::nullopt;
        out[i] = static_cast<char>(std::tolower(static_cast<unsigned char>(out[i])));
    }
    for (int i = 4; i < 8; ++i)
        if (!std::isalpha(static_cast<unsigned char>(out[i]))) return std::nullopt;
    out[4] = static_cast<char>(std::toupper(static_cast<unsigned char>(out[4])));
    for (int i = 5; i < 8; ++i)
        out[i] = static_cast<char>(std::tolower(static_cast<unsigned char>(out[i])));
    return out;
}

bool valid_source_name(std::string_view name) {
    static const std::set<std::string, std::less<>> known = {"fineweb2", "wura",      "madlad400", "cornstack",
                                                             "finemath", "nllb",      "synthetic"};
    if (known.count(name)) return true;
    return name.rfind("other:", 0) == 0 && name.size() > 6;
}

namespace {

std::string bare(std::string_view code) {
    auto pos = code.find('_');
    return std::string(pos == std::string_view::npos ? code : code.substr(0, pos));
}

} // namespace

Registry load_registry(const std::filesystem::path& path, std::uint64_t selection_threshold) {
    auto lines = util::read_lines(path);
    if (lines.empty()) throw MalformedRegistry("registry file is empty: " + path.string());

    const std::string expected_header = "code,fineweb2,wura,madlad400,synthetic,class_hint";
    if (util::strip(lines[0]) != expected_header)
        throw MalformedRegistry("registry header must be '" + expected_header + "'");

    Registry reg;
    reg.selection_threshold = selection_threshold;
    std::set<std::string> seen;

    for (std::size_t i = 1; i < lines.size(); ++i) {
        std::string line = util::strip(lines[i]);
        if (line.empty()) continue;
        auto fields = util::split(line, ',');
        if (fields.size() != 6)
            throw MalformedRegistry("line " + std::to_string(i + 1) + ": expected 6 fields, got " +
                                    std::to_string(fields.size()));

        LanguageRecord rec;
        std::string raw_code = util::strip(fields[0]);
        if (!valid_code(raw_code)) {
            auto norm = normalize_code(raw_code);
            if (!norm || !valid_code(*norm))
                throw MalformedRegistry("line " + std::to_string(i + 1) + ": bad language code '" + raw_code + "'");
            reg.warnings.push_back("normalized code '" + raw_code + "' -> '" + *norm + "'");
            raw_code = *norm;
        }
        rec.code = raw_code;
        if (!seen.insert(rec.code).second)
            throw MalformedRegistry("duplicate code '" + rec.code + "'");

        const char* source_names[] = {"fineweb2", "wura", "madlad400"};
        for (int f = 0; f < 3; ++f) {
            auto v = util::parse_u64(util::strip(fields[f + 1]));
            if (!v)
                throw MalformedRegistry("line " + std::to_string(i + 1) + ": field '" + source_names[f] +
                                        "' is not a non-negative integer");
            if (*v > 0) rec.per_source_tokens[source_names[f]] = *v;
            rec.raw_total += *v;
        }
        auto synth = util::parse_u64(util::strip(fields[4]));
        if (!synth)
            throw MalformedRegistry("line " + std::to_string(i + 1) + ": field 'synthetic' is not a non-negative integer");
        rec.synthetic_tokens = *synth;

        std::string hint = util::strip(fields[5]);
        bool bench = false;
        if (auto pos = hint.find("+bench"); pos != std::string::npos) {
            bench = true;
            hint = hint.substr(0, pos);
        }
        rec.benchmark_covered = bench;
        if (hint == "hrl") {
            rec.resource_class = ResourceClass::HighResourceNonAfrican;
            rec.benchmark_covered = true;
        } else if (hint == "african") {
            rec.resource_class =
                rec.raw_total < selection_threshold ? ResourceClass::Excluded : ResourceClass::African;
            if (rec.resource_class == ResourceClass::African) rec.benchmark_covered = true;
        } else {
            throw MalformedRegistry("line " + std::to_string(i + 1) + ": unknown class_hint '" + fields[5] + "'");
        }

        reg.records.push_back(std::move(rec));
    }

    LanguageGroup hrl{GroupName::HrlPt, {}};
    LanguageGroup afr_pt{GroupName::AfrPt, {}};
    LanguageGroup afr_npt{GroupName::AfrNpt, {}};
    for (const auto& r : reg.records) {
        switch (r.resource_class) {
        case ResourceClass::HighResourceNonAfrican: hrl.members.insert(r.bare_code()); break;
        case ResourceClass::African: afr_pt.members.insert(r.bare_code()); break;
        case ResourceClass::Excluded:
            if (r.benchmark_covered) afr_npt.members.insert(r.bare_code());
            break;
        }
    }
    reg.groups = {hrl, afr_pt, afr_npt};
    return reg;
}

std::optional<GroupName> group_of(std::string_view code, const std::vector<LanguageGroup>& groups) {
    // ISO macrolanguage aliases used by the benchmark tables.
    static const std::map<std::string, std::string> aliases = {{"swa", "swh"}, {"orm", "gaz"}};
    std::string key = bare(code);
    if (auto it = aliases.find(key); it != aliases.end()) key = it->second;
    for (const auto& g : groups)
        if (g.members.count(key)) return g.name;
    return std::nullopt;
}

const std::map<std::string, std::string>& language_display_names() {
    static const std::map<std::string, std::string> names = {
        {"eng", "English"},        {"fra", "French"},           {"por", "Portuguese"},
        {"arb", "Arabic"},         {"afr", "Afrikaans"},        {"swh", "Swahili"},
        {"ary", "Moroccan Arabic"},{"som", "Somali"},           {"amh", "Amharic"},
        {"arz", "Egyptian Arabic"},{"hau", "Hausa"},            {"kin", "Kinyarwanda"},
        {"zul", "Zulu"},           {"ibo", "Igbo"},             {"plt", "Plateau Malagasy"},
        {"xho", "Xhosa"},          {"sna", "Shona"},            {"yor", "Yoruba"},
        {"nya", "Nyanja"},         {"sot", "Southern Sotho"},   {"tir", "Tigrinya"},
        {"aeb", "Tunisian Arabic"},{"gaz", "West Central Oromo"},{"tsn", "Tswana"},
    };
    return names;
}

} // namespace mixforge
