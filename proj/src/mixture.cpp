#include "mixforge/mixture.hpp"
#include "mixforge/errors.hpp"
#include "mixforge/rng.hpp"
#include "mixforge/util.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <set>
#include <thread>

namespace mixforge {

namespace {

constexpr const char* kComponents[] = {"code", "math", "synth", "parallel"};

// Headline totals (billions, one decimal) for the shipped recipe names.
// compile_recipe raises a warning when the exact sum rounds elsewhere.
const std::map<std::string, double>& recipe_headline_totals_b() {
    static const std::map<std::string, double> t = {
        {"M", 22.8}, {"CM", 24.9}, {"CMS", 25.2}, {"CMSP", 25.6},
    };
    return t;
}

} // namespace

std::vector<std::string> Recipe::enabled_components() const {
    std::vector<std::string> out;
    if (include_code) out.push_back("code");
    if (include_math) out.push_back("math");
    if (include_synth) out.push_back("synth");
    if (include_parallel) out.push_back("parallel");
    return out;
}

Recipe Recipe::named(const std::string& name, const std::map<std::string, std::uint64_t>& budgets) {
    static const std::set<std::string> known = {"M", "CM", "CMP", "CMS", "CMSP"};
    if (!known.count(name)) throw DomainError("unknown recipe name '" + name + "'");
    Recipe r;
    r.name = name;
    r.include_code = name.find('C') != std::string::npos;
    // The leading M of CM/CMP/... is the math component; the bare "M"
    // recipe is monolingual only.
    r.include_math = name.size() > 1 && name.find('M') != std::string::npos;
    r.include_synth = name.find('S') != std::string::npos;
    r.include_parallel = name.find('P') != std::string::npos;
    r.component_budgets = budgets;
    return r;
}

MixtureManifest compile_recipe(const SamplingPlan& plan, const Recipe& recipe, std::uint64_t seed) {
    MixtureManifest manifest;
    manifest.recipe = recipe.name;
    manifest.seed = seed;

    for (const auto& e : plan.entries) {
        StreamSpec s;
        s.name = e.code;
        s.kind = "monolingual";
        s.budget = e.allocated;
        manifest.streams.push_back(std::move(s));
        manifest.monolingual_total += e.allocated;
    }
    std::uint64_t grand = manifest.monolingual_total;
    for (const auto& comp : recipe.enabled_components()) {
        auto it = recipe.component_budgets.find(comp);
        if (it == recipe.component_budgets.end())
            throw MissingBudget("recipe '" + recipe.name + "' enables '" + comp + "' without a budget");
        StreamSpec s;
        s.name = comp;
        s.kind = comp;
        s.budget = it->second;
        manifest.streams.push_back(std::move(s));
        grand += it->second;
    }
    manifest.grand_total = grand;
    for (auto& s : manifest.streams)
        s.weight = grand == 0 ? 0.0 : static_cast<double>(s.budget) / static_cast<double>(grand);

    if (auto it = recipe_headline_totals_b().find(recipe.name); it != recipe_headline_totals_b().end()) {
        double rounded_b = util::round_half_even(static_cast<double>(grand) / 1e9, 1);
        if (std::abs(rounded_b - it->second) > 1e-9) {
            manifest.warnings.push_back("recipe " + recipe.name + ": exact total " + util::group_digits(grand) +
                                        " rounds to " + util::format_fixed(rounded_b, 1) +
                                        "B, headline says " + util::format_fixed(it->second, 1) + "B");
        }
    }
    return manifest;
}

std::string manifest_to_json(const MixtureManifest& manifest, const std::string& config_echo_json) {
    nlohmann::json j;
    j["recipe"] = manifest.recipe;
    j["seed"] = manifest.seed;
    j["monolingual_total"] = manifest.monolingual_total;
    j["grand_total"] = manifest.grand_total;
    j["warnings"] = manifest.warnings;
    auto streams = nlohmann::json::array();
    for (const auto& s : manifest.streams) {
        nlohmann::json js;
        js["name"] = s.name;
        js["kind"] = s.kind;
        js["budget"] = s.budget;
        js["weight"] = s.weight;
        streams.push_back(js);
    }
    j["streams"] = streams;
    j["interleave"] = "weighted-round-robin-largest-remainder";
    if (!config_echo_json.empty()) j["config"] = nlohmann::json::parse(config_echo_json);
    return j.dump(2) + "\n";
}

std::vector<std::size_t> interleave_order(const std::vector<double>& weights, std::size_t count) {
    if (weights.empty()) throw EmptyInput("interleave_order: no streams");
    double total = 0;
    for (double w : weights) {
        if (w < 0) throw DomainError("interleave_order: negative weight");
        total += w;
    }
    if (total <= 0) throw DomainError("interleave_order: all weights zero");

    std::vector<double> credit(weights.size(), 0.0);
    std::vector<std::size_t> order;
    order.reserve(count);
    for (std::size_t t = 0; t < count; ++t) {
        std::size_t best = 0;
        for (std::size_t i = 0; i < weights.size(); ++i) {
            credit[i] += weights[i];
            if (credit[i] > credit[best]) best = i;
        }
        credit[best] -= total;
        order.push_back(best);
    }
    return order;
}

std::pair<std::vector<ParallelPair>, FilterStats> filter_parallel(std::span<const ParallelPair> pairs,
                                                                  const PairScorer& scorer, double tau,
                                                                  const TokenizerSpec& tokenizer,
                                                                  unsigned workers) {
    if (tau < 0.0 || tau > 1.0) throw DomainError("tau must be in [0, 1]");
    tokenizer.validate();

    auto pair_tokens = [&](const ParallelPair& p) {
        Document src{p.id + "#src", p.src_lang, "nllb", p.src_text};
        Document tgt{p.id + "#tgt", p.tgt_lang, "nllb", p.tgt_text};
        return tokenize(src, tokenizer).size() + tokenize(tgt, tokenizer).size();
    };

    auto score_one = [&](const ParallelPair& p) {
        if (p.src_lang == p.tgt_lang)
            throw DomainError("pair '" + p.id + "': src and tgt language are both '" + p.src_lang + "'");
        double score;
        try {
            score = scorer(p);
        } catch (const DomainError&) {
            throw;
        } catch (const std::exception& e) {
            throw ScorerFailure("pair '" + p.id + "': " + e.what());
        }
        if (!std::isfinite(score)) throw ScorerFailure("pair '" + p.id + "': scorer returned a non-finite value");
        return score;
    };

    // Scoring may fan out; retention decisions are applied in input order
    // so the outcome is identical for any worker count.
    std::vector<double> scores(pairs.size());
    std::vector<std::uint64_t> tokens(pairs.size());
    if (workers <= 1 || pairs.size() < 2) {
        for (std::size_t i = 0; i < pairs.size(); ++i) {
            scores[i] = score_one(pairs[i]);
            tokens[i] = pair_tokens(pairs[i]);
        }
    } else {
        unsigned n = std::min<unsigned>(workers, static_cast<unsigned>(pairs.size()));
        std::vector<std::thread> pool;
        std::vector<std::exception_ptr> errors(n);
        std::atomic<std::size_t> cursor{0};
        for (unsigned w = 0; w < n; ++w) {
            pool.emplace_back([&, w] {
                try {
                    for (std::size_t i = cursor.fetch_add(1); i < pairs.size(); i = cursor.fetch_add(1)) {
                        scores[i] = score_one(pairs[i]);
                        tokens[i] = pair_tokens(pairs[i]);
                    }
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        }
        for (auto& t : pool) t.join();
        for (auto& e : errors)
            if (e) std::rethrow_exception(e);
    }

    std::vector<ParallelPair> retained;
    FilterStats stats;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        stats.input_pairs += 1;
        stats.input_tokens += tokens[i];
        if (scores[i] >= tau) {
            stats.retained_pairs += 1;
            stats.retained_tokens += tokens[i];
            retained.push_back(pairs[i]);
        }
    }
    return {std::move(retained), stats};
}

std::vector<ParallelPair> read_pairs_jsonl(const std::filesystem::path& path) {
    auto lines = util::read_lines(path);
    std::vector<ParallelPair> pairs;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (util::strip(lines[i]).empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(lines[i]);
        } catch (const nlohmann::json::exception& e) {
            throw DomainError(path.string() + ":" + std::to_string(i + 1) + ": " + e.what());
        }
        ParallelPair p;
        p.id = j.value("id", "line" + std::to_string(i + 1));
        p.src_lang = j.at("src_lang").get<std::string>();
        p.tgt_lang = j.at("tgt_lang").get<std::string>();
        p.src_text = j.at("src_text").get<std::string>();
        p.tgt_text = j.at("tgt_text").get<std::string>();
        if (j.contains("qe") && !j.at("qe").is_null()) p.qe_score = j.at("qe").get<double>();
        pairs.push_back(std::move(p));
    }
    return pairs;
}

std::string pair_to_jsonl(const ParallelPair& pair) {
    nlohmann::ordered_json j;
    j["id"] = pair.id;
    j["src_lang"] = pair.src_lang;
    j["tgt_lang"] = pair.tgt_lang;
    j["src_text"] = pair.src_text;
    j["tgt_text"] = pair.tgt_text;
    if (pair.qe_score) j["qe"] = *pair.qe_score;
    return j.dump();
}

SynthQuota allocate_synth_quota(const std::map<std::string, std::uint64_t>& lang_totals,
                                const std::map<std::string, std::uint64_t>& domain_totals) {
    if (lang_totals.empty() || domain_totals.empty())
        throw EmptyInput("allocate_synth_quota: empty language or domain totals");
    long double domain_sum = 0;
    for (const auto& [d, t] : domain_totals) {
        if (t == 0) throw DomainError("allocate_synth_quota: zero total for domain '" + d + "'");
        domain_sum += static_cast<long double>(t);
    }

    SynthQuota quota;
    for (const auto& [lang, lang_total] : lang_totals) {
        if (lang_total == 0) throw DomainError("allocate_synth_quota: zero total for language '" + lang + "'");
        quota.lang_marginals[lang] = lang_total;

        // Floor of each proportional share, then hand out the row's
        // shortfall by largest remainder (ascending domain name on ties,
        // which std::map ordering already provides).
        std::uint64_t assigned = 0;
        std::vector<std::pair<long double, std::string>> remainders;
        for (const auto& [domain, domain_total] : domain_totals) {
            long double exact = static_cast<long double>(lang_total) *
                                (static_cast<long double>(domain_total) / domain_sum);
            auto floor_v = static_cast<std::uint64_t>(exact);
            quota.matrix[{lang, domain}] = floor_v;
            assigned += floor_v;
            remainders.emplace_back(exact - static_cast<long double>(floor_v), domain);
        }
        std::stable_sort(remainders.begin(), remainders.end(),
                         [](const auto& a, const auto& b) { return a.first > b.first; });
        std::uint64_t shortfall = lang_total - assigned;
        for (std::uint64_t k = 0; k < shortfall; ++k)
            quota.matrix[{lang, remainders[k % remainders.size()].second}] += 1;
    }
    for (const auto& [key, v] : quota.matrix) quota.domain_marginals[key.second] += v;
    return quota;
}

std::string quota_to_csv(const SynthQuota& quota) {
    std::string out = "lang,domain,tokens\n";
    for (const auto& [key, v] : quota.matrix)
        out += key.first + "," + key.second + "," + std::to_string(v) + "\n";
    return out;
}

PromptKind prompt_kind_from_string(const std::string& kind) {
    if (kind == "general") return PromptKind::General;
    if (kind == "math") return PromptKind::Math;
    throw UnknownKind("unknown prompt kind '" + kind + "' (expected general|math)");
}

namespace {

// Shipped templates; {{source_lang}} / {{target_lang}} are the only
// placeholders. Byte-exact, including the trailing spaces on the first
// two lines of the general template.
constexpr const char* kGeneralTemplate =
    "You are a professional translator. Translate the user text from {{source_lang}} into {{target_lang}}. \n"
    "Preserve meaning, tone, formatting, inline markup, numerals, and named entities exactly. \n"
    "For long texts, ensure the translation is fluent, coherent and complete. Make sure to translate all "
    "parts of the text. Return only the translation without additional commentary.";

constexpr const char* kMathTemplate =
    "You are a {{source_lang}}-to-{{target_lang}} translator for mathematical content. Translate the "
    "provided math problem, reasoning, and answer while preserving:\n"
    "- All numbers, formulas, and formatting\n"
    "- Mathematical notation and markup\n"
    "- Named entities and tone\n"
    "\n"
    "Input structure:\n"
    "<problem>[Original Problem]</problem>\n"
    "<think>[Original Reasoning]</think>\n"
    "[Final Answer]<eos>\n"
    "\n"
    "Output structure:\n"
    "<problem>[Translated problem]</problem>\n"
    "<think>[Translated reasoning]</think>\n"
    "[Translated Final Answer]<eos>\n"
    "\n"
    "Ensure translations are fluent, coherent, and complete. Return only the translation without "
    "additional commentary.";

std::string substitute_all(std::string text, std::string_view key, std::string_view value) {
    std::size_t pos = 0;
    while ((pos = text.find(key, pos)) != std::string::npos) {
        text.replace(pos, key.size(), value);
        pos += value.size();
    }
    return text;
}

} // namespace

std::string render_translation_prompt(PromptKind kind, const std::string& source_lang,
                                      const std::string& target_lang) {
    if (source_lang.empty() || target_lang.empty())
        throw DomainError("prompt rendering needs non-empty language names");
    std::string text = kind == PromptKind::General ? kGeneralTemplate : kMathTemplate;
    text = substitute_all(std::move(text), "{{source_lang}}", source_lang);
    text = substitute_all(std::move(text), "{{target_lang}}", target_lang);
    return text;
}

std::vector<TranslationJob> build_translation_jobs(std::span<const Document> docs,
                                                   const std::vector<std::string>& targets, PromptKind kind,
                                                   const std::vector<std::string>& eligible_targets) {
    for (const auto& t : targets)
        if (std::find(eligible_targets.begin(), eligible_targets.end(), t) == eligible_targets.end())
            throw IneligibleTarget("target '" + t + "' is not synthetic-eligible");

    // Emit targets in eligible-list (registry) order, not argument order.
    std::vector<std::string> ordered;
    for (const auto& e : eligible_targets)
        if (std::find(targets.begin(), targets.end(), e) != targets.end()) ordered.push_back(e);

    const auto& names = language_display_names();
    auto display = [&](const std::string& code) {
        auto pos = code.find('_');
        std::string key = pos == std::string::npos ? code : code.substr(0, pos);
        auto it = names.find(key);
        return it != names.end() ? it->second : code;
    };

    std::vector<TranslationJob> jobs;
    jobs.reserve(docs.size() * ordered.size());
    for (const auto& doc : docs) {
        validate_document(doc);
        for (const auto& target : ordered) {
            TranslationJob job;
            std::uint64_t h = fnv1a64(doc.id);
            h ^= 0x1F;
            h *= kFnvPrime;
            h = fnv1a64(target, h);
            char buf[17];
            std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
            job.job_id = buf;
            job.kind = kind == PromptKind::General ? "general" : "math";
            job.target = target;
            job.prompt = render_translation_prompt(kind, display(doc.lang), display(target));
            job.payload = doc.text;
            jobs.push_back(std::move(job));
        }
    }
    return jobs;
}

std::string job_to_jsonl(const TranslationJob& job) {
    nlohmann::ordered_json j;
    j["job_id"] = job.job_id;
    j["kind"] = job.kind;
    j["target"] = job.target;
    j["prompt"] = job.prompt;
    j["payload"] = job.payload;
    return j.dump();
}

} // namespace mixforge
