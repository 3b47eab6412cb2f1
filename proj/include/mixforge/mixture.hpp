#pragma once

#include "mixforge/ingest.hpp"
#include "mixforge/sampling.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mixforge {

// A named mixture of the monolingual plan plus optional code / math /
// synthetic / parallel components. The five shipped recipes are
// M, CM, CMP, CMS and CMSP.
struct Recipe {
    std::string name;
    bool include_code = false;
    bool include_math = false;
    bool include_synth = false;
    bool include_parallel = false;
    std::map<std::string, std::uint64_t> component_budgets; // code/math/synth/parallel

    std::vector<std::string> enabled_components() const;
    static Recipe named(const std::string& name,
                        const std::map<std::string, std::uint64_t>& budgets);
};

struct StreamSpec {
    std::string name; // language code or component name
    std::string kind; // "monolingual" or component name
    std::uint64_t budget = 0;
    double weight = 0; // budget / grand_total
};

struct MixtureManifest {
    std::string recipe;
    std::uint64_t seed = 0;
    std::uint64_t monolingual_total = 0;
    std::uint64_t grand_total = 0;
    std::vector<StreamSpec> streams;
    std::vector<std::string> warnings;
};

MixtureManifest compile_recipe(const SamplingPlan& plan, const Recipe& recipe, std::uint64_t seed = 0);
std::string manifest_to_json(const MixtureManifest& manifest, const std::string& config_echo_json);

// Deterministic weighted round-robin: stream i accumulates weight w_i per
// tick and the highest credit (ties to the lowest index) emits next.
std::vector<std::size_t> interleave_order(const std::vector<double>& weights, std::size_t count);

struct ParallelPair {
    std::string id;
    std::string src_lang;
    std::string tgt_lang;
    std::string src_text;
    std::string tgt_text;
    std::optional<double> qe_score; // nullopt = unscored
};

struct FilterStats {
    std::uint64_t input_pairs = 0;
    std::uint64_t retained_pairs = 0;
    std::uint64_t input_tokens = 0;    // src + tgt under the active tokenizer
    std::uint64_t retained_tokens = 0;
};

using PairScorer = std::function<double(const ParallelPair&)>;

// Retains pairs with scorer(pair) >= tau (inclusive). A scorer throwing or
// returning a non-finite value aborts the pipeline via ScorerFailure; no
// pair is ever dropped silently.
std::pair<std::vector<ParallelPair>, FilterStats> filter_parallel(std::span<const ParallelPair> pairs,
                                                                  const PairScorer& scorer, double tau,
                                                                  const TokenizerSpec& tokenizer,
                                                                  unsigned workers = 1);

std::vector<ParallelPair> read_pairs_jsonl(const std::filesystem::path& path);
std::string pair_to_jsonl(const ParallelPair& pair);

struct SynthQuota {
    std::map<std::pair<std::string, std::string>, std::uint64_t> matrix; // (lang, domain)
    std::map<std::string, std::uint64_t> lang_marginals;                 // exact
    std::map<std::string, std::uint64_t> domain_marginals;               // realized
};

// Splits each language's synthetic budget across domains proportionally to
// the domain totals, largest remainder within the row (ties resolved in
// ascending domain name). Language marginals are preserved exactly.
SynthQuota allocate_synth_quota(const std::map<std::string, std::uint64_t>& lang_totals,
                                const std::map<std::string, std::uint64_t>& domain_totals);

std::string quota_to_csv(const SynthQuota& quota);

enum class PromptKind { General, Math };

PromptKind prompt_kind_from_string(const std::string& kind); // throws UnknownKind
std::string render_translation_prompt(PromptKind kind, const std::string& source_lang,
                                      const std::string& target_lang);

struct TranslationJob {
    std::string job_id;
    std::string kind;
    std::string target;
    std::string prompt;
    std::string payload;
};

// One job per (doc, target), doc-major, targets in eligible-list order.
// job_id = fnv1a64(doc.id, 0x1f, target) in hex; stable across runs.
std::vector<TranslationJob> build_translation_jobs(std::span<const Document> docs,
                                                   const std::vector<std::string>& targets, PromptKind kind,
                                                   const std::vector<std::string>& eligible_targets);

std::string job_to_jsonl(const TranslationJob& job);

} // namespace mixforge
