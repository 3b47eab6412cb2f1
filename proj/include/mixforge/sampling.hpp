#pragma once

#include "mixforge/ingest.hpp"
#include "mixforge/registry.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace mixforge {

struct SamplerConfig {
    std::uint64_t budget_tokens = 0;                                 // N
    std::uint32_t epoch_cap = 4;                                     // c
    std::uint64_t selection_threshold = kDefaultSelectionThreshold;
    std::uint64_t seed = 0;

    void validate() const;
};

struct PlanEntry {
    std::string code;
    std::uint64_t raw_total = 0;
    std::uint64_t capacity = 0;  // raw_total * epoch_cap
    std::uint64_t allocated = 0;

    double repetition() const { return static_cast<double>(allocated) / static_cast<double>(raw_total); }
    // Number of complete passes over the raw data.
    std::uint32_t epochs_full() const { return static_cast<std::uint32_t>(allocated / raw_total); }
    // One-past count: the convention that counts a final partial pass even
    // when the repetition factor is integral.
    std::uint32_t epochs_rep() const { return epochs_full() + 1; }
};

struct SamplingPlan {
    std::uint64_t budget = 0;
    std::uint64_t uniform_share = 0; // U: floor of the final water level
    std::uint32_t epoch_cap = 0;
    std::vector<PlanEntry> entries;  // ascending code

    std::uint64_t total_allocated() const;
    const PlanEntry* find(const std::string& code) const;
};

struct Selection {
    std::vector<std::string> included; // descending raw_total, ties by code
    std::vector<std::string> excluded;
};

Selection select_languages(const std::vector<LanguageRecord>& records, std::uint64_t threshold);
Selection select_languages(const std::map<std::string, std::uint64_t>& raw_counts, std::uint64_t threshold);
Selection select_languages(const CorpusStats& stats, std::uint64_t threshold);

// Iterative water-filling with a per-language capacity of raw * epoch_cap.
// Each round assigns share = remaining / |active| and caps every language
// whose capacity fits under it; when none qualifies the active languages
// receive floor(share), with the leftover handed out one token each in
// ascending code order. Throws EmptyInput and Infeasible.
SamplingPlan unimax_allocate(const std::map<std::string, std::uint64_t>& raw_counts,
                             const SamplerConfig& config);

struct DocIndexEntry {
    std::string doc_id;
    std::uint64_t tokens = 0;
};
// Per-language document inventory in on-disk order.
using DocIndex = std::map<std::string, std::vector<DocIndexEntry>>;

struct ScheduleItem {
    std::uint32_t epoch = 0;
    std::string doc_id;
};

struct LanguageSchedule {
    std::string lang;
    std::uint64_t allocated = 0;
    std::uint64_t realized = 0;
    std::vector<ScheduleItem> items;
};

struct ScheduleSpec {
    std::uint64_t seed = 0;
    std::vector<LanguageSchedule> languages; // ascending code
};

// Realizes the plan over concrete documents: one seeded shuffle per
// (lang, epoch), epochs emitted in order, and the stream stops at the
// last whole document that keeps the cumulative total within the
// allocation. Throws InconsistentIndex when the index totals disagree
// with the plan.
ScheduleSpec schedule_documents(const SamplingPlan& plan, const DocIndex& index, std::uint64_t seed,
                                unsigned workers = 1);

std::string plan_to_csv(const SamplingPlan& plan);
std::string plan_summary(const SamplingPlan& plan);
std::string schedule_to_csv(const ScheduleSpec& spec);
std::string schedule_summary(const ScheduleSpec& spec);

// Compares allocations against a fixture CSV (columns code,allocated).
// Returns mismatching codes; empty means every allocation is within
// `tolerance` tokens.
std::vector<std::string> plan_compare(const SamplingPlan& plan, const std::filesystem::path& fixture,
                                      std::uint64_t tolerance);

} // namespace mixforge
