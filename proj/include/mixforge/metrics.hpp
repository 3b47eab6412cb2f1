#pragma once

#include "mixforge/registry.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace mixforge {

struct ChrfConfig {
    int char_order = 6;
    int word_order = 2; // 2 for chrF++, 0 for plain chrF
    double beta = 2.0;
    bool whitespace_in_char_ngrams = false;

    void validate() const;
};

// Clipped n-gram statistics, char orders first, then word orders.
struct ChrfOrderStats {
    std::uint64_t matched = 0;
    std::uint64_t hyp_total = 0;
    std::uint64_t ref_total = 0;
};

struct ChrfStats {
    std::vector<ChrfOrderStats> orders;

    ChrfStats& operator+=(const ChrfStats& other);
};

ChrfStats chrf_accumulate(std::string_view hyp, std::string_view ref, const ChrfConfig& config);

// Averages precision and recall over orders that have any n-grams, then
// applies the beta-weighted F. All-empty statistics score 100.
double chrf_score(const ChrfStats& stats, double beta);

double chrf(std::string_view hyp, std::string_view ref, const ChrfConfig& config);

// Aggregate statistics across aligned segments, then a single F.
double chrf_corpus(std::span<const std::string> hyps, std::span<const std::string> refs,
                   const ChrfConfig& config); // throws LengthMismatch

// Consecutive groups of k sentences joined with a single space; the final
// group keeps the remainder.
std::vector<std::string> make_pseudo_docs(std::span<const std::string> sentences, std::size_t k);

double dchrf(std::span<const std::string> hyp_sents, std::span<const std::string> ref_sents, std::size_t k,
             const ChrfConfig& config); // throws LengthMismatch

double overall_average(std::span<const double> scores); // throws EmptyInput

struct DeltaReport {
    double base = 0;
    double adapted = 0;
    double delta_abs = 0;
    double delta_rel_pct = 0;
};

DeltaReport delta(double base, double adapted); // throws ZeroBase

// Display convention: sign always shown, one decimal.
std::string format_signed(double value, int decimals);

struct ScoreKey {
    std::string model, task, lang;
    auto operator<=>(const ScoreKey&) const = default;
};

struct ScoreTable {
    std::map<ScoreKey, double> rows;

    void insert(const ScoreKey& key, double score); // duplicate key / non-finite -> DomainError
    const double* find(const std::string& model, const std::string& task, const std::string& lang) const;
    std::set<std::string> models() const;
    std::set<std::string> tasks() const;
};

// CSV with header model,task,lang,score.
ScoreTable load_score_table(const std::filesystem::path& path);

struct GroupMean {
    double mean = 0;
    std::size_t coverage = 0; // cells (pooled) or tasks (task-first)
};

// Pooled-cell mean over every (task, lang) with lang in the group and the
// task not excluded. `task_then_lang` switches to averaging per-task
// language means first. Throws EmptyGroup when nothing at all is covered.
std::map<std::pair<std::string, std::string>, GroupMean>
group_average(const ScoreTable& table, const std::vector<LanguageGroup>& groups,
              const std::set<std::string>& exclude_tasks, bool task_then_lang = false);

// Mean over tasks for each (model, lang), skipping missing cells.
std::map<std::pair<std::string, std::string>, GroupMean>
per_language_average(const ScoreTable& table, const std::set<std::string>& exclude_tasks);

} // namespace mixforge
