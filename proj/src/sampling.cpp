#include "mixforge/sampling.hpp"
#include "mixforge/errors.hpp"
#include "mixforge/rng.hpp"
#include "mixforge/util.hpp"

#include <algorithm>
#include <atomic>
#include <limits>
#include <thread>

namespace mixforge {

void SamplerConfig::validate() const {
    if (budget_tokens == 0) throw DomainError("sampler budget must be positive");
    if (epoch_cap < 1) throw DomainError("epoch cap must be >= 1");
}

std::uint64_t SamplingPlan::total_allocated() const {
    std::uint64_t sum = 0;
    for (const auto& e : entries) sum += e.allocated;
    return sum;
}

const PlanEntry* SamplingPlan::find(const std::string& code) const {
    for (const auto& e : entries)
        if (e.code == code) return &e;
    return nullptr;
}

namespace {

Selection sort_selection(std::vector<std::pair<std::string, std::uint64_t>> langs, std::uint64_t threshold) {
    std::sort(langs.begin(), langs.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    Selection sel;
    for (auto& [code, total] : langs) {
        if (total >= threshold) sel.included.push_back(code);
        else sel.excluded.push_back(code);
    }
    return sel;
}

} // namespace

Selection select_languages(const std::vector<LanguageRecord>& records, std::uint64_t threshold) {
    std::vector<std::pair<std::string, std::uint64_t>> langs;
    langs.reserve(records.size());
    for (const auto& r : records) langs.emplace_back(r.code, r.raw_total);
    return sort_selection(std::move(langs), threshold);
}

Selection select_languages(const std::map<std::string, std::uint64_t>& raw_counts, std::uint64_t threshold) {
    std::vector<std::pair<std::string, std::uint64_t>> langs(raw_counts.begin(), raw_counts.end());
    return sort_selection(std::move(langs), threshold);
}

Selection select_languages(const CorpusStats& stats, std::uint64_t threshold) {
    std::map<std::string, std::uint64_t> totals;
    for (const auto& [key, cell] : stats.cells) totals[key.first] += cell.tokens;
    return select_languages(totals, threshold);
}

SamplingPlan unimax_allocate(const std::map<std::string, std::uint64_t>& raw_counts,
                             const SamplerConfig& config) {
    config.validate();
    if (raw_counts.empty()) throw EmptyInput("unimax_allocate: no languages");
    for (const auto& [code, raw] : raw_counts)
        if (raw == 0) throw DomainError("unimax_allocate: zero raw count for '" + code + "'");

    SamplingPlan plan;
    plan.budget = config.budget_tokens;
    plan.epoch_cap = config.epoch_cap;

    unsigned __int128 total_capacity = 0;
    for (const auto& [code, raw] : raw_counts) {
        PlanEntry e;
        e.code = code;
        e.raw_total = raw;
        if (raw > std::numeric_limits<std::uint64_t>::max() / config.epoch_cap)
            throw DomainError("unimax_allocate: capacity overflow for '" + code + "'");
        e.capacity = raw * config.epoch_cap;
        total_capacity += e.capacity;
        plan.entries.push_back(std::move(e));
    }
    if (total_capacity < config.budget_tokens)
        throw Infeasible("budget " + std::to_string(config.budget_tokens) + " exceeds total capacity");

    // Active = entries still competing for the uniform share; std::map
    // iteration already gave us ascending code order.
    std::vector<PlanEntry*> active;
    for (auto& e : plan.entries) active.push_back(&e);

    std::uint64_t remaining = config.budget_tokens;
    std::uint64_t final_share_floor = 0;
    while (!active.empty()) {
        // The round's share is fixed up front; every qualifying language is
        // capped against it before the budget shrinks.
        const std::uint64_t round_budget = remaining;
        const std::size_t round_size = active.size();
        final_share_floor = round_budget / round_size;
        bool removed_any = false;
        std::vector<PlanEntry*> next;
        for (PlanEntry* e : active) {
            // capacity <= round_budget/round_size, compared without truncation
            if (static_cast<unsigned __int128>(e->capacity) * round_size <= round_budget) {
                e->allocated = e->capacity;
                remaining -= e->capacity;
                removed_any = true;
            } else {
                next.push_back(e);
            }
        }
        active = std::move(next);
        if (!removed_any) break;
    }

    if (!active.empty()) {
        std::uint64_t share = remaining / active.size();
        std::uint64_t leftover = remaining % active.size();
        final_share_floor = share;
        for (std::size_t i = 0; i < active.size(); ++i)
            active[i]->allocated = share + (i < leftover ? 1 : 0);
    }
    plan.uniform_share = final_share_floor;
    return plan;
}

namespace {

LanguageSchedule schedule_language(const PlanEntry& entry, const std::vector<DocIndexEntry>& docs,
                                   std::uint64_t seed) {
    LanguageSchedule out;
    out.lang = entry.code;
    out.allocated = entry.allocated;

    std::vector<std::uint32_t> order(docs.size());
    std::uint64_t cumulative = 0;
    for (std::uint32_t epoch = 1; cumulative < entry.allocated; ++epoch) {
        for (std::uint32_t i = 0; i < order.size(); ++i) order[i] = i;
        Pcg32 rng(stream_seed(seed, entry.code, epoch));
        rng.shuffle(std::span<std::uint32_t>(order));
        bool truncated = false;
        for (std::uint32_t idx : order) {
            if (cumulative + docs[idx].tokens > entry.allocated) {
                truncated = true;
                break;
            }
            cumulative += docs[idx].tokens;
            out.items.push_back({epoch, docs[idx].doc_id});
        }
        if (truncated) break;
    }
    out.realized = cumulative;
    return out;
}

} // namespace

ScheduleSpec schedule_documents(const SamplingPlan& plan, const DocIndex& index, std::uint64_t seed,
                                unsigned workers) {
    for (const auto& e : plan.entries) {
        auto it = index.find(e.code);
        if (it == index.end()) throw InconsistentIndex("no document index for '" + e.code + "'");
        std::uint64_t sum = 0;
        bool any_tokens = false;
        for (const auto& d : it->second) {
            sum += d.tokens;
            any_tokens = any_tokens || d.tokens > 0;
        }
        if (sum != e.raw_total)
            throw InconsistentIndex("'" + e.code + "': index sums to " + std::to_string(sum) +
                                    ", plan raw_total is " + std::to_string(e.raw_total));
        if (!any_tokens && e.allocated > 0)
            throw InconsistentIndex("'" + e.code + "': allocation with no tokens in index");
    }
    for (const auto& [lang, docs] : index)
        if (!plan.find(lang)) throw InconsistentIndex("index language '" + lang + "' not in plan");

    ScheduleSpec spec;
    spec.seed = seed;
    spec.languages.resize(plan.entries.size());

    auto run = [&](std::size_t i) {
        spec.languages[i] = schedule_language(plan.entries[i], index.at(plan.entries[i].code), seed);
    };

    if (workers <= 1 || plan.entries.size() < 2) {
        for (std::size_t i = 0; i < plan.entries.size(); ++i) run(i);
    } else {
        std::vector<std::thread> pool;
        std::atomic<std::size_t> cursor{0};
        unsigned n = std::min<unsigned>(workers, static_cast<unsigned>(plan.entries.size()));
        for (unsigned w = 0; w < n; ++w) {
            pool.emplace_back([&] {
                for (std::size_t i = cursor.fetch_add(1); i < plan.entries.size(); i = cursor.fetch_add(1))
                    run(i);
            });
        }
        for (auto& t : pool) t.join();
    }
    return spec;
}

std::string plan_to_csv(const SamplingPlan& plan) {
    std::string out = "code,raw_total,capacity,allocated,repetition,epochs,rep\n";
    for (const auto& e : plan.entries) {
        out += e.code + "," + std::to_string(e.raw_total) + "," + std::to_string(e.capacity) + "," +
               std::to_string(e.allocated) + "," + util::format_fixed(e.repetition(), 6) + "," +
               std::to_string(e.epochs_full()) + "," + std::to_string(e.epochs_rep()) + "\n";
    }
    return out;
}

std::string plan_summary(const SamplingPlan& plan) {
    std::string out;
    out += "languages:        " + std::to_string(plan.entries.size()) + "\n";
    out += "budget:           " + util::group_digits(plan.budget) + "\n";
    out += "allocated:        " + util::group_digits(plan.total_allocated()) + "\n";
    out += "uniform share U:  " + util::group_digits(plan.uniform_share) + "\n";
    out += "epoch cap:        " + std::to_string(plan.epoch_cap) + "\n";
    std::size_t capped = 0;
    for (const auto& e : plan.entries)
        if (e.allocated == e.capacity) ++capped;
    out += "capped languages: " + std::to_string(capped) + "\n";
    return out;
}

std::string schedule_summary(const ScheduleSpec& spec) {
    std::uint64_t allocated = 0, realized = 0;
    std::string out;
    for (const auto& lang : spec.languages) {
        allocated += lang.allocated;
        realized += lang.realized;
        if (lang.realized < lang.allocated)
            out += "  " + lang.lang + ": realized " + util::group_digits(lang.realized) + " of " +
                   util::group_digits(lang.allocated) + " (deficit " +
                   util::group_digits(lang.allocated - lang.realized) + ")\n";
    }
    out = "schedule: realized " + util::group_digits(realized) + " of " + util::group_digits(allocated) +
          " allocated tokens (deficit " + util::group_digits(allocated - realized) + ")\n" + out;
    return out;
}

std::string schedule_to_csv(const ScheduleSpec& spec) {
    std::string out = "lang,epoch,doc_id\n";
    for (const auto& lang : spec.languages)
        for (const auto& item : lang.items)
            out += lang.lang + "," + std::to_string(item.epoch) + "," + item.doc_id + "\n";
    return out;
}

std::vector<std::string> plan_compare(const SamplingPlan& plan, const std::filesystem::path& fixture,
                                      std::uint64_t tolerance) {
    auto lines = util::read_lines(fixture);
    if (lines.empty() || util::strip(lines[0]) != "code,allocated")
        throw DomainError("fixture must be a CSV with header 'code,allocated'");
    std::vector<std::string> mismatches;
    std::size_t rows = 0;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        auto line = util::strip(lines[i]);
        if (line.empty()) continue;
        auto fields = util::split(line, ',');
        if (fields.size() != 2) throw DomainError("fixture line " + std::to_string(i + 1) + ": expected 2 fields");
        auto expected = util::parse_u64(fields[1]);
        if (!expected) throw DomainError("fixture line " + std::to_string(i + 1) + ": bad allocation");
        ++rows;
        const PlanEntry* e = plan.find(fields[0]);
        if (!e) {
            mismatches.push_back(fields[0] + ": missing from plan");
            continue;
        }
        std::uint64_t diff = e->allocated > *expected ? e->allocated - *expected : *expected - e->allocated;
        if (diff > tolerance)
            mismatches.push_back(fields[0] + ": allocated " + std::to_string(e->allocated) + ", fixture " +
                                 std::to_string(*expected) + " (|diff| " + std::to_string(diff) + ")");
    }
    if (rows != plan.entries.size())
        mismatches.push_back("fixture has " + std::to_string(rows) + " rows, plan has " +
                             std::to_string(plan.entries.size()));
    return mismatches;
}

} // namespace mixforge
