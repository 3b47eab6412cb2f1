#include "mixforge/metrics.hpp"
#include "mixforge/errors.hpp"
#include "mixforge/util.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <tuple>

namespace mixforge {

void ChrfConfig::validate() const {
    if (char_order < 1) throw DomainError("char_order must be >= 1");
    if (word_order < 0) throw DomainError("word_order must be >= 0");
    if (beta <= 0) throw DomainError("beta must be positive");
}

ChrfStats& ChrfStats::operator+=(const ChrfStats& other) {
    if (orders.empty()) orders.resize(other.orders.size());
    if (orders.size() != other.orders.size()) throw DomainError("chrf stats of different order counts");
    for (std::size_t i = 0; i < orders.size(); ++i) {
        orders[i].matched += other.orders[i].matched;
        orders[i].hyp_total += other.orders[i].hyp_total;
        orders[i].ref_total += other.orders[i].ref_total;
    }
    return *this;
}

namespace {

bool is_space_cp(char32_t c) {
    return c == U' ' || c == U'\t' || c == U'\n' || c == U'\r' || c == U'\f' || c == U'\v';
}

std::vector<char32_t> char_stream(std::string_view text, bool keep_whitespace) {
    auto cps = util::utf8_decode(text);
    if (keep_whitespace) return cps;
    std::vector<char32_t> out;
    out.reserve(cps.size());
    for (char32_t c : cps)
        if (!is_space_cp(c)) out.push_back(c);
    return out;
}

std::vector<std::string> word_stream(std::string_view text) {
    std::vector<std::string> words;
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
        std::size_t start = i;
        while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
        if (i > start) words.emplace_back(text.substr(start, i - start));
    }
    return words;
}

// Clipped matches for one order over generic token sequences.
template <typename Token>
ChrfOrderStats ngram_stats(const std::vector<Token>& hyp, const std::vector<Token>& ref, std::size_t n) {
    ChrfOrderStats stats;
    stats.hyp_total = hyp.size() >= n ? hyp.size() - n + 1 : 0;
    stats.ref_total = ref.size() >= n ? ref.size() - n + 1 : 0;
    if (stats.hyp_total == 0 || stats.ref_total == 0) return stats;

    std::map<std::vector<Token>, std::uint64_t> ref_counts;
    for (std::size_t i = 0; i + n <= ref.size(); ++i)
        ref_counts[std::vector<Token>(ref.begin() + i, ref.begin() + i + n)] += 1;
    std::map<std::vector<Token>, std::uint64_t> hyp_counts;
    for (std::size_t i = 0; i + n <= hyp.size(); ++i)
        hyp_counts[std::vector<Token>(hyp.begin() + i, hyp.begin() + i + n)] += 1;
    for (const auto& [gram, count] : hyp_counts) {
        auto it = ref_counts.find(gram);
        if (it != ref_counts.end()) stats.matched += std::min(count, it->second);
    }
    return stats;
}

} // namespace

ChrfStats chrf_accumulate(std::string_view hyp, std::string_view ref, const ChrfConfig& config) {
    config.validate();
    ChrfStats stats;
    auto hyp_chars = char_stream(hyp, config.whitespace_in_char_ngrams);
    auto ref_chars = char_stream(ref, config.whitespace_in_char_ngrams);
    for (int n = 1; n <= config.char_order; ++n)
        stats.orders.push_back(ngram_stats(hyp_chars, ref_chars, static_cast<std::size_t>(n)));
    if (config.word_order > 0) {
        auto hyp_words = word_stream(hyp);
        auto ref_words = word_stream(ref);
        for (int n = 1; n <= config.word_order; ++n)
            stats.orders.push_back(ngram_stats(hyp_words, ref_words, static_cast<std::size_t>(n)));
    }
    return stats;
}

double chrf_score(const ChrfStats& stats, double beta) {
    double precision_sum = 0, recall_sum = 0;
    std::size_t effective = 0;
    for (const auto& o : stats.orders) {
        if (o.hyp_total + o.ref_total == 0) continue;
        ++effective;
        precision_sum += o.hyp_total ? static_cast<double>(o.matched) / static_cast<double>(o.hyp_total) : 0.0;
        recall_sum += o.ref_total ? static_cast<double>(o.matched) / static_cast<double>(o.ref_total) : 0.0;
    }
    if (effective == 0) return 100.0; // both sides empty at every order
    double precision = precision_sum / static_cast<double>(effective);
    double recall = recall_sum / static_cast<double>(effective);
    if (precision + recall == 0.0) return 0.0;
    double b2 = beta * beta;
    return 100.0 * (1.0 + b2) * precision * recall / (b2 * precision + recall);
}

double chrf(std::string_view hyp, std::string_view ref, const ChrfConfig& config) {
    return chrf_score(chrf_accumulate(hyp, ref, config), config.beta);
}

double chrf_corpus(std::span<const std::string> hyps, std::span<const std::string> refs,
                   const ChrfConfig& config) {
    if (hyps.size() != refs.size())
        throw LengthMismatch("corpus chrf: " + std::to_string(hyps.size()) + " hypotheses vs " +
                             std::to_string(refs.size()) + " references");
    ChrfStats total;
    for (std::size_t i = 0; i < hyps.size(); ++i) total += chrf_accumulate(hyps[i], refs[i], config);
    return chrf_score(total, config.beta);
}

std::vector<std::string> make_pseudo_docs(std::span<const std::string> sentences, std::size_t k) {
    if (k < 1) throw DomainError("pseudo-document size k must be >= 1");
    std::vector<std::string> docs;
    for (std::size_t i = 0; i < sentences.size(); i += k) {
        std::string doc;
        for (std::size_t j = i; j < std::min(sentences.size(), i + k); ++j) {
            if (j > i) doc.push_back(' ');
            doc += sentences[j];
        }
        docs.push_back(std::move(doc));
    }
    return docs;
}

double dchrf(std::span<const std::string> hyp_sents, std::span<const std::string> ref_sents, std::size_t k,
             const ChrfConfig& config) {
    if (hyp_sents.size() != ref_sents.size())
        throw LengthMismatch("dchrf: " + std::to_string(hyp_sents.size()) + " hypothesis sentences vs " +
                             std::to_string(ref_sents.size()) + " reference sentences");
    auto hyp_docs = make_pseudo_docs(hyp_sents, k);
    auto ref_docs = make_pseudo_docs(ref_sents, k);
    return chrf_corpus(hyp_docs, ref_docs, config);
}

double overall_average(std::span<const double> scores) {
    if (scores.empty()) throw EmptyInput("overall_average: no scores");
    double sum = 0;
    for (double s : scores) sum += s;
    return sum / static_cast<double>(scores.size());
}

DeltaReport delta(double base, double adapted) {
    if (base == 0.0) throw ZeroBase("relative delta undefined for base 0");
    DeltaReport r;
    r.base = base;
    r.adapted = adapted;
    r.delta_abs = adapted - base;
    r.delta_rel_pct = 100.0 * r.delta_abs / base;
    return r;
}

std::string format_signed(double value, int decimals) {
    std::string s = util::format_fixed(value, decimals);
    if (!s.empty() && s[0] != '-') s.insert(s.begin(), '+');
    return s;
}

void ScoreTable::insert(const ScoreKey& key, double score) {
    if (!std::isfinite(score))
        throw DomainError("score for (" + key.model + ", " + key.task + ", " + key.lang + ") is not finite");
    if (!rows.emplace(key, score).second)
        throw DomainError("duplicate score row (" + key.model + ", " + key.task + ", " + key.lang + ")");
}

const double* ScoreTable::find(const std::string& model, const std::string& task,
                               const std::string& lang) const {
    auto it = rows.find(ScoreKey{model, task, lang});
    return it == rows.end() ? nullptr : &it->second;
}

std::set<std::string> ScoreTable::models() const {
    std::set<std::string> out;
    for (const auto& [key, _] : rows) out.insert(key.model);
    return out;
}

std::set<std::string> ScoreTable::tasks() const {
    std::set<std::string> out;
    for (const auto& [key, _] : rows) out.insert(key.task);
    return out;
}

ScoreTable load_score_table(const std::filesystem::path& path) {
    auto lines = util::read_lines(path);
    if (lines.empty() || util::strip(lines[0]) != "model,task,lang,score")
        throw DomainError("score table must start with header 'model,task,lang,score'");
    ScoreTable table;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        auto line = util::strip(lines[i]);
        if (line.empty()) continue;
        auto fields = util::split(line, ',');
        if (fields.size() != 4)
            throw DomainError(path.string() + ":" + std::to_string(i + 1) + ": expected 4 fields");
        auto score = util::parse_double(fields[3]);
        if (!score) throw DomainError(path.string() + ":" + std::to_string(i + 1) + ": bad score");
        table.insert({fields[0], fields[1], fields[2]}, *score);
    }
    return table;
}

std::map<std::pair<std::string, std::string>, GroupMean>
group_average(const ScoreTable& table, const std::vector<LanguageGroup>& groups,
              const std::set<std::string>& exclude_tasks, bool task_then_lang) {
    std::map<std::pair<std::string, std::string>, GroupMean> result;

    if (!task_then_lang) {
        std::map<std::pair<std::string, std::string>, std::pair<double, std::size_t>> acc;
        for (const auto& [key, score] : table.rows) {
            if (exclude_tasks.count(key.task)) continue;
            auto group = group_of(key.lang, groups);
            if (!group) continue;
            auto& slot = acc[{key.model, std::string(to_string(*group))}];
            slot.first += score;
            slot.second += 1;
        }
        for (const auto& [key, slot] : acc)
            result[key] = {slot.first / static_cast<double>(slot.second), slot.second};
    } else {
        // Per (model, group, task) language mean first, then mean of tasks.
        std::map<std::tuple<std::string, std::string, std::string>, std::pair<double, std::size_t>> per_task;
        for (const auto& [key, score] : table.rows) {
            if (exclude_tasks.count(key.task)) continue;
            auto group = group_of(key.lang, groups);
            if (!group) continue;
            auto& slot = per_task[{key.model, std::string(to_string(*group)), key.task}];
            slot.first += score;
            slot.second += 1;
        }
        std::map<std::pair<std::string, std::string>, std::pair<double, std::size_t>> acc;
        for (const auto& [key, slot] : per_task) {
            auto& out = acc[{std::get<0>(key), std::get<1>(key)}];
            out.first += slot.first / static_cast<double>(slot.second);
            out.second += 1;
        }
        for (const auto& [key, slot] : acc)
            result[key] = {slot.first / static_cast<double>(slot.second), slot.second};
    }

    if (result.empty()) throw EmptyGroup("no covered cells for any (model, group)");
    return result;
}

std::map<std::pair<std::string, std::string>, GroupMean>
per_language_average(const ScoreTable& table, const std::set<std::string>& exclude_tasks) {
    std::map<std::pair<std::string, std::string>, std::pair<double, std::size_t>> acc;
    for (const auto& [key, score] : table.rows) {
        if (exclude_tasks.count(key.task)) continue;
        auto& slot = acc[{key.model, key.lang}];
        slot.first += score;
        slot.second += 1;
    }
    std::map<std::pair<std::string, std::string>, GroupMean> result;
    for (const auto& [key, slot] : acc)
        result[key] = {slot.first / static_cast<double>(slot.second), slot.second};
    return result;
}

} // namespace mixforge
