// mixforge: corpus-mixture compiler and run planner.
//
// Exit codes: 0 success, 1 domain error, 2 usage error. Every subcommand
// writes only under its --out target, atomically. Outputs depend only on
// argv and input bytes; --seed (or FORGE_SEED) pins the PRNG streams.

#include "mixforge/config.hpp"
#include "mixforge/errors.hpp"
#include "mixforge/ingest.hpp"
#include "mixforge/metrics.hpp"
#include "mixforge/mixture.hpp"
#include "mixforge/packing.hpp"
#include "mixforge/registry.hpp"
#include "mixforge/runplan.hpp"
#include "mixforge/sampling.hpp"
#include "mixforge/util.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>

using namespace mixforge;

namespace {

std::uint64_t seed_or_env(std::uint64_t seed, bool seed_set) {
    if (seed_set) return seed;
    if (const char* env = std::getenv("FORGE_SEED")) {
        auto v = util::parse_u64(env);
        if (!v) throw DomainError("FORGE_SEED is not an integer");
        return *v;
    }
    return 0;
}

void emit(const std::string& out_path, const std::string& content) {
    if (out_path.empty() || out_path == "-") {
        std::cout << content;
        return;
    }
    util::atomic_write_file(out_path, content);
}

std::map<std::string, std::uint64_t> read_totals_csv(const std::string& path, const std::string& key_name) {
    auto lines = util::read_lines(path);
    if (lines.empty() || util::strip(lines[0]) != key_name + ",tokens")
        throw DomainError(path + ": expected header '" + key_name + ",tokens'");
    std::map<std::string, std::uint64_t> totals;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        auto line = util::strip(lines[i]);
        if (line.empty()) continue;
        auto fields = util::split(line, ',');
        auto v = fields.size() == 2 ? util::parse_u64(fields[1]) : std::nullopt;
        if (!v) throw DomainError(path + ":" + std::to_string(i + 1) + ": bad row");
        if (!totals.emplace(fields[0], *v).second)
            throw DomainError(path + ":" + std::to_string(i + 1) + ": duplicate key '" + fields[0] + "'");
    }
    return totals;
}

DocIndex read_doc_index_csv(const std::string& path) {
    auto lines = util::read_lines(path);
    if (lines.empty() || util::strip(lines[0]) != "lang,doc_id,tokens")
        throw DomainError(path + ": expected header 'lang,doc_id,tokens'");
    DocIndex index;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        auto line = util::strip(lines[i]);
        if (line.empty()) continue;
        auto fields = util::split(line, ',');
        auto v = fields.size() == 3 ? util::parse_u64(fields[2]) : std::nullopt;
        if (!v) throw DomainError(path + ":" + std::to_string(i + 1) + ": bad row");
        index[fields[0]].push_back({fields[1], *v});
    }
    return index;
}

TokenizerSpec tokenizer_from_flags(const std::string& kind, std::uint32_t vocab) {
    if (kind == "byte") return TokenizerSpec::byte_default();
    if (kind == "ws") return TokenizerSpec::whitespace(vocab);
    if (kind.rfind("external:", 0) == 0) return TokenizerSpec::external(kind.substr(9));
    throw DomainError("unknown tokenizer '" + kind + "' (expected byte|ws|external:<name>)");
}

SamplingPlan plan_from_registry(const Registry& reg, std::uint64_t budget, std::uint32_t epoch_cap) {
    SamplerConfig cfg;
    cfg.budget_tokens = budget;
    cfg.epoch_cap = epoch_cap;
    cfg.selection_threshold = reg.selection_threshold;
    return unimax_allocate(reg.raw_counts_included(), cfg);
}

int cmd_stats(const std::string& in, const std::string& tokenizer, std::uint32_t vocab, unsigned workers,
              const std::string& out) {
    auto docs = read_documents_jsonl(in);
    auto stats = accumulate_stats(docs, tokenizer_from_flags(tokenizer, vocab), workers);
    emit(out, stats_to_csv(stats));
    std::cerr << "stats: " << docs.size() << " documents, " << stats.grand_total().tokens << " tokens ("
              << stats.tokenizer_tag << ")\n";
    return 0;
}

int cmd_select(const std::string& registry_path, std::uint64_t threshold, const std::string& out) {
    auto reg = load_registry(registry_path, threshold);
    auto sel = select_languages(reg.records, threshold);
    std::string csv = "code,raw_total,status\n";
    for (const auto& code : sel.included)
        csv += code + "," + std::to_string(reg.find(code)->raw_total) + ",included\n";
    for (const auto& code : sel.excluded)
        csv += code + "," + std::to_string(reg.find(code)->raw_total) + ",excluded\n";
    emit(out, csv);
    std::cerr << "select: " << sel.included.size() << " included, " << sel.excluded.size()
              << " excluded (threshold " << util::group_digits(threshold) << ")\n";
    return 0;
}

int cmd_plan(const std::string& registry_path, std::uint64_t budget, std::uint32_t epoch_cap,
             std::uint64_t threshold, const std::string& against, std::uint64_t tolerance,
             const std::string& doc_index_path, const std::string& schedule_out, std::uint64_t seed,
             unsigned workers, const std::string& out) {
    auto reg = load_registry(registry_path, threshold);
    for (const auto& w : reg.warnings) std::cerr << "registry: " << w << "\n";
    auto plan = plan_from_registry(reg, budget, epoch_cap);
    if (!out.empty()) emit(out, plan_to_csv(plan));
    std::cerr << plan_summary(plan);

    if (!doc_index_path.empty()) {
        auto schedule = schedule_documents(plan, read_doc_index_csv(doc_index_path), seed, workers);
        if (schedule_out.empty()) throw DomainError("--doc-index needs --schedule-out");
        util::atomic_write_file(schedule_out, schedule_to_csv(schedule));
        std::cerr << schedule_summary(schedule);
    }

    if (!against.empty()) {
        auto mismatches = plan_compare(plan, against, tolerance);
        if (mismatches.empty()) {
            std::cout << plan.entries.size() << "/" << plan.entries.size() << " match\n";
        } else {
            for (const auto& m : mismatches) std::cerr << "mismatch: " << m << "\n";
            std::cout << (plan.entries.size() - mismatches.size()) << "/" << plan.entries.size() << " match\n";
            return 1;
        }
    }
    return 0;
}

int cmd_compile(const std::string& registry_path, const std::string& config_path, std::uint64_t seed,
                bool seed_set, const std::string& out) {
    auto cfg = PipelineConfig::from_json_file(config_path);
    if (seed_set) cfg.seed = seed; // flags override config values
    auto reg = load_registry(registry_path);
    auto plan = plan_from_registry(reg, cfg.budget_tokens, cfg.epoch_cap);
    auto manifest = compile_recipe(plan, cfg.recipe, cfg.seed);
    emit(out, manifest_to_json(manifest, cfg.to_json()));
    for (const auto& w : manifest.warnings) std::cerr << "warning: " << w << "\n";
    std::cerr << "compile: " << manifest.recipe << " grand total " << util::group_digits(manifest.grand_total)
              << " tokens across " << manifest.streams.size() << " streams\n";
    return 0;
}

int cmd_filter_parallel(const std::string& in, double tau, const std::string& scorer_kind,
                        const std::string& tokenizer, std::uint32_t vocab, unsigned workers,
                        const std::string& out, const std::string& stats_out) {
    auto pairs = read_pairs_jsonl(in);
    PairScorer scorer;
    if (scorer_kind == "field") {
        scorer = [](const ParallelPair& p) {
            if (!p.qe_score) throw std::runtime_error("unscored pair");
            return *p.qe_score;
        };
    } else if (scorer_kind.rfind("const:", 0) == 0) {
        auto v = util::parse_double(scorer_kind.substr(6));
        if (!v) throw DomainError("bad const scorer value");
        double value = *v;
        scorer = [value](const ParallelPair&) { return value; };
    } else {
        throw DomainError("unknown scorer '" + scorer_kind + "' (expected field|const:<v>)");
    }

    auto [retained, stats] = filter_parallel(pairs, scorer, tau, tokenizer_from_flags(tokenizer, vocab), workers);
    std::string lines;
    for (const auto& p : retained) lines += pair_to_jsonl(p) + "\n";
    emit(out, lines);
    std::string stats_text = "input_pairs," + std::to_string(stats.input_pairs) + "\n" +
                             "retained_pairs," + std::to_string(stats.retained_pairs) + "\n" +
                             "input_tokens," + std::to_string(stats.input_tokens) + "\n" +
                             "retained_tokens," + std::to_string(stats.retained_tokens) + "\n";
    if (!stats_out.empty()) util::atomic_write_file(stats_out, stats_text);
    std::cerr << "filter-parallel: retained " << stats.retained_pairs << "/" << stats.input_pairs
              << " pairs at tau " << tau << "\n";
    return 0;
}

int cmd_synth_quota(const std::string& lang_totals, const std::string& domain_totals, const std::string& out) {
    auto quota =
        allocate_synth_quota(read_totals_csv(lang_totals, "lang"), read_totals_csv(domain_totals, "domain"));
    emit(out, quota_to_csv(quota));
    std::uint64_t total = 0;
    for (const auto& [k, v] : quota.matrix) total += v;
    std::cerr << "synth-quota: " << quota.lang_marginals.size() << " languages x "
              << quota.domain_marginals.size() << " domains, " << util::group_digits(total) << " tokens\n";
    return 0;
}

int cmd_prompts(const std::string& kind, const std::string& source, const std::string& target,
                const std::string& out) {
    emit(out, render_translation_prompt(prompt_kind_from_string(kind), source, target));
    return 0;
}

int cmd_jobs(const std::string& in, const std::string& targets_csv, const std::string& kind,
             const std::string& registry_path, const std::string& out) {
    auto docs = read_documents_jsonl(in);
    std::vector<std::string> targets;
    for (const auto& t : util::split(targets_csv, ','))
        if (!util::strip(t).empty()) targets.push_back(util::strip(t));

    std::vector<std::string> eligible;
    if (!registry_path.empty()) {
        eligible = load_registry(registry_path).synthetic_eligible();
    } else {
        eligible = targets; // no registry: the caller's list defines eligibility
    }
    auto jobs = build_translation_jobs(docs, targets, prompt_kind_from_string(kind), eligible);
    std::string lines;
    for (const auto& j : jobs) lines += job_to_jsonl(j) + "\n";
    emit(out, lines);
    std::cerr << "jobs: " << jobs.size() << " manifests (" << docs.size() << " docs x " << targets.size()
              << " targets)\n";
    return 0;
}

int cmd_pack(const std::string& in, const std::string& tokenizer, std::uint32_t vocab,
             std::uint32_t context_len, std::uint32_t shard_size, const std::string& recipe,
             std::uint64_t seed, unsigned workers, const std::string& out_dir) {
    auto spec = tokenizer_from_flags(tokenizer, vocab);
    PackConfig config;
    config.context_len = context_len;
    config.shard_size = shard_size;
    config.eos_id = spec.eos_id;
    config.pad_id = spec.pad_id;
    config.seed = seed;

    auto docs = read_documents_jsonl(in);
    Packer packer(config);
    for (const auto& d : docs) packer.push({d.id, d.lang, tokenize(d, spec)});
    auto seqs = packer.finish();
    auto manifest = write_shards(seqs, out_dir, config, recipe, workers);
    std::cerr << "pack: " << manifest.total_sequences << " sequences, " << manifest.total_non_pad_tokens
              << " non-pad tokens, " << manifest.shards.size() << " shards\n";
    return 0;
}

int cmd_verify(const std::string& dir, const std::string& out) {
    auto report = verify_manifest(dir);
    emit(out, verify_report_text(report));
    return report.ok ? 0 : 1;
}

int cmd_plan_run(std::uint64_t tokens, std::uint64_t batch, double peak_lr, double min_lr_rate,
                 double warmup_ratio, double params, double hours, std::uint32_t gpus, double peak_tflops,
                 const std::string& out, const std::string& csv_out) {
    RunCardInput input;
    input.total_tokens = tokens;
    input.config.global_batch_tokens = batch;
    input.config.peak_lr = peak_lr;
    input.config.min_lr_rate = min_lr_rate;
    input.config.warmup_ratio = warmup_ratio;
    input.nonembed_params = params;
    input.wall_hours = hours;
    input.num_gpus = gpus;
    input.peak_tflops_per_gpu = peak_tflops;
    emit(out, run_card_text(input));
    if (!csv_out.empty()) util::atomic_write_file(csv_out, run_card_csv(input));
    return 0;
}

int cmd_score(const std::string& metric, const std::string& hyp_path, const std::string& ref_path,
              int char_order, int word_order, double beta, std::size_t doc_k, const std::string& out) {
    if (metric != "chrf") throw DomainError("unknown metric '" + metric + "' (expected chrf)");
    ChrfConfig config;
    config.char_order = char_order;
    config.word_order = word_order;
    config.beta = beta;
    auto hyps = util::read_lines(hyp_path);
    auto refs = util::read_lines(ref_path);
    double score = doc_k > 0 ? dchrf(hyps, refs, doc_k, config) : chrf_corpus(hyps, refs, config);
    emit(out, util::format_fixed(score, 2) + "\n");
    return 0;
}

int cmd_aggregate(const std::string& scores_path, const std::string& registry_path,
                  const std::string& exclude_csv, bool per_task_first, const std::string& out) {
    auto table = load_score_table(scores_path);
    auto reg = load_registry(registry_path);
    std::set<std::string> exclude;
    for (const auto& t : util::split(exclude_csv, ','))
        if (!util::strip(t).empty()) exclude.insert(util::strip(t));
    auto means = group_average(table, reg.groups, exclude, per_task_first);
    std::string csv = "model,group,mean,coverage\n";
    for (const auto& [key, gm] : means)
        csv += key.first + "," + key.second + "," + util::format_fixed(gm.mean, 2) + "," +
               std::to_string(gm.coverage) + "\n";
    emit(out, csv);
    return 0;
}

int cmd_report(const std::string& scores_path, const std::string& pairs_csv, const std::string& out) {
    auto table = load_score_table(scores_path);

    // Task score = mean over langs, overall = mean over task scores.
    std::map<std::string, std::map<std::string, std::pair<double, std::size_t>>> per_task;
    for (const auto& [key, score] : table.rows) {
        auto& slot = per_task[key.model][key.task];
        slot.first += score;
        slot.second += 1;
    }
    std::map<std::string, double> overall;
    for (const auto& [model, tasks] : per_task) {
        std::vector<double> means;
        for (const auto& [task, slot] : tasks) means.push_back(slot.first / slot.second);
        overall[model] = overall_average(means);
    }

    std::map<std::string, std::string> base_of;
    for (const auto& pair : util::split(pairs_csv, ',')) {
        if (util::strip(pair).empty()) continue;
        auto parts = util::split(util::strip(pair), ':');
        if (parts.size() != 2) throw DomainError("--pairs entries must be base:adapted");
        base_of[parts[1]] = parts[0];
    }

    std::size_t width = 5;
    for (const auto& [model, score] : overall) width = std::max(width, model.size());

    std::string csv = "model,overall,base,delta,delta_pct\n";
    std::string text = std::string("model").append(width - 5, ' ') + "  overall   delta  delta%\n";
    for (const auto& [model, score] : overall) {
        csv += model + "," + util::format_fixed(score, 2);
        text += model + std::string(width - model.size(), ' ') + "  " + util::format_fixed(score, 2);
        auto it = base_of.find(model);
        if (it != base_of.end()) {
            if (!overall.count(it->second)) throw DomainError("base model '" + it->second + "' has no scores");
            auto d = delta(overall.at(it->second), score);
            csv += "," + it->second + "," + format_signed(d.delta_abs, 1) + "," +
                   format_signed(d.delta_rel_pct, 1);
            text += "   " + format_signed(d.delta_abs, 1) + "  " + format_signed(d.delta_rel_pct, 1) + "%";
        } else {
            csv += ",,,";
        }
        csv += "\n";
        text += "\n";
    }
    emit(out, csv);
    std::cerr << text;
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"mixforge: corpus-mixture compiler and run planner"};
    app.require_subcommand(1);

    std::uint64_t seed = 0;
    bool seed_set = false;
    std::string config_path, out;
    unsigned workers = 1;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--seed", seed, "PRNG seed (FORGE_SEED env fallback)")
            ->each([&](const std::string&) { seed_set = true; });
        cmd->add_option("--config", config_path, "recipe/pipeline config file");
        cmd->add_option("--out", out, "output path ('-' = stdout)");
        return cmd;
    };

    auto* stats = add_common(app.add_subcommand("stats", "per-language token statistics from a JSONL corpus"));
    std::string stats_in, stats_tok = "byte";
    std::uint32_t stats_vocab = 1u << 20;
    stats->add_option("--in", stats_in, "documents JSONL")->required();
    stats->add_option("--tokenizer", stats_tok, "byte|ws|external:<name>");
    stats->add_option("--vocab-size", stats_vocab, "vocab size for the ws tokenizer");
    stats->add_option("--workers", workers, "worker threads");

    auto* select = add_common(app.add_subcommand("select", "language selection by raw-token threshold"));
    std::string sel_registry;
    std::uint64_t sel_threshold = kDefaultSelectionThreshold;
    select->add_option("--registry", sel_registry, "registry CSV")->required();
    select->add_option("--threshold", sel_threshold, "selection threshold in tokens");

    auto* plan = add_common(app.add_subcommand("plan", "UniMax budget allocation"));
    std::string plan_registry, plan_against, plan_doc_index, plan_schedule_out;
    std::uint64_t plan_budget = 0, plan_tolerance = 2, plan_threshold = kDefaultSelectionThreshold;
    std::uint32_t plan_epoch_cap = 4;
    plan->add_option("--registry", plan_registry, "registry CSV")->required();
    plan->add_option("--budget", plan_budget, "total monolingual budget N")->required();
    plan->add_option("--epoch-cap", plan_epoch_cap, "max passes per language");
    plan->add_option("--threshold", plan_threshold, "selection threshold in tokens");
    plan->add_option("--against", plan_against, "fixture CSV to compare allocations against");
    plan->add_option("--tolerance", plan_tolerance, "allowed per-language deviation in tokens");
    plan->add_option("--doc-index", plan_doc_index, "per-language document index CSV (lang,doc_id,tokens)");
    plan->add_option("--schedule-out", plan_schedule_out, "write the document schedule CSV here");
    plan->add_option("--workers", workers, "worker threads for scheduling");

    auto* compile = add_common(app.add_subcommand("compile", "compile a mixture manifest from a recipe config"));
    std::string compile_registry;
    compile->add_option("--registry", compile_registry, "registry CSV")->required();

    auto* filter = add_common(app.add_subcommand("filter-parallel", "QE-threshold filtering of parallel pairs"));
    std::string filter_in, filter_scorer = "field", filter_tok = "byte", filter_stats_out;
    std::uint32_t filter_vocab = 1u << 20;
    double filter_tau = 0.7;
    filter->add_option("--in", filter_in, "pairs JSONL")->required();
    filter->add_option("--tau", filter_tau, "retention threshold (inclusive)");
    filter->add_option("--scorer", filter_scorer, "field|const:<v>");
    filter->add_option("--tokenizer", filter_tok, "tokenizer for token accounting");
    filter->add_option("--vocab-size", filter_vocab, "vocab size for the ws tokenizer");
    filter->add_option("--stats-out", filter_stats_out, "write FilterStats CSV here");
    filter->add_option("--workers", workers, "scorer threads (outcome is worker-count independent)");

    auto* quota = add_common(app.add_subcommand("synth-quota", "language x domain synthetic-token quotas"));
    std::string quota_langs, quota_domains;
    quota->add_option("--lang-totals", quota_langs, "CSV lang,tokens")->required();
    quota->add_option("--domain-totals", quota_domains, "CSV domain,tokens")->required();

    auto* prompts = add_common(app.add_subcommand("prompts", "render a translation prompt"));
    std::string prompt_kind = "general", prompt_source, prompt_target;
    prompts->add_option("--kind", prompt_kind, "general|math");
    prompts->add_option("--source", prompt_source, "source language display name")->required();
    prompts->add_option("--target", prompt_target, "target language display name")->required();

    auto* jobs = add_common(app.add_subcommand("jobs", "emit translation job manifests"));
    std::string jobs_in, jobs_targets, jobs_kind = "general", jobs_registry;
    jobs->add_option("--in", jobs_in, "documents JSONL")->required();
    jobs->add_option("--targets", jobs_targets, "comma-separated target codes")->required();
    jobs->add_option("--kind", jobs_kind, "general|math");
    jobs->add_option("--registry", jobs_registry, "registry CSV (defines eligible targets)");

    auto* pack = add_common(app.add_subcommand("pack", "pack documents into fixed-length training shards"));
    std::string pack_in, pack_tok = "byte", pack_recipe = "adhoc";
    std::uint32_t pack_vocab = 1u << 20, pack_context = 16384, pack_shard = 1024;
    pack->add_option("--in", pack_in, "documents JSONL")->required();
    pack->add_option("--tokenizer", pack_tok, "byte|ws|external:<name>");
    pack->add_option("--vocab-size", pack_vocab, "vocab size for the ws tokenizer");
    pack->add_option("--context-len", pack_context, "sequence length L");
    pack->add_option("--shard-size", pack_shard, "sequences per shard");
    pack->add_option("--recipe", pack_recipe, "recipe name recorded in the manifest");
    pack->add_option("--workers", workers, "worker threads for shard serialization");

    auto* verify = add_common(app.add_subcommand("verify", "verify a shard directory against its manifest"));
    std::string verify_dir;
    verify->add_option("--dir", verify_dir, "shard directory")->required();

    auto* planrun = add_common(app.add_subcommand("plan-run", "run accounting: steps, LR schedule, FLOPs, MFU"));
    std::uint64_t pr_tokens = 0, pr_batch = 4194304;
    double pr_peak_lr = 5e-5, pr_min_rate = 0.01, pr_warmup = 0.001, pr_params = 0, pr_hours = 0,
           pr_peak_tflops = 989.0;
    std::uint32_t pr_gpus = 0;
    std::string pr_csv_out;
    planrun->add_option("--tokens", pr_tokens, "total training tokens")->required();
    planrun->add_option("--batch-tokens", pr_batch, "global batch size in tokens");
    planrun->add_option("--peak-lr", pr_peak_lr, "peak learning rate");
    planrun->add_option("--min-lr-rate", pr_min_rate, "min LR as a fraction of peak");
    planrun->add_option("--warmup-ratio", pr_warmup, "warmup fraction of total steps");
    planrun->add_option("--params", pr_params, "non-embedding parameters (enables FLOPs)");
    planrun->add_option("--hours", pr_hours, "wall-clock hours (enables TFLOPS/MFU)");
    planrun->add_option("--gpus", pr_gpus, "GPU count");
    planrun->add_option("--peak-tflops", pr_peak_tflops, "per-GPU peak TFLOPS");
    planrun->add_option("--csv-out", pr_csv_out, "also write the run card as CSV");

    auto* score = add_common(app.add_subcommand("score", "chrF / chrF++ / d-chrF over aligned text files"));
    std::string score_metric = "chrf", score_hyp, score_ref;
    int score_char_order = 6, score_word_order = 2;
    double score_beta = 2.0;
    std::size_t score_doc_k = 0;
    score->add_option("metric", score_metric, "metric name (chrf)");
    score->add_option("--hyp", score_hyp, "hypothesis file, one segment per line")->required();
    score->add_option("--ref", score_ref, "reference file, one segment per line")->required();
    score->add_option("--char-order", score_char_order, "max char n-gram order");
    score->add_option("--word-order", score_word_order, "max word n-gram order (0 = plain chrF)");
    score->add_option("--beta", score_beta, "recall weight");
    score->add_option("--doc-k", score_doc_k, "group lines into pseudo-documents of k sentences");

    auto* aggregate = add_common(app.add_subcommand("aggregate", "language-group score averages"));
    std::string agg_scores, agg_registry, agg_exclude;
    bool agg_task_first = false;
    aggregate->add_option("--scores", agg_scores, "score table CSV")->required();
    aggregate->add_option("--registry", agg_registry, "registry CSV (defines groups)")->required();
    aggregate->add_option("--exclude", agg_exclude, "comma-separated tasks to exclude");
    aggregate->add_flag("--per-task-first", agg_task_first, "average languages within tasks first");

    auto* report = add_common(app.add_subcommand("report", "overall averages and base-vs-adapted deltas"));
    std::string rep_scores, rep_pairs;
    report->add_option("--scores", rep_scores, "score table CSV")->required();
    report->add_option("--pairs", rep_pairs, "comma-separated base:adapted model pairs");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        std::uint64_t effective_seed = seed_or_env(seed, seed_set);
        if (stats->parsed()) return cmd_stats(stats_in, stats_tok, stats_vocab, workers, out);
        if (select->parsed()) return cmd_select(sel_registry, sel_threshold, out);
        if (plan->parsed())
            return cmd_plan(plan_registry, plan_budget, plan_epoch_cap, plan_threshold, plan_against,
                            plan_tolerance, plan_doc_index, plan_schedule_out, effective_seed, workers, out);
        if (compile->parsed()) {
            if (config_path.empty()) throw DomainError("compile needs --config");
            return cmd_compile(compile_registry, config_path, effective_seed, seed_set, out);
        }
        if (filter->parsed())
            return cmd_filter_parallel(filter_in, filter_tau, filter_scorer, filter_tok, filter_vocab,
                                       workers, out, filter_stats_out);
        if (quota->parsed()) return cmd_synth_quota(quota_langs, quota_domains, out);
        if (prompts->parsed()) return cmd_prompts(prompt_kind, prompt_source, prompt_target, out);
        if (jobs->parsed()) return cmd_jobs(jobs_in, jobs_targets, jobs_kind, jobs_registry, out);
        if (pack->parsed()) {
            if (out.empty()) throw DomainError("pack needs --out <directory>");
            if (!config_path.empty()) {
                auto cfg = PipelineConfig::from_json_file(config_path);
                if (!pack->count("--context-len")) pack_context = cfg.context_len;
                if (!pack->count("--recipe")) pack_recipe = cfg.recipe.name;
                if (!seed_set) effective_seed = cfg.seed;
            }
            return cmd_pack(pack_in, pack_tok, pack_vocab, pack_context, pack_shard, pack_recipe,
                            effective_seed, workers, out);
        }
        if (verify->parsed()) return cmd_verify(verify_dir, out);
        if (planrun->parsed())
            return cmd_plan_run(pr_tokens, pr_batch, pr_peak_lr, pr_min_rate, pr_warmup, pr_params, pr_hours,
                                pr_gpus, pr_peak_tflops, out, pr_csv_out);
        if (score->parsed())
            return cmd_score(score_metric, score_hyp, score_ref, score_char_order, score_word_order,
                             score_beta, score_doc_k, out);
        if (aggregate->parsed()) return cmd_aggregate(agg_scores, agg_registry, agg_exclude, agg_task_first, out);
        if (report->parsed()) return cmd_report(rep_scores, rep_pairs, out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
