#include "mixforge/runplan.hpp"
#include "mixforge/errors.hpp"
#include "mixforge/util.hpp"

#include <cmath>
#include <numbers>

namespace mixforge {

void RunConfig::validate() const {
    if (global_batch_tokens == 0) throw DomainError("global batch must be positive");
    if (!(min_lr_rate > 0.0 && min_lr_rate < 1.0)) throw DomainError("min_lr_rate must be in (0, 1)");
    if (!(warmup_ratio >= 0.0 && warmup_ratio < 1.0)) throw DomainError("warmup_ratio must be in [0, 1)");
    if (peak_lr <= 0.0) throw DomainError("peak_lr must be positive");
}

std::uint64_t RunConfig::warmup_steps(std::uint64_t total_steps) const {
    return static_cast<std::uint64_t>(std::llround(warmup_ratio * static_cast<double>(total_steps)));
}

std::uint64_t step_count(std::uint64_t total_tokens, std::uint64_t batch_tokens) {
    if (batch_tokens == 0) throw DomainError("batch_tokens must be positive");
    return (total_tokens + batch_tokens - 1) / batch_tokens;
}

double lr_at(std::uint64_t step, std::uint64_t total_steps, const RunConfig& config) {
    config.validate();
    if (step > total_steps)
        throw InvalidStep("step " + std::to_string(step) + " beyond total " + std::to_string(total_steps));
    if (total_steps == 0) return config.peak_lr;

    const std::uint64_t warmup = config.warmup_steps(total_steps);
    if (step < warmup)
        return config.peak_lr * static_cast<double>(step) / static_cast<double>(warmup);

    const double eta_min = config.peak_lr * config.min_lr_rate;
    const double span = static_cast<double>(total_steps - warmup);
    if (span <= 0.0) return config.peak_lr;
    const double progress = static_cast<double>(step - warmup) / span;
    return eta_min + (config.peak_lr - eta_min) * (1.0 + std::cos(std::numbers::pi * progress)) / 2.0;
}

double estimate_flops(double nonembed_params, double total_tokens) {
    if (nonembed_params <= 0 || total_tokens <= 0) throw DomainError("estimate_flops needs positive inputs");
    return 6.0 * nonembed_params * total_tokens;
}

Throughput throughput_and_mfu(const EfficiencyRecord& record) {
    if (record.flops_total <= 0 || record.wall_hours <= 0 || record.num_gpus == 0 ||
        record.peak_tflops_per_gpu <= 0)
        throw DomainError("throughput_and_mfu needs positive inputs");
    Throughput t;
    t.tflops_total = record.flops_total / (record.wall_hours * 3600.0) / 1e12;
    t.tflops_per_gpu = t.tflops_total / record.num_gpus;
    t.mfu_percent = t.tflops_per_gpu / record.peak_tflops_per_gpu * 100.0;
    return t;
}

namespace {

struct CardRows {
    std::uint64_t steps = 0;
    std::uint64_t warmup = 0;
    std::vector<std::pair<std::uint64_t, double>> schedule; // decile step -> lr
    double flops = 0;
    Throughput throughput;
    bool has_flops = false, has_throughput = false;
};

CardRows card_rows(const RunCardInput& input) {
    CardRows rows;
    rows.steps = step_count(input.total_tokens, input.config.global_batch_tokens);
    rows.warmup = input.config.warmup_steps(rows.steps);
    for (int d = 0; d <= 10; ++d) {
        std::uint64_t step = rows.steps * static_cast<std::uint64_t>(d) / 10;
        rows.schedule.emplace_back(step, lr_at(step, rows.steps, input.config));
    }
    if (input.nonembed_params > 0) {
        rows.flops = estimate_flops(input.nonembed_params, static_cast<double>(input.total_tokens));
        rows.has_flops = true;
        if (input.wall_hours > 0 && input.num_gpus > 0) {
            EfficiencyRecord rec{rows.flops, input.wall_hours, input.num_gpus, input.peak_tflops_per_gpu};
            rows.throughput = throughput_and_mfu(rec);
            rows.has_throughput = true;
        }
    }
    return rows;
}

std::string sci(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.6e", v);
    return buf;
}

} // namespace

std::string run_card_text(const RunCardInput& input) {
    CardRows rows = card_rows(input);
    std::string out;
    out += "tokens:        " + util::group_digits(input.total_tokens) + "\n";
    out += "batch tokens:  " + util::group_digits(input.config.global_batch_tokens) + "\n";
    out += "steps:         " + util::group_digits(rows.steps) + "\n";
    out += "warmup steps:  " + util::group_digits(rows.warmup) + "\n";
    out += "peak lr:       " + sci(input.config.peak_lr) + "\n";
    out += "min lr:        " + sci(input.config.peak_lr * input.config.min_lr_rate) + "\n";
    out += "adam betas:    " + util::format_fixed(input.config.adam_beta1, 2) + ", " +
           util::format_fixed(input.config.adam_beta2, 2) + "\n";
    out += "weight decay:  " + util::format_fixed(input.config.weight_decay, 2) + "\n";
    out += "lr schedule (deciles):\n";
    for (const auto& [step, lr] : rows.schedule)
        out += "  step " + std::to_string(step) + ": " + sci(lr) + "\n";
    if (rows.has_flops) out += "flops (6PT):   " + sci(rows.flops) + "\n";
    if (rows.has_throughput) {
        out += "tflops total:  " + util::format_fixed(rows.throughput.tflops_total, 1) + "\n";
        out += "tflops/gpu:    " + util::format_fixed(rows.throughput.tflops_per_gpu, 1) + "\n";
        out += "mfu:           " + util::format_fixed(rows.throughput.mfu_percent, 2) + "%\n";
    }
    return out;
}

std::string run_card_csv(const RunCardInput& input) {
    CardRows rows = card_rows(input);
    std::string out = "key,value\n";
    out += "tokens," + std::to_string(input.total_tokens) + "\n";
    out += "batch_tokens," + std::to_string(input.config.global_batch_tokens) + "\n";
    out += "steps," + std::to_string(rows.steps) + "\n";
    out += "warmup_steps," + std::to_string(rows.warmup) + "\n";
    out += "peak_lr," + sci(input.config.peak_lr) + "\n";
    out += "min_lr," + sci(input.config.peak_lr * input.config.min_lr_rate) + "\n";
    for (const auto& [step, lr] : rows.schedule)
        out += "lr_at_" + std::to_string(step) + "," + sci(lr) + "\n";
    if (rows.has_flops) out += "flops," + sci(rows.flops) + "\n";
    if (rows.has_throughput) {
        out += "tflops_total," + sci(rows.throughput.tflops_total) + "\n";
        out += "tflops_per_gpu," + sci(rows.throughput.tflops_per_gpu) + "\n";
        out += "mfu_percent," + sci(rows.throughput.mfu_percent) + "\n";
    }
    return out;
}

} // namespace mixforge
