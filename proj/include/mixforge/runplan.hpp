#pragma once

#include <cstdint>
#include <string>

namespace mixforge {

struct RunConfig {
    std::uint64_t global_batch_tokens = 4194304; // 4 * 2^20
    double peak_lr = 5e-5;
    double min_lr_rate = 0.01;    // eta_min = peak_lr * min_lr_rate
    double warmup_ratio = 0.001;  // warmup steps = round(ratio * total)
    std::uint64_t total_steps = 0;
    // Optimizer settings carried as run-card metadata only.
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.95;
    double weight_decay = 0.1;

    void validate() const;
    std::uint64_t warmup_steps(std::uint64_t total_steps) const;
};

std::uint64_t step_count(std::uint64_t total_tokens, std::uint64_t batch_tokens); // ceil(T/G)

// Linear warmup from 0, then cosine from peak down to peak * min_lr_rate.
// Throws InvalidStep when step > total_steps.
double lr_at(std::uint64_t step, std::uint64_t total_steps, const RunConfig& config);

// Standard 6*P*T estimate over non-embedding parameters.
double estimate_flops(double nonembed_params, double total_tokens);

struct EfficiencyRecord {
    double flops_total = 0;  // FLOPs
    double wall_hours = 0;
    std::uint32_t num_gpus = 0;
    double peak_tflops_per_gpu = 989.0; // dense bf16
};

struct Throughput {
    double tflops_total = 0;
    double tflops_per_gpu = 0;
    double mfu_percent = 0;
};

Throughput throughput_and_mfu(const EfficiencyRecord& record);

struct RunCardInput {
    std::uint64_t total_tokens = 0;
    RunConfig config;
    double nonembed_params = 0; // 0 = omit FLOPs section
    double wall_hours = 0;      // 0 = omit throughput section
    std::uint32_t num_gpus = 0;
    double peak_tflops_per_gpu = 989.0;
};

std::string run_card_text(const RunCardInput& input);
std::string run_card_csv(const RunCardInput& input);

} // namespace mixforge
