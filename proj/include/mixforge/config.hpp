#pragma once

#include "mixforge/mixture.hpp"

#include <cstdint>
#include <filesystem>
#include <string>

namespace mixforge {

// The on-disk recipe config: everything a full compile-and-pack run needs.
struct PipelineConfig {
    Recipe recipe;
    std::uint64_t budget_tokens = 0;
    std::uint32_t epoch_cap = 4;
    double tau = 0.7;
    std::uint64_t seed = 0;
    std::uint32_t context_len = 16384;
    std::uint64_t batch_tokens = 4194304;

    static PipelineConfig from_json_file(const std::filesystem::path& path);
    std::string to_json() const; // effective-config echo for output manifests
};

} // namespace mixforge
