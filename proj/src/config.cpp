#include "mixforge/config.hpp"
#include "mixforge/errors.hpp"
#include "mixforge/util.hpp"

#include <nlohmann/json.hpp>

namespace mixforge {

namespace {

// nlohmann silently wraps negative integers into unsigned targets.
std::uint64_t get_u64(const nlohmann::json& j, const std::string& key) {
    const auto& v = j.at(key);
    if (!v.is_number_integer() && !v.is_number_unsigned())
        throw DomainError("config field '" + key + "' must be an integer");
    if (v.is_number_integer() && v.get<std::int64_t>() < 0)
        throw DomainError("config field '" + key + "' must be non-negative");
    return v.get<std::uint64_t>();
}

} // namespace

PipelineConfig PipelineConfig::from_json_file(const std::filesystem::path& path) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(util::read_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw DomainError("config " + path.string() + ": " + e.what());
    }

    PipelineConfig cfg;
    try {
        cfg.recipe.name = j.at("name").get<std::string>();
        cfg.budget_tokens = get_u64(j, "budget_N");
        cfg.epoch_cap = static_cast<std::uint32_t>(get_u64(j, "epoch_cap"));
        const auto& comps = j.at("components");
        cfg.recipe.include_code = comps.value("code", false);
        cfg.recipe.include_math = comps.value("math", false);
        cfg.recipe.include_synth = comps.value("synth", false);
        cfg.recipe.include_parallel = comps.value("parallel", false);
        for (const auto& [key, value] : j.at("budgets").items())
            cfg.recipe.component_budgets[key] = get_u64(j.at("budgets"), key);
        cfg.tau = j.value("tau", 0.7);
        cfg.seed = j.contains("seed") ? get_u64(j, "seed") : 0;
        cfg.context_len = j.contains("context_len") ? static_cast<std::uint32_t>(get_u64(j, "context_len")) : 16384;
        cfg.batch_tokens = j.contains("batch_tokens") ? get_u64(j, "batch_tokens") : 4194304;
    } catch (const nlohmann::json::exception& e) {
        throw DomainError("config " + path.string() + ": " + e.what());
    }
    return cfg;
}

std::string PipelineConfig::to_json() const {
    nlohmann::json j;
    j["name"] = recipe.name;
    j["budget_N"] = budget_tokens;
    j["epoch_cap"] = epoch_cap;
    j["components"] = {{"code", recipe.include_code},
                       {"math", recipe.include_math},
                       {"synth", recipe.include_synth},
                       {"parallel", recipe.include_parallel}};
    nlohmann::json budgets;
    for (const auto& [key, value] : recipe.component_budgets) budgets[key] = value;
    j["budgets"] = budgets;
    j["tau"] = tau;
    j["seed"] = seed;
    j["context_len"] = context_len;
    j["batch_tokens"] = batch_tokens;
    return j.dump();
}

} // namespace mixforge
