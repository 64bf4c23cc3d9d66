#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "electwit/ids.hpp"
#include "electwit/personas.hpp"
#include "electwit/providers.hpp"

namespace electwit {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr const char* kDefaultEventorModel = "google/gemini-2.5-flash";

/// Which model drives which agent. Candidates take `candidates` in order
/// (c1, c2); voters cycle through `voters` round-robin by voter index;
/// `overrides` (agent id -> model) are applied last.
struct ModelPlan {
    std::vector<ModelId> candidates{"google/gemini-2.5-flash", "openai/gpt-4.1-mini"};
    std::vector<ModelId> voters{
        "openai/gpt-4.1-mini",   "google/gemini-2.5-flash", "anthropic/claude-3.5-haiku",
        "deepseek/deepseek-chat-v3-0324", "qwen/qwq-32b",   "x-ai/grok-3-mini",
        "moonshotai/kimi-k2",    "mistralai/devstral-medium",
    };
    ModelId eventor = kDefaultEventorModel;
    std::map<std::string, ModelId> overrides;

    bool operator==(const ModelPlan&) const = default;
};

struct SimConfig {
    std::uint64_t seed = 0;
    int days = 8;
    int hours_per_day = 9;
    int n_voters = 16;
    int actions_per_turn = 10;
    std::optional<int> lifetime_action_cap;  // unset = per-turn budget only
    std::vector<int> scandal_days{4, 8};
    int scandal_hour = 0;
    ModelPlan models;
    bool candidates_vote = false;
    std::map<std::string, double> chance_overrides;  // agent id or "*" -> probability
    std::string names_file;                          // empty = bundled resource
    std::size_t feed_max_posts = 0;                  // 0 = whole feed
    bool log_prompts = false;
    int parallel = 1;  // concurrent provider calls within one step
    double temperature = 0.0;
    ProviderSettings provider;

    bool operator==(const SimConfig&) const = default;

    /// Throws ConfigError describing the first violated constraint.
    void validate() const;
};

nlohmann::json to_json(const SimConfig& config);

/// Strict: unknown keys and wrong types are ConfigErrors. Missing keys keep
/// their defaults. Relative file paths are resolved against `base_dir`.
SimConfig sim_config_from_json(const nlohmann::json& j, const std::string& base_dir = "");

SimConfig load_sim_config(const std::string& path);

std::string default_names_file();

/// Applies the model plan and chance overrides to a generated population.
void apply_config_to_population(const SimConfig& config, std::vector<AgentProfile>& population);

}  // namespace electwit
