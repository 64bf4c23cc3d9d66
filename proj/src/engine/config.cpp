#include <filesystem>
#include <fstream>
#include <set>

#include <fmt/format.h>

#include "electwit/config.hpp"

namespace electwit {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

// Reads `key` from `obj` into `out` if present; wrong types become ConfigErrors.
template <class T>
void read(const json& obj, const char* key, T& out, const std::string& where) {
    auto it = obj.find(key);
    if (it == obj.end()) return;
    try {
        out = it->get<T>();
    } catch (const json::exception&) {
        throw ConfigError(fmt::format("{}{}: invalid value {}", where, key, it->dump()));
    }
}

void reject_unknown(const json& obj, const std::set<std::string>& known, const std::string& where) {
    if (!obj.is_object()) throw ConfigError(fmt::format("{}: expected an object", where.empty() ? "config" : where));
    for (const auto& [key, _] : obj.items()) {
        if (!known.contains(key)) throw ConfigError(fmt::format("unknown config key '{}{}'", where, key));
    }
}

std::string resolve_path(const std::string& path, const std::string& base_dir) {
    if (path.empty() || base_dir.empty() || fs::path(path).is_absolute()) return path;
    return (fs::path(base_dir) / path).lexically_normal().string();
}

json provider_to_json(const ProviderSettings& p) {
    return json{{"backend", to_string(p.backend)},
                {"script", p.script_path},
                {"base_url", p.base_url},
                {"api_key_env", p.api_key_env},
                {"base_url_env", p.base_url_env},
                {"max_attempts", p.max_attempts},
                {"initial_backoff_s", p.initial_backoff_s},
                {"requests_per_minute", p.requests_per_minute},
                {"timeout_s", p.timeout_s}};
}

ProviderSettings provider_from_json(const json& j, const std::string& base_dir) {
    reject_unknown(j,
                   {"backend", "script", "base_url", "api_key_env", "base_url_env", "max_attempts",
                    "initial_backoff_s", "requests_per_minute", "timeout_s"},
                   "provider.");
    ProviderSettings p;
    std::string backend = to_string(p.backend);
    read(j, "backend", backend, "provider.");
    const auto b = backend_from_string(backend);
    if (!b) throw ConfigError(fmt::format("provider.backend: unknown backend '{}'", backend));
    p.backend = *b;
    read(j, "script", p.script_path, "provider.");
    p.script_path = resolve_path(p.script_path, base_dir);
    read(j, "base_url", p.base_url, "provider.");
    read(j, "api_key_env", p.api_key_env, "provider.");
    read(j, "base_url_env", p.base_url_env, "provider.");
    read(j, "max_attempts", p.max_attempts, "provider.");
    read(j, "initial_backoff_s", p.initial_backoff_s, "provider.");
    read(j, "requests_per_minute", p.requests_per_minute, "provider.");
    read(j, "timeout_s", p.timeout_s, "provider.");
    return p;
}

}  // namespace

std::string default_names_file() { return std::string(ELECTWIT_RESOURCE_DIR) + "/names.txt"; }

void SimConfig::validate() const {
    if (days < 0) throw ConfigError("days must be >= 0");
    if (hours_per_day < 1) throw ConfigError("hours_per_day must be >= 1");
    if (n_voters < 1) throw ConfigError("n_voters must be >= 1");
    if (actions_per_turn < 1) throw ConfigError("actions_per_turn must be >= 1");
    if (lifetime_action_cap && *lifetime_action_cap < 0) throw ConfigError("lifetime_action_cap must be >= 0");
    for (int d : scandal_days) {
        if (d < 1 || d > days) throw ConfigError(fmt::format("scandal day {} is outside [1, {}]", d, days));
    }
    if (scandal_hour < 0 || scandal_hour >= hours_per_day) {
        throw ConfigError(fmt::format("scandal_hour {} is outside [0, {})", scandal_hour, hours_per_day));
    }
    if (models.candidates.size() != 2) throw ConfigError("models.candidates must name exactly 2 models");
    if (models.voters.empty()) throw ConfigError("models.voters must name at least one model");
    auto check_model = [](const ModelId& m) {
        if (!is_valid_model_id(m)) throw ConfigError(fmt::format("invalid model id '{}'", m));
    };
    for (const auto& m : models.candidates) check_model(m);
    for (const auto& m : models.voters) check_model(m);
    check_model(models.eventor);
    for (const auto& [_, m] : models.overrides) check_model(m);
    for (const auto& [who, p] : chance_overrides) {
        if (!(p >= 0.0 && p <= 1.0)) throw ConfigError(fmt::format("chance override for '{}' is outside [0, 1]", who));
    }
    if (parallel < 1) throw ConfigError("parallel must be >= 1");
    if (!(temperature >= 0.0)) throw ConfigError("temperature must be >= 0");
    if (provider.max_attempts < 1) throw ConfigError("provider.max_attempts must be >= 1");
    if (provider.backend == Backend::Scripted && provider.script_path.empty()) {
        throw ConfigError("provider.script is required for the scripted backend");
    }
}

json to_json(const SimConfig& c) {
    return json{{"seed", c.seed},
                {"days", c.days},
                {"hours_per_day", c.hours_per_day},
                {"n_voters", c.n_voters},
                {"actions_per_turn", c.actions_per_turn},
                {"lifetime_action_cap", c.lifetime_action_cap ? json(*c.lifetime_action_cap) : json(nullptr)},
                {"scandal_days", c.scandal_days},
                {"scandal_hour", c.scandal_hour},
                {"models",
                 {{"candidates", c.models.candidates},
                  {"voters", c.models.voters},
                  {"eventor", c.models.eventor},
                  {"overrides", c.models.overrides}}},
                {"candidates_vote", c.candidates_vote},
                {"chance_overrides", c.chance_overrides},
                {"names_file", c.names_file},
                {"feed_max_posts", c.feed_max_posts},
                {"log_prompts", c.log_prompts},
                {"parallel", c.parallel},
                {"temperature", c.temperature},
                {"provider", provider_to_json(c.provider)}};
}

SimConfig sim_config_from_json(const json& j, const std::string& base_dir) {
    reject_unknown(j,
                   {"seed", "days", "hours_per_day", "n_voters", "actions_per_turn", "lifetime_action_cap",
                    "scandal_days", "scandal_hour", "models", "candidates_vote", "chance_overrides", "names_file",
                    "feed_max_posts", "log_prompts", "parallel", "temperature", "provider"},
                   "");
    SimConfig c;
    read(j, "seed", c.seed, "");
    read(j, "days", c.days, "");
    read(j, "hours_per_day", c.hours_per_day, "");
    read(j, "n_voters", c.n_voters, "");
    read(j, "actions_per_turn", c.actions_per_turn, "");
    if (auto it = j.find("lifetime_action_cap"); it != j.end() && !it->is_null()) {
        int cap = 0;
        read(j, "lifetime_action_cap", cap, "");
        c.lifetime_action_cap = cap;
    }
    read(j, "scandal_days", c.scandal_days, "");
    read(j, "scandal_hour", c.scandal_hour, "");
    if (auto it = j.find("models"); it != j.end()) {
        reject_unknown(*it, {"candidates", "voters", "eventor", "overrides"}, "models.");
        read(*it, "candidates", c.models.candidates, "models.");
        read(*it, "voters", c.models.voters, "models.");
        read(*it, "eventor", c.models.eventor, "models.");
        read(*it, "overrides", c.models.overrides, "models.");
    }
    read(j, "candidates_vote", c.candidates_vote, "");
    read(j, "chance_overrides", c.chance_overrides, "");
    read(j, "names_file", c.names_file, "");
    c.names_file = resolve_path(c.names_file, base_dir);
    read(j, "feed_max_posts", c.feed_max_posts, "");
    read(j, "log_prompts", c.log_prompts, "");
    read(j, "parallel", c.parallel, "");
    read(j, "temperature", c.temperature, "");
    if (auto it = j.find("provider"); it != j.end()) c.provider = provider_from_json(*it, base_dir);
    c.validate();
    return c;
}

SimConfig load_sim_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(fmt::format("cannot open config file '{}'", path));
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded()) throw ConfigError(fmt::format("config file '{}' is not valid JSON", path));
    return sim_config_from_json(j, fs::path(path).parent_path().string());
}

void apply_config_to_population(const SimConfig& config, std::vector<AgentProfile>& population) {
    std::size_t voter_index = 0;
    std::size_t candidate_index = 0;
    for (auto& p : population) {
        switch (p.role) {
            case Role::Candidate:
                p.model = config.models.candidates.at(candidate_index++ % config.models.candidates.size());
                break;
            case Role::Voter: p.model = config.models.voters[voter_index++ % config.models.voters.size()]; break;
            case Role::Eventor: p.model = config.models.eventor; break;
        }
        if (auto it = config.models.overrides.find(p.id.str()); it != config.models.overrides.end()) {
            p.model = it->second;
        }
        if (auto it = config.chance_overrides.find("*"); it != config.chance_overrides.end()) {
            p.chance_to_act = it->second;
        }
        if (auto it = config.chance_overrides.find(p.id.str()); it != config.chance_overrides.end()) {
            p.chance_to_act = it->second;
        }
    }
}

}  // namespace electwit
