#include <filesystem>
#include <fstream>
#include <set>

#include <fmt/format.h>

#include "electwit/cli.hpp"

namespace electwit {
namespace {

using json = nlohmann::json;

}  // namespace

const char* to_string(GroupKind k) { return k == GroupKind::SameSeed ? "same_seed" : "different_seed"; }

ExperimentGroup experiment_group_from_json(const json& j, const std::string& base_dir) {
    if (!j.is_object()) throw ConfigError("experiment group must be a JSON object");
    static const std::set<std::string> known{"kind", "candidate_models", "seeds", "base"};
    for (const auto& [key, _] : j.items()) {
        if (!known.contains(key)) throw ConfigError(fmt::format("experiment group: unknown key '{}'", key));
    }
    ExperimentGroup g;
    const auto kind = j.value("kind", json(""));
    if (kind == "same_seed") {
        g.kind = GroupKind::SameSeed;
    } else if (kind == "different_seed") {
        g.kind = GroupKind::DifferentSeed;
    } else {
        throw ConfigError(fmt::format("experiment group: kind must be same_seed or different_seed, got {}", kind.dump()));
    }
    try {
        if (j.contains("candidate_models")) g.candidate_models = j.at("candidate_models").get<std::vector<ModelId>>();
        if (j.contains("seeds")) g.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    } catch (const json::exception& e) {
        throw ConfigError(fmt::format("experiment group: {}", e.what()));
    }
    g.base = sim_config_from_json(j.value("base", json::object()), base_dir);
    return g;
}

ExperimentGroup load_experiment_group(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError(fmt::format("cannot open experiment group '{}'", path));
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded()) throw ConfigError(fmt::format("experiment group '{}' is not valid JSON", path));
    return experiment_group_from_json(j, std::filesystem::path(path).parent_path().string());
}

std::vector<ExperimentRun> expand_group(const ExperimentGroup& group) {
    std::vector<ExperimentRun> runs;
    auto name = [&] { return fmt::format("run-{:02}", runs.size() + 1); };
    if (group.kind == GroupKind::SameSeed) {
        const auto& models = group.candidate_models;
        if (models.size() < 2) throw ConfigError("same_seed group needs at least two candidate models");
        if (std::set<ModelId>(models.begin(), models.end()).size() != models.size()) {
            throw ConfigError("same_seed group lists a candidate model twice");
        }
        for (const auto& m : models) {
            if (!is_valid_model_id(m)) throw ConfigError(fmt::format("candidate model '{}' is not vendor/model", m));
        }
        for (std::size_t i = 0; i < models.size(); ++i) {
            for (std::size_t k = 0; k < models.size(); ++k) {
                if (i == k) continue;
                SimConfig c = group.base;
                c.models.candidates = {models[i], models[k]};
                c.validate();
                runs.push_back(ExperimentRun{name(), std::move(c)});
            }
        }
    } else {
        if (group.seeds.empty()) throw ConfigError("different_seed group needs at least one seed");
        if (std::set<std::uint64_t>(group.seeds.begin(), group.seeds.end()).size() != group.seeds.size()) {
            throw ConfigError("different_seed group lists a seed twice");
        }
        for (const auto seed : group.seeds) {
            SimConfig c = group.base;
            c.seed = seed;
            c.validate();
            runs.push_back(ExperimentRun{name(), std::move(c)});
        }
    }
    return runs;
}

}  // namespace electwit
