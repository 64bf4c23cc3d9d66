#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "electwit/config.hpp"

namespace electwit {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

enum class GroupKind { SameSeed, DifferentSeed };

const char* to_string(GroupKind k);

/// SameSeed keeps base.seed and runs every ordered pair of distinct
/// candidate models; DifferentSeed keeps the model plan and runs each seed.
struct ExperimentGroup {
    GroupKind kind = GroupKind::SameSeed;
    std::vector<ModelId> candidate_models;  // SameSeed
    std::vector<std::uint64_t> seeds;       // DifferentSeed
    SimConfig base;
};

struct ExperimentRun {
    std::string name;  // run-01, run-02, ...
    SimConfig config;
};

/// {"kind": "same_seed"|"different_seed", "candidate_models": [...],
///  "seeds": [...], "base": {SimConfig}}. Throws ConfigError.
ExperimentGroup experiment_group_from_json(const nlohmann::json& j, const std::string& base_dir = "");
ExperimentGroup load_experiment_group(const std::string& path);

/// Throws ConfigError for fewer than two candidate models, no seeds, or
/// duplicates.
std::vector<ExperimentRun> expand_group(const ExperimentGroup& group);

struct GlobalOptions {
    bool log_prompts = false;
    bool dry_run = false;
    std::optional<int> parallel;
};

struct RunOptions {
    std::string config_path;
    std::string out_dir;
};

struct ExperimentOptions {
    std::string group_path;
    std::string out_dir;
};

struct AnalyzeOptions {
    std::string log_path;
    std::string taxonomy_path;  // empty = bundled default
    ModelId annotator;
    std::string cache_dir;
    std::string out_path;       // empty = tags.json beside the log
    std::string backend;        // empty = the run's provider backend
    std::string script_path;    // scripted annotator responses
};

struct ReportOptions {
    std::string log_path;
    std::string tags_path;  // empty = no tags
    std::string out_dir;
};

/// Each command reports diagnostics on `err` and returns an exit code:
/// 0 ok, 1 runtime failure, 2 usage or configuration error.
int cmd_run(const RunOptions& opts, const GlobalOptions& global, std::ostream& out, std::ostream& err);
int cmd_experiment(const ExperimentOptions& opts, const GlobalOptions& global, std::ostream& out, std::ostream& err);
int cmd_analyze(const AnalyzeOptions& opts, const GlobalOptions& global, std::ostream& out, std::ostream& err);
int cmd_report(const ReportOptions& opts, std::ostream& out, std::ostream& err);

/// Parses arguments and dispatches to a command.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace electwit
