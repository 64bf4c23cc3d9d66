#include <filesystem>
#include <iostream>
#include <set>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "electwit/analysis.hpp"
#include "electwit/cli.hpp"
#include "electwit/engine.hpp"

namespace electwit {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

constexpr const char* kRunLogName = "runlog.json";

void apply_globals(SimConfig& c, const GlobalOptions& g) {
    if (g.log_prompts) c.log_prompts = true;
    if (g.parallel) c.parallel = *g.parallel;
}

std::set<ModelId> models_of(const SimConfig& c) {
    std::set<ModelId> out(c.models.candidates.begin(), c.models.candidates.end());
    out.insert(c.models.voters.begin(), c.models.voters.end());
    out.insert(c.models.eventor);
    for (const auto& [_, m] : c.models.overrides) out.insert(m);
    return out;
}

/// Builds every provider the config needs and probes each once.
void preflight(ProviderRouter& router, const SimConfig& c, bool probe, std::ostream& out) {
    std::set<CompletionProvider*> probed;
    for (const auto& m : models_of(c)) {
        router.check(m);
        auto& p = router.resolve(m);
        if (probe && probed.insert(&p).second) {
            p.probe();
            fmt::print(out, "provider for {} ({}) reachable\n", m, to_string(router.backend_for(m)));
        }
    }
}

// Maps exceptions to exit codes and reports them on `err`.
template <class F>
int guarded(std::ostream& err, F&& body) {
    try {
        return body();
    } catch (const ConfigError& e) {
        fmt::print(err, "config error: {}\n", e.what());
        return kExitUsage;
    } catch (const ProviderConfigError& e) {
        fmt::print(err, "provider config error: {}\n", e.what());
        return kExitUsage;
    } catch (const LoadError& e) {
        fmt::print(err, "load error ({}): {}\n", to_string(e.kind()), e.what());
        return kExitRuntime;
    } catch (const ProviderError& e) {
        fmt::print(err, "provider error: {}\n", e.what());
        return kExitRuntime;
    } catch (const AnalysisError& e) {
        fmt::print(err, "analysis error: {}\n", e.what());
        return kExitRuntime;
    } catch (const PersistenceError& e) {
        fmt::print(err, "write error: {}\n", e.what());
        return kExitRuntime;
    } catch (const std::exception& e) {
        fmt::print(err, "error: {}\n", e.what());
        return kExitRuntime;
    }
}

RunLog run_one(const SimConfig& config, std::ostream& err, const std::string& label) {
    ProviderRouter router(config.provider);
    preflight(router, config, false, err);
    return run_simulation(config, router, [&](const std::string& line) {
        fmt::print(err, "{}{}\n", label, line);
        err.flush();
    });
}

}  // namespace

int cmd_run(const RunOptions& opts, const GlobalOptions& global, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        auto config = load_sim_config(opts.config_path);
        apply_globals(config, global);
        config.validate();
        if (global.dry_run) {
            ProviderRouter router(config.provider);
            preflight(router, config, true, out);
            fmt::print(out, "config '{}' is valid; dry run, no simulation\n", opts.config_path);
            return kExitOk;
        }
        if (opts.out_dir.empty()) throw ConfigError("--out is required");
        const auto log = run_one(config, err, "");
        fs::create_directories(opts.out_dir);
        const auto path = (fs::path(opts.out_dir) / kRunLogName).string();
        write_runlog(log, path);
        fmt::print(out, "{}\n", path);
        return kExitOk;
    });
}

int cmd_experiment(const ExperimentOptions& opts, const GlobalOptions& global, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const auto group = load_experiment_group(opts.group_path);
        auto runs = expand_group(group);
        for (auto& r : runs) {
            apply_globals(r.config, global);
            r.config.validate();
        }
        if (global.dry_run) {
            for (const auto& r : runs) {
                ProviderRouter router(r.config.provider);
                preflight(router, r.config, false, out);
                fmt::print(out, "{}: seed {} candidates {} vs {}\n", r.name, r.config.seed, r.config.models.candidates[0],
                           r.config.models.candidates[1]);
            }
            return kExitOk;
        }
        if (opts.out_dir.empty()) throw ConfigError("--out is required");
        fs::create_directories(opts.out_dir);
        json manifest{{"kind", to_string(group.kind)}, {"runs", json::array()}};
        const auto manifest_path = (fs::path(opts.out_dir) / "manifest.json").string();
        for (const auto& r : runs) {
            const auto log = run_one(r.config, err, r.name + " ");
            const auto rel = (fs::path(r.name) / kRunLogName).string();
            fs::create_directories(fs::path(opts.out_dir) / r.name);
            write_runlog(log, (fs::path(opts.out_dir) / rel).string());
            manifest["runs"].push_back({{"name", r.name},
                                        {"log", rel},
                                        {"seed", r.config.seed},
                                        {"candidate_models", r.config.models.candidates},
                                        {"config", to_json(r.config)}});
            // Rewritten after each run so it only ever lists finished logs.
            write_text_atomic(manifest_path, canonical_dump(manifest));
            fmt::print(out, "{}\n", (fs::path(opts.out_dir) / rel).string());
        }
        return kExitOk;
    });
}

int cmd_analyze(const AnalyzeOptions& opts, const GlobalOptions& global, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        if (opts.annotator.empty()) throw ConfigError("--annotator is required");
        const auto log = load_runlog(opts.log_path);
        const auto taxonomy = load_taxonomy(opts.taxonomy_path.empty() ? default_taxonomy_file() : opts.taxonomy_path);

        ProviderSettings settings = sim_config_from_json(log.config).provider;
        if (!opts.backend.empty()) {
            const auto b = backend_from_string(opts.backend);
            if (!b) throw ConfigError(fmt::format("unknown backend '{}'", opts.backend));
            settings.backend = *b;
        }
        if (!opts.script_path.empty()) settings.script_path = opts.script_path;
        ProviderRouter router(settings);
        router.check(opts.annotator);

        AnnotationOptions a;
        a.annotator = opts.annotator;
        a.cache_dir = opts.cache_dir;
        a.parallel = global.parallel.value_or(1);
        const auto result = annotate_messages(log, taxonomy, router.resolve(opts.annotator), a);
        for (const auto& w : result.warnings) fmt::print(err, "warning: {}\n", w);

        TagFile f{opts.annotator, taxonomy.labels, result.tags, result.unannotated};
        const auto path = opts.out_path.empty() ? (fs::path(opts.log_path).parent_path() / "tags.json").string()
                                                : opts.out_path;
        write_tag_file(f, path);
        fmt::print(out, "{}\n", path);
        fmt::print(err, "messages {}  tags {}  unannotated {}  calls {}  cache hits {}\n",
                   collect_messages(log).size(), result.tags.size(), result.unannotated.size(), result.provider_calls,
                   result.cache_hits);
        return result.unannotated.empty() ? kExitOk : kExitRuntime;
    });
}

int cmd_report(const ReportOptions& opts, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const auto log = load_runlog(opts.log_path);
        TagFile tags;
        if (!opts.tags_path.empty()) {
            tags = load_tag_file(opts.tags_path);
        } else {
            tags.labels = default_taxonomy().labels;
        }
        const auto files = emit_report(log, tags.tags, tags.labels, opts.out_dir);
        for (const auto& f : files) fmt::print(out, "{}\n", (fs::path(opts.out_dir) / f).string());
        if (!tags.unannotated.empty()) {
            fmt::print(err, "note: {} messages were not annotated\n", tags.unannotated.size());
        }
        return kExitOk;
    });
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Multi-agent election simulator: run, experiment, analyze, report", "electwit"};
    app.require_subcommand(1);
    app.fallthrough();

    GlobalOptions global;
    int parallel = 0;
    app.add_flag("--log-prompts", global.log_prompts, "Record raw prompts and responses in the run log");
    app.add_flag("--dry-run", global.dry_run, "Validate config and provider reachability without running");
    app.add_option("--parallel", parallel, "Concurrent provider calls per phase")->check(CLI::PositiveNumber);

    RunOptions run;
    auto* run_cmd = app.add_subcommand("run", "Run one simulation");
    run_cmd->add_option("--config", run.config_path, "Simulation config (JSON)")->required();
    run_cmd->add_option("--out", run.out_dir, "Output directory for runlog.json");

    ExperimentOptions exp;
    auto* exp_cmd = app.add_subcommand("experiment", "Expand and run an experiment group");
    exp_cmd->add_option("--group", exp.group_path, "Experiment group (JSON)")->required();
    exp_cmd->add_option("--out", exp.out_dir, "Output directory for logs and manifest.json");

    AnalyzeOptions ana;
    auto* ana_cmd = app.add_subcommand("analyze", "Annotate a run log with persuasion techniques");
    ana_cmd->add_option("--log", ana.log_path, "Run log")->required();
    ana_cmd->add_option("--taxonomy", ana.taxonomy_path, "Technique taxonomy (JSON); default: bundled");
    ana_cmd->add_option("--annotator", ana.annotator, "Annotator model id (vendor/model)")->required();
    ana_cmd->add_option("--cache", ana.cache_dir, "Annotation cache directory");
    ana_cmd->add_option("--out", ana.out_path, "Tag file to write; default: tags.json beside the log");
    ana_cmd->add_option("--backend", ana.backend, "Override provider backend: http, scripted or synthetic");
    ana_cmd->add_option("--script", ana.script_path, "Script file for the scripted backend");

    ReportOptions rep;
    auto* rep_cmd = app.add_subcommand("report", "Write CSV, DOT and SVG reports");
    rep_cmd->add_option("--log", rep.log_path, "Run log")->required();
    rep_cmd->add_option("--tags", rep.tags_path, "Tag file from analyze");
    rep_cmd->add_option("--out", rep.out_dir, "Report directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        fmt::print(err, "usage error: {}\n{}", e.what(), app.help());
        return kExitUsage;
    }
    if (parallel > 0) global.parallel = parallel;

    if (run_cmd->parsed()) return cmd_run(run, global, out, err);
    if (exp_cmd->parsed()) return cmd_experiment(exp, global, out, err);
    if (ana_cmd->parsed()) return cmd_analyze(ana, global, out, err);
    return cmd_report(rep, out, err);
}

}  // namespace electwit
