#pragma once

#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "electwit/config.hpp"
#include "electwit/diary.hpp"
#include "electwit/personas.hpp"
#include "electwit/platform.hpp"
#include "electwit/prompts.hpp"
#include "electwit/providers.hpp"
#include "electwit/rng.hpp"
#include "electwit/runlog.hpp"
#include "electwit/scenario.hpp"

namespace electwit {

/// Stores poll results and serves them to prompts. Not an agent.
class PollManager {
public:
    void record(PollSnapshot snapshot);
    const std::vector<PollSnapshot>& history() const noexcept { return history_; }
    const PollSnapshot* latest() const { return history_.empty() ? nullptr : &history_.back(); }

private:
    std::vector<PollSnapshot> history_;
};

struct ScandalTarget {
    AgentId target;
    std::optional<std::string> flag;  // "tie_tiebreak" or "no_poll_tiebreak"
};

/// Leader of the latest poll; ties and the no-poll case go to the smallest
/// candidate id.
ScandalTarget trigger_scandal(const PollSnapshot* latest, std::span<const CandidateRef> candidates);

/// One Bernoulli(chance_to_act) draw per agent, in the order given.
std::vector<bool> draw_gates(Rng& rng, std::span<const AgentProfile> agents);

struct HourSummary {
    SimTime time;
    std::size_t acting = 0;
    std::size_t accepted = 0;
    std::size_t rejected = 0;
    bool event = false;
};

using ProgressSink = std::function<void(const std::string&)>;

/// Orchestrates one run. State mutation is single-threaded; with
/// config.parallel > 1 the provider calls of one phase overlap, and their
/// results are applied in ascending AgentId order.
class Simulation {
public:
    /// Generates the population from config.seed and the name pool.
    Simulation(SimConfig config, ProviderRouter& providers, std::span<const std::string> names);

    /// Uses the given population as is (models and chances already set).
    /// The RNG is still seeded from config.seed.
    Simulation(SimConfig config, ProviderRouter& providers, std::vector<AgentProfile> population);

    void set_progress(ProgressSink sink) { progress_ = std::move(sink); }

    /// All days: hour steps, end-of-day poll (forced on the last day) and
    /// diary consolidation.
    void run();

    HourSummary hour_step(SimTime time);
    PollSnapshot daily_vote(int day, bool forced);
    void consolidate_day(int day);

    const RunLog& log() const noexcept { return log_; }
    RunLog take_log() { return std::move(log_); }
    const Platform& platform() const noexcept { return platform_; }
    const DiaryStore& diaries() const noexcept { return diaries_; }
    const PollManager& polls() const noexcept { return polls_; }
    const std::vector<Event>& events() const noexcept { return events_; }
    const std::vector<AgentProfile>& population() const noexcept { return population_; }
    const Rng& rng() const noexcept { return rng_; }

private:
    struct CallOutcome {
        std::optional<Completion> completion;
        std::string error;
        int retries = 0;
    };

    void init();
    Record& push(SimTime time, Phase phase, RecordBody body);
    CallOutcome call(const CompletionRequest& request);
    std::vector<CallOutcome> call_all(const std::vector<CompletionRequest>& requests);
    void log_call(SimTime time, Phase phase, const AgentProfile& agent, CallPurpose purpose,
                  const CompletionRequest& request, const CallOutcome& outcome);
    bool run_eventor(SimTime time, bool forced);
    std::size_t budget_for(const AgentProfile& agent) const;
    ScenarioView scenario(SimTime now) const;
    std::vector<Event> events_on(int day) const;

    SimConfig config_;
    ProviderRouter& providers_;
    Rng rng_;
    std::vector<AgentProfile> population_;  // ascending AgentId
    std::vector<CandidateRef> candidates_;
    Platform platform_;
    DiaryStore diaries_;
    PollManager polls_;
    std::vector<Event> events_;
    std::map<AgentId, std::size_t> accepted_total_;
    RunLog log_;
    std::uint64_t next_seq_ = 0;
    ProgressSink progress_;
};

/// Loads the name pool, runs every day and returns the log.
RunLog run_simulation(const SimConfig& config, ProviderRouter& providers, ProgressSink progress = {});

}  // namespace electwit
