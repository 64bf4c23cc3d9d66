#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "electwit/actions.hpp"
#include "electwit/diary.hpp"
#include "electwit/personas.hpp"
#include "electwit/platform.hpp"
#include "electwit/provider.hpp"
#include "electwit/scenario.hpp"

namespace electwit {

/// Fixed facts about the run that every prompt repeats.
struct ScenarioView {
    std::vector<CandidateRef> candidates;
    SimTime now;
    int days = 8;
    int hours_per_day = 9;
};

inline constexpr std::string_view kEmptyFeedMarker = "(the feed is empty)";
inline constexpr std::string_view kNoDiaryMarker = "(no diary entries yet)";
inline constexpr std::string_view kNoEventsMarker = "(no events today)";
inline constexpr std::string_view kNoPollsMarker = "(no polls yet)";

struct TurnPromptInputs {
    const AgentProfile& profile;
    const Feed& feed;
    std::span<const Event> events_today;
    std::span<const PollSnapshot> polls;
    std::span<const DiaryEntry> diary;
    std::size_t budget = 0;
    const ScenarioView& scenario;
};

/// Sections, in order: role and rules (system prompt), background, events,
/// poll standings, feed, diary, response format.
CompletionRequest build_turn_prompt(const TurnPromptInputs& in);

struct VotePromptInputs {
    const AgentProfile& profile;
    const Feed& feed;
    std::span<const Event> events_today;
    std::span<const PollSnapshot> polls;
    std::span<const DiaryEntry> diary;
    bool forced = false;
    const ScenarioView& scenario;
};

CompletionRequest build_vote_prompt(const VotePromptInputs& in);

struct EventPromptInputs {
    const AgentProfile& eventor;
    const Feed& feed;
    std::span<const Event> previous_events;
    std::span<const PollSnapshot> polls;
    std::optional<CandidateRef> scandal_target;
    const ScenarioView& scenario;
};

CompletionRequest build_event_prompt(const EventPromptInputs& in);

/// Event text from an eventor response: the "event" field of the first JSON
/// object if present, otherwise the trimmed response.
std::string parse_event_text(std::string_view raw);

std::string render_polls(std::span<const PollSnapshot> polls, std::span<const CandidateRef> candidates);

}  // namespace electwit
