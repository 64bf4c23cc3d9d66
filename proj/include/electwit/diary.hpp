#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "electwit/ids.hpp"
#include "electwit/personas.hpp"
#include "electwit/provider.hpp"

namespace electwit {

enum class DiaryKind { Action, Vote, Event, Consolidated };

const char* to_string(DiaryKind k);
std::optional<DiaryKind> diary_kind_from_string(std::string_view s);

struct DiaryEntry {
    AgentId agent;
    SimTime time;
    std::string text;
    DiaryKind kind = DiaryKind::Action;

    bool operator==(const DiaryEntry&) const = default;
};

/// Per-agent diaries. Single writer; readers take copies.
class DiaryStore {
public:
    void add(DiaryEntry entry);

    const std::vector<DiaryEntry>& entries(const AgentId& agent) const;

    /// Raw (non-consolidated) entries written on `day`.
    std::vector<DiaryEntry> day_entries(const AgentId& agent, int day) const;

    /// Prompt memory: every consolidated entry plus the raw entries of `day`.
    std::vector<DiaryEntry> memory_for(const AgentId& agent, int day) const;

    std::size_t consolidated_count(const AgentId& agent) const;

private:
    std::map<AgentId, std::vector<DiaryEntry>> by_agent_;
};

inline constexpr std::string_view kNoActivityText = "No activity recorded today.";

struct Consolidation {
    DiaryEntry entry;
    bool provider_called = false;
    bool fallback = false;
    int retries = 0;
    std::string error;    // provider error message when fallback is set
    std::string prompt;   // the summarization prompt, empty if no call
    std::string response;
};

CompletionRequest build_consolidation_prompt(const AgentProfile& profile, int day,
                                             std::span<const DiaryEntry> entries);

/// Summarizes one agent-day with the agent's own model. An empty day yields
/// kNoActivityText without a call. On provider failure the entry texts are
/// concatenated verbatim, in order, and `fallback` is set.
Consolidation consolidate_diary(const AgentProfile& profile, int day, std::span<const DiaryEntry> entries,
                                CompletionProvider& summarizer, SimTime stamp);

}  // namespace electwit
