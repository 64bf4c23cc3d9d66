#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "electwit/actions.hpp"
#include "electwit/ids.hpp"

namespace electwit {

enum class EventKind { Spontaneous, ForcedScandal };

/// News item injected by the eventor. Events never appear in the feed;
/// they reach agents through a separate prompt section.
struct Event {
    ItemId id{ItemKind::Event, 0};
    SimTime time;
    std::string text;
    EventKind kind = EventKind::Spontaneous;
    std::optional<AgentId> target;  // scandal target

    bool operator==(const Event&) const = default;
};

/// Result of one polling round, as stored by the poll manager.
struct PollSnapshot {
    int day = 0;
    bool forced = false;
    std::map<AgentId, int> tallies;  // every candidate present, zero included
    int abstentions = 0;
    std::map<AgentId, VoteDecision> per_voter;

    int polled() const noexcept {
        int n = abstentions;
        for (const auto& [_, c] : tallies) n += c;
        return n;
    }

    bool operator==(const PollSnapshot&) const = default;
};

}  // namespace electwit
