#include <algorithm>
#include <stdexcept>

#include "electwit/engine.hpp"

namespace electwit {

void PollManager::record(PollSnapshot snapshot) { history_.push_back(std::move(snapshot)); }

ScandalTarget trigger_scandal(const PollSnapshot* latest, std::span<const CandidateRef> candidates) {
    if (candidates.empty()) throw std::invalid_argument("trigger_scandal: no candidates");
    std::vector<AgentId> ids;
    for (const auto& c : candidates) ids.push_back(c.id);
    std::sort(ids.begin(), ids.end());
    if (latest == nullptr) return {ids.front(), "no_poll_tiebreak"};

    auto tally = [&](const AgentId& id) {
        auto it = latest->tallies.find(id);
        return it == latest->tallies.end() ? 0 : it->second;
    };
    int best = -1;
    std::size_t leaders = 0;
    AgentId leader;
    for (const auto& id : ids) {
        const int t = tally(id);
        if (t > best) {
            best = t;
            leader = id;
            leaders = 1;
        } else if (t == best) {
            ++leaders;
        }
    }
    if (leaders > 1) return {leader, "tie_tiebreak"};
    return {leader, std::nullopt};
}

std::vector<bool> draw_gates(Rng& rng, std::span<const AgentProfile> agents) {
    std::vector<bool> out;
    out.reserve(agents.size());
    for (const auto& a : agents) out.push_back(rng.bernoulli(a.chance_to_act));
    return out;
}

}  // namespace electwit
