#pragma once

#include <map>

#include "electwit/runlog.hpp"

namespace electwit::detail {

/// Authorship lookups over one log.
struct LogIndex {
    std::map<AgentId, const AgentProfile*> agents;
    std::map<ItemId, AgentId> item_author;  // accepted posts and comments

    explicit LogIndex(const RunLog& log) {
        for (const auto& p : log.population) agents.emplace(p.id, &p);
        for (const auto& r : log.records) {
            const auto* a = r.as<ActionRecord>();
            if (a && a->accepted && a->stage == ActionStage::Apply && a->item) item_author.emplace(*a->item, a->agent);
        }
    }

    const AgentProfile* agent(const AgentId& id) const {
        auto it = agents.find(id);
        return it == agents.end() ? nullptr : it->second;
    }
    const AgentId* author(const ItemId& id) const {
        auto it = item_author.find(id);
        return it == item_author.end() ? nullptr : &it->second;
    }
};

}  // namespace electwit::detail
