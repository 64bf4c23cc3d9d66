#include <fmt/format.h>

#include "electwit/analysis.hpp"
#include "log_index.hpp"

namespace electwit {
namespace {

const std::string kUnknown = "(unknown)";

std::string model_of(const detail::LogIndex& idx, const AgentId& id) {
    const auto* p = idx.agent(id);
    return p ? p->model : kUnknown;
}

std::string role_of(const detail::LogIndex& idx, const AgentId& id) {
    const auto* p = idx.agent(id);
    return p ? std::string(to_string(p->role)) : kUnknown;
}

std::optional<double> mean(double sum, std::size_t n) {
    if (n == 0) return std::nullopt;
    return sum / static_cast<double>(n);
}

}  // namespace

const char* to_string(GroupBy g) {
    switch (g) {
        case GroupBy::Technique: return "technique";
        case GroupBy::Model: return "model";
        case GroupBy::Role: return "role";
        case GroupBy::TechniqueModel: return "technique_model";
    }
    return "?";
}

std::optional<GroupBy> group_by_from_string(std::string_view s) {
    for (auto g : {GroupBy::Technique, GroupBy::Model, GroupBy::Role, GroupBy::TechniqueModel}) {
        if (s == to_string(g)) return g;
    }
    return std::nullopt;
}

FrequencyTable tag_frequency(std::span<const PersuasionTag> tags, const RunLog& log, GroupBy group_by) {
    const detail::LogIndex idx(log);
    FrequencyTable table;
    switch (group_by) {
        case GroupBy::Technique: table.columns = {"technique"}; break;
        case GroupBy::Model: table.columns = {"model"}; break;
        case GroupBy::Role: table.columns = {"role"}; break;
        case GroupBy::TechniqueModel: table.columns = {"technique", "model"}; break;
    }
    for (const auto& t : tags) {
        const auto* author = idx.author(t.message);
        if (author == nullptr || t.message.kind == ItemKind::Event) {
            throw AnalysisError(fmt::format("tag references message {} which is not in the log", t.message.str()));
        }
        std::vector<std::string> key;
        switch (group_by) {
            case GroupBy::Technique: key = {t.technique}; break;
            case GroupBy::Model: key = {model_of(idx, *author)}; break;
            case GroupBy::Role: key = {role_of(idx, *author)}; break;
            case GroupBy::TechniqueModel: key = {t.technique, model_of(idx, *author)}; break;
        }
        ++table.counts[key];
        ++table.total;
    }
    return table;
}

ActionCounts action_counts(const RunLog& log) {
    const detail::LogIndex idx(log);
    ActionCounts out;
    for (const auto& r : log.records) {
        const auto* a = r.as<ActionRecord>();
        if (a == nullptr || !a->accepted || a->stage != ActionStage::Apply) continue;
        auto bump = [&](ActionCountRow& row) {
            switch (a->action) {
                case ActionKind::Post: ++row.posts; break;
                case ActionKind::Reply: ++row.comments; break;
                case ActionKind::Like: ++row.likes; break;
                case ActionKind::Unknown: break;
            }
        };
        if (a->action == ActionKind::Unknown) continue;
        bump(out.by_model[model_of(idx, a->agent)]);
        bump(out.by_role[role_of(idx, a->agent)]);
        bump(out.total);
    }
    return out;
}

std::vector<SimilarityDay> similarity_curves(const RunLog& log) {
    const detail::LogIndex idx(log);
    auto background = [&](const AgentId& id) -> const BackgroundVector* {
        const auto* p = idx.agent(id);
        return p && p->background ? &*p->background : nullptr;
    };

    std::vector<SimilarityDay> out;
    for (const auto& r : log.records) {
        const auto* poll = r.as<PollRecord>();
        if (poll == nullptr) continue;
        const auto& snap = poll->snapshot;
        SimilarityDay day;
        day.day = snap.day;
        day.forced = snap.forced;

        std::map<AgentId, std::pair<double, std::size_t>> per_candidate;
        double all_sum = 0.0;
        std::size_t all_n = 0;
        for (const auto& [voter, decision] : snap.per_voter) {
            if (!decision.candidate) continue;
            const auto* vb = background(voter);
            const auto* cb = background(*decision.candidate);
            if (vb == nullptr || cb == nullptr) continue;
            const double s = cosine_similarity(*vb, *cb);
            auto& acc = per_candidate[*decision.candidate];
            acc.first += s;
            ++acc.second;
            all_sum += s;
            ++all_n;
        }
        for (const auto& [candidate, tally] : snap.tallies) {
            const auto it = per_candidate.find(candidate);
            day.candidates.push_back(CandidateDayPoint{
                candidate, tally, it == per_candidate.end() ? std::nullopt : mean(it->second.first, it->second.second)});
        }
        day.voter_to_choice = mean(all_sum, all_n);
        out.push_back(std::move(day));
    }
    return out;
}

}  // namespace electwit
