#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "electwit/ids.hpp"
#include "electwit/platform.hpp"

namespace electwit {

struct PostAction {
    std::string text;
    bool operator==(const PostAction&) const = default;
};

struct ReplyAction {
    ItemId target;
    std::string text;
    bool operator==(const ReplyAction&) const = default;
};

struct LikeAction {
    ItemId target;
    bool operator==(const LikeAction&) const = default;
};

struct NoAction {
    bool operator==(const NoAction&) const = default;
};

using AgentAction = std::variant<PostAction, ReplyAction, LikeAction, NoAction>;

const char* action_type_name(const AgentAction& a);

/// One response element that did not become an action.
struct ActionDrop {
    std::size_t index = 0;       // position in the response array
    std::string action_type;     // "post", "reply", "like" or "unknown"
    RejectReason reason = RejectReason::Malformed;
    std::string detail;
    std::optional<std::string> raw_target;
};

struct ParsedActions {
    std::vector<AgentAction> actions;
    std::vector<ActionDrop> drops;
    std::optional<std::string> note;  // free-form diary note, if the model gave one
    bool found_array = false;
};

/// Extracts the first JSON array in `raw` whose text parses, keeps elements
/// matching {"type": "post"|"reply"|"like", "text"?, "target_id"?} and drops
/// the rest individually. Valid actions beyond `budget` are dropped as
/// over_budget. An element {"type": "note", "text": ...} is taken as the
/// diary note and is neither an action nor a drop. Never throws.
ParsedActions parse_actions(std::string_view raw, std::size_t budget);

struct VoteDecision {
    std::optional<AgentId> candidate;  // empty = abstain

    bool abstained() const noexcept { return !candidate.has_value(); }
    static VoteDecision abstain() { return {}; }
    static VoteDecision vote_for(AgentId id) { return {std::move(id)}; }

    bool operator==(const VoteDecision&) const = default;
};

struct CandidateRef {
    AgentId id;
    std::string name;
};

struct VoteParse {
    VoteDecision decision;
    bool parsed = false;          // a {"vote": ...} object was found
    bool rule_violation = false;  // abstained although the vote was forced
    std::optional<std::string> note;
    std::string raw_choice;
};

/// Reads {"vote": "<candidate>"|"abstain"}. The choice matches a candidate's
/// display name or id, case-insensitively; anything else is an abstention.
VoteParse parse_vote(std::string_view raw, std::span<const CandidateRef> candidates, bool forced);

/// Locates the first balanced JSON value opening with `open` ('[' or '{')
/// that parses; returns its text.
std::optional<std::string> find_first_json(std::string_view raw, char open);

}  // namespace electwit
