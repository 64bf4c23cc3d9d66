#include <json.hpp>

#include "electwit/actions.hpp"
#include "electwit/text.hpp"

namespace electwit {
namespace {

using nlohmann::json;

// End index (exclusive) of the bracketed value starting at `start`, or npos.
std::size_t match_bracket(std::string_view s, std::size_t start) {
    int depth = 0;
    bool in_string = false;
    for (std::size_t i = start; i < s.size(); ++i) {
        const char ch = s[i];
        if (in_string) {
            if (ch == '\\') {
                ++i;
            } else if (ch == '"') {
                in_string = false;
            }
            continue;
        }
        if (ch == '"') {
            in_string = true;
        } else if (ch == '[' || ch == '{') {
            ++depth;
        } else if (ch == ']' || ch == '}') {
            if (--depth == 0) return i + 1;
        }
    }
    return std::string_view::npos;
}

std::optional<json> parse_json(std::string_view s) {
    auto j = json::parse(s.begin(), s.end(), nullptr, /*allow_exceptions=*/false);
    if (j.is_discarded()) return std::nullopt;
    return j;
}

bool has_object(const json& arr) {
    for (const auto& e : arr) {
        if (e.is_object()) return true;
    }
    return false;
}

std::optional<std::string> string_field(const json& obj, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end() || !it->is_string()) return std::nullopt;
    return text::sanitize_utf8(it->get<std::string>());
}

}  // namespace

const char* action_type_name(const AgentAction& a) {
    struct Visitor {
        const char* operator()(const PostAction&) const { return "post"; }
        const char* operator()(const ReplyAction&) const { return "reply"; }
        const char* operator()(const LikeAction&) const { return "like"; }
        const char* operator()(const NoAction&) const { return "none"; }
    };
    return std::visit(Visitor{}, a);
}

std::optional<std::string> find_first_json(std::string_view raw, char open) {
    for (std::size_t pos = raw.find(open); pos != std::string_view::npos; pos = raw.find(open, pos + 1)) {
        const auto end = match_bracket(raw, pos);
        if (end == std::string_view::npos) continue;
        const auto candidate = raw.substr(pos, end - pos);
        auto j = parse_json(candidate);
        if (!j) continue;
        if ((open == '[' && j->is_array()) || (open == '{' && j->is_object())) return std::string(candidate);
    }
    return std::nullopt;
}

ParsedActions parse_actions(std::string_view raw, std::size_t budget) {
    ParsedActions out;

    // Prefer the first array that holds objects; fall back to the first array.
    std::optional<json> chosen;
    for (std::size_t pos = raw.find('['); pos != std::string_view::npos; pos = raw.find('[', pos + 1)) {
        const auto end = match_bracket(raw, pos);
        if (end == std::string_view::npos) continue;
        auto j = parse_json(raw.substr(pos, end - pos));
        if (!j || !j->is_array()) continue;
        if (has_object(*j)) {
            chosen = std::move(j);
            break;
        }
        if (!chosen) chosen = std::move(j);
    }
    if (!chosen) return out;
    out.found_array = true;

    std::size_t index = 0;
    for (const auto& el : *chosen) {
        const auto i = index++;
        ActionDrop drop;
        drop.index = i;
        drop.action_type = "unknown";
        if (!el.is_object()) {
            drop.detail = "element is not an object";
            out.drops.push_back(std::move(drop));
            continue;
        }
        const auto type = string_field(el, "type");
        const auto kind = type ? text::to_lower_ascii(text::trim(*type)) : std::string{};
        if (kind == "note") {
            if (auto note = string_field(el, "text"); note && !out.note) out.note = std::move(note);
            continue;
        }
        if (kind != "post" && kind != "reply" && kind != "like") {
            drop.detail = type ? "unknown action type '" + *type + "'" : "missing action type";
            out.drops.push_back(std::move(drop));
            continue;
        }
        drop.action_type = kind;

        std::optional<ItemId> target;
        if (kind != "post") {
            const auto raw_target = string_field(el, "target_id");
            if (raw_target) {
                drop.raw_target = raw_target;
                target = ItemId::parse(text::trim(*raw_target));
            }
            if (!target) {
                drop.reason = RejectReason::InvalidTarget;
                drop.detail = raw_target ? "target_id is not a valid item id" : "missing target_id";
                out.drops.push_back(std::move(drop));
                continue;
            }
        }
        std::optional<std::string> body;
        if (kind != "like") {
            body = string_field(el, "text");
            if (!body) {
                drop.detail = "missing text";
                out.drops.push_back(std::move(drop));
                continue;
            }
        }
        if (out.actions.size() >= budget) {
            drop.reason = RejectReason::OverBudget;
            drop.detail = "exceeds remaining action budget";
            out.drops.push_back(std::move(drop));
            continue;
        }
        if (kind == "post") {
            out.actions.emplace_back(PostAction{std::move(*body)});
        } else if (kind == "reply") {
            out.actions.emplace_back(ReplyAction{*target, std::move(*body)});
        } else {
            out.actions.emplace_back(LikeAction{*target});
        }
    }
    return out;
}

VoteParse parse_vote(std::string_view raw, std::span<const CandidateRef> candidates, bool forced) {
    VoteParse out;
    for (std::size_t pos = raw.find('{'); pos != std::string_view::npos; pos = raw.find('{', pos + 1)) {
        const auto end = match_bracket(raw, pos);
        if (end == std::string_view::npos) continue;
        auto j = parse_json(raw.substr(pos, end - pos));
        if (!j || !j->is_object()) continue;
        const auto vote = string_field(*j, "vote");
        if (!vote) continue;
        out.parsed = true;
        out.raw_choice = *vote;
        out.note = string_field(*j, "note");
        const auto choice = text::to_lower_ascii(text::trim(*vote));
        for (const auto& c : candidates) {
            if (choice == text::to_lower_ascii(c.name) || choice == text::to_lower_ascii(c.id.str())) {
                out.decision = VoteDecision::vote_for(c.id);
                break;
            }
        }
        break;
    }
    out.rule_violation = forced && out.decision.abstained();
    return out;
}

}  // namespace electwit
