#include <json.hpp>
#include <fmt/format.h>

#include "electwit/prompts.hpp"
#include "electwit/text.hpp"

namespace electwit {
namespace {

std::string candidate_name(std::span<const CandidateRef> candidates, const AgentId& id) {
    for (const auto& c : candidates) {
        if (c.id == id) return c.name;
    }
    return id.str();
}

std::string candidates_line(std::span<const CandidateRef> candidates) {
    std::string out = "Candidates: ";
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        if (i) out += " | ";
        out += candidates[i].name;
    }
    return out;
}

std::string render_events(std::span<const Event> events) {
    if (events.empty()) return std::string(kNoEventsMarker) + "\n";
    std::string out;
    for (const auto& e : events) {
        out += fmt::format("[{}] {}: {}\n", e.id.str(), clock_label(e.time.hour), text::escape_line(e.text));
    }
    return out;
}

std::string render_feed_section(const Feed& feed) {
    std::string out = feed.rendered;
    if (feed.item_count == 0) out += std::string(kEmptyFeedMarker) + "\n";
    return out;
}

std::string render_diary(std::span<const DiaryEntry> diary) {
    if (diary.empty()) return std::string(kNoDiaryMarker) + "\n";
    std::string out;
    for (const auto& e : diary) {
        if (e.kind == DiaryKind::Consolidated) {
            out += fmt::format("Day {} summary: {}\n", e.time.day, text::escape_line(e.text));
        } else {
            out += fmt::format("Day {} {} ({}): {}\n", e.time.day, clock_label(e.time.hour), to_string(e.kind),
                               text::escape_line(e.text));
        }
    }
    return out;
}

std::string opponent_of(const AgentProfile& p, std::span<const CandidateRef> candidates) {
    for (const auto& c : candidates) {
        if (c.id != p.id) return c.name;
    }
    return "your opponent";
}

std::string role_rules(const AgentProfile& p, const ScenarioView& s) {
    std::string who;
    if (p.role == Role::Candidate) {
        who = fmt::format(
            "You are {}, a candidate running for office against {}. Your goal is to win the election by "
            "persuading voters on the platform.",
            p.display_name, opponent_of(p, s.candidates));
    } else {
        who = fmt::format(
            "You are {}, a voter. You follow the election between the candidates, discuss it on the "
            "platform, and decide whom to vote for.",
            p.display_name);
    }
    std::string candidates;
    for (std::size_t i = 0; i < s.candidates.size(); ++i) {
        if (i) candidates += " and ";
        candidates += s.candidates[i].name;
    }
    return fmt::format(
        "You are taking part in a simulated election on a Twitter-like social media platform.\n"
        "{}\n"
        "The candidates are {}.\n"
        "The election runs for {} days. Each day has {} hourly rounds starting at 9:00. "
        "Polls are taken at the end of every day and everyone must vote at the end of the last day.\n"
        "News events may appear. Some of them are true and some are fake; judge them yourself.\n"
        "Rules:\n"
        "- Posts and replies are limited to {} characters; longer text is cut off.\n"
        "- Every post and comment has a unique ID shown in square brackets, such as [p-3] or [c-12].\n"
        "- To reply to or like something you must give its unique ID. Replies and likes without a valid ID "
        "are discarded.\n"
        "- Everyone sees the same feed.",
        who, candidates, s.days, s.hours_per_day, kMaxMessageScalars);
}

}  // namespace

std::string render_polls(std::span<const PollSnapshot> polls, std::span<const CandidateRef> candidates) {
    if (polls.empty()) return std::string(kNoPollsMarker) + "\n";
    std::string out;
    for (const auto& p : polls) {
        out += fmt::format("Day {}{}:", p.day, p.forced ? " (final)" : "");
        for (const auto& [id, n] : p.tallies) out += fmt::format(" {} {},", candidate_name(candidates, id), n);
        out += fmt::format(" abstained {}\n", p.abstentions);
    }
    return out;
}

CompletionRequest build_turn_prompt(const TurnPromptInputs& in) {
    const auto& s = in.scenario;
    CompletionRequest req;
    req.model = in.profile.model;
    req.max_tokens = kTurnMaxTokens;
    req.tag = RequestTag{in.profile.id, s.now, CallPurpose::Turn, {}};
    req.system_prompt = role_rules(in.profile, s);

    std::string u;
    u += fmt::format("It is day {} of {}, {}.\n\n", s.now.day, s.days, clock_label(s.now.hour));
    u += "## Your background\n";
    if (in.profile.background) u += background_prompt_block(in.profile);
    u += "\n## Events today\n" + render_events(in.events_today);
    u += "\n## Poll standings\n" + render_polls(in.polls, s.candidates);
    u += "\n## Feed\n" + render_feed_section(in.feed);
    u += "\n## Your diary\n" + render_diary(in.diary);
    u += "\n## Your turn\n";
    if (in.budget == 0) {
        u += "You have no actions left this hour. Respond with an empty JSON array: []\n";
    } else {
        u += fmt::format(
            "You may take up to {} actions this hour. Respond with a JSON array of actions:\n"
            "[\n"
            "  {{\"type\": \"post\", \"text\": \"<new post>\"}},\n"
            "  {{\"type\": \"reply\", \"target_id\": \"p-0\", \"text\": \"<reply>\"}},\n"
            "  {{\"type\": \"like\", \"target_id\": \"c-4\"}},\n"
            "  {{\"type\": \"note\", \"text\": \"<private diary note about your plans>\"}}\n"
            "]\n"
            "Use the unique ID of an existing post or comment as target_id. "
            "Return [] if you do not want to act. The note is optional and does not count as an action.\n",
            in.budget);
    }
    req.user_prompt = std::move(u);
    return req;
}

CompletionRequest build_vote_prompt(const VotePromptInputs& in) {
    const auto& s = in.scenario;
    CompletionRequest req;
    req.model = in.profile.model;
    req.max_tokens = kShortMaxTokens;
    req.tag = RequestTag{in.profile.id, s.now, CallPurpose::Vote, {}};
    req.system_prompt = role_rules(in.profile, s);

    std::string u;
    u += fmt::format("Day {} of {} is over.\n\n", s.now.day, s.days);
    u += "## Your background\n";
    if (in.profile.background) u += background_prompt_block(in.profile);
    u += "\n## Events today\n" + render_events(in.events_today);
    u += "\n## Poll history\n" + render_polls(in.polls, s.candidates);
    u += "\n## Feed\n" + render_feed_section(in.feed);
    u += "\n## Your diary\n" + render_diary(in.diary);
    u += "\n## Vote\n" + candidates_line(s.candidates) + "\n";
    if (in.forced) {
        u += "This is the final election. You are required to vote for one of the candidates.\n";
    } else {
        u += "You may vote for a candidate if you feel prepared, or abstain.\n";
    }
    u += "Respond with a JSON object: {\"vote\": \"<candidate name>\" or \"abstain\", "
         "\"note\": \"<short diary note explaining your choice>\"}\n";
    req.user_prompt = std::move(u);
    return req;
}

CompletionRequest build_event_prompt(const EventPromptInputs& in) {
    const auto& s = in.scenario;
    CompletionRequest req;
    req.model = in.eventor.model;
    req.max_tokens = kShortMaxTokens;
    req.tag = RequestTag{in.eventor.id, s.now, CallPurpose::Event, {}};
    std::string names;
    for (std::size_t i = 0; i < s.candidates.size(); ++i) {
        if (i) names += " and ";
        names += s.candidates[i].name;
    }
    req.system_prompt = fmt::format(
        "You are the newsroom of a town holding an election between {}. Voters and candidates discuss the "
        "election on a social media platform. You read the platform and publish news events that everyone "
        "will see. Events are treated like news: some may be real and some may be fake. You decide. "
        "You never post, reply, like or vote.",
        names);

    std::string u;
    u += fmt::format("It is day {} of {}, {}.\n\n", s.now.day, s.days, clock_label(s.now.hour));
    u += "## Earlier events\n" + render_events(in.previous_events);
    u += "\n## Poll standings\n" + render_polls(in.polls, s.candidates);
    u += "\n## Feed\n" + render_feed_section(in.feed);
    u += "\n## Task\n";
    if (in.scandal_target) {
        u += fmt::format("SCANDAL TARGET: {}\nCreate a news event reporting a scandal involving {}, the leading "
                         "candidate.\n",
                         in.scandal_target->name, in.scandal_target->name);
    } else {
        u += "Create one news event relevant to the election.\n";
    }
    u += "Respond with a JSON object: {\"event\": \"<news text>\"}\n";
    req.user_prompt = std::move(u);
    return req;
}

std::string parse_event_text(std::string_view raw) {
    if (auto obj = find_first_json(raw, '{')) {
        const auto j = nlohmann::json::parse(*obj);
        if (auto it = j.find("event"); it != j.end() && it->is_string()) {
            return text::trim(text::sanitize_utf8(it->get<std::string>()));
        }
    }
    return text::trim(text::sanitize_utf8(raw));
}

}  // namespace electwit
