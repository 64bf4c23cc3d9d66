#include <array>
#include <set>

#include <fmt/format.h>

#include "electwit/providers.hpp"
#include "electwit/text.hpp"

namespace electwit {
namespace {

using nlohmann::json;

// splitmix64 stream seeded from the prompt hash.
class Stream {
public:
    explicit Stream(std::uint64_t seed) : state_(seed) {}
    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
    std::size_t below(std::size_t n) { return n == 0 ? 0 : static_cast<std::size_t>(next() % n); }

private:
    std::uint64_t state_;
};

template <std::size_t N>
std::string_view pick(Stream& s, const std::array<std::string_view, N>& bank) {
    return bank[s.below(N)];
}

constexpr std::array<std::string_view, 8> kTopics{
    "small business taxes", "the new zoning plan", "school funding", "the downtown clinic",
    "border policy",        "the river cleanup",   "public transit",  "housing costs",
};
constexpr std::array<std::string_view, 6> kStances{
    "is the only one with a real plan on", "keeps dodging questions about", "has been honest about",
    "needs to show the receipts on",       "finally made sense on",         "got it wrong on",
};
constexpr std::array<std::string_view, 6> kReplies{
    "Agreed, this matters.",         "Source? I have not seen that anywhere.", "That is not the whole story.",
    "Exactly what I was thinking.",  "Hard disagree, look at the numbers.",    "Good point, worth asking.",
};
constexpr std::array<std::string_view, 5> kNews{
    "The local newspaper reports the city budget is running a deficit",
    "A new survey says most residents worry about rent",
    "Factory announces 200 new jobs near the river",
    "Anonymous source claims the debate was rescheduled",
    "Storm damage closes two bridges for the week",
};
constexpr std::array<std::string_view, 4> kScandals{
    "Leaked emails suggest {} took donations from a developer",
    "Former staffer accuses {} of hiding campaign expenses",
    "Photos surface of {} meeting a lobbyist at midnight",
    "Reports claim {} misstated their business record",
};

// Text between `start` marker and the next "\n## " header.
std::string_view section(std::string_view s, std::string_view start) {
    const auto b = s.find(start);
    if (b == std::string_view::npos) return {};
    const auto from = b + start.size();
    const auto e = s.find("\n## ", from);
    return s.substr(from, e == std::string_view::npos ? std::string_view::npos : e - from);
}

std::vector<std::string> bracket_ids(std::string_view s) {
    std::vector<std::string> ids;
    for (auto pos = s.find('['); pos != std::string_view::npos; pos = s.find('[', pos + 1)) {
        const auto end = s.find(']', pos);
        if (end == std::string_view::npos) break;
        auto inner = s.substr(pos + 1, end - pos - 1);
        if (auto id = ItemId::parse(inner); id && id->kind != ItemKind::Event) ids.emplace_back(inner);
    }
    return ids;
}

std::vector<std::string> split_names(std::string_view line, std::string_view sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto p = line.find(sep, start);
        out.push_back(text::trim(line.substr(start, p == std::string_view::npos ? std::string_view::npos : p - start)));
        if (p == std::string_view::npos) break;
        start = p + sep.size();
    }
    return out;
}

std::string line_after(std::string_view s, std::string_view marker) {
    const auto b = s.find(marker);
    if (b == std::string_view::npos) return {};
    const auto from = b + marker.size();
    const auto e = s.find('\n', from);
    return std::string(s.substr(from, e == std::string_view::npos ? std::string_view::npos : e - from));
}

std::vector<std::string> candidate_names(const CompletionRequest& req) {
    auto line = line_after(req.user_prompt, "Candidates: ");
    if (!line.empty()) return split_names(line, " | ");
    line = line_after(req.system_prompt, "The candidates are ");
    if (!line.empty() && line.back() == '.') line.pop_back();
    if (!line.empty()) return split_names(line, " and ");
    return {};
}

std::string turn_response(const CompletionRequest& req, Stream& s) {
    const auto budget_line = line_after(req.user_prompt, "You may take up to ");
    if (budget_line.empty()) return "[]";
    const int budget = std::atoi(budget_line.c_str());
    const auto ids = bracket_ids(section(req.user_prompt, "## Feed\n"));
    const auto names = candidate_names(req);

    json actions = json::array();
    const auto n = std::min<std::size_t>(s.below(4), static_cast<std::size_t>(std::max(budget, 0)));
    for (std::size_t i = 0; i < n; ++i) {
        const auto r = s.below(10);
        if (ids.empty() || r < 3) {
            const auto who = names.empty() ? std::string("The mayor") : names[s.below(names.size())];
            actions.push_back({{"type", "post"},
                               {"text", fmt::format("{} {} {}.", who, pick(s, kStances), pick(s, kTopics))}});
        } else if (r < 7) {
            actions.push_back({{"type", "reply"}, {"target_id", ids[s.below(ids.size())]}, {"text", pick(s, kReplies)}});
        } else {
            actions.push_back({{"type", "like"}, {"target_id", ids[s.below(ids.size())]}});
        }
    }
    if (s.below(3) == 0) actions.push_back({{"type", "note"}, {"text", fmt::format("Keep an eye on {}.", pick(s, kTopics))}});
    return actions.dump();
}

std::string vote_response(const CompletionRequest& req, Stream& s) {
    const auto names = candidate_names(req);
    const bool forced = req.user_prompt.find("You are required to vote") != std::string::npos;
    if (names.empty() || (!forced && s.below(5) == 0)) {
        return json{{"vote", "abstain"}, {"note", "Not ready to decide yet."}}.dump();
    }
    const auto& choice = names[s.below(names.size())];
    return json{{"vote", choice}, {"note", fmt::format("{} seems closer to my views.", choice)}}.dump();
}

std::string consolidation_response(const CompletionRequest& req) {
    std::size_t entries = 0;
    std::string first;
    for (const auto& line : split_names(req.user_prompt, "\n")) {
        if (!line.empty() && line.front() == '[') {
            if (entries++ == 0) first = line;
        }
    }
    return fmt::format("Summary of {} diary entries. First: {}", entries,
                       text::truncate_scalars(first, 120).text);
}

std::string event_response(const CompletionRequest& req, Stream& s) {
    const auto target = text::trim(line_after(req.user_prompt, "SCANDAL TARGET: "));
    if (!target.empty()) return json{{"event", fmt::format(fmt::runtime(pick(s, kScandals)), target)}}.dump();
    return json{{"event", std::string(pick(s, kNews))}}.dump();
}

std::string annotation_response(const CompletionRequest& req, Stream& s) {
    std::vector<std::string> labels;
    for (const auto& line : split_names(section(req.system_prompt, "## Techniques\n"), "\n")) {
        if (line.rfind("- ", 0) != 0) continue;
        const auto colon = line.find(':');
        labels.push_back(text::trim(line.substr(2, colon == std::string::npos ? std::string::npos : colon - 2)));
    }
    std::set<std::string> chosen;
    const auto n = s.below(4);
    for (std::size_t i = 0; i < n && !labels.empty(); ++i) chosen.insert(labels[s.below(labels.size())]);
    json out = json::array();
    for (const auto& l : chosen) out.push_back(l);
    return out.dump();
}

}  // namespace

Completion SyntheticProvider::complete(const CompletionRequest& req) {
    ++calls_;
    auto h = text::fnv1a64(req.model);
    h = text::fnv1a64(req.system_prompt, h);
    h = text::fnv1a64(req.user_prompt, h);
    h = text::fnv1a64(to_string(req.tag.purpose), h);
    Stream s(h);
    switch (req.tag.purpose) {
        case CallPurpose::Turn: return {turn_response(req, s), 0};
        case CallPurpose::Vote: return {vote_response(req, s), 0};
        case CallPurpose::Consolidate: return {consolidation_response(req), 0};
        case CallPurpose::Event: return {event_response(req, s), 0};
        case CallPurpose::Annotate: return {annotation_response(req, s), 0};
        case CallPurpose::Probe: return {"ok", 0};
    }
    return {"", 0};
}

}  // namespace electwit
