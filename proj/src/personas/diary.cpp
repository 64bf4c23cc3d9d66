#include <stdexcept>

#include <fmt/format.h>

#include "electwit/diary.hpp"
#include "electwit/text.hpp"

namespace electwit {

const char* to_string(DiaryKind k) {
    switch (k) {
        case DiaryKind::Action: return "action";
        case DiaryKind::Vote: return "vote";
        case DiaryKind::Event: return "event";
        case DiaryKind::Consolidated: return "consolidated";
    }
    return "action";
}

std::optional<DiaryKind> diary_kind_from_string(std::string_view s) {
    for (auto k : {DiaryKind::Action, DiaryKind::Vote, DiaryKind::Event, DiaryKind::Consolidated}) {
        if (s == to_string(k)) return k;
    }
    return std::nullopt;
}

void DiaryStore::add(DiaryEntry entry) { by_agent_[entry.agent].push_back(std::move(entry)); }

const std::vector<DiaryEntry>& DiaryStore::entries(const AgentId& agent) const {
    static const std::vector<DiaryEntry> kEmpty;
    auto it = by_agent_.find(agent);
    return it == by_agent_.end() ? kEmpty : it->second;
}

std::vector<DiaryEntry> DiaryStore::day_entries(const AgentId& agent, int day) const {
    std::vector<DiaryEntry> out;
    for (const auto& e : entries(agent)) {
        if (e.time.day == day && e.kind != DiaryKind::Consolidated) out.push_back(e);
    }
    return out;
}

std::vector<DiaryEntry> DiaryStore::memory_for(const AgentId& agent, int day) const {
    std::vector<DiaryEntry> out;
    for (const auto& e : entries(agent)) {
        if (e.kind == DiaryKind::Consolidated || e.time.day == day) out.push_back(e);
    }
    return out;
}

std::size_t DiaryStore::consolidated_count(const AgentId& agent) const {
    std::size_t n = 0;
    for (const auto& e : entries(agent)) n += e.kind == DiaryKind::Consolidated ? 1 : 0;
    return n;
}

CompletionRequest build_consolidation_prompt(const AgentProfile& profile, int day,
                                             std::span<const DiaryEntry> entries) {
    CompletionRequest req;
    req.model = profile.model;
    req.max_tokens = kShortMaxTokens;
    req.tag = RequestTag{profile.id, {day, entries.empty() ? 0 : entries.back().time.hour}, CallPurpose::Consolidate, {}};
    req.system_prompt = fmt::format(
        "You are {}, a {} in a simulated election on a social media platform. "
        "At the end of each day you condense your diary into a single entry that you will keep "
        "as long-term memory. Cover what you did, what you learned about the candidates and other "
        "users, and what you plan to do next. Reply with the entry text only.",
        profile.display_name, to_string(profile.role));
    std::string user = fmt::format("Your diary entries for day {}:\n", day);
    for (const auto& e : entries) {
        user += fmt::format("[{}] ({}) {}\n", clock_label(e.time.hour), to_string(e.kind), e.text);
    }
    user += "\nWrite the consolidated diary entry for this day.";
    req.user_prompt = std::move(user);
    return req;
}

Consolidation consolidate_diary(const AgentProfile& profile, int day, std::span<const DiaryEntry> entries,
                                CompletionProvider& summarizer, SimTime stamp) {
    for (const auto& e : entries) {
        if (e.agent != profile.id || e.time.day != day || e.kind == DiaryKind::Consolidated) {
            throw std::invalid_argument(
                fmt::format("consolidate_diary: entry does not belong to {} day {}", profile.id.str(), day));
        }
    }
    Consolidation out;
    out.entry = DiaryEntry{profile.id, stamp, std::string(kNoActivityText), DiaryKind::Consolidated};
    if (entries.empty()) return out;

    auto req = build_consolidation_prompt(profile, day, entries);
    req.tag.time = stamp;
    out.provider_called = true;
    out.prompt = req.system_prompt + "\n\n" + req.user_prompt;
    try {
        auto completion = summarizer.complete(req);
        out.retries = completion.retries;
        out.response = text::sanitize_utf8(completion.text);
        auto summary = text::trim(out.response);
        if (summary.empty()) throw ProviderError("empty consolidation response", 200, completion.retries);
        out.entry.text = std::move(summary);
        return out;
    } catch (const ProviderError& e) {
        out.fallback = true;
        out.error = e.what();
        out.retries = e.retries();
    }
    std::string joined;
    for (const auto& e : entries) {
        if (!joined.empty()) joined += '\n';
        joined += e.text;
    }
    out.entry.text = std::move(joined);
    return out;
}

}  // namespace electwit
