#include <fstream>

#include <fmt/format.h>

#include "electwit/providers.hpp"

namespace electwit {

using nlohmann::json;

ScriptedProvider::ScriptedProvider(std::vector<ScriptEntry> entries, std::map<CallPurpose, std::string> defaults)
    : entries_(std::move(entries)), defaults_(std::move(defaults)) {}

void ScriptedProvider::add(ScriptEntry entry) { entries_.push_back(std::move(entry)); }

void ScriptedProvider::set_default(CallPurpose purpose, std::string response) {
    defaults_[purpose] = std::move(response);
}

ScriptedProvider ScriptedProvider::from_json(const json& script) {
    if (!script.is_object()) throw ProviderConfigError("script must be a JSON object");
    ScriptedProvider out;
    if (auto it = script.find("defaults"); it != script.end()) {
        for (const auto& [key, value] : it->items()) {
            const auto purpose = call_purpose_from_string(key);
            if (!purpose) throw ProviderConfigError(fmt::format("script defaults: unknown purpose '{}'", key));
            out.defaults_[*purpose] = value.is_string() ? value.get<std::string>() : value.dump();
        }
    }
    if (auto it = script.find("entries"); it != script.end()) {
        if (!it->is_array()) throw ProviderConfigError("script entries must be an array");
        for (const auto& row : *it) {
            ScriptEntry e;
            try {
                if (row.contains("agent")) e.agent = AgentId(row.at("agent").get<std::string>());
                if (row.contains("day")) e.day = row.at("day").get<int>();
                if (row.contains("hour")) e.hour = row.at("hour").get<int>();
                if (row.contains("subject")) e.subject = row.at("subject").get<std::string>();
                if (row.contains("purpose")) {
                    e.purpose = call_purpose_from_string(row.at("purpose").get<std::string>());
                    if (!e.purpose) throw ProviderConfigError("unknown purpose");
                }
                if (row.contains("response")) {
                    const auto& r = row.at("response");
                    // Structured responses are stored as their compact JSON text.
                    e.response = r.is_string() ? r.get<std::string>() : r.dump();
                }
                e.echo = row.value("echo", false);
                if (row.contains("error")) e.error = row.at("error").get<int>();
            } catch (const json::exception& ex) {
                throw ProviderConfigError(fmt::format("script entry {}: {}", row.dump(), ex.what()));
            }
            out.entries_.push_back(std::move(e));
        }
    }
    return out;
}

ScriptedProvider ScriptedProvider::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ProviderConfigError(fmt::format("cannot open script file '{}'", path));
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded()) throw ProviderConfigError(fmt::format("script file '{}' is not valid JSON", path));
    return from_json(j);
}

Completion ScriptedProvider::complete(const CompletionRequest& request) {
    ++calls_;
    const auto& tag = request.tag;
    const ScriptEntry* best = nullptr;
    int best_score = -1;
    for (const auto& e : entries_) {
        if (e.agent && *e.agent != tag.agent) continue;
        if (e.day && *e.day != tag.time.day) continue;
        if (e.hour && *e.hour != tag.time.hour) continue;
        if (e.purpose && *e.purpose != tag.purpose) continue;
        if (e.subject && *e.subject != tag.subject) continue;
        const int score = int{e.agent.has_value()} + int{e.day.has_value()} + int{e.hour.has_value()} +
                          int{e.purpose.has_value()} + int{e.subject.has_value()};
        if (score > best_score) {
            best = &e;
            best_score = score;
        }
    }
    if (best) {
        if (best->error) throw ProviderError(fmt::format("scripted failure ({})", *best->error), *best->error, 0);
        return Completion{best->echo ? request.user_prompt : best->response, 0};
    }
    if (auto it = defaults_.find(tag.purpose); it != defaults_.end()) return Completion{it->second, 0};
    throw ProviderError(fmt::format("no scripted response for {} {} {}", tag.agent.str(), to_string(tag.time),
                                    to_string(tag.purpose)),
                        404, 0);
}

}  // namespace electwit
