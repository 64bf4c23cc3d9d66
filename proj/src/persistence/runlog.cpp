#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <tuple>

#include <fmt/format.h>

#include "electwit/runlog.hpp"

namespace electwit {

using nlohmann::json;
namespace fs = std::filesystem;

const char* to_string(Phase p) {
    switch (p) {
        case Phase::Gate: return "gate";
        case Phase::Event: return "event";
        case Phase::Turn: return "turn";
        case Phase::Vote: return "vote";
        case Phase::Consolidate: return "consolidate";
    }
    return "gate";
}

std::optional<Phase> phase_from_string(std::string_view s) {
    for (auto p : {Phase::Gate, Phase::Event, Phase::Turn, Phase::Vote, Phase::Consolidate}) {
        if (s == to_string(p)) return p;
    }
    return std::nullopt;
}

const char* to_string(ActionKind k) {
    switch (k) {
        case ActionKind::Post: return "post";
        case ActionKind::Reply: return "reply";
        case ActionKind::Like: return "like";
        case ActionKind::Unknown: return "unknown";
    }
    return "unknown";
}

std::optional<ActionKind> action_kind_from_string(std::string_view s) {
    for (auto k : {ActionKind::Post, ActionKind::Reply, ActionKind::Like, ActionKind::Unknown}) {
        if (s == to_string(k)) return k;
    }
    return std::nullopt;
}

const char* to_string(LoadErrorKind k) {
    switch (k) {
        case LoadErrorKind::Io: return "io";
        case LoadErrorKind::Malformed: return "malformed";
        case LoadErrorKind::VersionMismatch: return "version_mismatch";
        case LoadErrorKind::Ordering: return "ordering";
        case LoadErrorKind::Domain: return "domain";
    }
    return "malformed";
}

bool Record::has_flag(std::string_view f) const { return std::binary_search(flags.begin(), flags.end(), f); }

void Record::add_flag(std::string f) {
    auto it = std::lower_bound(flags.begin(), flags.end(), f);
    if (it == flags.end() || *it != f) flags.insert(it, std::move(f));
}

const char* record_type_name(const RecordBody& body) {
    struct Visitor {
        const char* operator()(const GateRecord&) const { return "hour_step"; }
        const char* operator()(const EventRecord&) const { return "event"; }
        const char* operator()(const ProviderCallRecord&) const { return "provider_call"; }
        const char* operator()(const ActionRecord&) const { return "action"; }
        const char* operator()(const DiaryRecord&) const { return "diary"; }
        const char* operator()(const VoteRecord&) const { return "vote"; }
        const char* operator()(const PollRecord&) const { return "poll"; }
    };
    return std::visit(Visitor{}, body);
}

const AgentProfile* RunLog::find_agent(const AgentId& id) const {
    for (const auto& p : population) {
        if (p.id == id) return &p;
    }
    return nullptr;
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

namespace {

std::string vote_string(const VoteDecision& d) { return d.candidate ? d.candidate->str() : "abstain"; }

VoteDecision vote_from_string(const std::string& s) {
    return s == "abstain" ? VoteDecision::abstain() : VoteDecision::vote_for(AgentId(s));
}

struct BodyWriter {
    json& out;

    void operator()(const GateRecord& r) const {
        json ids = json::array();
        for (const auto& id : r.acting) ids.push_back(id.str());
        out["acting"] = std::move(ids);
        out["draws"] = r.draws;
    }
    void operator()(const EventRecord& r) const {
        out["id"] = r.event.id.str();
        out["text"] = r.event.text;
        out["kind"] = r.event.kind == EventKind::ForcedScandal ? "scandal" : "spontaneous";
        if (r.event.target) out["target"] = r.event.target->str();
    }
    void operator()(const ProviderCallRecord& r) const {
        out["agent"] = r.agent.str();
        out["model"] = r.model;
        out["purpose"] = to_string(r.purpose);
        out["retries"] = r.retries;
        out["ok"] = r.ok;
        if (!r.error.empty()) out["error"] = r.error;
        if (r.prompt) out["prompt"] = *r.prompt;
        if (r.response) out["response"] = *r.response;
    }
    void operator()(const ActionRecord& r) const {
        out["agent"] = r.agent.str();
        out["action"] = to_string(r.action);
        out["stage"] = r.stage == ActionStage::Parse ? "parse" : "apply";
        out["accepted"] = r.accepted;
        if (r.reason) out["reason"] = to_string(*r.reason);
        if (r.item) out["item"] = r.item->str();
        if (r.target) out["target"] = r.target->str();
        if (r.raw_target) out["raw_target"] = *r.raw_target;
        if (r.text) out["text"] = *r.text;
        if (!r.detail.empty()) out["detail"] = r.detail;
    }
    void operator()(const DiaryRecord& r) const {
        out["agent"] = r.entry.agent.str();
        out["kind"] = to_string(r.entry.kind);
        out["text"] = r.entry.text;
    }
    void operator()(const VoteRecord& r) const {
        out["agent"] = r.voter.str();
        out["vote"] = vote_string(r.decision);
        out["forced"] = r.forced;
        out["parsed"] = r.parsed;
        out["raw_choice"] = r.raw_choice;
    }
    void operator()(const PollRecord& r) const {
        json tallies = json::object();
        for (const auto& [id, n] : r.snapshot.tallies) tallies[id.str()] = n;
        json per_voter = json::object();
        for (const auto& [id, d] : r.snapshot.per_voter) per_voter[id.str()] = vote_string(d);
        out["forced"] = r.snapshot.forced;
        out["tallies"] = std::move(tallies);
        out["abstentions"] = r.snapshot.abstentions;
        out["per_voter"] = std::move(per_voter);
    }
};

[[noreturn]] void malformed(const std::string& what) { throw LoadError(LoadErrorKind::Malformed, what); }
[[noreturn]] void domain(const std::string& what) { throw LoadError(LoadErrorKind::Domain, what); }

ItemId item_id_field(const json& j, const char* key) {
    auto parsed = ItemId::parse(j.at(key).get<std::string>());
    if (!parsed) domain(fmt::format("field '{}' is not an item id", key));
    return *parsed;
}

template <class T>
std::optional<T> opt(const json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end()) return std::nullopt;
    return it->get<T>();
}

RecordBody body_from_json(const std::string& type, const json& j, SimTime time) {
    if (type == "hour_step") {
        GateRecord r;
        for (const auto& id : j.at("acting")) r.acting.emplace_back(id.get<std::string>());
        r.draws = j.at("draws").get<std::uint64_t>();
        return r;
    }
    if (type == "event") {
        EventRecord r;
        r.event.id = item_id_field(j, "id");
        if (r.event.id.kind != ItemKind::Event) domain("event record id is not an event id");
        r.event.time = time;
        r.event.text = j.at("text").get<std::string>();
        const auto kind = j.at("kind").get<std::string>();
        if (kind == "scandal") {
            r.event.kind = EventKind::ForcedScandal;
        } else if (kind != "spontaneous") {
            domain(fmt::format("unknown event kind '{}'", kind));
        }
        if (auto t = opt<std::string>(j, "target")) r.event.target = AgentId(*t);
        return r;
    }
    if (type == "provider_call") {
        ProviderCallRecord r;
        r.agent = AgentId(j.at("agent").get<std::string>());
        r.model = j.at("model").get<std::string>();
        const auto purpose = call_purpose_from_string(j.at("purpose").get<std::string>());
        if (!purpose) domain("unknown call purpose");
        r.purpose = *purpose;
        r.retries = j.at("retries").get<int>();
        r.ok = j.at("ok").get<bool>();
        r.error = opt<std::string>(j, "error").value_or("");
        r.prompt = opt<std::string>(j, "prompt");
        r.response = opt<std::string>(j, "response");
        return r;
    }
    if (type == "action") {
        ActionRecord r;
        r.agent = AgentId(j.at("agent").get<std::string>());
        const auto kind = action_kind_from_string(j.at("action").get<std::string>());
        if (!kind) domain("unknown action kind");
        r.action = *kind;
        const auto stage = j.at("stage").get<std::string>();
        if (stage != "parse" && stage != "apply") domain(fmt::format("unknown action stage '{}'", stage));
        r.stage = stage == "parse" ? ActionStage::Parse : ActionStage::Apply;
        r.accepted = j.at("accepted").get<bool>();
        if (auto reason = opt<std::string>(j, "reason")) {
            r.reason = reject_reason_from_string(*reason);
            if (!r.reason) domain(fmt::format("unknown rejection reason '{}'", *reason));
        }
        if (j.contains("item")) r.item = item_id_field(j, "item");
        if (j.contains("target")) r.target = item_id_field(j, "target");
        r.raw_target = opt<std::string>(j, "raw_target");
        r.text = opt<std::string>(j, "text");
        r.detail = opt<std::string>(j, "detail").value_or("");
        if (r.accepted == r.reason.has_value()) domain("action record must carry a reason iff rejected");
        return r;
    }
    if (type == "diary") {
        DiaryRecord r;
        r.entry.agent = AgentId(j.at("agent").get<std::string>());
        r.entry.time = time;
        r.entry.text = j.at("text").get<std::string>();
        const auto kind = diary_kind_from_string(j.at("kind").get<std::string>());
        if (!kind) domain("unknown diary kind");
        r.entry.kind = *kind;
        return r;
    }
    if (type == "vote") {
        VoteRecord r;
        r.voter = AgentId(j.at("agent").get<std::string>());
        r.decision = vote_from_string(j.at("vote").get<std::string>());
        r.forced = j.at("forced").get<bool>();
        r.parsed = j.at("parsed").get<bool>();
        r.raw_choice = j.at("raw_choice").get<std::string>();
        return r;
    }
    if (type == "poll") {
        PollRecord r;
        r.snapshot.day = time.day;
        r.snapshot.forced = j.at("forced").get<bool>();
        for (const auto& [id, n] : j.at("tallies").items()) r.snapshot.tallies[AgentId(id)] = n.get<int>();
        r.snapshot.abstentions = j.at("abstentions").get<int>();
        for (const auto& [id, v] : j.at("per_voter").items()) {
            r.snapshot.per_voter[AgentId(id)] = vote_from_string(v.get<std::string>());
        }
        if (r.snapshot.polled() != static_cast<int>(r.snapshot.per_voter.size())) {
            domain("poll tallies and abstentions do not add up to the voters polled");
        }
        return r;
    }
    malformed(fmt::format("unknown record type '{}'", type));
}

}  // namespace

json to_json(const AgentProfile& p) {
    json j{{"id", p.id.str()},
           {"name", p.display_name},
           {"role", to_string(p.role)},
           {"model", p.model},
           {"chance_to_act", p.chance_to_act}};
    if (p.background) {
        j["background"] = p.background->values;
    } else {
        j["background"] = nullptr;
    }
    return j;
}

AgentProfile agent_profile_from_json(const json& j) {
    AgentProfile p;
    p.id = AgentId(j.at("id").get<std::string>());
    p.display_name = j.at("name").get<std::string>();
    const auto role = role_from_string(j.at("role").get<std::string>());
    if (!role) domain("unknown role");
    p.role = *role;
    p.model = j.at("model").get<std::string>();
    p.chance_to_act = j.at("chance_to_act").get<double>();
    if (!(p.chance_to_act >= 0.0 && p.chance_to_act <= 1.0)) domain("chance_to_act outside [0, 1]");
    const auto& bg = j.at("background");
    if (!bg.is_null()) {
        if (!bg.is_array() || bg.size() != kBackgroundDims) domain("background must have 11 components");
        BackgroundVector v;
        for (std::size_t i = 0; i < kBackgroundDims; ++i) v.values[i] = bg[i].get<int>();
        if (!v.in_range()) domain("background component outside [-100, 100]");
        p.background = v;
    }
    return p;
}

json to_json(const Record& r) {
    json j{{"seq", r.seq},
           {"day", r.time.day},
           {"hour", r.time.hour},
           {"phase", to_string(r.phase)},
           {"type", record_type_name(r.body)}};
    if (!r.flags.empty()) j["flags"] = r.flags;
    std::visit(BodyWriter{j}, r.body);
    return j;
}

json to_json(const RunLog& log) {
    json population = json::array();
    for (const auto& p : log.population) population.push_back(to_json(p));
    json records = json::array();
    for (const auto& r : log.records) records.push_back(to_json(r));
    return json{{"schema_version", log.schema_version},
                {"config", log.config},
                {"population", std::move(population)},
                {"records", std::move(records)}};
}

RunLog runlog_from_json(const json& j) {
    if (!j.is_object()) malformed("run log must be a JSON object");
    RunLog log;
    try {
        log.schema_version = j.at("schema_version").get<int>();
    } catch (const json::exception& e) {
        malformed(fmt::format("schema_version: {}", e.what()));
    }
    if (log.schema_version != kRunLogSchemaVersion) {
        throw LoadError(LoadErrorKind::VersionMismatch,
                        fmt::format("run log schema version {} is not supported (expected {})", log.schema_version,
                                    kRunLogSchemaVersion));
    }
    int hours_per_day = 0;
    try {
        log.config = j.at("config");
        if (!log.config.is_object()) malformed("config must be an object");
        hours_per_day = log.config.value("hours_per_day", 0);

        std::set<AgentId> ids;
        for (const auto& p : j.at("population")) {
            auto profile = agent_profile_from_json(p);
            if (!ids.insert(profile.id).second) domain(fmt::format("duplicate agent id '{}'", profile.id.str()));
            log.population.push_back(std::move(profile));
        }

        std::optional<std::tuple<int, int, int, std::uint64_t>> previous;
        for (const auto& rj : j.at("records")) {
            Record r;
            r.seq = rj.at("seq").get<std::uint64_t>();
            r.time = SimTime{rj.at("day").get<int>(), rj.at("hour").get<int>()};
            if (r.time.day < 1) domain(fmt::format("record {} has day {}", r.seq, r.time.day));
            if (r.time.hour < 0 || (hours_per_day > 0 && r.time.hour >= hours_per_day)) {
                domain(fmt::format("record {} has hour {}", r.seq, r.time.hour));
            }
            const auto phase = phase_from_string(rj.at("phase").get<std::string>());
            if (!phase) domain(fmt::format("record {} has an unknown phase", r.seq));
            r.phase = *phase;
            if (auto f = rj.find("flags"); f != rj.end()) {
                for (const auto& flag : *f) r.add_flag(flag.get<std::string>());
            }
            r.body = body_from_json(rj.at("type").get<std::string>(), rj, r.time);

            const std::tuple<int, int, int, std::uint64_t> key{r.time.day, r.time.hour, static_cast<int>(r.phase),
                                                               r.seq};
            if (previous && !(*previous < key)) {
                throw LoadError(LoadErrorKind::Ordering, fmt::format("record {} is out of order", r.seq));
            }
            previous = key;
            log.records.push_back(std::move(r));
        }
    } catch (const json::exception& e) {
        malformed(e.what());
    }
    return log;
}

std::string canonical_dump(const json& j) { return j.dump(-1, ' ', false, json::error_handler_t::replace); }

std::string canonical_text(const RunLog& log) { return canonical_dump(to_json(log)); }

void write_text_atomic(const std::string& path, const std::string& contents) {
    const fs::path target(path);
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw PersistenceError(fmt::format("cannot write '{}': cannot open temp file", path));
        out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
        out.flush();
        if (!out) throw PersistenceError(fmt::format("cannot write '{}': write failed", path));
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw PersistenceError(fmt::format("cannot write '{}': {}", path, ec.message()));
    }
}

void write_runlog(const RunLog& log, const std::string& path) { write_text_atomic(path, canonical_text(log)); }

RunLog parse_runlog(const std::string& text) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) malformed("run log is not valid JSON (truncated or corrupt file?)");
    return runlog_from_json(j);
}

RunLog load_runlog(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw LoadError(LoadErrorKind::Io, fmt::format("cannot open run log '{}'", path));
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_runlog(buf.str());
}

}  // namespace electwit
