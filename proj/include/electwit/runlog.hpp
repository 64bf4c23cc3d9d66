#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "electwit/actions.hpp"
#include "electwit/diary.hpp"
#include "electwit/ids.hpp"
#include "electwit/personas.hpp"
#include "electwit/platform.hpp"
#include "electwit/provider.hpp"
#include "electwit/scenario.hpp"

namespace electwit {

inline constexpr int kRunLogSchemaVersion = 1;

/// Position of a record inside one SimTime. Vote and consolidation records
/// are stamped with the last hour of their day.
enum class Phase { Gate, Event, Turn, Vote, Consolidate };

const char* to_string(Phase p);
std::optional<Phase> phase_from_string(std::string_view s);

/// Start of an hour step: which agents passed their chance-to-act gate.
struct GateRecord {
    std::vector<AgentId> acting;
    std::uint64_t draws = 0;
    bool operator==(const GateRecord&) const = default;
};

struct EventRecord {
    Event event;
    bool operator==(const EventRecord&) const = default;
};

struct ProviderCallRecord {
    AgentId agent;
    ModelId model;
    CallPurpose purpose = CallPurpose::Turn;
    int retries = 0;
    bool ok = true;
    std::string error;
    std::optional<std::string> prompt;    // only with --log-prompts
    std::optional<std::string> response;  // only with --log-prompts
    bool operator==(const ProviderCallRecord&) const = default;
};

/// Kind of attempted platform action, including elements that could not
/// be parsed into one.
enum class ActionKind { Post, Reply, Like, Unknown };

const char* to_string(ActionKind k);
std::optional<ActionKind> action_kind_from_string(std::string_view s);

enum class ActionStage { Parse, Apply };

struct ActionRecord {
    AgentId agent;
    ActionKind action = ActionKind::Post;
    ActionStage stage = ActionStage::Apply;
    bool accepted = false;
    std::optional<RejectReason> reason;
    std::optional<ItemId> item;    // issued id for accepted posts and replies
    std::optional<ItemId> target;  // reply parent or like target
    std::optional<std::string> raw_target;
    std::optional<std::string> text;  // stored text for accepted posts and replies
    std::string detail;
    bool operator==(const ActionRecord&) const = default;
};

struct DiaryRecord {
    DiaryEntry entry;
    bool operator==(const DiaryRecord&) const = default;
};

struct VoteRecord {
    AgentId voter;
    VoteDecision decision;
    bool forced = false;
    bool parsed = false;
    std::string raw_choice;
    bool operator==(const VoteRecord&) const = default;
};

struct PollRecord {
    PollSnapshot snapshot;
    bool operator==(const PollRecord&) const = default;
};

using RecordBody =
    std::variant<GateRecord, EventRecord, ProviderCallRecord, ActionRecord, DiaryRecord, VoteRecord, PollRecord>;

/// Known flags: truncated, rule_violation, fallback, no_poll_tiebreak,
/// tie_tiebreak, no_action, provider_error, forced.
struct Record {
    std::uint64_t seq = 0;
    SimTime time;
    Phase phase = Phase::Gate;
    std::vector<std::string> flags;  // sorted, unique
    RecordBody body;

    bool has_flag(std::string_view f) const;
    void add_flag(std::string f);

    template <class T>
    const T* as() const {
        return std::get_if<T>(&body);
    }

    bool operator==(const Record&) const = default;
};

const char* record_type_name(const RecordBody& body);

/// The complete, replayable account of one simulation.
struct RunLog {
    int schema_version = kRunLogSchemaVersion;
    nlohmann::json config = nlohmann::json::object();
    std::vector<AgentProfile> population;
    std::vector<Record> records;

    const AgentProfile* find_agent(const AgentId& id) const;

    bool operator==(const RunLog&) const = default;
};

enum class LoadErrorKind { Io, Malformed, VersionMismatch, Ordering, Domain };

const char* to_string(LoadErrorKind k);

class LoadError : public std::runtime_error {
public:
    LoadError(LoadErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    LoadErrorKind kind() const noexcept { return kind_; }

private:
    LoadErrorKind kind_;
};

class PersistenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

nlohmann::json to_json(const AgentProfile& p);
AgentProfile agent_profile_from_json(const nlohmann::json& j);

nlohmann::json to_json(const Record& r);
nlohmann::json to_json(const RunLog& log);

/// Structural validation: schema version, record shapes, domains and
/// (day, hour, phase, seq) ordering. Throws LoadError.
RunLog runlog_from_json(const nlohmann::json& j);

/// Canonical text: sorted keys, shortest round-trip numbers, no whitespace.
std::string canonical_dump(const nlohmann::json& j);
std::string canonical_text(const RunLog& log);

/// Writes via a sibling temp file and rename. Throws PersistenceError.
void write_text_atomic(const std::string& path, const std::string& contents);
void write_runlog(const RunLog& log, const std::string& path);

RunLog parse_runlog(const std::string& text);
RunLog load_runlog(const std::string& path);

/// Re-applies every accepted action of `log` to a fresh platform and checks
/// that each reproduces its logged id and text. Throws LoadError(Domain)
/// describing the first divergence.
Platform replay_platform(const RunLog& log);

}  // namespace electwit
