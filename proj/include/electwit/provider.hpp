#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "electwit/ids.hpp"

namespace electwit {

enum class CallPurpose { Turn, Vote, Consolidate, Event, Annotate, Probe };

const char* to_string(CallPurpose p);
std::optional<CallPurpose> call_purpose_from_string(std::string_view s);

/// Who is asking and why. Carried alongside the prompts so scripted
/// providers can key responses by (agent, day, hour); network providers
/// ignore it.
struct RequestTag {
    AgentId agent;
    SimTime time;
    CallPurpose purpose = CallPurpose::Turn;
    std::string subject;  // message id for annotation calls
};

inline constexpr int kTurnMaxTokens = 1024;
inline constexpr int kShortMaxTokens = 512;

struct CompletionRequest {
    ModelId model;
    std::string system_prompt;
    std::string user_prompt;
    double temperature = 0.0;
    int max_tokens = kTurnMaxTokens;
    RequestTag tag;
};

struct Completion {
    std::string text;
    int retries = 0;
};

/// A completion that could not be obtained. Callers in the simulation
/// convert this into a logged no-op; it never aborts a run.
class ProviderError : public std::runtime_error {
public:
    ProviderError(const std::string& what, int status, int retries)
        : std::runtime_error(what), status_(status), retries_(retries) {}

    int status() const noexcept { return status_; }
    int retries() const noexcept { return retries_; }

private:
    int status_;
    int retries_;
};

/// Misconfiguration detected before any request is made (missing key,
/// malformed model id, unreadable script).
class ProviderConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Implementations must be safe to call from several threads at once.
class CompletionProvider {
public:
    virtual ~CompletionProvider() = default;

    virtual Completion complete(const CompletionRequest& request) = 0;

    /// Cheap reachability check for --dry-run. Throws on failure.
    virtual void probe() {}
};

}  // namespace electwit
