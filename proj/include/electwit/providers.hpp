#pragma once

#include <atomic>
#include <chrono>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "electwit/provider.hpp"

namespace electwit {

// ---------------------------------------------------------------------------
// Scripted provider
// ---------------------------------------------------------------------------

/// One row of a response script. Unset fields match anything; when several
/// rows match, the one with the most set fields wins, then file order.
struct ScriptEntry {
    std::optional<AgentId> agent;
    std::optional<int> day;
    std::optional<int> hour;
    std::optional<CallPurpose> purpose;
    std::optional<std::string> subject;
    std::string response;
    bool echo = false;         // respond with the user prompt verbatim
    std::optional<int> error;  // fail with this status instead of responding
};

/// Deterministic table-driven provider keyed by (agent, day, hour).
///
/// Script file (JSON):
///   {"defaults": {"turn": "[]", "vote": "{\"vote\":\"abstain\"}", ...},
///    "entries": [{"agent": "v01", "day": 1, "hour": 0, "purpose": "turn",
///                 "response": "[...]"}, ...]}
class ScriptedProvider : public CompletionProvider {
public:
    ScriptedProvider() = default;
    ScriptedProvider(std::vector<ScriptEntry> entries, std::map<CallPurpose, std::string> defaults);
    ScriptedProvider(ScriptedProvider&& other) noexcept
        : entries_(std::move(other.entries_)), defaults_(std::move(other.defaults_)), calls_(other.calls_.load()) {}

    static ScriptedProvider from_json(const nlohmann::json& script);
    static ScriptedProvider from_file(const std::string& path);

    void add(ScriptEntry entry);
    void set_default(CallPurpose purpose, std::string response);

    Completion complete(const CompletionRequest& request) override;

    std::size_t calls() const noexcept { return calls_.load(); }

private:
    std::vector<ScriptEntry> entries_;
    std::map<CallPurpose, std::string> defaults_;
    std::atomic<std::size_t> calls_{0};
};

// ---------------------------------------------------------------------------
// Synthetic provider
// ---------------------------------------------------------------------------

/// Offline stand-in for a language model. Output is a pure function of
/// (model, system prompt, user prompt, purpose): it reads item ids off the
/// feed, candidate names off the vote prompt and labels off the annotation
/// prompt, and makes hash-driven choices among them. Used for demos,
/// determinism checks and load tests.
class SyntheticProvider : public CompletionProvider {
public:
    Completion complete(const CompletionRequest& request) override;
    std::size_t calls() const noexcept { return calls_.load(); }

private:
    std::atomic<std::size_t> calls_{0};
};

// ---------------------------------------------------------------------------
// HTTP provider
// ---------------------------------------------------------------------------

struct HttpSettings {
    std::string base_url = "https://openrouter.ai/api/v1";
    std::string api_key;
    int max_attempts = 3;
    std::chrono::milliseconds initial_backoff{1000};  // doubles per retry: 1s, 2s, 4s
    double requests_per_minute = 0.0;                 // 0 = unlimited
    std::chrono::seconds timeout{120};
};

/// Chat-completions client for OpenRouter-compatible endpoints:
/// POST <base>/chat/completions with bearer auth. Retries 429, 5xx and
/// transport failures; other statuses fail immediately.
class HttpProvider : public CompletionProvider {
public:
    using Sleeper = std::function<void(std::chrono::milliseconds)>;

    explicit HttpProvider(HttpSettings settings, Sleeper sleeper = {});
    ~HttpProvider() override;

    Completion complete(const CompletionRequest& request) override;
    void probe() override;

    static nlohmann::json request_body(const CompletionRequest& request);

private:
    void wait_for_slot();

    HttpSettings settings_;
    Sleeper sleeper_;
    std::string host_;     // scheme://host[:port]
    std::string path_;     // path prefix, e.g. /api/v1
    std::mutex rate_mutex_;
    std::chrono::steady_clock::time_point next_slot_{};
};

// ---------------------------------------------------------------------------
// Routing
// ---------------------------------------------------------------------------

enum class Backend { Http, Scripted, Synthetic };

const char* to_string(Backend b);
std::optional<Backend> backend_from_string(std::string_view s);

struct ProviderSettings {
    Backend backend = Backend::Http;
    std::string script_path;  // Scripted backend
    std::string base_url = "https://openrouter.ai/api/v1";
    std::string api_key_env = "OPENROUTER_API_KEY";
    std::string base_url_env = "ELECTWIT_BASE_URL";
    int max_attempts = 3;
    double initial_backoff_s = 1.0;
    double requests_per_minute = 0.0;
    int timeout_s = 120;

    bool operator==(const ProviderSettings&) const = default;
};

/// "vendor/model" with no whitespace.
bool is_valid_model_id(std::string_view model);

/// Resolves a model id to a provider. Models named "scripted/..." or
/// "synthetic/..." always use that backend; every other model uses the
/// configured default backend. Providers are created once and shared.
class ProviderRouter {
public:
    explicit ProviderRouter(ProviderSettings settings);

    /// Installs a provider for a backend, replacing the lazily built one.
    void install(Backend backend, std::shared_ptr<CompletionProvider> provider);

    CompletionProvider& resolve(const ModelId& model);
    Backend backend_for(const ModelId& model) const;

    /// Validates `model` and builds its provider. Throws ProviderConfigError.
    void check(const ModelId& model);

private:
    std::shared_ptr<CompletionProvider> build(Backend backend);

    ProviderSettings settings_;
    std::mutex mutex_;
    std::map<Backend, std::shared_ptr<CompletionProvider>> providers_;
};

/// Counts calls and forwards to another provider.
class CountingProvider : public CompletionProvider {
public:
    explicit CountingProvider(CompletionProvider& inner) : inner_(inner) {}
    Completion complete(const CompletionRequest& request) override {
        ++calls_;
        return inner_.complete(request);
    }
    std::size_t calls() const noexcept { return calls_.load(); }

private:
    CompletionProvider& inner_;
    std::atomic<std::size_t> calls_{0};
};

}  // namespace electwit
