#include <cstdlib>

#include <fmt/format.h>

#include "electwit/providers.hpp"

namespace electwit {

const char* to_string(CallPurpose p) {
    switch (p) {
        case CallPurpose::Turn: return "turn";
        case CallPurpose::Vote: return "vote";
        case CallPurpose::Consolidate: return "consolidate";
        case CallPurpose::Event: return "event";
        case CallPurpose::Annotate: return "annotate";
        case CallPurpose::Probe: return "probe";
    }
    return "turn";
}

std::optional<CallPurpose> call_purpose_from_string(std::string_view s) {
    for (auto p : {CallPurpose::Turn, CallPurpose::Vote, CallPurpose::Consolidate, CallPurpose::Event,
                   CallPurpose::Annotate, CallPurpose::Probe}) {
        if (s == to_string(p)) return p;
    }
    return std::nullopt;
}

const char* to_string(Backend b) {
    switch (b) {
        case Backend::Http: return "http";
        case Backend::Scripted: return "scripted";
        case Backend::Synthetic: return "synthetic";
    }
    return "http";
}

std::optional<Backend> backend_from_string(std::string_view s) {
    for (auto b : {Backend::Http, Backend::Scripted, Backend::Synthetic}) {
        if (s == to_string(b)) return b;
    }
    return std::nullopt;
}

bool is_valid_model_id(std::string_view model) {
    const auto slash = model.find('/');
    if (slash == std::string_view::npos || slash == 0 || slash + 1 == model.size()) return false;
    for (char ch : model) {
        if (ch == ' ' || ch == '\t' || ch == '\n' || ch == '\r') return false;
    }
    return true;
}

ProviderRouter::ProviderRouter(ProviderSettings settings) : settings_(std::move(settings)) {}

void ProviderRouter::install(Backend backend, std::shared_ptr<CompletionProvider> provider) {
    std::lock_guard lock(mutex_);
    providers_[backend] = std::move(provider);
}

Backend ProviderRouter::backend_for(const ModelId& model) const {
    if (model.rfind("scripted/", 0) == 0) return Backend::Scripted;
    if (model.rfind("synthetic/", 0) == 0) return Backend::Synthetic;
    return settings_.backend;
}

std::shared_ptr<CompletionProvider> ProviderRouter::build(Backend backend) {
    switch (backend) {
        case Backend::Synthetic: return std::make_shared<SyntheticProvider>();
        case Backend::Scripted:
            if (settings_.script_path.empty()) throw ProviderConfigError("scripted backend needs a script file");
            return std::make_shared<ScriptedProvider>(ScriptedProvider::from_file(settings_.script_path));
        case Backend::Http: {
            HttpSettings http;
            const char* key = std::getenv(settings_.api_key_env.c_str());
            if (key == nullptr || *key == '\0') {
                throw ProviderConfigError(fmt::format("environment variable {} is not set", settings_.api_key_env));
            }
            http.api_key = key;
            const char* base = settings_.base_url_env.empty() ? nullptr : std::getenv(settings_.base_url_env.c_str());
            http.base_url = base != nullptr && *base != '\0' ? base : settings_.base_url;
            http.max_attempts = settings_.max_attempts;
            http.initial_backoff = std::chrono::milliseconds(static_cast<long>(settings_.initial_backoff_s * 1000));
            http.requests_per_minute = settings_.requests_per_minute;
            http.timeout = std::chrono::seconds(settings_.timeout_s);
            return std::make_shared<HttpProvider>(std::move(http));
        }
    }
    throw ProviderConfigError("unknown backend");
}

CompletionProvider& ProviderRouter::resolve(const ModelId& model) {
    if (!is_valid_model_id(model)) throw ProviderConfigError(fmt::format("invalid model id '{}'", model));
    const auto backend = backend_for(model);
    std::lock_guard lock(mutex_);
    auto& slot = providers_[backend];
    if (!slot) slot = build(backend);
    return *slot;
}

void ProviderRouter::check(const ModelId& model) { resolve(model); }

}  // namespace electwit
