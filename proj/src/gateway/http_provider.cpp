#include <thread>

#include <fmt/format.h>
#include <httplib.h>

#include "electwit/providers.hpp"
#include "electwit/text.hpp"

namespace electwit {

using nlohmann::json;

namespace {

bool retryable(int status) { return status == 0 || status == 429 || status >= 500; }

}  // namespace

HttpProvider::HttpProvider(HttpSettings settings, Sleeper sleeper)
    : settings_(std::move(settings)), sleeper_(std::move(sleeper)) {
    if (!sleeper_) sleeper_ = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
    if (settings_.max_attempts < 1) throw ProviderConfigError("max_attempts must be at least 1");
    const auto& url = settings_.base_url;
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) {
        throw ProviderConfigError(fmt::format("base URL '{}' has no scheme", url));
    }
    const auto path_start = url.find('/', scheme_end + 3);
    host_ = url.substr(0, path_start);
    path_ = path_start == std::string::npos ? "" : url.substr(path_start);
    while (!path_.empty() && path_.back() == '/') path_.pop_back();
}

HttpProvider::~HttpProvider() = default;

json HttpProvider::request_body(const CompletionRequest& request) {
    return json{{"model", request.model},
                {"messages",
                 json::array({json{{"role", "system"}, {"content", request.system_prompt}},
                              json{{"role", "user"}, {"content", request.user_prompt}}})},
                {"temperature", request.temperature},
                {"max_tokens", request.max_tokens}};
}

void HttpProvider::wait_for_slot() {
    if (settings_.requests_per_minute <= 0.0) return;
    const auto interval = std::chrono::duration_cast<std::chrono::steady_clock::duration>(
        std::chrono::duration<double>(60.0 / settings_.requests_per_minute));
    std::chrono::steady_clock::duration wait{};
    {
        std::lock_guard lock(rate_mutex_);
        const auto now = std::chrono::steady_clock::now();
        const auto slot = std::max(now, next_slot_);
        wait = slot - now;
        next_slot_ = slot + interval;
    }
    if (wait.count() > 0) sleeper_(std::chrono::duration_cast<std::chrono::milliseconds>(wait));
}

Completion HttpProvider::complete(const CompletionRequest& request) {
    const auto body = request_body(request).dump();
    const httplib::Headers headers{{"Authorization", "Bearer " + settings_.api_key}};
    int last_status = 0;
    std::string last_error;
    for (int attempt = 0; attempt < settings_.max_attempts; ++attempt) {
        if (attempt > 0) sleeper_(settings_.initial_backoff * (1 << (attempt - 1)));
        wait_for_slot();

        httplib::Client client(host_);
        client.set_connection_timeout(settings_.timeout);
        client.set_read_timeout(settings_.timeout);
        client.set_write_timeout(settings_.timeout);
        auto res = client.Post(path_ + "/chat/completions", headers, body, "application/json");
        if (!res) {
            last_status = 0;
            last_error = httplib::to_string(res.error());
            continue;
        }
        last_status = res->status;
        if (res->status == 200) {
            auto j = json::parse(res->body, nullptr, false);
            if (j.is_discarded()) throw ProviderError("response body is not JSON", 200, attempt);
            try {
                const auto& content = j.at("choices").at(0).at("message").at("content");
                return Completion{content.is_string() ? content.get<std::string>() : std::string{}, attempt};
            } catch (const json::exception& e) {
                throw ProviderError(fmt::format("unexpected response shape: {}", e.what()), 200, attempt);
            }
        }
        last_error = fmt::format("HTTP {}: {}", res->status, text::truncate_scalars(res->body, 200).text);
        if (!retryable(res->status)) throw ProviderError(last_error, res->status, attempt);
    }
    throw ProviderError(fmt::format("giving up after {} attempts: {}", settings_.max_attempts, last_error),
                        last_status, settings_.max_attempts - 1);
}

void HttpProvider::probe() {
    httplib::Client client(host_);
    client.set_connection_timeout(std::chrono::seconds(10));
    client.set_read_timeout(std::chrono::seconds(10));
    auto res = client.Get(path_ + "/models", httplib::Headers{{"Authorization", "Bearer " + settings_.api_key}});
    if (!res) throw ProviderError(fmt::format("cannot reach {}: {}", host_, httplib::to_string(res.error())), 0, 0);
    if (res->status / 100 != 2) {
        throw ProviderError(fmt::format("{}{}/models returned HTTP {}", host_, path_, res->status), res->status, 0);
    }
}

}  // namespace electwit
