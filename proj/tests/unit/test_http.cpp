#include <doctest.h>

#include <atomic>
#include <mutex>
#include <thread>

#include <httplib.h>

#include "electwit/providers.hpp"

using namespace electwit;
using nlohmann::json;

namespace {

/// Local chat-completions stand-in. `statuses` are served in order, then 200.
class StubServer {
public:
    explicit StubServer(std::vector<int> statuses) : statuses_(std::move(statuses)) {
        server_.Post("/v1/chat/completions", [this](const httplib::Request& req, httplib::Response& res) {
            std::lock_guard lock(mutex_);
            bodies_.push_back(req.body);
            auth_.push_back(req.get_header_value("Authorization"));
            const auto i = hits_++;
            const int status = i < statuses_.size() ? statuses_[i] : 200;
            res.status = status;
            if (status == 200) {
                res.set_content(json{{"choices", json::array({{{"message", {{"content", "hello"}}}}})}}.dump(),
                                "application/json");
            } else {
                res.set_content("busy", "text/plain");
            }
        });
        server_.Get("/v1/models", [](const httplib::Request&, httplib::Response& res) {
            res.set_content("{\"data\":[]}", "application/json");
        });
        port_ = server_.bind_to_any_port("127.0.0.1");
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }

    ~StubServer() {
        server_.stop();
        thread_.join();
    }

    std::string base_url() const { return "http://127.0.0.1:" + std::to_string(port_) + "/v1"; }
    std::size_t hits() {
        std::lock_guard lock(mutex_);
        return hits_;
    }
    std::vector<std::string> bodies() {
        std::lock_guard lock(mutex_);
        return bodies_;
    }
    std::vector<std::string> auth() {
        std::lock_guard lock(mutex_);
        return auth_;
    }

private:
    httplib::Server server_;
    std::vector<int> statuses_;
    std::mutex mutex_;
    std::size_t hits_ = 0;
    std::vector<std::string> bodies_;
    std::vector<std::string> auth_;
    int port_ = 0;
    std::thread thread_;
};

struct SleepLog {
    std::vector<std::chrono::milliseconds> waits;
    HttpProvider::Sleeper sleeper() {
        return [this](std::chrono::milliseconds d) { waits.push_back(d); };
    }
};

HttpSettings settings_for(const StubServer& s) {
    HttpSettings h;
    h.base_url = s.base_url();
    h.api_key = "test-key";
    h.timeout = std::chrono::seconds(5);
    return h;
}

CompletionRequest request() {
    CompletionRequest r;
    r.model = "openai/gpt-4.1-mini";
    r.system_prompt = "sys";
    r.user_prompt = "usr";
    r.temperature = 0.0;
    r.max_tokens = 77;
    return r;
}

}  // namespace

TEST_CASE("a 429 is retried once after the initial backoff") {
    StubServer server({429});
    SleepLog sleeps;
    HttpProvider p(settings_for(server), sleeps.sleeper());
    const auto c = p.complete(request());
    CHECK(c.text == "hello");
    CHECK(c.retries == 1);
    CHECK(server.hits() == 2);
    REQUIRE(sleeps.waits.size() == 1);
    CHECK(sleeps.waits[0] == std::chrono::milliseconds(1000));
}

TEST_CASE("three server errors exhaust the attempts with doubling backoff") {
    StubServer server({500, 502, 503, 200});
    SleepLog sleeps;
    HttpProvider p(settings_for(server), sleeps.sleeper());
    try {
        p.complete(request());
        FAIL("expected a provider error");
    } catch (const ProviderError& e) {
        CHECK(e.status() == 503);
        CHECK(e.retries() == 2);
    }
    CHECK(server.hits() == 3);
    CHECK(sleeps.waits == std::vector<std::chrono::milliseconds>{std::chrono::milliseconds(1000),
                                                                  std::chrono::milliseconds(2000)});
}

TEST_CASE("client errors are not retried") {
    StubServer server({401});
    SleepLog sleeps;
    HttpProvider p(settings_for(server), sleeps.sleeper());
    CHECK_THROWS_AS(p.complete(request()), ProviderError);
    CHECK(server.hits() == 1);
    CHECK(sleeps.waits.empty());
}

TEST_CASE("request carries bearer auth, model, temperature and both prompts") {
    StubServer server({});
    HttpProvider p(settings_for(server), [](std::chrono::milliseconds) {});
    CHECK(p.complete(request()).retries == 0);
    REQUIRE(server.bodies().size() == 1);
    const auto body = json::parse(server.bodies()[0]);
    CHECK(body == HttpProvider::request_body(request()));
    CHECK(body["model"] == "openai/gpt-4.1-mini");
    CHECK(body["temperature"] == 0.0);
    CHECK(body["max_tokens"] == 77);
    CHECK(body["messages"][0]["role"] == "system");
    CHECK(body["messages"][1]["content"] == "usr");
    CHECK(server.auth()[0] == "Bearer test-key");
}

TEST_CASE("rate limit spaces requests by the configured interval") {
    StubServer server({});
    auto h = settings_for(server);
    h.requests_per_minute = 60.0;
    std::vector<std::chrono::milliseconds> waits;
    HttpProvider p(h, [&](std::chrono::milliseconds d) { waits.push_back(d); });
    p.complete(request());
    p.complete(request());
    REQUIRE(waits.size() == 1);
    CHECK(waits[0] > std::chrono::milliseconds(900));
    CHECK(waits[0] <= std::chrono::milliseconds(1000));
}

TEST_CASE("unreachable endpoint fails after the retries") {
    HttpSettings h;
    h.base_url = "http://127.0.0.1:1/v1";
    h.api_key = "k";
    h.timeout = std::chrono::seconds(2);
    SleepLog sleeps;
    HttpProvider p(h, sleeps.sleeper());
    try {
        p.complete(request());
        FAIL("expected a provider error");
    } catch (const ProviderError& e) {
        CHECK(e.status() == 0);
    }
    CHECK(sleeps.waits.size() == 2);
    CHECK_THROWS_AS(p.probe(), ProviderError);
}

TEST_CASE("probe reaches the models endpoint") {
    StubServer server({});
    HttpProvider p(settings_for(server), [](std::chrono::milliseconds) {});
    CHECK_NOTHROW(p.probe());
}

TEST_CASE("malformed base url is a configuration error") {
    HttpSettings h;
    h.base_url = "openrouter.ai";
    CHECK_THROWS_AS(HttpProvider{h}, ProviderConfigError);
}
