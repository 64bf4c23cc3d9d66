#include <doctest.h>

#include <chrono>

#include "electwit/engine.hpp"
#include "electwit/runlog.hpp"
#include "fixtures.hpp"

using namespace electwit;
using nlohmann::json;

namespace {

RunLog small_run(std::uint64_t seed, int days) {
    auto c = fixtures::scripted_config(days, 3, 5);
    c.seed = seed;
    c.log_prompts = true;
    c.scandal_days = days > 0 ? std::vector<int>{days} : std::vector<int>{};
    c.models.candidates = {"synthetic/a", "synthetic/b"};
    c.models.voters = {"synthetic/v"};
    c.models.eventor = "synthetic/e";
    ProviderRouter router(c.provider);
    return run_simulation(c, router);
}

LoadErrorKind load_error_kind(const std::string& text) {
    try {
        parse_runlog(text);
    } catch (const LoadError& e) {
        return e.kind();
    }
    FAIL("expected a load error");
    return LoadErrorKind::Io;
}

}  // namespace

TEST_CASE("write, load and write again is byte-identical") {
    const auto dir = fixtures::temp_dir("roundtrip");
    const auto log = small_run(3, 2);
    REQUIRE_FALSE(log.records.empty());
    const auto a = (dir / "a.json").string();
    const auto b = (dir / "b.json").string();
    write_runlog(log, a);
    const auto loaded = load_runlog(a);
    CHECK(loaded == log);
    write_runlog(loaded, b);
    CHECK(fixtures::slurp(a) == fixtures::slurp(b));
    CHECK_FALSE(std::filesystem::exists(a + ".tmp"));
}

TEST_CASE("canonical text has sorted keys and no whitespace") {
    const auto text = canonical_dump(json::parse(R"({"b": 1, "a": [1.5, "x"], "c": {"z": null, "y": true}})"));
    CHECK(text == R"({"a":[1.5,"x"],"b":1,"c":{"y":true,"z":null}})");
    CHECK(canonical_dump(json(0.1)) == "0.1");
}

TEST_CASE("a zero-day run round-trips") {
    const auto log = small_run(1, 0);
    CHECK(log.records.empty());
    CHECK(log.population.size() == 8);
    CHECK(parse_runlog(canonical_text(log)) == log);
}

TEST_CASE("a log at the reference interaction count round-trips") {
    const auto start = std::chrono::steady_clock::now();
    const auto log = fixtures::random_log(17, 73877);
    std::size_t actions = 0;
    for (const auto& r : log.records) actions += r.as<ActionRecord>() ? 1 : 0;
    CHECK(actions == 73877);
    const auto text = canonical_text(log);
    const auto back = parse_runlog(text);
    CHECK(back == log);
    CHECK(canonical_text(back) == text);
    CHECK_NOTHROW(replay_platform(back));
    const auto seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    MESSAGE("73,877-action log round trip took " << seconds << " s");
}

TEST_CASE("structural errors are classified") {
    const auto good = to_json(small_run(2, 1));

    SUBCASE("truncated text is malformed") {
        const auto text = canonical_dump(good);
        CHECK(load_error_kind(text.substr(0, text.size() / 2)) == LoadErrorKind::Malformed);
    }
    SUBCASE("schema version mismatch") {
        auto j = good;
        j["schema_version"] = 2;
        CHECK(load_error_kind(j.dump()) == LoadErrorKind::VersionMismatch);
    }
    SUBCASE("day zero is a domain error") {
        auto j = good;
        j["records"][0]["day"] = 0;
        CHECK(load_error_kind(j.dump()) == LoadErrorKind::Domain);
    }
    SUBCASE("hour beyond the day is a domain error") {
        auto j = good;
        j["records"][0]["hour"] = 3;
        CHECK(load_error_kind(j.dump()) == LoadErrorKind::Domain);
    }
    SUBCASE("swapped records are out of order") {
        auto j = good;
        std::swap(j["records"][0], j["records"][1]);
        CHECK(load_error_kind(j.dump()) == LoadErrorKind::Ordering);
    }
    SUBCASE("unknown record type is malformed") {
        auto j = good;
        j["records"][0]["type"] = "teleport";
        CHECK(load_error_kind(j.dump()) == LoadErrorKind::Malformed);
    }
    SUBCASE("missing field is malformed") {
        auto j = good;
        j["records"][0].erase("acting");
        CHECK(load_error_kind(j.dump()) == LoadErrorKind::Malformed);
    }
    SUBCASE("out-of-range background is a domain error") {
        auto j = good;
        j["population"][0]["background"][0] = 101;
        CHECK(load_error_kind(j.dump()) == LoadErrorKind::Domain);
    }
    SUBCASE("duplicate agent is a domain error") {
        auto j = good;
        j["population"].push_back(j["population"][0]);
        CHECK(load_error_kind(j.dump()) == LoadErrorKind::Domain);
    }
    SUBCASE("unbalanced poll is a domain error") {
        auto j = good;
        for (auto& r : j["records"]) {
            if (r["type"] == "poll") r["abstentions"] = r["abstentions"].get<int>() + 1;
        }
        CHECK(load_error_kind(j.dump()) == LoadErrorKind::Domain);
    }
}

TEST_CASE("missing file is an io error") {
    try {
        load_runlog((fixtures::temp_dir("missing") / "nope.json").string());
        FAIL("expected a load error");
    } catch (const LoadError& e) {
        CHECK(e.kind() == LoadErrorKind::Io);
    }
}

TEST_CASE("unwritable destination is a persistence error") {
    const auto dir = fixtures::temp_dir("unwritable");
    CHECK_THROWS_AS(write_runlog(RunLog{}, (dir / "no" / "such" / "dir" / "x.json").string()), PersistenceError);
}

TEST_CASE("replay reproduces the platform of a run") {
    auto c = fixtures::scripted_config(2, 4, 6);
    c.models.candidates = {"synthetic/a", "synthetic/b"};
    c.models.voters = {"synthetic/v"};
    c.models.eventor = "synthetic/e";
    ProviderRouter router(c.provider);
    Simulation sim(c, router, fixtures::names());
    sim.run();
    const auto replayed = replay_platform(parse_runlog(canonical_text(sim.log())));
    CHECK(replayed.counts().posts == sim.platform().counts().posts);
    CHECK(replayed.counts().comments == sim.platform().counts().comments);
    CHECK(replayed.counts().likes == sim.platform().counts().likes);
    CHECK(replayed.render_feed(SimTime{3, 0}).rendered == sim.platform().render_feed(SimTime{3, 0}).rendered);
}

TEST_CASE("replay detects a tampered id") {
    auto log = fixtures::random_log(5, 200);
    for (auto& r : log.records) {
        if (auto* a = std::get_if<ActionRecord>(&r.body); a && a->accepted && a->action == ActionKind::Post) {
            a->item = ItemId{ItemKind::Post, 999};
            break;
        }
    }
    try {
        replay_platform(log);
        FAIL("expected divergence");
    } catch (const LoadError& e) {
        CHECK(e.kind() == LoadErrorKind::Domain);
    }
}
