#include <doctest.h>

#include <fmt/format.h>

#include "electwit/engine.hpp"
#include "fixtures.hpp"

using namespace electwit;
using fixtures::bg;
using fixtures::profile;

namespace {

/// c1, c2, e1 and `voters` voters on scripted models, all with `chance`.
std::vector<AgentProfile> small_population(int voters, double chance, double eventor_chance = 0.0) {
    std::vector<AgentProfile> pop{profile("c1", Role::Candidate, "scripted/c", bg({60}), chance),
                                  profile("c2", Role::Candidate, "scripted/c", bg({-60}), chance),
                                  profile("e1", Role::Eventor, "scripted/e", std::nullopt, eventor_chance)};
    for (int i = 1; i <= voters; ++i) {
        pop.push_back(profile(fmt::format("v{:02}", i), Role::Voter, "scripted/v", bg({i, -i}), chance));
    }
    return pop;
}

ScriptedProvider base_script() {
    ScriptedProvider s;
    s.set_default(CallPurpose::Turn, "[]");
    s.set_default(CallPurpose::Vote, R"({"vote":"abstain"})");
    s.set_default(CallPurpose::Consolidate, "Quiet day.");
    s.set_default(CallPurpose::Event, R"({"event":"Breaking news"})");
    return s;
}

ScriptEntry turn(const std::string& agent, int day, int hour, std::string response) {
    ScriptEntry e;
    e.agent = AgentId(agent);
    e.day = day;
    e.hour = hour;
    e.purpose = CallPurpose::Turn;
    e.response = std::move(response);
    return e;
}

ScriptEntry vote(const std::string& agent, std::string choice) {
    ScriptEntry e;
    e.agent = AgentId(agent);
    e.purpose = CallPurpose::Vote;
    e.response = nlohmann::json{{"vote", choice}}.dump();
    return e;
}

template <class T>
std::vector<const Record*> records_of(const RunLog& log) {
    std::vector<const Record*> out;
    for (const auto& r : log.records) {
        if (r.as<T>()) out.push_back(&r);
    }
    return out;
}

SimConfig config(int days, int hours) {
    auto c = fixtures::scripted_config(days, hours, 4);
    c.scandal_hour = 0;
    return c;
}

}  // namespace

TEST_CASE("one day of one hour with nobody acting still holds the forced vote") {
    auto c = config(1, 1);
    c.chance_overrides["*"] = 0.0;
    ProviderRouter router(c.provider);
    auto script = fixtures::install_script(router, base_script());
    Simulation sim(c, router, fixtures::names());
    sim.run();
    const auto& log = sim.log();

    CHECK(records_of<GateRecord>(log).size() == 1);
    CHECK(records_of<GateRecord>(log)[0]->as<GateRecord>()->acting.empty());
    CHECK(records_of<ActionRecord>(log).empty());
    const auto polls = records_of<PollRecord>(log);
    REQUIRE(polls.size() == 1);
    CHECK(polls[0]->as<PollRecord>()->snapshot.forced);
    CHECK(polls[0]->as<PollRecord>()->snapshot.abstentions == 4);
    const auto votes = records_of<VoteRecord>(log);
    REQUIRE(votes.size() == 4);
    for (const auto* v : votes) CHECK(v->has_flag("rule_violation"));
    // Four vote calls, then one consolidation per voter (candidates and eventor had an empty day).
    CHECK(script->calls() == 8);
}

TEST_CASE("a full default-length run has 72 hour steps, 8 polls and 8 consolidation rounds") {
    auto c = config(8, 9);
    c.n_voters = 16;
    c.scandal_days = {4, 8};
    c.models.candidates = {"synthetic/cand-a", "synthetic/cand-b"};
    c.models.voters = {"synthetic/v1", "synthetic/v2"};
    c.models.eventor = "synthetic/eventor";
    ProviderRouter router(c.provider);
    std::vector<std::string> progress;
    Simulation sim(c, router, fixtures::names());
    sim.set_progress([&](const std::string& line) { progress.push_back(line); });
    sim.run();
    const auto& log = sim.log();

    const auto gates = records_of<GateRecord>(log);
    REQUIRE(gates.size() == 72);
    for (const auto* g : gates) CHECK(g->as<GateRecord>()->draws == 19);
    const auto polls = records_of<PollRecord>(log);
    REQUIRE(polls.size() == 8);
    for (std::size_t i = 0; i < polls.size(); ++i) {
        const auto& s = polls[i]->as<PollRecord>()->snapshot;
        CHECK(s.day == static_cast<int>(i) + 1);
        CHECK(s.forced == (i == 7));
        CHECK(s.polled() == 16);
    }
    std::size_t consolidated = 0;
    for (const auto& r : log.records) {
        if (r.phase == Phase::Consolidate && r.as<DiaryRecord>()) ++consolidated;
    }
    CHECK(consolidated == 8 * 19);
    CHECK(progress.size() == 72 + 8);

    int forced_events = 0;
    for (const auto* r : records_of<EventRecord>(log)) {
        if (r->has_flag("forced")) {
            ++forced_events;
            CHECK(r->time.hour == 0);
            CHECK((r->time.day == 4 || r->time.day == 8));
        }
    }
    CHECK(forced_events == 2);

    // Records are ordered by seq and by time.
    for (std::size_t i = 1; i < log.records.size(); ++i) {
        CHECK(log.records[i].seq == log.records[i - 1].seq + 1);
        CHECK_FALSE(log.records[i].time < log.records[i - 1].time);
    }
    CHECK(sim.diaries().consolidated_count(AgentId("v01")) == 8);
}

TEST_CASE("gate frequency matches the configured chance") {
    Rng rng(5);
    std::vector<AgentProfile> agents{profile("v01", Role::Voter, "x/y", bg({1}), 0.65)};
    const int hours = 20000;
    int active = 0;
    for (int i = 0; i < hours; ++i) active += draw_gates(rng, agents)[0] ? 1 : 0;
    const double freq = double(active) / hours;
    CHECK(freq == doctest::Approx(0.65).epsilon(0.01 / 0.65));
    CHECK(rng.draws() == static_cast<std::uint64_t>(hours));
}

TEST_CASE("same-hour items are invisible; the next hour sees them") {
    auto c = config(1, 2);
    ProviderRouter router(c.provider);
    auto s = base_script();
    s.add(turn("v01", 1, 0, R"([{"type":"post","text":"hello"}])"));
    s.add(turn("v02", 1, 0, R"([{"type":"like","target_id":"p-0"}])"));
    s.add(turn("v02", 1, 1, R"([{"type":"like","target_id":"p-0"}])"));
    fixtures::install_script(router, std::move(s));
    Simulation sim(c, router, small_population(2, 1.0));

    sim.hour_step(SimTime{1, 0});
    std::vector<const ActionRecord*> likes;
    for (const auto& r : sim.log().records) {
        if (const auto* a = r.as<ActionRecord>(); a && a->action == ActionKind::Like) likes.push_back(a);
    }
    REQUIRE(likes.size() == 1);
    CHECK_FALSE(likes[0]->accepted);
    CHECK(likes[0]->reason == RejectReason::InvalidTarget);

    sim.hour_step(SimTime{1, 1});
    likes.clear();
    for (const auto& r : sim.log().records) {
        if (const auto* a = r.as<ActionRecord>(); a && a->action == ActionKind::Like) likes.push_back(a);
    }
    REQUIRE(likes.size() == 2);
    CHECK(likes[1]->accepted);
    CHECK(sim.platform().posts()[0].like_count == 1);
}

TEST_CASE("results apply in ascending agent id order") {
    auto c = config(1, 2);
    ProviderRouter router(c.provider);
    auto s = base_script();
    s.add(turn("v01", 1, 0, R"([{"type":"post","text":"root"}])"));
    s.add(turn("v02", 1, 1, R"([{"type":"reply","target_id":"p-0","text":"from v02"}])"));
    s.add(turn("v01", 1, 1, R"([{"type":"reply","target_id":"p-0","text":"from v01"}])"));
    s.add(turn("c1", 1, 1, R"([{"type":"reply","target_id":"p-0","text":"from c1"}])"));
    fixtures::install_script(router, std::move(s));
    for (int parallel : {1, 4}) {
        c.parallel = parallel;
        Simulation sim(c, router, small_population(2, 1.0));
        sim.hour_step(SimTime{1, 0});
        sim.hour_step(SimTime{1, 1});
        const auto& comments = sim.platform().comments();
        REQUIRE(comments.size() == 3);
        CHECK(comments[0].author == AgentId("c1"));
        CHECK(comments[1].author == AgentId("v01"));
        CHECK(comments[2].author == AgentId("v02"));
        CHECK(comments[2].id.str() == "c-2");
    }
}

TEST_CASE("scandal target selection") {
    const std::vector<CandidateRef> cands{{AgentId("c2"), "B"}, {AgentId("c1"), "A"}};
    const auto none = trigger_scandal(nullptr, cands);
    CHECK(none.target == AgentId("c1"));
    CHECK(none.flag == std::optional<std::string>("no_poll_tiebreak"));

    PollSnapshot p;
    p.tallies = {{AgentId("c1"), 4}, {AgentId("c2"), 4}};
    const auto tie = trigger_scandal(&p, cands);
    CHECK(tie.target == AgentId("c1"));
    CHECK(tie.flag == std::optional<std::string>("tie_tiebreak"));

    p.tallies[AgentId("c2")] = 9;
    const auto lead = trigger_scandal(&p, cands);
    CHECK(lead.target == AgentId("c2"));
    CHECK_FALSE(lead.flag);
}

TEST_CASE("forced scandal fires at the scandal hour even when the eventor's gate fails") {
    auto c = config(2, 2);
    c.scandal_days = {2};
    ProviderRouter router(c.provider);
    auto s = base_script();
    s.add(vote("v01", "c2"));
    s.add(vote("v02", "c2"));
    fixtures::install_script(router, std::move(s));
    Simulation sim(c, router, small_population(2, 0.0, 0.0));
    sim.run();
    const auto events = records_of<EventRecord>(sim.log());
    REQUIRE(events.size() == 1);
    const auto& ev = events[0]->as<EventRecord>()->event;
    CHECK(ev.kind == EventKind::ForcedScandal);
    CHECK(ev.target == std::optional<AgentId>(AgentId("c2")));
    CHECK(ev.time == SimTime{2, 0});
    CHECK(events[0]->has_flag("forced"));
    CHECK_FALSE(events[0]->has_flag("tie_tiebreak"));
    CHECK(sim.events().size() == 1);
}

TEST_CASE("tallies follow the scripted votes and conserve voters") {
    auto c = config(1, 1);
    c.chance_overrides["*"] = 0.0;
    ProviderRouter router(c.provider);
    auto s = base_script();
    for (int i = 1; i <= 16; ++i) s.add(vote(fmt::format("v{:02}", i), i <= 9 ? "c1 name" : "C2"));
    fixtures::install_script(router, std::move(s));
    Simulation sim(c, router, small_population(16, 0.0));
    const auto snap = sim.daily_vote(1, true);
    CHECK(snap.tallies.at(AgentId("c1")) == 9);
    CHECK(snap.tallies.at(AgentId("c2")) == 7);
    CHECK(snap.abstentions == 0);
    CHECK(snap.polled() == 16);
    for (const auto* r : records_of<VoteRecord>(sim.log())) CHECK_FALSE(r->has_flag("rule_violation"));
    CHECK(sim.polls().history().size() == 1);
}

TEST_CASE("property: every poll conserves the voter count") {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        auto c = config(3, 3);
        c.seed = seed;
        c.n_voters = 6;
        c.scandal_days = {2};
        c.models.candidates = {"synthetic/a", "synthetic/b"};
        c.models.voters = {"synthetic/v"};
        c.models.eventor = "synthetic/e";
        c.candidates_vote = seed == 2;
        ProviderRouter router(c.provider);
        const auto log = run_simulation(c, router);
        const int electorate = 6 + (seed == 2 ? 2 : 0);
        for (const auto* r : records_of<PollRecord>(log)) {
            const auto& s = r->as<PollRecord>()->snapshot;
            CHECK(s.polled() == electorate);
            CHECK(s.per_voter.size() == static_cast<std::size_t>(electorate));
        }
    }
}

TEST_CASE("refusing the forced vote is flagged once per refusal") {
    auto c = config(1, 1);
    c.chance_overrides["*"] = 0.0;
    ProviderRouter router(c.provider);
    auto s = base_script();
    s.add(vote("v01", "c1"));
    s.add(vote("v02", "abstain"));
    ScriptEntry garbage;
    garbage.agent = AgentId("v03");
    garbage.purpose = CallPurpose::Vote;
    garbage.response = "I refuse to choose.";
    s.add(garbage);
    s.add(vote("v04", "Nobody"));
    fixtures::install_script(router, std::move(s));
    Simulation sim(c, router, small_population(4, 0.0));
    sim.daily_vote(1, true);
    int violations = 0;
    for (const auto* r : records_of<VoteRecord>(sim.log())) violations += r->has_flag("rule_violation") ? 1 : 0;
    CHECK(violations == 3);
}

TEST_CASE("a provider failure during a turn is a logged no-op") {
    auto c = config(1, 1);
    ProviderRouter router(c.provider);
    auto s = base_script();
    ScriptEntry fail;
    fail.agent = AgentId("v01");
    fail.purpose = CallPurpose::Turn;
    fail.error = 503;
    s.add(fail);
    fixtures::install_script(router, std::move(s));
    Simulation sim(c, router, small_population(1, 1.0));
    sim.hour_step(SimTime{1, 0});
    bool found = false;
    for (const auto& r : sim.log().records) {
        const auto* call = r.as<ProviderCallRecord>();
        if (call && call->agent == AgentId("v01")) {
            found = true;
            CHECK_FALSE(call->ok);
            CHECK(r.has_flag("provider_error"));
            CHECK(r.has_flag("no_action"));
        }
    }
    CHECK(found);
    const auto diary = sim.diaries().day_entries(AgentId("v01"), 1);
    REQUIRE(diary.size() == 1);
    CHECK(diary[0].text == "Could not act this hour.");
}

TEST_CASE("fifteen requested actions yield ten accepted per step") {
    auto c = config(1, 3);
    ProviderRouter router(c.provider);
    auto s = base_script();
    ScriptEntry spam;
    spam.agent = AgentId("v01");
    spam.purpose = CallPurpose::Turn;
    spam.response = fixtures::posts_json(15);
    s.add(spam);
    fixtures::install_script(router, std::move(s));
    auto pop = small_population(1, 0.0);
    pop.back().chance_to_act = 1.0;
    Simulation sim(c, router, pop);
    for (int h = 0; h < 3; ++h) {
        const auto summary = sim.hour_step(SimTime{1, h});
        CHECK(summary.accepted == 10);
        CHECK(summary.rejected == 5);
    }
    std::size_t over_budget = 0;
    for (const auto* r : records_of<ActionRecord>(sim.log())) {
        const auto* a = r->as<ActionRecord>();
        if (a->reason == RejectReason::OverBudget) {
            ++over_budget;
            CHECK(a->stage == ActionStage::Parse);
        }
    }
    CHECK(over_budget == 15);
    CHECK(sim.platform().counts().posts == 30);
}

TEST_CASE("lifetime cap shrinks the budget and skips the call when exhausted") {
    auto c = config(1, 3);
    c.lifetime_action_cap = 12;
    ProviderRouter router(c.provider);
    auto s = base_script();
    ScriptEntry spam;
    spam.agent = AgentId("v01");
    spam.purpose = CallPurpose::Turn;
    spam.response = fixtures::posts_json(15);
    s.add(spam);
    auto script = fixtures::install_script(router, std::move(s));
    auto pop = small_population(1, 0.0);
    pop.back().chance_to_act = 1.0;
    Simulation sim(c, router, pop);
    CHECK(sim.hour_step(SimTime{1, 0}).accepted == 10);
    CHECK(sim.hour_step(SimTime{1, 1}).accepted == 2);
    const auto calls_before = script->calls();
    CHECK(sim.hour_step(SimTime{1, 2}).accepted == 0);
    CHECK(script->calls() == calls_before);
    CHECK(sim.diaries().day_entries(AgentId("v01"), 1).back().text == "No actions left.");
}

TEST_CASE("identical configs give byte-identical logs; parallelism does not matter") {
    auto c = config(2, 4);
    c.n_voters = 8;
    c.scandal_days = {2};
    c.models.candidates = {"synthetic/a", "synthetic/b"};
    c.models.voters = {"synthetic/v1", "synthetic/v2", "synthetic/v3"};
    c.models.eventor = "synthetic/e";
    ProviderRouter r1(c.provider), r2(c.provider), r3(c.provider), r4(c.provider);
    const auto a = canonical_text(run_simulation(c, r1));
    const auto b = canonical_text(run_simulation(c, r2));
    CHECK(a == b);
    auto par = c;
    par.parallel = 4;
    auto pa = run_simulation(par, r3);
    pa.config = to_json(c);  // the config block records the parallel setting itself
    CHECK(canonical_text(pa) == a);
    auto other = c;
    other.seed = c.seed + 1;
    CHECK(canonical_text(run_simulation(other, r4)) != a);
}

TEST_CASE("prompt logging records the exchanged text") {
    auto c = config(1, 1);
    c.log_prompts = true;
    ProviderRouter router(c.provider);
    auto s = base_script();
    s.add(turn("v01", 1, 0, R"([{"type":"post","text":"hi"}])"));
    fixtures::install_script(router, std::move(s));
    Simulation sim(c, router, small_population(1, 1.0));
    sim.hour_step(SimTime{1, 0});
    for (const auto* r : records_of<ProviderCallRecord>(sim.log())) {
        const auto* call = r->as<ProviderCallRecord>();
        REQUIRE(call->prompt);
        CHECK(call->prompt->find("## Your turn") != std::string::npos);
        if (call->agent == AgentId("v01")) CHECK(call->response == std::optional<std::string>(R"([{"type":"post","text":"hi"}])"));
    }
}

TEST_CASE("population validation") {
    auto c = config(1, 1);
    ProviderRouter router(c.provider);
    auto dup = small_population(2, 0.5);
    dup.push_back(dup.back());
    CHECK_THROWS_AS(Simulation(c, router, dup), std::invalid_argument);
    auto no_cand = small_population(2, 0.5);
    no_cand.erase(no_cand.begin(), no_cand.begin() + 2);
    CHECK_THROWS_AS(Simulation(c, router, no_cand), std::invalid_argument);
    auto bad = config(1, 1);
    bad.hours_per_day = 0;
    CHECK_THROWS_AS(Simulation(bad, router, small_population(2, 0.5)), ConfigError);
}

TEST_CASE("an unknown model aborts the run before any step") {
    auto c = config(1, 1);
    c.provider.backend = Backend::Http;
    c.provider.api_key_env = "ELECTWIT_TEST_UNSET_KEY_VARIABLE";
    c.models.candidates = {"openai/gpt-4.1-mini", "openai/gpt-4.1"};
    c.models.voters = {"openai/gpt-4.1-mini"};
    ProviderRouter router(c.provider);
    Simulation sim(c, router, fixtures::names());
    CHECK_THROWS_AS(sim.run(), ProviderConfigError);
    CHECK(sim.log().records.empty());
}
