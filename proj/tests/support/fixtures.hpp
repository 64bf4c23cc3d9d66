#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "electwit/engine.hpp"
#include "electwit/runlog.hpp"

namespace fixtures {

using namespace electwit;

inline std::filesystem::path temp_dir(const std::string& name) {
    const char* root = std::getenv("ELECTWIT_TEST_TMP");
    auto dir = std::filesystem::path(root ? root : std::filesystem::temp_directory_path().string()) / name;
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

inline std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

inline void spit(const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
}

inline std::vector<std::string> names() { return load_name_pool(default_names_file()); }

inline BackgroundVector bg(std::initializer_list<int> head) {
    BackgroundVector v{};
    std::size_t i = 0;
    for (int x : head) v.values[i++] = x;
    return v;
}

inline AgentProfile profile(std::string id, Role role, std::string model, std::optional<BackgroundVector> b,
                            double chance) {
    return AgentProfile{AgentId(id), id + " name", role, std::move(model), b, chance};
}

/// Models routed to the scripted backend; the backend itself is installed
/// by the test.
inline SimConfig scripted_config(int days, int hours, int voters) {
    SimConfig c;
    c.seed = 11;
    c.days = days;
    c.hours_per_day = hours;
    c.n_voters = voters;
    c.scandal_days.clear();
    c.models.candidates = {"scripted/cand-a", "scripted/cand-b"};
    c.models.voters = {"scripted/voter"};
    c.models.eventor = "scripted/eventor";
    c.provider.backend = Backend::Synthetic;
    return c;
}

inline std::shared_ptr<ScriptedProvider> install_script(ProviderRouter& router, ScriptedProvider script) {
    auto p = std::make_shared<ScriptedProvider>(std::move(script));
    router.install(Backend::Scripted, p);
    return p;
}

/// Turn JSON for `n` posts.
inline std::string posts_json(int n, const std::string& text = "post") {
    nlohmann::json a = nlohmann::json::array();
    for (int i = 0; i < n; ++i) a.push_back({{"type", "post"}, {"text", text + " " + std::to_string(i)}});
    return a.dump();
}

/// A log of `n` attempted actions by a generated population, built through
/// the platform so that every accepted action is valid. Ten attempts per
/// hour, nine hours per day, with a poll record closing every day.
inline RunLog random_log(std::uint64_t seed, std::size_t n, std::size_t voters = 16) {
    Rng rng(seed);
    RunLog log;
    log.population = generate_population(rng, seed, voters, names());
    SimConfig cfg;
    apply_config_to_population(cfg, log.population);
    log.config = to_json(cfg);

    std::vector<AgentId> actors;
    std::vector<CandidateRef> candidates;
    Platform platform;
    for (const auto& p : log.population) {
        if (p.role == Role::Eventor) continue;
        platform.register_author(p.id, p.display_name);
        actors.push_back(p.id);
        if (p.role == Role::Candidate) candidates.push_back({p.id, p.display_name});
    }
    std::vector<ItemId> items;
    std::size_t visible = 0;
    std::uint64_t seq = 0;
    auto push = [&](SimTime t, Phase ph, RecordBody body) {
        log.records.push_back(Record{seq++, t, ph, {}, std::move(body)});
    };
    auto close_day = [&](int day) {
        PollSnapshot s;
        s.day = day;
        for (const auto& c : candidates) s.tallies[c.id] = 0;
        for (const auto& p : log.population) {
            if (p.role != Role::Voter) continue;
            const auto pick = rng.uniform_int(0, 2);
            if (pick == 2) {
                s.per_voter[p.id] = VoteDecision::abstain();
                ++s.abstentions;
            } else {
                const auto& c = candidates[static_cast<std::size_t>(pick)];
                s.per_voter[p.id] = VoteDecision::vote_for(c.id);
                ++s.tallies[c.id];
            }
        }
        push(SimTime{day, 8}, Phase::Vote, PollRecord{s});
    };

    int day = 1;
    for (std::size_t i = 0; i < n; ++i) {
        const int hour_index = static_cast<int>(i / 10);
        const SimTime t{1 + hour_index / 9, hour_index % 9};
        if (t.day != day) {
            close_day(day);
            day = t.day;
        }
        const auto& actor = actors[static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(actors.size()) - 1))];
        // Only items from earlier hours are eligible targets; items are
        // created in time order, so they form a prefix.
        while (visible < items.size() && *platform.created_at(items[visible]) < t) ++visible;
        const auto kind = visible == 0 ? 0 : rng.uniform_int(0, 2);
        ActionRecord rec;
        rec.agent = actor;
        rec.stage = ActionStage::Apply;
        if (kind == 0) {
            rec.action = ActionKind::Post;
            auto s = platform.submit_post(actor, "message " + std::to_string(i), t);
            rec.accepted = s.accepted();
            rec.reason = s.rejection;
            if (s.item) {
                rec.item = s.item->id;
                rec.text = s.item->text;
                items.push_back(s.item->id);
            }
        } else {
            const auto target = items[static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(visible) - 1))];
            rec.target = target;
            if (kind == 1) {
                rec.action = ActionKind::Reply;
                auto s = platform.submit_comment(actor, target, "reply " + std::to_string(i), t);
                rec.accepted = s.accepted();
                rec.reason = s.rejection;
                if (s.item) {
                    rec.item = s.item->id;
                    rec.text = s.item->text;
                    items.push_back(s.item->id);
                }
            } else {
                rec.action = ActionKind::Like;
                auto s = platform.submit_like(actor, target, t);
                rec.accepted = s.accepted();
                rec.reason = s.rejection;
            }
        }
        push(t, Phase::Turn, std::move(rec));
    }
    close_day(day);
    return log;
}

}  // namespace fixtures
