#include <algorithm>
#include <future>

#include <fmt/format.h>

#include "electwit/engine.hpp"
#include "electwit/text.hpp"

namespace electwit {
namespace {

// Evaluates f(0..n-1), at most `parallel` at a time, results in index order.
template <class F>
auto ordered_map(std::size_t n, int parallel, F&& f) {
    using R = decltype(f(std::size_t{}));
    std::vector<R> out;
    out.reserve(n);
    if (parallel <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) out.push_back(f(i));
        return out;
    }
    const auto width = static_cast<std::size_t>(parallel);
    for (std::size_t start = 0; start < n; start += width) {
        std::vector<std::future<R>> batch;
        for (std::size_t i = start; i < std::min(n, start + width); ++i) {
            batch.push_back(std::async(std::launch::async, [&f, i] { return f(i); }));
        }
        for (auto& fut : batch) out.push_back(fut.get());
    }
    return out;
}

ActionKind kind_from_name(std::string_view s) { return action_kind_from_string(s).value_or(ActionKind::Unknown); }

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += sep;
        out += parts[i];
    }
    return out;
}

}  // namespace

Simulation::Simulation(SimConfig config, ProviderRouter& providers, std::span<const std::string> names)
    : config_(std::move(config)), providers_(providers), rng_(config_.seed) {
    config_.validate();
    population_ = generate_population(rng_, config_.seed, static_cast<std::size_t>(config_.n_voters), names);
    apply_config_to_population(config_, population_);
    init();
}

Simulation::Simulation(SimConfig config, ProviderRouter& providers, std::vector<AgentProfile> population)
    : config_(std::move(config)), providers_(providers), rng_(config_.seed), population_(std::move(population)) {
    config_.validate();
    init();
}

void Simulation::init() {
    std::sort(population_.begin(), population_.end(),
              [](const AgentProfile& a, const AgentProfile& b) { return a.id < b.id; });
    std::size_t eventors = 0;
    for (std::size_t i = 0; i < population_.size(); ++i) {
        const auto& p = population_[i];
        if (i > 0 && population_[i - 1].id == p.id) {
            throw std::invalid_argument(fmt::format("duplicate agent id '{}'", p.id.str()));
        }
        if (p.role == Role::Candidate) candidates_.push_back(CandidateRef{p.id, p.display_name});
        if (p.role == Role::Eventor) {
            ++eventors;
        } else {
            platform_.register_author(p.id, p.display_name);
        }
    }
    if (eventors > 1) throw std::invalid_argument("at most one eventor is supported");
    if (candidates_.empty()) throw std::invalid_argument("population has no candidates");
    log_.config = to_json(config_);
    log_.population = population_;
}

Record& Simulation::push(SimTime time, Phase phase, RecordBody body) {
    log_.records.push_back(Record{next_seq_++, time, phase, {}, std::move(body)});
    return log_.records.back();
}

ScenarioView Simulation::scenario(SimTime now) const {
    return ScenarioView{candidates_, now, config_.days, config_.hours_per_day};
}

std::vector<Event> Simulation::events_on(int day) const {
    std::vector<Event> out;
    for (const auto& e : events_) {
        if (e.time.day == day) out.push_back(e);
    }
    return out;
}

std::size_t Simulation::budget_for(const AgentProfile& agent) const {
    auto budget = static_cast<std::size_t>(config_.actions_per_turn);
    if (config_.lifetime_action_cap) {
        const auto cap = static_cast<std::size_t>(*config_.lifetime_action_cap);
        auto it = accepted_total_.find(agent.id);
        const std::size_t used = it == accepted_total_.end() ? 0 : it->second;
        budget = std::min(budget, cap > used ? cap - used : 0);
    }
    return budget;
}

Simulation::CallOutcome Simulation::call(const CompletionRequest& request) {
    auto& provider = providers_.resolve(request.model);
    try {
        auto completion = provider.complete(request);
        const int retries = completion.retries;
        return CallOutcome{std::move(completion), {}, retries};
    } catch (const ProviderError& e) {
        return CallOutcome{std::nullopt, e.what(), e.retries()};
    }
}

std::vector<Simulation::CallOutcome> Simulation::call_all(const std::vector<CompletionRequest>& requests) {
    return ordered_map(requests.size(), config_.parallel, [&](std::size_t i) { return call(requests[i]); });
}

void Simulation::log_call(SimTime time, Phase phase, const AgentProfile& agent, CallPurpose purpose,
                          const CompletionRequest& request, const CallOutcome& outcome) {
    ProviderCallRecord rec;
    rec.agent = agent.id;
    rec.model = request.model;
    rec.purpose = purpose;
    rec.retries = outcome.retries;
    rec.ok = outcome.completion.has_value();
    rec.error = outcome.error;
    if (config_.log_prompts) {
        rec.prompt = text::sanitize_utf8(request.system_prompt + "\n\n" + request.user_prompt);
        if (outcome.completion) rec.response = text::sanitize_utf8(outcome.completion->text);
    }
    auto& r = push(time, phase, std::move(rec));
    if (!outcome.completion) r.add_flag("provider_error");
}

bool Simulation::run_eventor(SimTime time, bool forced) {
    const auto it = std::find_if(population_.begin(), population_.end(),
                                 [](const AgentProfile& p) { return p.role == Role::Eventor; });
    const auto& eventor = *it;

    std::optional<ScandalTarget> scandal;
    std::optional<CandidateRef> target;
    if (forced) {
        scandal = trigger_scandal(polls_.latest(), candidates_);
        for (const auto& c : candidates_) {
            if (c.id == scandal->target) target = c;
        }
    }
    const auto feed = platform_.render_feed(time, config_.feed_max_posts);
    const auto view = scenario(time);
    auto req = build_event_prompt(EventPromptInputs{eventor, feed, events_, polls_.history(), target, view});
    req.temperature = config_.temperature;
    const auto outcome = call(req);
    log_call(time, Phase::Event, eventor, CallPurpose::Event, req, outcome);
    if (!outcome.completion) return false;

    auto body = parse_event_text(outcome.completion->text);
    if (body.empty()) {
        log_.records.back().add_flag("empty_event");
        return false;
    }
    Event ev;
    ev.id = ItemId{ItemKind::Event, events_.size()};
    ev.time = time;
    ev.text = std::move(body);
    ev.kind = forced ? EventKind::ForcedScandal : EventKind::Spontaneous;
    if (scandal) ev.target = scandal->target;
    auto& rec = push(time, Phase::Event, EventRecord{ev});
    if (forced) rec.add_flag("forced");
    if (scandal && scandal->flag) rec.add_flag(*scandal->flag);
    events_.push_back(ev);

    DiaryEntry entry{eventor.id, time, fmt::format("Published [{}]: {}", ev.id.str(), ev.text), DiaryKind::Event};
    push(time, Phase::Event, DiaryRecord{entry});
    diaries_.add(std::move(entry));
    return true;
}

HourSummary Simulation::hour_step(SimTime time) {
    HourSummary summary;
    summary.time = time;

    const auto draws_before = rng_.draws();
    const auto gates = draw_gates(rng_, population_);
    GateRecord gate;
    for (std::size_t i = 0; i < population_.size(); ++i) {
        if (gates[i]) gate.acting.push_back(population_[i].id);
    }
    gate.draws = rng_.draws() - draws_before;
    summary.acting = gate.acting.size();
    push(time, Phase::Gate, std::move(gate));

    const bool scandal_hour =
        time.hour == config_.scandal_hour &&
        std::find(config_.scandal_days.begin(), config_.scandal_days.end(), time.day) != config_.scandal_days.end();
    for (std::size_t i = 0; i < population_.size(); ++i) {
        if (population_[i].role == Role::Eventor && (gates[i] || scandal_hour)) {
            summary.event = run_eventor(time, scandal_hour);
        }
    }

    // One snapshot for every agent acting this hour.
    const auto feed = platform_.render_feed(time, config_.feed_max_posts);
    const auto today = events_on(time.day);
    const auto view = scenario(time);

    struct Turn {
        std::size_t agent;
        std::size_t budget;
        std::optional<std::size_t> request;
    };
    std::vector<Turn> turns;
    std::vector<CompletionRequest> requests;
    for (std::size_t i = 0; i < population_.size(); ++i) {
        const auto& p = population_[i];
        if (!gates[i] || p.role == Role::Eventor) continue;
        Turn t{i, budget_for(p), std::nullopt};
        if (t.budget > 0) {
            const auto memory = diaries_.memory_for(p.id, time.day);
            auto req = build_turn_prompt(TurnPromptInputs{p, feed, today, polls_.history(), memory, t.budget, view});
            req.temperature = config_.temperature;
            t.request = requests.size();
            requests.push_back(std::move(req));
        }
        turns.push_back(t);
    }
    const auto outcomes = call_all(requests);

    for (const auto& turn : turns) {
        const auto& agent = population_[turn.agent];
        std::vector<std::string> notes;
        if (!turn.request) {
            notes.emplace_back("No actions left.");
        } else {
            const auto& outcome = outcomes[*turn.request];
            log_call(time, Phase::Turn, agent, CallPurpose::Turn, requests[*turn.request], outcome);
            if (!outcome.completion) {
                log_.records.back().add_flag("no_action");
                notes.emplace_back("Could not act this hour.");
            } else {
                const auto parsed = parse_actions(outcome.completion->text, turn.budget);
                for (const auto& drop : parsed.drops) {
                    ActionRecord rec;
                    rec.agent = agent.id;
                    rec.action = kind_from_name(drop.action_type);
                    rec.stage = ActionStage::Parse;
                    rec.reason = drop.reason;
                    rec.raw_target = drop.raw_target;
                    rec.detail = drop.detail;
                    push(time, Phase::Turn, std::move(rec));
                    ++summary.rejected;
                }
                if (!parsed.drops.empty()) {
                    notes.push_back(fmt::format("{} response element(s) were discarded.", parsed.drops.size()));
                }
                for (const auto& action : parsed.actions) {
                    ActionRecord rec;
                    rec.agent = agent.id;
                    rec.stage = ActionStage::Apply;
                    bool truncated = false;
                    if (const auto* post = std::get_if<PostAction>(&action)) {
                        rec.action = ActionKind::Post;
                        auto s = platform_.submit_post(agent.id, post->text, time);
                        rec.accepted = s.accepted();
                        rec.reason = s.rejection;
                        truncated = s.truncated;
                        if (s.item) {
                            rec.item = s.item->id;
                            rec.text = s.item->text;
                            notes.push_back(fmt::format("Posted [{}]: {}", s.item->id.str(), s.item->text));
                        }
                    } else if (const auto* reply = std::get_if<ReplyAction>(&action)) {
                        rec.action = ActionKind::Reply;
                        rec.target = reply->target;
                        auto s = platform_.submit_comment(agent.id, reply->target, reply->text, time);
                        rec.accepted = s.accepted();
                        rec.reason = s.rejection;
                        truncated = s.truncated;
                        if (s.item) {
                            rec.item = s.item->id;
                            rec.text = s.item->text;
                            notes.push_back(fmt::format("Replied to [{}] with [{}]: {}", reply->target.str(),
                                                        s.item->id.str(), s.item->text));
                        }
                    } else if (const auto* like = std::get_if<LikeAction>(&action)) {
                        rec.action = ActionKind::Like;
                        rec.target = like->target;
                        auto s = platform_.submit_like(agent.id, like->target, time);
                        rec.accepted = s.accepted();
                        rec.reason = s.rejection;
                        if (s.item) notes.push_back(fmt::format("Liked [{}]", like->target.str()));
                    } else {
                        continue;
                    }
                    if (!rec.accepted) {
                        notes.push_back(fmt::format("Tried to {} {} but it was rejected ({}).", to_string(rec.action),
                                                    rec.target ? rec.target->str() : std::string("a post"),
                                                    to_string(*rec.reason)));
                        ++summary.rejected;
                    } else {
                        ++accepted_total_[agent.id];
                        ++summary.accepted;
                    }
                    auto& r = push(time, Phase::Turn, std::move(rec));
                    if (truncated) r.add_flag("truncated");
                }
                if (parsed.note) notes.push_back("Plan: " + *parsed.note);
                if (parsed.actions.empty() && parsed.drops.empty()) notes.emplace_back("Took no action this hour.");
            }
        }
        DiaryEntry entry{agent.id, time, join(notes, " | "), DiaryKind::Action};
        push(time, Phase::Turn, DiaryRecord{entry});
        diaries_.add(std::move(entry));
    }

    if (progress_) {
        progress_(fmt::format("day {} {:>5}  acting {:>2}/{}  accepted {:>3}  rejected {:>3}{}", time.day,
                              clock_label(time.hour), summary.acting, population_.size(), summary.accepted,
                              summary.rejected, summary.event ? "  +event" : ""));
    }
    return summary;
}

PollSnapshot Simulation::daily_vote(int day, bool forced) {
    const SimTime stamp{day, config_.hours_per_day - 1};
    const auto feed = platform_.render_feed(SimTime{day, config_.hours_per_day}, config_.feed_max_posts);
    const auto today = events_on(day);
    const auto view = scenario(stamp);

    std::vector<std::size_t> voters;
    std::vector<CompletionRequest> requests;
    for (std::size_t i = 0; i < population_.size(); ++i) {
        const auto& p = population_[i];
        if (p.role == Role::Voter || (p.role == Role::Candidate && config_.candidates_vote)) {
            const auto memory = diaries_.memory_for(p.id, day);
            auto req = build_vote_prompt(VotePromptInputs{p, feed, today, polls_.history(), memory, forced, view});
            req.temperature = config_.temperature;
            voters.push_back(i);
            requests.push_back(std::move(req));
        }
    }
    const auto outcomes = call_all(requests);

    PollSnapshot snap;
    snap.day = day;
    snap.forced = forced;
    for (const auto& c : candidates_) snap.tallies[c.id] = 0;

    for (std::size_t k = 0; k < voters.size(); ++k) {
        const auto& voter = population_[voters[k]];
        const auto& outcome = outcomes[k];
        log_call(stamp, Phase::Vote, voter, CallPurpose::Vote, requests[k], outcome);

        VoteParse vp;
        if (outcome.completion) vp = parse_vote(outcome.completion->text, candidates_, forced);
        VoteRecord rec{voter.id, vp.decision, forced, vp.parsed, vp.raw_choice};
        auto& r = push(stamp, Phase::Vote, std::move(rec));
        if (vp.rule_violation) r.add_flag("rule_violation");
        if (!outcome.completion) r.add_flag("provider_error");

        snap.per_voter[voter.id] = vp.decision;
        std::string line;
        if (vp.decision.candidate) {
            ++snap.tallies[*vp.decision.candidate];
            for (const auto& c : candidates_) {
                if (c.id == *vp.decision.candidate) line = fmt::format("Voted for {}.", c.name);
            }
        } else {
            ++snap.abstentions;
            line = "Abstained.";
        }
        if (vp.note) line += " " + *vp.note;
        DiaryEntry entry{voter.id, stamp, std::move(line), DiaryKind::Vote};
        push(stamp, Phase::Vote, DiaryRecord{entry});
        diaries_.add(std::move(entry));
    }
    push(stamp, Phase::Vote, PollRecord{snap});
    polls_.record(snap);
    return snap;
}

void Simulation::consolidate_day(int day) {
    const SimTime stamp{day, config_.hours_per_day - 1};
    std::vector<std::vector<DiaryEntry>> entries;
    for (const auto& p : population_) entries.push_back(diaries_.day_entries(p.id, day));

    const auto results = ordered_map(population_.size(), config_.parallel, [&](std::size_t i) {
        const auto& p = population_[i];
        return consolidate_diary(p, day, entries[i], providers_.resolve(p.model), stamp);
    });

    for (std::size_t i = 0; i < population_.size(); ++i) {
        const auto& p = population_[i];
        const auto& c = results[i];
        if (c.provider_called) {
            ProviderCallRecord rec;
            rec.agent = p.id;
            rec.model = p.model;
            rec.purpose = CallPurpose::Consolidate;
            rec.retries = c.retries;
            rec.ok = c.error.empty();
            rec.error = c.error;
            if (config_.log_prompts) {
                rec.prompt = text::sanitize_utf8(c.prompt);
                if (rec.ok) rec.response = c.response;
            }
            auto& r = push(stamp, Phase::Consolidate, std::move(rec));
            if (!c.error.empty()) r.add_flag("provider_error");
        }
        auto& r = push(stamp, Phase::Consolidate, DiaryRecord{c.entry});
        if (c.fallback) r.add_flag("fallback");
        diaries_.add(c.entry);
    }
}

void Simulation::run() {
    for (const auto& p : population_) providers_.check(p.model);
    for (int day = 1; day <= config_.days; ++day) {
        for (int hour = 0; hour < config_.hours_per_day; ++hour) hour_step(SimTime{day, hour});
        const bool final_day = day == config_.days;
        const auto poll = daily_vote(day, final_day);
        if (progress_) {
            std::string line = fmt::format("day {} {}poll:", day, final_day ? "final " : "");
            for (const auto& c : candidates_) line += fmt::format(" {} {}", c.name, poll.tallies.at(c.id));
            progress_(line + fmt::format(", abstained {}", poll.abstentions));
        }
        consolidate_day(day);
    }
}

RunLog run_simulation(const SimConfig& config, ProviderRouter& providers, ProgressSink progress) {
    const auto names = load_name_pool(config.names_file.empty() ? default_names_file() : config.names_file);
    Simulation sim(config, providers, names);
    sim.set_progress(std::move(progress));
    sim.run();
    return sim.take_log();
}

}  // namespace electwit
