#include <fstream>

#include <fmt/format.h>

#include "electwit/personas.hpp"
#include "electwit/text.hpp"

namespace electwit {
namespace {

BackgroundVector draw_background(Rng& rng) {
    BackgroundVector v;
    do {
        for (auto& x : v.values) x = static_cast<int>(rng.uniform_int(kBackgroundMin, kBackgroundMax));
    } while (v.is_zero());
    return v;
}

std::vector<std::string> pick_names(Rng& rng, std::span<const std::string> pool, std::size_t count) {
    if (pool.size() < count) {
        throw std::invalid_argument(
            fmt::format("name pool has {} names, population needs {}", pool.size(), count));
    }
    std::vector<std::string> names(pool.begin(), pool.end());
    for (std::size_t i = 0; i < count; ++i) {
        const auto j = static_cast<std::size_t>(rng.uniform_int(static_cast<std::int64_t>(i),
                                                                static_cast<std::int64_t>(names.size() - 1)));
        std::swap(names[i], names[j]);
    }
    names.resize(count);
    return names;
}

}  // namespace

std::vector<AgentProfile> generate_population(Rng& rng, std::uint64_t seed, std::size_t n_voters,
                                              std::span<const std::string> names) {
    if (n_voters < 1) throw std::invalid_argument("generate_population: need at least one voter");
    const auto picked = pick_names(rng, names, n_voters + 2);

    std::vector<AgentProfile> out;
    out.reserve(n_voters + 3);

    AgentProfile c1{AgentId("c1"), picked[0], Role::Candidate, {}, draw_background(rng), 0.0};
    c1.chance_to_act = rng.uniform_real(kVoterChanceMin, kVoterChanceMax);

    AgentProfile c2{AgentId("c2"), picked[1], Role::Candidate, {}, std::nullopt, 0.0};
    for (std::uint64_t attempt = 0;; ++attempt) {
        if (attempt == kCandidateSamplingBudget) {
            throw GenerationError(fmt::format("no candidate pair with cosine similarity <= {} after {} attempts "
                                              "(seed {})",
                                              kCandidateSimilarityMax, kCandidateSamplingBudget, seed),
                                  seed);
        }
        auto candidate = draw_background(rng);
        if (cosine_similarity(*c1.background, candidate) <= kCandidateSimilarityMax) {
            c2.background = candidate;
            break;
        }
    }
    c2.chance_to_act = rng.uniform_real(kVoterChanceMin, kVoterChanceMax);

    AgentProfile eventor{AgentId("e1"), "Newsroom", Role::Eventor, {}, std::nullopt, 0.0};
    eventor.chance_to_act = rng.uniform_real(kEventorChanceMin, kEventorChanceMax);

    out.push_back(std::move(c1));
    out.push_back(std::move(c2));
    out.push_back(std::move(eventor));

    const auto width = std::max<std::size_t>(2, fmt::format("{}", n_voters).size());
    for (std::size_t i = 0; i < n_voters; ++i) {
        AgentProfile v;
        v.id = AgentId(fmt::format("v{:0{}}", i + 1, width));
        v.display_name = picked[i + 2];
        v.role = Role::Voter;
        v.background = draw_background(rng);
        v.chance_to_act = rng.uniform_real(kVoterChanceMin, kVoterChanceMax);
        out.push_back(std::move(v));
    }
    return out;
}

std::vector<AgentProfile> generate_population(std::uint64_t seed, std::size_t n_voters,
                                              std::span<const std::string> names) {
    Rng rng(seed);
    return generate_population(rng, seed, n_voters, names);
}

std::vector<std::string> load_name_pool(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error(fmt::format("cannot open name pool '{}'", path));
    std::vector<std::string> names;
    std::string line;
    while (std::getline(in, line)) {
        auto name = text::trim(line);
        if (name.empty() || name.front() == '#') continue;
        names.push_back(std::move(name));
    }
    return names;
}

}  // namespace electwit
