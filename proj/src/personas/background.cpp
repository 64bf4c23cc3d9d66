#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

#include "electwit/personas.hpp"

namespace electwit {
namespace {

struct DimensionInfo {
    std::string_view name;
    std::string_view negative_pole;
    std::string_view positive_pole;
};

constexpr std::array<DimensionInfo, kBackgroundDims> kDimensions{{
    {"Economic Policy", "favors state intervention", "favors free markets"},
    {"Social Authority", "socially libertarian", "socially authoritarian"},
    {"Governmental Power", "wants a smaller government", "wants a stronger government"},
    {"Foreign Policy", "non-interventionist", "interventionist"},
    {"Environmental Approach", "prioritizes economic growth", "prioritizes environmental protection"},
    {"National Identity & Immigration", "open to immigration", "restrictive on immigration"},
    {"Extraversion", "introverted", "extraverted"},
    {"Agreeableness", "confrontational", "agreeable"},
    {"Conscientiousness", "spontaneous", "conscientious"},
    {"Emotional Stability", "anxious", "emotionally stable"},
    {"Openness", "traditional", "open to new experiences"},
}};

}  // namespace

const char* to_string(Role r) {
    switch (r) {
        case Role::Voter: return "voter";
        case Role::Candidate: return "candidate";
        case Role::Eventor: return "eventor";
    }
    return "voter";
}

std::optional<Role> role_from_string(std::string_view s) {
    if (s == "voter") return Role::Voter;
    if (s == "candidate") return Role::Candidate;
    if (s == "eventor") return Role::Eventor;
    return std::nullopt;
}

std::string_view dimension_name(Dimension d) { return kDimensions[static_cast<std::size_t>(d)].name; }

bool BackgroundVector::is_zero() const {
    for (int v : values) {
        if (v != 0) return false;
    }
    return true;
}

bool BackgroundVector::in_range() const {
    for (int v : values) {
        if (v < kBackgroundMin || v > kBackgroundMax) return false;
    }
    return true;
}

double cosine_similarity(const BackgroundVector& a, const BackgroundVector& b) {
    if (a.is_zero() || b.is_zero()) throw std::domain_error("cosine_similarity: zero vector");
    // Integer accumulation is exact for |v| <= 100 over 11 dims.
    long long dot = 0;
    long long na = 0;
    long long nb = 0;
    for (std::size_t i = 0; i < kBackgroundDims; ++i) {
        dot += static_cast<long long>(a.values[i]) * b.values[i];
        na += static_cast<long long>(a.values[i]) * a.values[i];
        nb += static_cast<long long>(b.values[i]) * b.values[i];
    }
    const double sim = static_cast<double>(dot) / std::sqrt(static_cast<double>(na) * static_cast<double>(nb));
    return std::clamp(sim, -1.0, 1.0);
}

std::string describe_score(Dimension d, int score) {
    const auto& info = kDimensions[static_cast<std::size_t>(d)];
    if (score <= -60) return fmt::format("strongly {}", info.negative_pole);
    if (score <= -20) return fmt::format("somewhat {}", info.negative_pole);
    if (score < 20) return "neutral";
    if (score < 60) return fmt::format("somewhat {}", info.positive_pole);
    return fmt::format("strongly {}", info.positive_pole);
}

std::string background_prompt_block(const AgentProfile& profile) {
    if (!profile.background) throw std::invalid_argument("background_prompt_block: profile has no background");
    std::string out;
    for (std::size_t i = 0; i < kBackgroundDims; ++i) {
        const auto d = static_cast<Dimension>(i);
        const int score = profile.background->values[i];
        out += fmt::format("- {}: {:+d} ({})\n", dimension_name(d), score, describe_score(d, score));
    }
    return out;
}

}  // namespace electwit
