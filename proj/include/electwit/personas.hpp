#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "electwit/ids.hpp"
#include "electwit/rng.hpp"

namespace electwit {

enum class Role { Voter, Candidate, Eventor };

const char* to_string(Role r);
std::optional<Role> role_from_string(std::string_view s);

/// Six political stances followed by the Big-5 traits.
enum class Dimension {
    EconomicPolicy,
    SocialAuthority,
    GovernmentalPower,
    ForeignPolicy,
    EnvironmentalApproach,
    NationalIdentityImmigration,
    Extraversion,
    Agreeableness,
    Conscientiousness,
    EmotionalStability,
    Openness,
};

inline constexpr std::size_t kBackgroundDims = 11;
inline constexpr int kBackgroundMin = -100;
inline constexpr int kBackgroundMax = 100;

std::string_view dimension_name(Dimension d);

struct BackgroundVector {
    std::array<int, kBackgroundDims> values{};

    int operator[](Dimension d) const { return values[static_cast<std::size_t>(d)]; }
    bool is_zero() const;
    bool in_range() const;

    bool operator==(const BackgroundVector&) const = default;
};

/// dot(a, b) / (|a| |b|). Throws std::domain_error if either vector is zero.
double cosine_similarity(const BackgroundVector& a, const BackgroundVector& b);

inline constexpr double kVoterChanceMin = 0.4;
inline constexpr double kVoterChanceMax = 0.9;
inline constexpr double kEventorChanceMin = 0.3;
inline constexpr double kEventorChanceMax = 0.7;
inline constexpr double kCandidateSimilarityMax = -0.75;
inline constexpr std::uint64_t kCandidateSamplingBudget = 100'000;

struct AgentProfile {
    AgentId id;
    std::string display_name;
    Role role = Role::Voter;
    ModelId model;
    std::optional<BackgroundVector> background;
    double chance_to_act = 0.0;

    bool operator==(const AgentProfile&) const = default;
};

class GenerationError : public std::runtime_error {
public:
    GenerationError(const std::string& what, std::uint64_t seed) : std::runtime_error(what), seed_(seed) {}
    std::uint64_t seed() const noexcept { return seed_; }

private:
    std::uint64_t seed_;
};

/// Candidates c1, c2, eventor e1, then voters v01..vNN (zero-padded so
/// lexicographic AgentId order matches numbering). Models are left empty;
/// the engine assigns them from the run config.
///
/// RNG consumption order: name selection, c1 background and chance,
/// c2 background (rejection-sampled against c1) and chance, eventor chance,
/// then each voter's background and chance.
std::vector<AgentProfile> generate_population(Rng& rng, std::uint64_t seed, std::size_t n_voters,
                                              std::span<const std::string> names);

std::vector<AgentProfile> generate_population(std::uint64_t seed, std::size_t n_voters,
                                              std::span<const std::string> names);

/// Name pool file: one name per line, blank lines and '#' comments ignored.
std::vector<std::string> load_name_pool(const std::string& path);

/// Descriptor for a score under the five-bucket scale
/// [-100,-60] (-60,-20] (-20,20) [20,60) [60,100].
std::string describe_score(Dimension d, int score);

/// One line per dimension: name, signed score, descriptor.
std::string background_prompt_block(const AgentProfile& profile);

}  // namespace electwit
