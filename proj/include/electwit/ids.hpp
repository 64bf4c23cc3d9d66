#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>

namespace electwit {

/// Identifier of a simulated agent ("c1", "e1", "v07", ...). Ordering is
/// plain lexicographic on the string form and drives every deterministic
/// iteration order in the engine.
class AgentId {
public:
    AgentId() = default;
    explicit AgentId(std::string value) : value_(std::move(value)) {}

    const std::string& str() const noexcept { return value_; }
    bool empty() const noexcept { return value_.empty(); }

    auto operator<=>(const AgentId&) const = default;

private:
    std::string value_;
};

inline std::ostream& operator<<(std::ostream& os, const AgentId& id) { return os << id.str(); }

/// OpenRouter-style model identifier, e.g. "openai/gpt-4.1-mini".
using ModelId = std::string;

/// Position on the simulation clock. Days are 1-based, hours are indices
/// into the day's schedule (hour 0 is 9:00 under the default schedule).
struct SimTime {
    int day = 1;
    int hour = 0;

    auto operator<=>(const SimTime&) const = default;
};

std::string to_string(SimTime t);

/// Clock label for an hour index: 9:00 for hour 0, 17:00 for hour 8.
std::string clock_label(int hour_index);

enum class ItemKind { Post, Comment, Event };

/// Platform-issued identifier. Rendered as p-<n>, c-<n> or e-<n>.
struct ItemId {
    ItemKind kind = ItemKind::Post;
    std::uint64_t ordinal = 0;

    std::string str() const;
    static std::optional<ItemId> parse(std::string_view text);

    auto operator<=>(const ItemId&) const = default;
};

inline std::ostream& operator<<(std::ostream& os, const ItemId& id) { return os << id.str(); }

}  // namespace electwit
