#include "electwit/ids.hpp"

#include <charconv>

#include <fmt/format.h>

namespace electwit {

std::string to_string(SimTime t) { return fmt::format("d{}h{}", t.day, t.hour); }

std::string clock_label(int hour_index) { return fmt::format("{}:00", 9 + hour_index); }

std::string ItemId::str() const {
    char prefix = 'p';
    switch (kind) {
        case ItemKind::Post: prefix = 'p'; break;
        case ItemKind::Comment: prefix = 'c'; break;
        case ItemKind::Event: prefix = 'e'; break;
    }
    return fmt::format("{}-{}", prefix, ordinal);
}

std::optional<ItemId> ItemId::parse(std::string_view text) {
    if (text.size() < 3 || text[1] != '-') return std::nullopt;
    ItemId id;
    switch (text[0]) {
        case 'p': id.kind = ItemKind::Post; break;
        case 'c': id.kind = ItemKind::Comment; break;
        case 'e': id.kind = ItemKind::Event; break;
        default: return std::nullopt;
    }
    const auto digits = text.substr(2);
    // Leading zeros would make parse a non-inverse of str().
    if (digits.size() > 1 && digits[0] == '0') return std::nullopt;
    for (char ch : digits) {
        if (ch < '0' || ch > '9') return std::nullopt;
    }
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), id.ordinal);
    if (ec != std::errc{} || ptr != digits.data() + digits.size()) return std::nullopt;
    return id;
}

}  // namespace electwit
