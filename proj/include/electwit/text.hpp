#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

namespace electwit::text {

/// Replaces every ill-formed UTF-8 sequence with U+FFFD. Model output is
/// passed through this before it reaches the platform or the run log.
std::string sanitize_utf8(std::string_view in);

/// Number of Unicode scalar values in well-formed UTF-8.
std::size_t scalar_count(std::string_view utf8);

struct Truncated {
    std::string text;
    bool truncated = false;
};

/// Keeps at most `limit` scalar values; never splits a code point.
Truncated truncate_scalars(std::string_view utf8, std::size_t limit);

bool is_blank(std::string_view s);
std::string trim(std::string_view s);
std::string to_lower_ascii(std::string_view s);

/// Single-line form: backslash, newline and carriage return are escaped.
std::string escape_line(std::string_view s);

/// FNV-1a, used for stable cache keys and mock-provider seeding.
std::uint64_t fnv1a64(std::string_view data, std::uint64_t seed = 0xcbf29ce484222325ULL);

std::string hex64(std::uint64_t v);

}  // namespace electwit::text
