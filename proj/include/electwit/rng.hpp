#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>

namespace electwit {

/// Seeded generator used for every stochastic choice in a run.
///
/// std::mt19937_64 output is fully specified by the standard, but the
/// standard distributions are not; bounded integers and unit reals are
/// therefore derived here so runs replay bit-for-bit on any toolchain.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() {
        ++draws_;
        return engine_();
    }

    /// Uniform integer on the closed range [lo, hi].
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
        if (hi < lo) throw std::invalid_argument("uniform_int: empty range");
        const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
        if (span == 0) return static_cast<std::int64_t>(next_u64());
        // Rejection sampling over the largest multiple of span.
        const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % span);
        std::uint64_t x = 0;
        do {
            x = next_u64();
        } while (x >= limit);
        return lo + static_cast<std::int64_t>(x % span);
    }

    /// Uniform real on [0, 1) with 53 bits of precision.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform_real(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// One draw, always consumed, even for p == 0 or p == 1.
    bool bernoulli(double p) { return uniform01() < p; }

    /// Raw 64-bit words consumed so far.
    std::uint64_t draws() const noexcept { return draws_; }

private:
    std::mt19937_64 engine_;
    std::uint64_t draws_ = 0;
};

}  // namespace electwit
