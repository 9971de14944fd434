#pragma once

#include <cstdint>
#include <random>

namespace pia3c {

/// Seeded generator used everywhere randomness is needed. Wraps mt19937_64 and
/// draws integers/reals with fixed arithmetic so results do not depend on the
/// standard library's distribution implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform integer in [0, n). n must be positive.
    std::uint64_t below(std::uint64_t n);

    /// Uniform real in [0, 1) with 53 bits of resolution.
    double uniform();

    /// Derives an independent child seed; used to hand seeds to sub-components.
    std::uint64_t fork() { return mix(next()); }

    static std::uint64_t mix(std::uint64_t x);

private:
    std::mt19937_64 engine_;
};

}  // namespace pia3c
