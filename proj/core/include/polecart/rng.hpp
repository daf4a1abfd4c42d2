#pragma once

#include <cstdint>
#include <random>

namespace polecart {

/// Deterministic 64-bit PRNG stream.
///
/// All randomness in the project flows through this wrapper. The mapping from
/// raw engine output to doubles and bounded integers is fixed here instead of
/// relying on std::uniform_*_distribution, whose draw sequences are not pinned
/// by the standard. One call to uniform01()/uniform()/below() consumes exactly
/// one engine output.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform in [0, 1) with 53-bit resolution.
    double uniform01() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    /// Uniform in [lo, hi).
    double uniform(double lo, double hi) {
        return lo + (hi - lo) * uniform01();
    }

    /// Uniform integer in [0, n). n must be nonzero.
    std::uint64_t below(std::uint64_t n) { return engine_() % n; }

private:
    std::mt19937_64 engine_;
};

}  // namespace polecart
