#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace csilsh {

// Seeding scheme: every random stream in the library is a std::mt19937_64
// seeded with a 64-bit value derived from one master seed through SplitMix64
// mixing of (parent seed, stream tag, stream index). The engine's output
// sequence is fixed by the C++ standard; the conversions to doubles and
// Gaussians below are hand-written so results do not depend on the standard
// library's distribution implementations.

std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Child seed for stream `tag`/`index` under `parent`.
std::uint64_t derive_seed(std::uint64_t parent, std::string_view tag, std::uint64_t index = 0) noexcept;

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform();

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer on [0, bound), bound > 0 (rejection sampling).
    std::uint64_t below(std::uint64_t bound);

    /// Standard normal via Box-Muller; caches the second variate.
    double normal();

    bool coin() { return (engine_() >> 63) != 0; }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace csilsh
