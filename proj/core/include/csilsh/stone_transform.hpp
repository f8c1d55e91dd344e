#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace csilsh {

/// Factored form of the D x D sum-to-one (STOne) transform
/// H = S4 (x) S4 (x) ... (x) S4 with `levels` factors, where
///
///   S4 = 1/2 * [[-1, 1, 1, 1], [1, -1, 1, 1], [1, 1, -1, 1], [1, 1, 1, -1]].
///
/// H is symmetric, orthonormal and every row sums to one. The dense matrix is
/// never formed; see apply().
class StonePlan {
public:
    std::size_t dim() const noexcept { return dim_; }
    std::size_t levels() const noexcept { return levels_; }

private:
    StonePlan(std::size_t dim, std::size_t levels) : dim_(dim), levels_(levels) {}
    friend StonePlan build_plan(std::size_t dim);

    std::size_t dim_;
    std::size_t levels_;
};

/// Throws Errc::NotPowerOfFour unless dim = 4^m with m >= 1.
StonePlan build_plan(std::size_t dim);

bool is_power_of_four(std::size_t n) noexcept;

/// Smallest 4^m (m >= 1) that is >= n.
std::size_t next_power_of_four(std::size_t n);

/// Counts floating-point operations performed by apply().
struct OpCounter {
    std::uint64_t flops = 0;
};

/// out = H * in. `in` and `out` may alias. Runs `levels` in-place stencil
/// stages over groups of four strided entries: Theta(D log D) work.
void apply(const StonePlan& plan, std::span<const double> in, std::span<double> out,
           OpCounter* counter = nullptr);

std::vector<double> apply(const StonePlan& plan, std::span<const double> v);

/// The pseudo-random +-1 diagonal applied before the transform.
class SignDiagonal {
public:
    std::size_t dim() const noexcept { return signs_.size(); }
    std::uint64_t seed() const noexcept { return seed_; }
    std::span<const std::int8_t> signs() const noexcept { return signs_; }

    /// Rebuilds a diagonal from stored signs (used by index deserialization).
    static SignDiagonal from_signs(std::vector<std::int8_t> signs, std::uint64_t seed);

private:
    SignDiagonal(std::vector<std::int8_t> signs, std::uint64_t seed)
        : signs_(std::move(signs)), seed_(seed) {}
    friend SignDiagonal make_sign_diagonal(std::size_t dim, std::uint64_t seed);

    std::vector<std::int8_t> signs_;
    std::uint64_t seed_;
};

SignDiagonal make_sign_diagonal(std::size_t dim, std::uint64_t seed);

/// sign(H * diag * f) packed one bit per entry: bit set <=> entry >= 0.
class SignSketch {
public:
    SignSketch() = default;
    explicit SignSketch(std::size_t dim) : dim_(dim), words_((dim + 63) / 64, 0) {}

    std::size_t dim() const noexcept { return dim_; }
    bool positive(std::size_t i) const noexcept { return (words_[i / 64] >> (i % 64)) & 1U; }
    void set_positive(std::size_t i) noexcept { words_[i / 64] |= std::uint64_t{1} << (i % 64); }
    std::span<const std::uint64_t> words() const noexcept { return words_; }

    friend bool operator==(const SignSketch&, const SignSketch&) = default;

private:
    std::size_t dim_ = 0;
    std::vector<std::uint64_t> words_;
};

/// Throws Errc::DimensionMismatch unless f, plan and diag share one length.
SignSketch sketch(const StonePlan& plan, const SignDiagonal& diag, std::span<const double> f);

} // namespace csilsh
