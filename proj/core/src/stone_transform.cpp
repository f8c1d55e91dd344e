#include "csilsh/stone_transform.hpp"

#include "csilsh/error.hpp"
#include "csilsh/random.hpp"

#include <algorithm>
#include <string>

namespace csilsh {

bool is_power_of_four(std::size_t n) noexcept {
    if (n < 4 || (n & (n - 1)) != 0) {
        return false;
    }
    // Single set bit at an even position.
    return (n & 0x5555555555555555ULL) != 0;
}

std::size_t next_power_of_four(std::size_t n) {
    std::size_t p = 4;
    while (p < n) {
        if (p > (SIZE_MAX >> 2)) {
            throw Error(Errc::InvalidConfig, "dimension " + std::to_string(n) + " too large");
        }
        p <<= 2;
    }
    return p;
}

StonePlan build_plan(std::size_t dim) {
    if (!is_power_of_four(dim)) {
        throw Error(Errc::NotPowerOfFour, "dimension " + std::to_string(dim) + " is not 4^m, m >= 1");
    }
    std::size_t levels = 0;
    for (std::size_t d = dim; d > 1; d >>= 2) {
        ++levels;
    }
    return StonePlan(dim, levels);
}

void apply(const StonePlan& plan, std::span<const double> in, std::span<double> out, OpCounter* counter) {
    const std::size_t n = plan.dim();
    if (in.size() != n || out.size() != n) {
        throw Error(Errc::DimensionMismatch,
                    "apply: expected length " + std::to_string(n) + ", got " + std::to_string(in.size()) +
                        " -> " + std::to_string(out.size()));
    }
    if (in.data() != out.data()) {
        std::copy(in.begin(), in.end(), out.begin());
    }
    double* x = out.data();

    // Stage k applies S4 along the k-th base-4 digit of the index.
    for (std::size_t stride = 1; stride < n; stride *= 4) {
        const std::size_t block = 4 * stride;
        for (std::size_t base = 0; base < n; base += block) {
            for (std::size_t j = base; j < base + stride; ++j) {
                const double a = x[j];
                const double b = x[j + stride];
                const double c = x[j + 2 * stride];
                const double d = x[j + 3 * stride];
                const double half = 0.5 * ((a + b) + (c + d));
                x[j] = half - a;
                x[j + stride] = half - b;
                x[j + 2 * stride] = half - c;
                x[j + 3 * stride] = half - d;
            }
        }
        if (counter != nullptr) {
            // 3 adds, 1 multiply, 4 subtracts per group of four.
            counter->flops += 8 * (n / 4);
        }
    }
}

std::vector<double> apply(const StonePlan& plan, std::span<const double> v) {
    std::vector<double> out(v.size());
    apply(plan, v, out);
    return out;
}

SignDiagonal SignDiagonal::from_signs(std::vector<std::int8_t> signs, std::uint64_t seed) {
    for (auto s : signs) {
        if (s != 1 && s != -1) {
            throw Error(Errc::InvalidConfig, "sign diagonal entries must be +1 or -1");
        }
    }
    return SignDiagonal(std::move(signs), seed);
}

SignDiagonal make_sign_diagonal(std::size_t dim, std::uint64_t seed) {
    if (dim == 0) {
        throw Error(Errc::InvalidConfig, "sign diagonal needs dim >= 1");
    }
    Rng rng(derive_seed(seed, "sign-diagonal"));
    std::vector<std::int8_t> signs(dim);
    for (auto& s : signs) {
        s = rng.coin() ? std::int8_t{1} : std::int8_t{-1};
    }
    return SignDiagonal(std::move(signs), seed);
}

SignSketch sketch(const StonePlan& plan, const SignDiagonal& diag, std::span<const double> f) {
    const std::size_t n = plan.dim();
    if (f.size() != n || diag.dim() != n) {
        throw Error(Errc::DimensionMismatch, "sketch: plan " + std::to_string(n) + ", diagonal " +
                                                 std::to_string(diag.dim()) + ", input " + std::to_string(f.size()));
    }
    thread_local std::vector<double> scratch;
    scratch.resize(n);
    const auto signs = diag.signs();
    for (std::size_t i = 0; i < n; ++i) {
        scratch[i] = signs[i] > 0 ? f[i] : -f[i];
    }
    apply(plan, scratch, scratch);

    SignSketch out(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (scratch[i] >= 0.0) {
            out.set_positive(i);
        }
    }
    return out;
}

} // namespace csilsh
