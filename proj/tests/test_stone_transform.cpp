#include "csilsh/error.hpp"
#include "csilsh/random.hpp"
#include "csilsh/stone_transform.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

using namespace csilsh;

namespace {

std::vector<double> random_vector(std::size_t n, Rng& rng) {
    std::vector<double> v(n);
    for (auto& x : v) {
        x = rng.normal();
    }
    return v;
}

std::vector<double> unit(std::size_t n, std::size_t i) {
    std::vector<double> e(n, 0.0);
    e[i] = 1.0;
    return e;
}

double norm2(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) {
        s += x * x;
    }
    return std::sqrt(s);
}

} // namespace

TEST_CASE("build_plan accepts only powers of four") {
    CHECK(build_plan(4).levels() == 1);
    CHECK(build_plan(16).levels() == 2);
    CHECK(build_plan(256).levels() == 4);
    CHECK(build_plan(256).dim() == 256);
    for (std::size_t bad : {0, 1, 2, 8, 12, 32, 128, 255}) {
        CAPTURE(bad);
        try {
            (void)build_plan(bad);
            FAIL("expected NotPowerOfFour");
        } catch (const Error& e) {
            CHECK(e.code() == Errc::NotPowerOfFour);
        }
    }
    CHECK(next_power_of_four(1) == 4);
    CHECK(next_power_of_four(16) == 16);
    CHECK(next_power_of_four(17) == 64);
}

TEST_CASE("plan_4 realizes the stencil") {
    const auto plan = build_plan(4);
    const std::vector<std::vector<double>> stencil = {
        {-0.5, 0.5, 0.5, 0.5}, {0.5, -0.5, 0.5, 0.5}, {0.5, 0.5, -0.5, 0.5}, {0.5, 0.5, 0.5, -0.5}};
    for (std::size_t j = 0; j < 4; ++j) {
        const auto col = apply(plan, unit(4, j));
        const auto dense = oracle::dense_apply_oracle(plan, unit(4, j));
        for (std::size_t i = 0; i < 4; ++i) {
            CHECK(col[i] == stencil[i][j]);
            CHECK(dense[i] == stencil[i][j]);
        }
    }
    const std::vector<double> ones(4, 1.0);
    CHECK(oracle::dense_apply_oracle(plan, ones) == ones);
}

TEST_CASE("plan_16 first column is the Kronecker square of the stencil's") {
    // (1/2)(-1, 1, 1, 1) (x) (1/2)(-1, 1, 1, 1), expanded by hand.
    const std::vector<double> expected = {0.25,  -0.25, -0.25, -0.25, -0.25, 0.25, 0.25, 0.25,
                                          -0.25, 0.25,  0.25,  0.25,  -0.25, 0.25, 0.25, 0.25};
    const auto plan = build_plan(16);
    CHECK(oracle::dense_apply_oracle(plan, unit(16, 0)) == expected);
    CHECK(apply(plan, unit(16, 0)) == expected);
}

TEST_CASE("fast apply matches the dense oracle") {
    Rng rng(2024);
    for (std::size_t d : {4, 16, 64, 256}) {
        const auto plan = build_plan(d);
        for (int trial = 0; trial < 100; ++trial) {
            const auto v = random_vector(d, rng);
            const auto fast = apply(plan, v);
            const auto dense = oracle::dense_apply_oracle(plan, v);
            for (std::size_t i = 0; i < d; ++i) {
                REQUIRE(std::abs(fast[i] - dense[i]) <= 1e-10);
            }
        }
    }
}

TEST_CASE("orthonormal, involutive and sum-to-one") {
    Rng rng(7);
    for (std::size_t d : {4, 16, 64, 256, 1024, 4096}) {
        CAPTURE(d);
        const auto plan = build_plan(d);
        const std::vector<double> ones(d, 1.0);
        for (double y : apply(plan, ones)) {
            REQUIRE(std::abs(y - 1.0) <= 1e-12);
        }
        for (int trial = 0; trial < 20; ++trial) {
            const auto v = random_vector(d, rng);
            const auto hv = apply(plan, v);
            CHECK(std::abs(norm2(hv) - norm2(v)) <= 1e-10);
            const auto hhv = apply(plan, hv);
            for (std::size_t i = 0; i < d; ++i) {
                REQUIRE(std::abs(hhv[i] - v[i]) <= 1e-10);
            }
        }
    }
}

TEST_CASE("dense oracle is symmetric") {
    const auto plan = build_plan(64);
    const auto m = oracle::dense_stone_matrix(plan);
    for (std::size_t i = 0; i < 64; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < 64; ++j) {
            REQUIRE(m[i * 64 + j] == m[j * 64 + i]);
            row += m[i * 64 + j];
        }
        CHECK(row == doctest::Approx(1.0).epsilon(1e-14));
    }
}

TEST_CASE("apply works in place and rejects wrong lengths") {
    const auto plan = build_plan(16);
    Rng rng(3);
    auto v = random_vector(16, rng);
    const auto expected = apply(plan, v);
    apply(plan, v, v);
    CHECK(v == expected);

    std::vector<double> short_v(15, 1.0);
    CHECK_THROWS_AS(apply(plan, short_v), Error);
    try {
        (void)apply(plan, short_v);
    } catch (const Error& e) {
        CHECK(e.code() == Errc::DimensionMismatch);
    }
}

TEST_CASE("dense oracle guards") {
    const auto big = build_plan(4096);
    std::vector<double> v(4096, 0.0);
    try {
        (void)oracle::dense_apply_oracle(big, v);
        FAIL("expected DimensionTooLargeForOracle");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::DimensionTooLargeForOracle);
    }
    try {
        (void)oracle::dense_apply_oracle(build_plan(16), std::vector<double>(4, 0.0));
        FAIL("expected DimensionMismatch");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::DimensionMismatch);
    }
}

TEST_CASE("apply cost is 2 m D flops") {
    // Going from m levels to 2m levels squares D, so the count scales by 2 D.
    for (std::size_t m : {1, 2, 3}) {
        const std::size_t d = std::size_t{1} << (2 * m);
        const auto small = build_plan(d);
        const auto large = build_plan(d * d);
        OpCounter cs;
        OpCounter cl;
        std::vector<double> vs(d, 1.0);
        std::vector<double> vl(d * d, 1.0);
        apply(small, vs, vs, &cs);
        apply(large, vl, vl, &cl);
        CHECK(cs.flops == 2 * m * d);
        CHECK(cl.flops == cs.flops * 2 * d);
    }
}

TEST_CASE("sign diagonal is deterministic and balanced") {
    const auto a = make_sign_diagonal(256, 99);
    const auto b = make_sign_diagonal(256, 99);
    CHECK(std::equal(a.signs().begin(), a.signs().end(), b.signs().begin(), b.signs().end()));
    for (auto s : a.signs()) {
        CHECK((s == 1 || s == -1));
    }
    const auto c = make_sign_diagonal(256, 100);
    CHECK_FALSE(std::equal(a.signs().begin(), a.signs().end(), c.signs().begin(), c.signs().end()));

    // Binomial concentration: sd of the mean is 1/256 at 2^16 entries, so
    // 0.02 is over 5 sd.
    for (std::uint64_t seed : {0ULL, 1ULL, 12345ULL, 0xFFFFFFFFFFFFFFFFULL}) {
        const auto big = make_sign_diagonal(1 << 16, seed);
        double sum = 0.0;
        for (auto s : big.signs()) {
            sum += s;
        }
        CHECK(std::abs(sum / (1 << 16)) <= 0.02);
    }
}

TEST_CASE("sketch properties") {
    Rng rng(11);
    SUBCASE("diag signs as input give the all-positive sketch") {
        for (std::size_t d : {4, 16, 256}) {
            const auto plan = build_plan(d);
            const auto diag = make_sign_diagonal(d, 5);
            std::vector<double> f(diag.signs().begin(), diag.signs().end());
            const auto s = sketch(plan, diag, f);
            for (std::size_t i = 0; i < d; ++i) {
                REQUIRE(s.positive(i));
            }
        }
    }
    SUBCASE("scale invariance") {
        const auto plan = build_plan(256);
        const auto diag = make_sign_diagonal(256, 6);
        for (int trial = 0; trial < 20; ++trial) {
            auto f = random_vector(256, rng);
            auto f3 = f;
            for (auto& x : f3) {
                x *= 3.0;
            }
            CHECK(sketch(plan, diag, f) == sketch(plan, diag, f3));
        }
    }
    SUBCASE("matches the dense sign oracle") {
        const auto plan = build_plan(16);
        const auto diag = make_sign_diagonal(16, 8);
        for (int trial = 0; trial < 50; ++trial) {
            const auto f = random_vector(16, rng);
            const auto s = sketch(plan, diag, f);
            const auto ref = oracle::dense_sign_sketch(plan, diag, f);
            for (std::size_t i = 0; i < 16; ++i) {
                REQUIRE(s.positive(i) == (ref[i] == 1));
            }
        }
    }
    SUBCASE("sign(0) is +1") {
        const auto plan = build_plan(16);
        const auto diag = make_sign_diagonal(16, 1);
        const auto s = sketch(plan, diag, std::vector<double>(16, 0.0));
        for (std::size_t i = 0; i < 16; ++i) {
            CHECK(s.positive(i));
        }
    }
    SUBCASE("deterministic and length-checked") {
        const auto plan = build_plan(64);
        const auto diag = make_sign_diagonal(64, 2);
        const auto f = random_vector(64, rng);
        CHECK(sketch(plan, diag, f) == sketch(plan, diag, f));
        CHECK(sketch(plan, diag, f).dim() == 64);
        CHECK_THROWS_AS(sketch(plan, make_sign_diagonal(16, 2), f), Error);
        CHECK_THROWS_AS(sketch(plan, diag, std::vector<double>(16)), Error);
    }
}
