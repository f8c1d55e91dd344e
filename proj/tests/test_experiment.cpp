#include "csilsh/error.hpp"
#include "csilsh/experiment.hpp"
#include "csilsh/lsh_index.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <sstream>

using namespace csilsh;

namespace {

SceneSplit small_scene(std::size_t n, std::size_t q, std::uint64_t seed) {
    SceneConfig c;
    c.n_points = n;
    c.seed = seed;
    return generate_scene_split(c, q);
}

std::string to_csv(const std::vector<MetricsRow>& rows) {
    std::ostringstream out;
    write_metrics_csv(rows, out);
    return out.str();
}

} // namespace

TEST_CASE("run_point with delta = L matches exhaustive search") {
    const auto s = small_scene(400, 30, 1);
    for (std::size_t bits : {1, 4, 8}) {
        const auto row = run_point(s.database, s.queries, PointParams{bits, 2, bits, 2, 7});
        CHECK(row.frac_compared == 1.0);
        CHECK(row.avg_err_m == row.baseline_err_m);
        CHECK(row.baseline_err_m == exhaustive_error(s.database, s.queries, 2));
        CHECK(row.memory_bits == memory_bits(2, 400, bits));
        CHECK(row.total_complexity == row.frac_compared * static_cast<double>(row.memory_bits));
    }
}

TEST_CASE("run_point with L = 1 follows the bucket histogram") {
    const auto s = small_scene(20, 15, 2);
    const PointParams params{1, 1, 0, 2, 99};
    const auto row = run_point(s.database, s.queries, params);

    // Two buckets; a query compares against its own bucket, or all N when
    // that bucket holds fewer than K points.
    const auto index = build_index(s.database, HashConfig{256, 1, 1, 0, 99});
    const auto omega = index.subsets()[0][0];
    std::size_t bucket_size[2] = {0, 0};
    for (std::size_t n = 0; n < 20; ++n) {
        const auto signs = oracle::dense_sign_sketch(index.plan(), index.diagonal(), s.database.fingerprint(n));
        ++bucket_size[signs[omega] > 0 ? 1 : 0];
    }
    CHECK(bucket_size[0] + bucket_size[1] == 20);
    double compared = 0.0;
    for (std::size_t q = 0; q < 15; ++q) {
        const auto signs = oracle::dense_sign_sketch(index.plan(), index.diagonal(), s.queries.fingerprint(q));
        const std::size_t b = bucket_size[signs[omega] > 0 ? 1 : 0];
        compared += b >= 2 ? static_cast<double>(b) : 20.0;
    }
    CHECK(row.frac_compared == doctest::Approx(compared / (15.0 * 20.0)).epsilon(1e-15));
    CHECK(row.frac_compared > 0.0);
    CHECK(row.frac_compared <= 1.0);

    CHECK_THROWS_AS(run_point(s.database, s.queries, PointParams{0, 1, 0, 2, 1}), Error);
    CHECK_THROWS_AS(run_point(s.database, s.queries, PointParams{4, 1, 0, 21, 1}), Error);
}

TEST_CASE("sweep shape and order") {
    SceneConfig scene;
    scene.n_points = 300;
    SweepSpec spec;
    spec.n_queries = 20;
    spec.seed = 5;

    SUBCASE("singleton lists give one row per repeat") {
        spec.repeats = 3;
        const auto rows = run_sweep(spec, scene);
        CHECK(rows.size() == 3);
        CHECK(rows[0].seed == repeat_seed(5, 0));
        CHECK(rows[2].seed == repeat_seed(5, 2));
    }
    SUBCASE("cartesian product") {
        spec.bits_values = {8, 12, 16};
        spec.tables_values = {1, 2, 4, 8};
        spec.delta_values = {0, 1};
        const auto rows = run_sweep(spec, scene);
        REQUIRE(rows.size() == 24);
        std::size_t i = 0;
        for (auto l : spec.bits_values) {
            for (auto t : spec.tables_values) {
                for (auto d : spec.delta_values) {
                    CHECK(rows[i].bits == l);
                    CHECK(rows[i].tables == t);
                    CHECK(rows[i].delta == d);
                    CHECK(rows[i].memory_bits == memory_bits(t, 300, l));
                    CHECK(rows[i].total_complexity ==
                          rows[i].frac_compared * static_cast<double>(rows[i].memory_bits));
                    CHECK(rows[i].frac_compared > 0.0);
                    CHECK(rows[i].frac_compared <= 1.0);
                    ++i;
                }
            }
        }
        std::stringstream buf;
        write_metrics_csv(rows, buf);
        const auto parsed = read_metrics_csv(buf);
        CHECK(parsed.size() == 24);
        CHECK(parsed == rows);
    }
    SUBCASE("invalid specs") {
        spec.bits_values = {4, 12};
        spec.delta_values = {5};
        CHECK_THROWS_AS(run_sweep(spec, scene), Error);
        spec.delta_values = {1};
        spec.tables_values = {};
        CHECK_THROWS_AS(run_sweep(spec, scene), Error);
        spec.tables_values = {1};
        spec.k = 301;
        CHECK_THROWS_AS(run_sweep(spec, scene), Error);
        spec.k = 2;
        spec.bits_values = {257};
        try {
            (void)run_sweep(spec, scene);
            FAIL("expected InvalidConfig");
        } catch (const Error& e) {
            CHECK(e.code() == Errc::InvalidConfig);
        }
    }
    SUBCASE("delta = L rows reproduce the baseline") {
        spec.bits_values = {4};
        spec.tables_values = {1, 3};
        spec.delta_values = {0, 4};
        for (const auto& r : run_sweep(spec, scene)) {
            if (r.delta == r.bits) {
                CHECK(r.avg_err_m == r.baseline_err_m);
                CHECK(r.frac_compared == 1.0);
            }
        }
    }
}

TEST_CASE("sweep is reproducible and schedule independent") {
    SceneConfig scene;
    scene.n_points = 500;
    scene.propagation = Propagation::NLoS;
    SweepSpec spec;
    spec.bits_values = {8, 12};
    spec.tables_values = {1, 4};
    spec.delta_values = {0, 1};
    spec.n_queries = 25;
    spec.repeats = 2;
    spec.seed = 42;
    const std::string serial = to_csv(run_sweep(spec, scene));
    CHECK(serial == to_csv(run_sweep(spec, scene)));
    spec.threads = 4;
    CHECK(serial == to_csv(run_sweep(spec, scene)));
    spec.seed = 43;
    CHECK(serial != to_csv(run_sweep(spec, scene)));
}

TEST_CASE("more tables never hurt the mean error") {
    SceneConfig scene;
    SweepSpec spec;
    spec.bits_values = {12};
    spec.tables_values = {1, 2, 4, 8};
    spec.delta_values = {1};
    spec.repeats = 5;
    spec.seed = 2024;
    const auto rows = run_sweep(spec, scene);
    std::vector<double> mean(4, 0.0);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        mean[i % 4] += rows[i].avg_err_m / 5.0;
    }
    for (std::size_t t = 1; t < 4; ++t) {
        CHECK(mean[t] <= mean[t - 1]);
    }
}

TEST_CASE("metrics CSV") {
    SUBCASE("empty list writes only the header") {
        CHECK(to_csv({}) == "L,T,delta,frac_compared,memory_bits,total_complexity,avg_err_m,baseline_err_m,seed\n");
        std::istringstream in(to_csv({}));
        CHECK(read_metrics_csv(in).empty());
    }
    SUBCASE("exact round trip of awkward doubles") {
        MetricsRow r{12, 4, 1, 0.1 + 0.2, 184000, (0.1 + 0.2) * 184000.0, 1.0 / 3.0, 5e-324, 0xFFFFFFFFFFFFFFFFULL};
        std::istringstream in(to_csv({r, r}));
        const auto back = read_metrics_csv(in);
        REQUIRE(back.size() == 2);
        CHECK(back[0] == r);
        CHECK(back[1].total_complexity == back[1].frac_compared * static_cast<double>(back[1].memory_bits));
    }
    SUBCASE("malformed input") {
        std::istringstream bad_header("L,T\n");
        CHECK_THROWS_AS(read_metrics_csv(bad_header), Error);
        std::istringstream short_row(
            "L,T,delta,frac_compared,memory_bits,total_complexity,avg_err_m,baseline_err_m,seed\n1,2,3\n");
        try {
            (void)read_metrics_csv(short_row);
            FAIL("expected MalformedCsv");
        } catch (const Error& e) {
            CHECK(e.code() == Errc::MalformedCsv);
        }
        CHECK_THROWS_AS(read_metrics_csv("/nonexistent/metrics.csv"), Error);
    }
}
