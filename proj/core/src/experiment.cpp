#include "csilsh/experiment.hpp"

#include "csilsh/error.hpp"
#include "csilsh/lsh_index.hpp"
#include "csilsh/parallel.hpp"
#include "csilsh/random.hpp"

#include "text.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>

namespace csilsh {

namespace {

constexpr const char* kMetricsHeader =
    "L,T,delta,frac_compared,memory_bits,total_complexity,avg_err_m,baseline_err_m,seed";

struct TableJob {
    std::size_t bits;
    std::size_t tables;
};

} // namespace

double exhaustive_error(const Dataset& data, const Dataset& queries, std::size_t k) {
    double sum = 0.0;
    for (std::size_t q = 0; q < queries.size(); ++q) {
        const auto nn = exact_knn(data, queries.fingerprint(q), k);
        sum += distance(estimate_position(data, nn), queries.position(q));
    }
    return sum / static_cast<double>(queries.size());
}

namespace {

MetricsRow evaluate(const LshIndex& index, const Dataset& data, const Dataset& queries, std::size_t delta,
                    std::size_t k, double baseline_err_m) {
    std::uint64_t compared = 0;
    double err_sum = 0.0;
    for (std::size_t q = 0; q < queries.size(); ++q) {
        const auto result = approx_knn(index, data, queries.fingerprint(q), k, delta, FallbackPolicy::Exhaustive);
        compared += result.compared;
        err_sum += distance(estimate_position(data, result.neighbors), queries.position(q));
    }
    MetricsRow row;
    row.bits = index.config().bits;
    row.tables = index.config().tables;
    row.delta = delta;
    row.frac_compared = static_cast<double>(compared) /
                        (static_cast<double>(data.size()) * static_cast<double>(queries.size()));
    row.memory_bits = memory_bits(index);
    row.total_complexity = row.frac_compared * static_cast<double>(row.memory_bits);
    row.avg_err_m = err_sum / static_cast<double>(queries.size());
    row.baseline_err_m = baseline_err_m;
    row.seed = index.config().seed;
    return row;
}

} // namespace

MetricsRow run_point(const Dataset& data, const Dataset& queries, const PointParams& params) {
    return run_point(data, queries, params, exhaustive_error(data, queries, params.k));
}

MetricsRow run_point(const Dataset& data, const Dataset& queries, const PointParams& params, double baseline_err_m) {
    if (queries.dim() != data.dim()) {
        throw Error(Errc::DimensionMismatch, "queries and database have different feature lengths");
    }
    if (params.k == 0 || params.k > data.size()) {
        throw Error(Errc::KTooLarge, "K=" + std::to_string(params.k) + " not in [1, N]");
    }
    HashConfig config{data.dim(), params.bits, params.tables, params.delta, params.seed};
    const LshIndex index = build_index(data, config);
    return evaluate(index, data, queries, params.delta, params.k, baseline_err_m);
}

void SweepSpec::validate(const SceneConfig& scene) const {
    scene.validate();
    const auto fail = [](const std::string& what) { throw Error(Errc::InvalidConfig, what); };
    if (bits_values.empty() || tables_values.empty() || delta_values.empty()) {
        fail("sweep lists for L, T and delta must be non-empty");
    }
    const std::size_t tdim = next_power_of_four(scene.feature_dim());
    for (auto l : bits_values) {
        if (l == 0 || l > tdim) {
            fail("L=" + std::to_string(l) + " not in [1, " + std::to_string(tdim) + "]");
        }
    }
    const std::size_t min_bits = *std::min_element(bits_values.begin(), bits_values.end());
    for (auto d : delta_values) {
        if (d > min_bits) {
            fail("delta=" + std::to_string(d) + " exceeds the smallest L=" + std::to_string(min_bits));
        }
    }
    for (auto t : tables_values) {
        if (t == 0) {
            fail("T must be >= 1");
        }
    }
    if (k == 0 || k > scene.n_points) {
        fail("K=" + std::to_string(k) + " not in [1, N]");
    }
    if (n_queries == 0) {
        fail("need at least one query");
    }
    if (repeats == 0) {
        fail("repeats must be >= 1");
    }
}

std::uint64_t repeat_seed(std::uint64_t master, std::size_t repeat) {
    return derive_seed(master, "repeat", repeat);
}

std::uint64_t index_seed(std::uint64_t repeat_seed) {
    return derive_seed(repeat_seed, "index");
}

std::vector<MetricsRow> run_sweep(const SweepSpec& spec, const SceneConfig& scene) {
    spec.validate(scene);
    std::vector<TableJob> jobs;
    for (auto l : spec.bits_values) {
        for (auto t : spec.tables_values) {
            jobs.push_back({l, t});
        }
    }
    const std::size_t per_job = spec.delta_values.size();

    std::vector<MetricsRow> rows;
    rows.reserve(spec.repeats * jobs.size() * per_job);
    for (std::size_t r = 0; r < spec.repeats; ++r) {
        SceneConfig cfg = scene;
        cfg.seed = repeat_seed(spec.seed, r);
        const SceneSplit split = generate_scene_split(cfg, spec.n_queries, spec.threads);
        const double baseline = exhaustive_error(split.database, split.queries, spec.k);
        const std::uint64_t iseed = index_seed(cfg.seed);

        std::vector<MetricsRow> block(jobs.size() * per_job);
        parallel_for(jobs.size(), spec.threads, [&](std::size_t j) {
            HashConfig hc{split.database.dim(), jobs[j].bits, jobs[j].tables, 0, iseed};
            const LshIndex index = build_index(split.database, hc);
            for (std::size_t d = 0; d < per_job; ++d) {
                MetricsRow row = evaluate(index, split.database, split.queries, spec.delta_values[d], spec.k, baseline);
                row.seed = cfg.seed;
                block[j * per_job + d] = row;
            }
        });
        rows.insert(rows.end(), block.begin(), block.end());
    }
    return rows;
}

void write_metrics_csv(const std::vector<MetricsRow>& rows, std::ostream& out) {
    out << kMetricsHeader << '\n';
    for (const auto& r : rows) {
        out << r.bits << ',' << r.tables << ',' << r.delta << ',' << text::format_double(r.frac_compared) << ','
            << r.memory_bits << ',' << text::format_double(r.total_complexity) << ','
            << text::format_double(r.avg_err_m) << ',' << text::format_double(r.baseline_err_m) << ',' << r.seed
            << '\n';
    }
    if (!out) {
        throw Error(Errc::IoError, "failed writing metrics CSV");
    }
}

void write_metrics_csv(const std::vector<MetricsRow>& rows, const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw Error(Errc::IoError, "cannot open " + path + " for writing");
    }
    write_metrics_csv(rows, out);
}

std::vector<MetricsRow> read_metrics_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || text::chomp(line) != kMetricsHeader) {
        throw Error(Errc::MalformedCsv, "metrics CSV header must be " + std::string(kMetricsHeader));
    }
    std::vector<MetricsRow> rows;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        const auto l = text::chomp(line);
        if (l.empty()) {
            continue;
        }
        const auto c = text::split(l, ',');
        const std::string where = "metrics row " + std::to_string(lineno);
        if (c.size() != 9) {
            throw Error(Errc::MalformedCsv, where + ": expected 9 columns, got " + std::to_string(c.size()));
        }
        MetricsRow r;
        r.bits = text::parse_int<std::size_t>(c[0], Errc::MalformedCsv, where);
        r.tables = text::parse_int<std::size_t>(c[1], Errc::MalformedCsv, where);
        r.delta = text::parse_int<std::size_t>(c[2], Errc::MalformedCsv, where);
        r.frac_compared = text::parse_double(c[3], Errc::MalformedCsv, where);
        r.memory_bits = text::parse_int<std::uint64_t>(c[4], Errc::MalformedCsv, where);
        r.total_complexity = text::parse_double(c[5], Errc::MalformedCsv, where);
        r.avg_err_m = text::parse_double(c[6], Errc::MalformedCsv, where);
        r.baseline_err_m = text::parse_double(c[7], Errc::MalformedCsv, where);
        r.seed = text::parse_int<std::uint64_t>(c[8], Errc::MalformedCsv, where);
        rows.push_back(r);
    }
    return rows;
}

std::vector<MetricsRow> read_metrics_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(Errc::IoError, "cannot open " + path);
    }
    return read_metrics_csv(in);
}

} // namespace csilsh
