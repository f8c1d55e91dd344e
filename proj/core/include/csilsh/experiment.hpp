#pragma once

#include "csilsh/channel_sim.hpp"
#include "csilsh/fingerprint_store.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace csilsh {

struct PointParams {
    std::size_t bits = 12;
    std::size_t tables = 4;
    std::size_t delta = 1;
    std::size_t k = 2;
    std::uint64_t seed = 0;  ///< index seed
};

/// One sweep point. total_complexity is always frac_compared * memory_bits.
struct MetricsRow {
    std::size_t bits = 0;
    std::size_t tables = 0;
    std::size_t delta = 0;
    double frac_compared = 0.0;
    std::uint64_t memory_bits = 0;
    double total_complexity = 0.0;
    double avg_err_m = 0.0;
    double baseline_err_m = 0.0;
    std::uint64_t seed = 0;

    friend bool operator==(const MetricsRow&, const MetricsRow&) = default;
};

/// Mean localization error of exhaustive K-NN over `queries`.
double exhaustive_error(const Dataset& data, const Dataset& queries, std::size_t k);

/// Builds the index, answers every held-out query approximately and
/// exhaustively, and aggregates in query order. Fallback scans count as N.
MetricsRow run_point(const Dataset& data, const Dataset& queries, const PointParams& params);

/// Same as above with the exhaustive-search error already known.
MetricsRow run_point(const Dataset& data, const Dataset& queries, const PointParams& params, double baseline_err_m);

struct SweepSpec {
    std::vector<std::size_t> bits_values{12};
    std::vector<std::size_t> tables_values{4};
    std::vector<std::size_t> delta_values{1};
    std::size_t k = 2;
    std::size_t n_queries = 200;
    std::uint64_t seed = 0;
    std::size_t repeats = 1;
    /// Worker threads; 0 = hardware concurrency. Never changes the output.
    unsigned threads = 1;

    /// Throws Errc::InvalidConfig on empty lists, L == 0 or L > D,
    /// delta > min(L), T == 0, K == 0 or K > N, repeats == 0, no queries.
    void validate(const SceneConfig& scene) const;
};

/// Seed of repeat r, derived from the master seed. The repeat's scene uses it
/// directly and the repeat's indexes use index_seed(repeat_seed).
std::uint64_t repeat_seed(std::uint64_t master, std::size_t repeat);
std::uint64_t index_seed(std::uint64_t repeat_seed);

/// Rows ordered by repeat, then L, T, delta in the order given by the spec.
std::vector<MetricsRow> run_sweep(const SweepSpec& spec, const SceneConfig& scene);

void write_metrics_csv(const std::vector<MetricsRow>& rows, std::ostream& out);
void write_metrics_csv(const std::vector<MetricsRow>& rows, const std::string& path);
std::vector<MetricsRow> read_metrics_csv(std::istream& in);
std::vector<MetricsRow> read_metrics_csv(const std::string& path);

} // namespace csilsh
