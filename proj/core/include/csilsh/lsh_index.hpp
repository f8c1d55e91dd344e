#pragma once

#include "csilsh/stone_transform.hpp"

#include <compare>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace csilsh {

class Dataset;

struct HashConfig {
    std::size_t dim = 0;      ///< feature length D of the indexed data
    std::size_t bits = 12;    ///< hash length L
    std::size_t tables = 4;   ///< number of tables T
    std::size_t delta = 1;    ///< default Hamming threshold
    std::uint64_t seed = 0;

    /// Throws Errc::InvalidConfig on L == 0, L > transform dim, T == 0 or delta > L.
    void validate() const;

    /// Length the transform runs at: dim zero-padded to the next power of four.
    std::size_t transform_dim() const { return next_power_of_four(dim); }
};

/// L packed key bits; bit t is the sketch bit at the t-th smallest index of
/// the table's subset (1 <=> +1). Bits past `bits()` are always zero.
class HashKey {
public:
    HashKey() = default;
    explicit HashKey(std::size_t bits) : bits_(bits), words_((bits + 63) / 64, 0) {}

    std::size_t bits() const noexcept { return bits_; }
    bool test(std::size_t t) const noexcept { return (words_[t / 64] >> (t % 64)) & 1U; }
    void set(std::size_t t) noexcept { words_[t / 64] |= std::uint64_t{1} << (t % 64); }
    void flip(std::size_t t) noexcept { words_[t / 64] ^= std::uint64_t{1} << (t % 64); }
    std::span<const std::uint64_t> words() const noexcept { return words_; }

    /// Low 64 bits; the whole key when bits() <= 64.
    std::uint64_t low_word() const noexcept { return words_.empty() ? 0 : words_[0]; }

    friend bool operator==(const HashKey&, const HashKey&) = default;
    friend auto operator<=>(const HashKey&, const HashKey&) = default;

private:
    std::size_t bits_ = 0;
    std::vector<std::uint64_t> words_;
};

std::size_t hamming_distance(const HashKey& a, const HashKey& b);

using Subset = std::vector<std::uint32_t>;

/// Buckets keyed by hash value; each bucket lists database indices ascending.
using HashTable = std::map<HashKey, std::vector<std::uint32_t>>;

/// T subsets of `bits` distinct indices from [0, dim), each sorted ascending.
/// Subset t depends only on (dim, bits, seed, t), so growing T appends tables.
std::vector<Subset> sample_subsets(std::size_t dim, std::size_t bits, std::size_t tables, std::uint64_t seed);

HashKey hash_point(const SignSketch& sketch, std::span<const std::uint32_t> subset);

/// All keys within Hamming distance `delta` of `key`, `key` first, then by
/// increasing distance; within one distance, flipped positions in
/// lexicographic order.
std::vector<HashKey> enumerate_ball(const HashKey& key, std::size_t bits, std::size_t delta);

/// sum_{i <= delta} C(bits, i), saturating at SIZE_MAX.
std::size_t ball_size(std::size_t bits, std::size_t delta) noexcept;

class LshIndex {
public:
    const HashConfig& config() const noexcept { return config_; }
    const StonePlan& plan() const noexcept { return plan_; }
    const SignDiagonal& diagonal() const noexcept { return diag_; }
    std::span<const Subset> subsets() const noexcept { return subsets_; }
    std::span<const HashTable> tables() const noexcept { return tables_; }
    std::size_t size() const noexcept { return n_points_; }

    /// Sketch of `f` after zero-padding to the transform length.
    SignSketch sketch_of(std::span<const double> f) const;

    /// Builds an index from already-validated parts (deserialization path).
    static LshIndex assemble(HashConfig config, std::vector<Subset> subsets, SignDiagonal diag,
                             std::vector<HashTable> tables, std::size_t n_points);

private:
    LshIndex(HashConfig config, StonePlan plan, SignDiagonal diag, std::vector<Subset> subsets,
             std::vector<HashTable> tables, std::size_t n_points)
        : config_(config), plan_(plan), diag_(std::move(diag)), subsets_(std::move(subsets)),
          tables_(std::move(tables)), n_points_(n_points) {}

    HashConfig config_;
    StonePlan plan_;
    SignDiagonal diag_;
    std::vector<Subset> subsets_;
    std::vector<HashTable> tables_;
    std::size_t n_points_;
};

/// `threads` == 0 uses the hardware concurrency; the result never depends on it.
LshIndex build_index(std::span<const std::vector<double>> fingerprints, const HashConfig& config,
                     unsigned threads = 1);
LshIndex build_index(const Dataset& data, const HashConfig& config, unsigned threads = 1);

/// Deduplicated, ascending union over all tables of the buckets whose key is
/// within Hamming distance `delta` of the query's key.
std::vector<std::uint32_t> query_candidates(const LshIndex& index, std::span<const double> f, std::size_t delta);
std::vector<std::uint32_t> query_candidates(const LshIndex& index, const SignSketch& sketch, std::size_t delta);

/// T * N * (L + ceil(log2 N)): key bits plus one stored index per entry.
std::uint64_t memory_bits(const LshIndex& index);
std::uint64_t memory_bits(std::size_t tables, std::size_t n_points, std::size_t bits);

/// Little-endian binary format; see docs/index_format.md.
void save_index(const LshIndex& index, std::ostream& out);
LshIndex load_index(std::istream& in);
void save_index(const LshIndex& index, const std::string& path);
LshIndex load_index(const std::string& path);

} // namespace csilsh
