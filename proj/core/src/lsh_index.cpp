#include "csilsh/lsh_index.hpp"

#include "csilsh/error.hpp"
#include "csilsh/fingerprint_store.hpp"
#include "csilsh/parallel.hpp"
#include "csilsh/random.hpp"

#include <algorithm>
#include <bit>
#include <numeric>
#include <string>

namespace csilsh {

namespace {

// Above this many probes per table the query scans occupied buckets instead.
constexpr std::size_t kMaxBallKeys = std::size_t{1} << 24;

template <typename RowFn>
LshIndex build_from_rows(std::size_t n_points, RowFn row, const HashConfig& config, unsigned threads) {
    config.validate();
    if (n_points == 0) {
        throw Error(Errc::EmptyDataset, "build_index: no fingerprints");
    }
    if (n_points > UINT32_MAX) {
        throw Error(Errc::InvalidConfig, "build_index: more than 2^32 - 1 points");
    }
    for (std::size_t n = 0; n < n_points; ++n) {
        if (row(n).size() != config.dim) {
            throw Error(Errc::DimensionMismatch, "build_index: fingerprint " + std::to_string(n) + " has length " +
                                                     std::to_string(row(n).size()) + ", expected " +
                                                     std::to_string(config.dim));
        }
    }

    const std::size_t tdim = config.transform_dim();
    const StonePlan plan = build_plan(tdim);
    SignDiagonal diag = make_sign_diagonal(tdim, config.seed);
    std::vector<Subset> subsets = sample_subsets(tdim, config.bits, config.tables, config.seed);

    // One sketch per point, shared by every table.
    std::vector<std::vector<HashKey>> keys(n_points);
    parallel_for(n_points, threads, [&](std::size_t n) {
        std::vector<double> padded(tdim, 0.0);
        const auto f = row(n);
        std::copy(f.begin(), f.end(), padded.begin());
        const SignSketch s = sketch(plan, diag, padded);
        keys[n].reserve(subsets.size());
        for (const auto& omega : subsets) {
            keys[n].push_back(hash_point(s, omega));
        }
    });

    std::vector<HashTable> tables(config.tables);
    for (std::size_t t = 0; t < config.tables; ++t) {
        for (std::size_t n = 0; n < n_points; ++n) {
            tables[t][keys[n][t]].push_back(static_cast<std::uint32_t>(n));
        }
    }
    return LshIndex::assemble(config, std::move(subsets), std::move(diag), std::move(tables), n_points);
}

} // namespace

void HashConfig::validate() const {
    if (dim == 0) {
        throw Error(Errc::InvalidConfig, "dim must be >= 1");
    }
    const std::size_t tdim = transform_dim();
    if (bits == 0 || bits > tdim) {
        throw Error(Errc::InvalidConfig,
                    "hash length L=" + std::to_string(bits) + " must be in [1, " + std::to_string(tdim) + "]");
    }
    if (tables == 0) {
        throw Error(Errc::InvalidConfig, "number of tables T must be >= 1");
    }
    if (delta > bits) {
        throw Error(Errc::InvalidConfig,
                    "delta=" + std::to_string(delta) + " exceeds L=" + std::to_string(bits));
    }
}

std::size_t hamming_distance(const HashKey& a, const HashKey& b) {
    if (a.bits() != b.bits()) {
        throw Error(Errc::DimensionMismatch, "hamming_distance: keys of different length");
    }
    std::size_t d = 0;
    const auto wa = a.words();
    const auto wb = b.words();
    for (std::size_t i = 0; i < wa.size(); ++i) {
        d += static_cast<std::size_t>(std::popcount(wa[i] ^ wb[i]));
    }
    return d;
}

std::vector<Subset> sample_subsets(std::size_t dim, std::size_t bits, std::size_t tables, std::uint64_t seed) {
    if (bits == 0 || bits > dim) {
        throw Error(Errc::InvalidConfig,
                    "sample_subsets: L=" + std::to_string(bits) + " not in [1, " + std::to_string(dim) + "]");
    }
    std::vector<Subset> out;
    out.reserve(tables);
    std::vector<std::uint32_t> pool(dim);
    for (std::size_t t = 0; t < tables; ++t) {
        Rng rng(derive_seed(seed, "subset", t));
        std::iota(pool.begin(), pool.end(), 0U);
        // Partial Fisher-Yates: the first `bits` slots are a uniform draw
        // without replacement.
        for (std::size_t i = 0; i < bits; ++i) {
            const std::size_t j = i + static_cast<std::size_t>(rng.below(dim - i));
            std::swap(pool[i], pool[j]);
        }
        Subset omega(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(bits));
        std::sort(omega.begin(), omega.end());
        out.push_back(std::move(omega));
    }
    return out;
}

HashKey hash_point(const SignSketch& sketch, std::span<const std::uint32_t> subset) {
    HashKey key(subset.size());
    for (std::size_t t = 0; t < subset.size(); ++t) {
        if (subset[t] >= sketch.dim()) {
            throw Error(Errc::IndexOutOfRange, "hash_point: subset index " + std::to_string(subset[t]) +
                                                   " >= sketch length " + std::to_string(sketch.dim()));
        }
        if (sketch.positive(subset[t])) {
            key.set(t);
        }
    }
    return key;
}

std::size_t ball_size(std::size_t bits, std::size_t delta) noexcept {
    std::size_t total = 0;
    std::size_t binom = 1;  // C(bits, i)
    for (std::size_t i = 0; i <= std::min(delta, bits); ++i) {
        if (total > SIZE_MAX - binom) {
            return SIZE_MAX;
        }
        total += binom;
        if (i < bits) {
            // C(bits, i + 1) = C(bits, i) * (bits - i) / (i + 1), split to stay exact.
            const std::size_t q = binom / (i + 1);
            const std::size_t r = binom % (i + 1);
            const std::size_t m = bits - i;
            if (q > SIZE_MAX / m) {
                return SIZE_MAX;
            }
            binom = q * m + r * m / (i + 1);
        }
    }
    return total;
}

std::vector<HashKey> enumerate_ball(const HashKey& key, std::size_t bits, std::size_t delta) {
    if (key.bits() != bits) {
        throw Error(Errc::InvalidConfig, "enumerate_ball: key has " + std::to_string(key.bits()) + " bits, L=" +
                                             std::to_string(bits));
    }
    if (delta > bits) {
        throw Error(Errc::InvalidConfig,
                    "enumerate_ball: delta=" + std::to_string(delta) + " exceeds L=" + std::to_string(bits));
    }
    const std::size_t count = ball_size(bits, delta);
    if (count > kMaxBallKeys) {
        throw Error(Errc::InvalidConfig, "enumerate_ball: ball of " + std::to_string(count) + " keys is too large");
    }
    std::vector<HashKey> out;
    out.reserve(count);
    out.push_back(key);

    std::vector<std::size_t> pos;
    for (std::size_t r = 1; r <= delta; ++r) {
        pos.resize(r);
        std::iota(pos.begin(), pos.end(), std::size_t{0});
        while (true) {
            HashKey k = key;
            for (auto p : pos) {
                k.flip(p);
            }
            out.push_back(std::move(k));
            // Advance to the next r-combination in lexicographic order.
            std::size_t i = r;
            while (i > 0 && pos[i - 1] == bits - r + (i - 1)) {
                --i;
            }
            if (i == 0) {
                break;
            }
            ++pos[i - 1];
            for (std::size_t j = i; j < r; ++j) {
                pos[j] = pos[j - 1] + 1;
            }
        }
    }
    return out;
}

SignSketch LshIndex::sketch_of(std::span<const double> f) const {
    if (f.size() != config_.dim) {
        throw Error(Errc::DimensionMismatch, "query length " + std::to_string(f.size()) + ", index dim " +
                                                 std::to_string(config_.dim));
    }
    if (f.size() == plan_.dim()) {
        return sketch(plan_, diag_, f);
    }
    std::vector<double> padded(plan_.dim(), 0.0);
    std::copy(f.begin(), f.end(), padded.begin());
    return sketch(plan_, diag_, padded);
}

LshIndex LshIndex::assemble(HashConfig config, std::vector<Subset> subsets, SignDiagonal diag,
                            std::vector<HashTable> tables, std::size_t n_points) {
    config.validate();
    const std::size_t tdim = config.transform_dim();
    if (diag.dim() != tdim) {
        throw Error(Errc::DimensionMismatch, "sign diagonal length does not match the transform length");
    }
    if (subsets.size() != config.tables || tables.size() != config.tables) {
        throw Error(Errc::InvalidConfig, "expected " + std::to_string(config.tables) + " subsets and tables");
    }
    for (const auto& omega : subsets) {
        if (omega.size() != config.bits || !std::is_sorted(omega.begin(), omega.end()) ||
            std::adjacent_find(omega.begin(), omega.end()) != omega.end() || (!omega.empty() && omega.back() >= tdim)) {
            throw Error(Errc::InvalidConfig, "subsets must hold L distinct ascending indices below the transform length");
        }
    }
    for (const auto& table : tables) {
        std::size_t total = 0;
        for (const auto& [key, bucket] : table) {
            if (key.bits() != config.bits || bucket.empty()) {
                throw Error(Errc::InvalidConfig, "malformed bucket");
            }
            total += bucket.size();
        }
        if (total != n_points) {
            throw Error(Errc::InvalidConfig, "bucket sizes do not sum to N");
        }
    }
    StonePlan plan = build_plan(tdim);
    return LshIndex(config, plan, std::move(diag), std::move(subsets), std::move(tables), n_points);
}

LshIndex build_index(std::span<const std::vector<double>> fingerprints, const HashConfig& config, unsigned threads) {
    return build_from_rows(
        fingerprints.size(), [&](std::size_t n) { return std::span<const double>(fingerprints[n]); }, config, threads);
}

LshIndex build_index(const Dataset& data, const HashConfig& config, unsigned threads) {
    return build_from_rows(
        data.size(), [&](std::size_t n) { return data.fingerprint(n); }, config, threads);
}

std::vector<std::uint32_t> query_candidates(const LshIndex& index, std::span<const double> f, std::size_t delta) {
    return query_candidates(index, index.sketch_of(f), delta);
}

std::vector<std::uint32_t> query_candidates(const LshIndex& index, const SignSketch& sketch, std::size_t delta) {
    const auto& config = index.config();
    if (sketch.dim() != index.plan().dim()) {
        throw Error(Errc::DimensionMismatch, "query sketch length does not match the index");
    }
    if (delta > config.bits) {
        throw Error(Errc::InvalidConfig,
                    "delta=" + std::to_string(delta) + " exceeds L=" + std::to_string(config.bits));
    }
    std::vector<char> hit(index.size(), 0);
    const auto mark = [&](const std::vector<std::uint32_t>& bucket) {
        for (auto n : bucket) {
            hit[n] = 1;
        }
    };

    const std::size_t probes = ball_size(config.bits, delta);
    for (std::size_t t = 0; t < config.tables; ++t) {
        const HashTable& table = index.tables()[t];
        const HashKey key = hash_point(sketch, index.subsets()[t]);
        if (probes <= table.size()) {
            for (const auto& probe : enumerate_ball(key, config.bits, delta)) {
                if (auto it = table.find(probe); it != table.end()) {
                    mark(it->second);
                }
            }
        } else {
            // Fewer occupied buckets than probes: scanning them yields the same set.
            for (const auto& [bucket_key, bucket] : table) {
                if (hamming_distance(bucket_key, key) <= delta) {
                    mark(bucket);
                }
            }
        }
    }

    std::vector<std::uint32_t> out;
    for (std::size_t n = 0; n < hit.size(); ++n) {
        if (hit[n]) {
            out.push_back(static_cast<std::uint32_t>(n));
        }
    }
    return out;
}

std::uint64_t memory_bits(std::size_t tables, std::size_t n_points, std::size_t bits) {
    const std::uint64_t index_bits = n_points <= 1 ? 0 : static_cast<std::uint64_t>(std::bit_width(n_points - 1));
    return static_cast<std::uint64_t>(tables) * n_points * (bits + index_bits);
}

std::uint64_t memory_bits(const LshIndex& index) {
    return memory_bits(index.config().tables, index.size(), index.config().bits);
}

} // namespace csilsh
