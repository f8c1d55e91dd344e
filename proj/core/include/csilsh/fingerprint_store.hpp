#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace csilsh {

class LshIndex;

struct Position {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Position&, const Position&) = default;
};

double distance(const Position& a, const Position& b) noexcept;

/// N fingerprints of length D (row-major) with their positions in meters.
class Dataset {
public:
    Dataset() = default;

    /// Throws Errc::EmptyDataset when N == 0 and Errc::DimensionMismatch when
    /// features.size() != N * dim or dim == 0.
    Dataset(std::size_t dim, std::vector<double> features, std::vector<Position> positions);

    std::size_t dim() const noexcept { return dim_; }
    std::size_t size() const noexcept { return positions_.size(); }

    std::span<const double> fingerprint(std::size_t n) const {
        return std::span<const double>(features_).subspan(n * dim_, dim_);
    }
    const Position& position(std::size_t n) const { return positions_[n]; }
    std::span<const Position> positions() const noexcept { return positions_; }
    std::span<const double> features() const noexcept { return features_; }

    /// Rows [first, first + count) as a new dataset.
    Dataset slice(std::size_t first, std::size_t count) const;

    friend bool operator==(const Dataset&, const Dataset&) = default;

private:
    std::size_t dim_ = 0;
    std::vector<double> features_;
    std::vector<Position> positions_;
};

/// K database indices ordered by ascending feature distance, ties broken by
/// ascending index. `distances` are Euclidean.
struct NeighborSet {
    std::vector<std::uint32_t> indices;
    std::vector<double> distances;

    std::size_t size() const noexcept { return indices.size(); }
    friend bool operator==(const NeighborSet&, const NeighborSet&) = default;
};

NeighborSet exact_knn(const Dataset& data, std::span<const double> query, std::size_t k);

/// Best-k among the given candidate indices (no deduplication performed).
NeighborSet knn_among(const Dataset& data, std::span<const double> query, std::span<const std::uint32_t> candidates,
                      std::size_t k);

enum class FallbackPolicy {
    /// Fewer than K candidates: run exact_knn and charge N comparisons.
    Exhaustive,
    /// Fewer than K candidates: return what was found.
    Partial,
};

struct ApproxResult {
    NeighborSet neighbors;
    std::size_t compared = 0;
    bool fell_back = false;
};

ApproxResult approx_knn(const LshIndex& index, const Dataset& data, std::span<const double> query, std::size_t k,
                        std::size_t delta, FallbackPolicy policy = FallbackPolicy::Exhaustive);

/// Unweighted mean of the neighbor positions.
Position estimate_position(const Dataset& data, const NeighborSet& neighbors);

// Dataset CSV: header `x,y,f0,...,f{D-1}`, one row per point. Doubles are
// written in shortest round-trip form.
void write_dataset_csv(const Dataset& data, std::ostream& out);
void write_dataset_csv(const Dataset& data, const std::string& path);

/// `expected_dim` == 0 accepts whatever the header declares; otherwise the
/// header must declare exactly that many feature columns.
Dataset read_dataset_csv(std::istream& in, std::size_t expected_dim = 0);
Dataset read_dataset_csv(const std::string& path, std::size_t expected_dim = 0);

} // namespace csilsh
