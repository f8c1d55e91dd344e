#include "csilsh/fingerprint_store.hpp"

#include "csilsh/error.hpp"
#include "csilsh/lsh_index.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace csilsh {

namespace {

struct Scored {
    double sq;
    std::uint32_t index;
};

bool closer(const Scored& a, const Scored& b) {
    return a.sq < b.sq || (a.sq == b.sq && a.index < b.index);
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        acc += d * d;
    }
    return acc;
}

void check_query(const Dataset& data, std::span<const double> query) {
    if (query.size() != data.dim()) {
        throw Error(Errc::DimensionMismatch, "query length " + std::to_string(query.size()) + ", dataset dim " +
                                                 std::to_string(data.dim()));
    }
}

NeighborSet take_best(std::vector<Scored>& scored, std::size_t k) {
    k = std::min(k, scored.size());
    std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(k), scored.end(), closer);
    NeighborSet out;
    out.indices.reserve(k);
    out.distances.reserve(k);
    for (std::size_t i = 0; i < k; ++i) {
        out.indices.push_back(scored[i].index);
        out.distances.push_back(std::sqrt(scored[i].sq));
    }
    return out;
}

} // namespace

double distance(const Position& a, const Position& b) noexcept {
    return std::hypot(a.x - b.x, a.y - b.y);
}

Dataset::Dataset(std::size_t dim, std::vector<double> features, std::vector<Position> positions)
    : dim_(dim), features_(std::move(features)), positions_(std::move(positions)) {
    if (positions_.empty()) {
        throw Error(Errc::EmptyDataset, "dataset has no rows");
    }
    if (dim_ == 0 || features_.size() != positions_.size() * dim_) {
        throw Error(Errc::DimensionMismatch, "dataset expects " + std::to_string(positions_.size()) + " x " +
                                                 std::to_string(dim_) + " features, got " +
                                                 std::to_string(features_.size()));
    }
}

Dataset Dataset::slice(std::size_t first, std::size_t count) const {
    if (first + count > size()) {
        throw Error(Errc::IndexOutOfRange, "slice past the end of the dataset");
    }
    const auto f0 = features_.begin() + static_cast<std::ptrdiff_t>(first * dim_);
    const auto p0 = positions_.begin() + static_cast<std::ptrdiff_t>(first);
    return Dataset(dim_, std::vector<double>(f0, f0 + static_cast<std::ptrdiff_t>(count * dim_)),
                   std::vector<Position>(p0, p0 + static_cast<std::ptrdiff_t>(count)));
}

NeighborSet exact_knn(const Dataset& data, std::span<const double> query, std::size_t k) {
    check_query(data, query);
    if (k > data.size()) {
        throw Error(Errc::KTooLarge, "K=" + std::to_string(k) + " exceeds N=" + std::to_string(data.size()));
    }
    std::vector<Scored> scored(data.size());
    for (std::size_t n = 0; n < data.size(); ++n) {
        scored[n] = {squared_distance(data.fingerprint(n), query), static_cast<std::uint32_t>(n)};
    }
    return take_best(scored, k);
}

NeighborSet knn_among(const Dataset& data, std::span<const double> query, std::span<const std::uint32_t> candidates,
                      std::size_t k) {
    check_query(data, query);
    std::vector<Scored> scored;
    scored.reserve(candidates.size());
    for (auto n : candidates) {
        if (n >= data.size()) {
            throw Error(Errc::IndexOutOfRange, "candidate " + std::to_string(n) + " outside the dataset");
        }
        scored.push_back({squared_distance(data.fingerprint(n), query), n});
    }
    return take_best(scored, k);
}

ApproxResult approx_knn(const LshIndex& index, const Dataset& data, std::span<const double> query, std::size_t k,
                        std::size_t delta, FallbackPolicy policy) {
    check_query(data, query);
    if (k > data.size()) {
        throw Error(Errc::KTooLarge, "K=" + std::to_string(k) + " exceeds N=" + std::to_string(data.size()));
    }
    if (index.size() != data.size() || index.config().dim != data.dim()) {
        throw Error(Errc::DimensionMismatch, "index was not built over this dataset");
    }
    const auto candidates = query_candidates(index, query, delta);
    if (candidates.size() < k && policy == FallbackPolicy::Exhaustive) {
        return {exact_knn(data, query, k), data.size(), true};
    }
    return {knn_among(data, query, candidates, k), candidates.size(), false};
}

Position estimate_position(const Dataset& data, const NeighborSet& neighbors) {
    if (neighbors.indices.empty()) {
        throw Error(Errc::EmptyNeighborSet, "cannot estimate a position from zero neighbors");
    }
    // Summed in index order so the mean does not depend on list order.
    std::vector<std::uint32_t> order = neighbors.indices;
    std::sort(order.begin(), order.end());
    Position sum;
    for (auto n : order) {
        if (n >= data.size()) {
            throw Error(Errc::IndexOutOfRange, "neighbor " + std::to_string(n) + " outside the dataset");
        }
        sum.x += data.position(n).x;
        sum.y += data.position(n).y;
    }
    const auto k = static_cast<double>(neighbors.indices.size());
    return {sum.x / k, sum.y / k};
}

} // namespace csilsh
