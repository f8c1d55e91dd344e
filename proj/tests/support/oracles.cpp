#include "oracles.hpp"

#include "csilsh/error.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace csilsh::oracle {

std::vector<double> dense_stone_matrix(const StonePlan& plan) {
    if (plan.dim() > 1024) {
        throw Error(Errc::DimensionTooLargeForOracle, "dense oracle limited to D <= 1024");
    }
    const std::vector<double> s4 = {-0.5, 0.5, 0.5, 0.5, 0.5, -0.5, 0.5, 0.5,
                                    0.5, 0.5, -0.5, 0.5, 0.5, 0.5, 0.5, -0.5};
    std::vector<double> m = s4;
    std::size_t n = 4;
    while (n < plan.dim()) {
        // kron(m, s4): entry (4i + k, 4j + l) = m(i, j) * s4(k, l).
        const std::size_t n2 = n * 4;
        std::vector<double> next(n2 * n2);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                for (std::size_t k = 0; k < 4; ++k) {
                    for (std::size_t l = 0; l < 4; ++l) {
                        next[(4 * i + k) * n2 + (4 * j + l)] = m[i * n + j] * s4[k * 4 + l];
                    }
                }
            }
        }
        m = std::move(next);
        n = n2;
    }
    return m;
}

std::vector<double> dense_apply_oracle(const StonePlan& plan, std::span<const double> v) {
    if (v.size() != plan.dim()) {
        throw Error(Errc::DimensionMismatch, "dense_apply_oracle: length mismatch");
    }
    const auto m = dense_stone_matrix(plan);
    const std::size_t n = plan.dim();
    std::vector<double> out(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            out[i] += m[i * n + j] * v[j];
        }
    }
    return out;
}

std::vector<int> dense_sign_sketch(const StonePlan& plan, const SignDiagonal& diag, std::span<const double> f) {
    std::vector<double> df(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) {
        df[i] = diag.signs()[i] * f[i];
    }
    const auto y = dense_apply_oracle(plan, df);
    std::vector<int> out(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
        out[i] = y[i] >= 0.0 ? 1 : -1;
    }
    return out;
}

std::vector<std::uint32_t> brute_force_candidates(const std::vector<std::vector<int>>& db_signs,
                                                  const std::vector<int>& query_signs,
                                                  const std::vector<std::vector<std::uint32_t>>& subsets,
                                                  std::size_t delta) {
    std::vector<std::uint32_t> out;
    for (std::size_t n = 0; n < db_signs.size(); ++n) {
        bool hit = false;
        for (const auto& omega : subsets) {
            std::size_t mismatches = 0;
            for (auto i : omega) {
                mismatches += db_signs[n][i] != query_signs[i] ? 1 : 0;
            }
            if (mismatches <= delta) {
                hit = true;
                break;
            }
        }
        if (hit) {
            out.push_back(static_cast<std::uint32_t>(n));
        }
    }
    return out;
}

NeighborSet sort_all_knn(const Dataset& data, std::span<const double> query, std::size_t k) {
    std::vector<std::pair<double, std::uint32_t>> all;
    for (std::size_t n = 0; n < data.size(); ++n) {
        double acc = 0.0;
        const auto f = data.fingerprint(n);
        for (std::size_t i = 0; i < f.size(); ++i) {
            acc += (f[i] - query[i]) * (f[i] - query[i]);
        }
        all.emplace_back(acc, static_cast<std::uint32_t>(n));
    }
    std::sort(all.begin(), all.end());
    NeighborSet out;
    for (std::size_t i = 0; i < k; ++i) {
        out.indices.push_back(all[i].second);
        out.distances.push_back(std::sqrt(all[i].first));
    }
    return out;
}

std::uint64_t binomial(std::size_t n, std::size_t r) {
    std::vector<std::vector<std::uint64_t>> c(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
        c[i].assign(i + 1, 1);
        for (std::size_t j = 1; j < i; ++j) {
            c[i][j] = c[i - 1][j - 1] + c[i - 1][j];
        }
    }
    return r > n ? 0 : c[n][r];
}

} // namespace csilsh::oracle
