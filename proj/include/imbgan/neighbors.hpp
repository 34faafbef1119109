#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "imbgan/errors.hpp"

namespace imbgan {

/// k nearest rows of a pool, closest first.
struct NeighborList {
    std::optional<Eigen::Index> query_index;
    std::vector<Eigen::Index> neighbor_indices;
    std::vector<double> distances;
};

/// Exact Euclidean k-NN by full scan. Ties on distance go to the lower row
/// index. `exclude` removes one pool row (the query itself when it is a
/// member of the pool).
template <typename QueryDerived, typename PoolDerived>
NeighborList knn(const Eigen::MatrixBase<QueryDerived>& query, const Eigen::MatrixBase<PoolDerived>& pool,
                 Eigen::Index k, std::optional<Eigen::Index> exclude = std::nullopt) {
    const Eigen::Index n = pool.rows();
    const Eigen::Index eligible = n - (exclude && *exclude >= 0 && *exclude < n ? 1 : 0);
    if (k < 1) throw ParameterError("knn: k must be positive");
    if (k > eligible)
        throw ParameterError("knn: k=" + std::to_string(k) + " exceeds the " + std::to_string(eligible) +
                             " eligible pool rows");
    if (query.size() != pool.cols()) throw ParameterError("knn: query width does not match pool");

    const Eigen::RowVectorXd q = query.reshaped().transpose();
    std::vector<std::pair<double, Eigen::Index>> scored;
    scored.reserve(static_cast<std::size_t>(eligible));
    for (Eigen::Index i = 0; i < n; ++i) {
        if (exclude && i == *exclude) continue;
        scored.emplace_back((pool.row(i) - q).squaredNorm(), i);
    }
    std::partial_sort(scored.begin(), scored.begin() + k, scored.end());

    NeighborList out;
    out.query_index = exclude;
    out.neighbor_indices.reserve(static_cast<std::size_t>(k));
    out.distances.reserve(static_cast<std::size_t>(k));
    for (Eigen::Index i = 0; i < k; ++i) {
        out.neighbor_indices.push_back(scored[static_cast<std::size_t>(i)].second);
        out.distances.push_back(std::sqrt(scored[static_cast<std::size_t>(i)].first));
    }
    return out;
}

/// k-NN of every pool row among the other pool rows.
template <typename PoolDerived>
std::vector<NeighborList> knn_self(const Eigen::MatrixBase<PoolDerived>& pool, Eigen::Index k) {
    std::vector<NeighborList> out;
    out.reserve(static_cast<std::size_t>(pool.rows()));
    for (Eigen::Index i = 0; i < pool.rows(); ++i) out.push_back(knn(pool.row(i), pool, k, i));
    return out;
}

}  // namespace imbgan
