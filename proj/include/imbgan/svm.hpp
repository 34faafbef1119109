#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "imbgan/core.hpp"

namespace imbgan {

struct SvmParams {
    double C = 1.0;
    int epochs = 300;
    double learning_rate = 0.5;
    /// Slack on the functional margin when collecting support vectors.
    double tol = 1e-3;
    Index batch_size = 32;
    std::uint64_t seed = 0;
};

/// Linear soft-margin SVM, decision(x) = w.x + b, labels {0,1} read as {-1,+1}.
struct SvmModel {
    Vector weights;
    double bias = 0.0;
    std::vector<Index> support_indices;
    SvmParams params;
    /// Primal objective of the kept iterate after each epoch (non-increasing).
    std::vector<double> objective_history;

    template <typename Derived>
    double decision(const Eigen::MatrixBase<Derived>& x) const {
        return x.reshaped().dot(weights) + bias;
    }
    Vector decision(const Matrix& rows) const { return (rows * weights).array() + bias; }
};

/// 0.5*|w|^2 + C * sum_i max(0, 1 - y_i * decision(x_i)).
double svm_objective(const Vector& weights, double bias, const Dataset& train, double C);

/// Minibatch subgradient descent on the primal objective scaled by 1/(C n),
/// step learning_rate * C n / t at minibatch t, rows reshuffled every epoch
/// from `params.seed`. Subgradient steps are not monotone, so the best
/// iterate seen at an epoch boundary is kept; `objective_history` records
/// its objective.
SvmModel train_linear_svm(const Dataset& train, const SvmParams& params = {});

/// Minority rows with y * decision(x) <= 1 + tol, ascending. When none
/// qualify, the (up to) three minority rows with the smallest margin.
std::vector<Index> positive_support_vectors(const SvmModel& model, const Dataset& train);

}  // namespace imbgan
