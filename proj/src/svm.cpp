#include "imbgan/svm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace imbgan {

namespace {

Vector signed_labels(const Dataset& ds) {
    return ds.labels.cast<double>().array() * 2.0 - 1.0;
}

}  // namespace

double svm_objective(const Vector& weights, double bias, const Dataset& train, double C) {
    const Vector y = signed_labels(train);
    const Eigen::ArrayXd margins = y.array() * ((train.features * weights).array() + bias);
    const double hinge = (1.0 - margins).cwiseMax(0.0).sum();
    return 0.5 * weights.squaredNorm() + C * hinge;
}

SvmModel train_linear_svm(const Dataset& train, const SvmParams& params) {
    train.validate();
    require_two_classes(train, 1);
    if (!(params.C > 0.0)) throw ParameterError("svm: C must be positive");
    if (!(params.learning_rate > 0.0)) throw ParameterError("svm: learning_rate must be positive");
    if (params.epochs < 0) throw ParameterError("svm: epochs must be non-negative");

    const Index n = train.n_samples();
    const Index d = train.n_features();
    const Index batch = std::clamp<Index>(params.batch_size, 1, n);
    const Vector y = signed_labels(train);
    // Minimising f = F / (C n) = lambda/2 |w|^2 + mean hinge has the same
    // minimiser as F and keeps step sizes independent of n.
    const double lambda = 1.0 / (params.C * static_cast<double>(n));

    Vector w = Vector::Zero(d);
    double b = 0.0;
    SvmModel model;
    model.params = params;
    model.weights = w;
    model.bias = b;
    double best = svm_objective(w, b, train, params.C);

    Rng rng(params.seed);
    std::vector<Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Index{0});

    // Step learning_rate / (lambda t) over minibatch iterations t, the usual
    // schedule for a lambda-strongly convex objective.
    std::int64_t t = 0;
    for (int epoch = 1; epoch <= params.epochs; ++epoch) {
        shuffle(order, rng);
        for (Index start = 0; start < n; start += batch) {
            const double step = params.learning_rate / (lambda * static_cast<double>(++t));
            const Index stop = std::min(n, start + batch);
            Vector grad_w = lambda * w;
            double grad_b = 0.0;
            const double scale = 1.0 / static_cast<double>(stop - start);
            for (Index p = start; p < stop; ++p) {
                const Index i = order[static_cast<std::size_t>(p)];
                const double margin = y(i) * (train.features.row(i).dot(w) + b);
                if (margin < 1.0) {
                    grad_w.noalias() -= (scale * y(i)) * train.features.row(i).transpose();
                    grad_b -= scale * y(i);
                }
            }
            w -= step * grad_w;
            b -= step * grad_b;
            // The minimiser has |w| <= 1 / sqrt(lambda).
            const double norm = w.norm();
            if (norm * std::sqrt(lambda) > 1.0) w /= norm * std::sqrt(lambda);
        }
        const double objective = svm_objective(w, b, train, params.C);
        if (!std::isfinite(objective) || !w.allFinite())
            throw TrainingError("svm diverged at epoch " + std::to_string(epoch) +
                                "; reduce learning_rate (" + std::to_string(params.learning_rate) +
                                ") or C (" + std::to_string(params.C) + ")");
        if (objective < best) {
            best = objective;
            model.weights = w;
            model.bias = b;
        }
        model.objective_history.push_back(best);
    }

    const Vector margins = y.cwiseProduct(model.decision(train.features));
    for (Index i = 0; i < n; ++i)
        if (margins(i) <= 1.0 + params.tol) model.support_indices.push_back(i);
    return model;
}

std::vector<Index> positive_support_vectors(const SvmModel& model, const Dataset& train) {
    const Vector decision = model.decision(train.features);
    std::vector<Index> out;
    std::vector<std::pair<double, Index>> minority_margins;
    for (Index i = 0; i < train.n_samples(); ++i) {
        if (train.labels(i) != kMinority) continue;
        const double margin = decision(i);
        minority_margins.emplace_back(margin, i);
        if (margin <= 1.0 + model.params.tol) out.push_back(i);
    }
    if (out.empty() && !minority_margins.empty()) {
        const auto take = std::min<std::size_t>(3, minority_margins.size());
        std::partial_sort(minority_margins.begin(), minority_margins.begin() + static_cast<std::ptrdiff_t>(take),
                          minority_margins.end());
        for (std::size_t i = 0; i < take; ++i) out.push_back(minority_margins[i].second);
        std::sort(out.begin(), out.end());
    }
    return out;
}

}  // namespace imbgan
