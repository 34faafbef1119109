#include "imbgan/oversample.hpp"

#include <algorithm>
#include <cmath>

#include "imbgan/neighbors.hpp"

namespace imbgan {

const char* to_string(SynthesisMode m) {
    switch (m) {
        case SynthesisMode::smote: return "smote";
        case SynthesisMode::interpolation: return "interpolation";
        case SynthesisMode::extrapolation: return "extrapolation";
        case SynthesisMode::gbo: return "gbo";
        case SynthesisMode::ssg: return "ssg";
    }
    return "smote";
}

Dataset SyntheticBatch::as_dataset(const std::vector<std::string>& feature_names) const {
    return Dataset{samples, Labels::Constant(samples.rows(), kMinority), feature_names};
}

Index sampling_level_count(double percent, Index minority_count) {
    if (percent < 0.0) throw ParameterError("sampling level must be non-negative");
    return static_cast<Index>(std::llround(percent / 100.0 * static_cast<double>(minority_count)));
}

std::vector<Index> distribute_evenly(Index total, Index n_support) {
    if (n_support < 1) throw ParameterError("cannot distribute over an empty support-vector set");
    std::vector<Index> amounts(static_cast<std::size_t>(n_support), total / n_support);
    for (Index i = 0; i < total % n_support; ++i) ++amounts[static_cast<std::size_t>(i)];
    return amounts;
}

namespace {

struct MinorityView {
    std::vector<Index> rows;  // train row ids
    Matrix features;
    Index k = 0;
    std::vector<std::string> warnings;
};

MinorityView minority_view(const Dataset& train, const OversampleRequest& req, const char* who) {
    train.validate();
    if (req.k < 1 || req.m < 1) throw ParameterError(std::string(who) + ": k and m must be >= 1");
    if (req.n_synthetic < 0) throw ParameterError(std::string(who) + ": n_synthetic must be non-negative");
    MinorityView v;
    v.rows = class_partition(train).minority;
    const auto n_min = static_cast<Index>(v.rows.size());
    if (n_min < 2)
        throw DegenerateDataError(std::string(who) + " needs at least 2 minority rows, found " + std::to_string(n_min));
    v.features = train.features(v.rows, Eigen::all);
    v.k = std::min(req.k, n_min - 1);
    if (v.k < req.k)
        v.warnings.push_back(std::string(who) + ": k=" + std::to_string(req.k) + " reduced to " + std::to_string(v.k) +
                             " (only " + std::to_string(n_min) + " minority rows)");
    return v;
}

}  // namespace

SyntheticBatch smote(const Dataset& train, const OversampleRequest& req) {
    const auto view = minority_view(train, req, "smote");
    SyntheticBatch batch;
    batch.warnings = view.warnings;
    batch.samples.resize(req.n_synthetic, train.n_features());
    batch.provenance.reserve(static_cast<std::size_t>(req.n_synthetic));
    if (req.n_synthetic == 0) return batch;

    const auto neighbors = knn_self(view.features, view.k);
    Rng rng(req.seed);
    const auto n_min = static_cast<std::uint64_t>(view.rows.size());
    for (Index s = 0; s < req.n_synthetic; ++s) {
        const auto base = static_cast<Index>(rng.uniform_index(n_min));
        const auto& nl = neighbors[static_cast<std::size_t>(base)];
        const Index nn = nl.neighbor_indices[rng.uniform_index(static_cast<std::uint64_t>(view.k))];
        const double delta = rng.uniform01();
        batch.samples.row(s) = view.features.row(base) + delta * (view.features.row(nn) - view.features.row(base));
        batch.provenance.push_back({view.rows[static_cast<std::size_t>(base)],
                                    view.rows[static_cast<std::size_t>(nn)], delta, SynthesisMode::smote,
                                    std::nullopt, false});
    }
    return batch;
}

SyntheticBatch svm_smote(const Dataset& train, const SvmModel& model, const OversampleRequest& req) {
    const auto view = minority_view(train, req, "svm_smote");
    const auto support = positive_support_vectors(model, train);
    if (support.empty()) throw DegenerateDataError("svm_smote: no positive support vectors");

    SyntheticBatch batch;
    batch.warnings = view.warnings;
    batch.samples.resize(req.n_synthetic, train.n_features());
    batch.provenance.reserve(static_cast<std::size_t>(req.n_synthetic));
    if (req.n_synthetic == 0) return batch;

    const auto amounts = distribute_evenly(req.n_synthetic, static_cast<Index>(support.size()));
    const Index m = std::min(req.m, train.n_samples() - 1);
    const Rng root(req.seed);
    Index out_row = 0;
    for (std::size_t i = 0; i < support.size(); ++i) {
        if (amounts[i] == 0) continue;
        const Index sv = support[i];
        const auto around = knn(train.features.row(sv), train.features, m, sv);
        const auto majority = static_cast<Index>(std::count_if(
            around.neighbor_indices.begin(), around.neighbor_indices.end(),
            [&](Index r) { return train.labels(r) == kMajority; }));
        const SynthesisMode mode = svm_smote_mode(majority, m);

        const auto pos = std::lower_bound(view.rows.begin(), view.rows.end(), sv) - view.rows.begin();
        const auto minority_nn = knn(view.features.row(pos), view.features, view.k, static_cast<Index>(pos));

        Rng rng = root.child(static_cast<std::uint64_t>(i));
        const RowVector x = train.features.row(sv);
        for (Index a = 0; a < amounts[i]; ++a, ++out_row) {
            const Index nn = minority_nn.neighbor_indices[rng.uniform_index(static_cast<std::uint64_t>(view.k))];
            const double delta = rng.uniform01();
            const RowVector x_nn = view.features.row(nn);
            RowVector s = mode == SynthesisMode::interpolation ? RowVector(x + delta * (x_nn - x))
                                                               : RowVector(x + delta * (x - x_nn));
            bool clamped = false;
            if (mode == SynthesisMode::extrapolation && req.clamp_box) {
                const RowVector c = s.cwiseMax(req.clamp_box->lo).cwiseMin(req.clamp_box->hi);
                clamped = (c.array() != s.array()).any();
                s = c;
            }
            batch.samples.row(out_row) = s;
            batch.provenance.push_back(
                {sv, view.rows[static_cast<std::size_t>(nn)], delta, mode, std::nullopt, clamped});
        }
    }
    return batch;
}

}  // namespace imbgan
