#include "imbgan/fixtures.hpp"

#include <cmath>
#include <numeric>

namespace imbgan {

const std::vector<DatasetShape>& benchmark_shapes() {
    static const std::vector<DatasetShape> shapes{
        {"page-blocks", 28, 443, 10}, {"ecoli", 20, 315, 7},      {"winequality", 18, 637, 10},
        {"abalone", 840, 3337, 8},    {"ionosphere", 126, 225, 34}, {"spambase", 1812, 2788, 57},
        {"shuttle", 170, 57830, 9},   {"yeast", 51, 462, 8},
    };
    return shapes;
}

std::optional<DatasetShape> find_shape(const std::string& name) {
    for (const auto& s : benchmark_shapes())
        if (s.name == name) return s;
    if (name == "blobs500") return DatasetShape{"blobs500", 50, 450, 4};
    return std::nullopt;
}

Dataset make_shape_fixture(const DatasetShape& shape, std::uint64_t seed) {
    if (shape.minority < 2 || shape.majority < 2 || shape.n_features < 1)
        throw ParameterError("fixture shape needs >= 2 rows per class and >= 1 feature");
    Rng rng(seed);
    const Index d = shape.n_features;
    // Class means sit 2.5 within-class standard deviations apart in total.
    const double shift = 2.5 / std::sqrt(static_cast<double>(d));
    Vector offset(d), scale(d), direction(d);
    for (Index j = 0; j < d; ++j) {
        offset(j) = 10.0 * static_cast<double>(j % 5) + rng.uniform(-1.0, 1.0);
        scale(j) = 0.5 + static_cast<double>(j % 3);
        direction(j) = j % 2 == 0 ? 1.0 : -1.0;
    }

    const Index n = shape.minority + shape.majority;
    std::vector<Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Index{0});
    shuffle(order, rng);

    Dataset ds;
    ds.features.resize(n, d);
    ds.labels.resize(n);
    ds.feature_names = default_feature_names(d);
    for (Index i = 0; i < n; ++i) {
        const Index row = order[static_cast<std::size_t>(i)];
        const bool minority = i < shape.minority;
        ds.labels(row) = minority ? kMinority : kMajority;
        for (Index j = 0; j < d; ++j) {
            const double z = rng.normal() * (minority ? 0.8 : 1.0) + (minority ? shift * direction(j) : 0.0);
            ds.features(row, j) = offset(j) + scale(j) * z;
        }
    }
    return ds;
}

}  // namespace imbgan
