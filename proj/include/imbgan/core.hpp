#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "imbgan/errors.hpp"
#include "imbgan/rng.hpp"

namespace imbgan {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;
using Labels = Eigen::VectorXi;
using Index = Eigen::Index;

inline constexpr int kMajority = 0;
inline constexpr int kMinority = 1;

/// Binary-labelled tabular data. Rows are samples; label 1 is the minority.
struct Dataset {
    Matrix features;
    Labels labels;
    std::vector<std::string> feature_names;

    Index n_samples() const { return features.rows(); }
    Index n_features() const { return features.cols(); }
    Index count(int label) const { return (labels.array() == label).count(); }

    /// Throws ConfigError on shape mismatch, non-finite values, or labels
    /// outside {0,1}.
    void validate() const;

    Dataset select(std::span<const Index> rows) const;

    /// Rows of `other` appended below this dataset's rows.
    Dataset concat(const Dataset& other) const;

    bool operator==(const Dataset& other) const;
};

/// Default names "f0", "f1", ...
std::vector<std::string> default_feature_names(Index n_features);

/// Label column given either by header name or by 0-based position.
using LabelColumn = std::variant<std::size_t, std::string>;

/// Read a comma-separated file. The first row is treated as a header when any
/// of its feature cells is non-numeric. Rows whose label equals
/// `minority_label` (string match after trimming, or numeric match when both
/// parse as numbers) become label 1; everything else becomes 0.
Dataset load_csv(const std::string& path, const LabelColumn& label_column,
                 const std::string& minority_label);
Dataset read_csv(std::istream& in, const LabelColumn& label_column,
                 const std::string& minority_label);

/// Header plus rows, label column last, values in shortest round-trip form.
void write_csv(const std::string& path, const Dataset& ds);
void write_csv(std::ostream& out, const Dataset& ds);

struct ScalerParams {
    Vector per_feature_min;
    Vector per_feature_max;
};

struct Range {
    double lo = 0.0;
    double hi = 1.0;
};

ScalerParams minmax_fit(const Matrix& features);
inline ScalerParams minmax_fit(const Dataset& ds) { return minmax_fit(ds.features); }

/// Affine map of each column from [min, max] onto `target`. Constant columns
/// map to the midpoint. Values outside the fitted range are clipped into
/// `target` when `clip` is set (the usual case for held-out data).
Matrix minmax_apply(const Matrix& features, const ScalerParams& params, Range target = {},
                    bool clip = true);
Dataset minmax_apply(const Dataset& ds, const ScalerParams& params, Range target = {},
                     bool clip = true);

/// Inverse of minmax_apply for unclipped values. Constant columns map back
/// to their constant.
Matrix minmax_invert(const Matrix& scaled, const ScalerParams& params, Range target = {});

struct SplitSpec {
    double train_fraction = 0.8;
    std::uint64_t seed = 0;
    bool stratified = true;
};

struct Split {
    Dataset train;
    Dataset test;
    std::vector<Index> train_rows;  // ascending row ids into the source
    std::vector<Index> test_rows;
};

/// Number of rows of a class of size `class_count` that go to the training
/// side: round-half-away-from-zero of fraction * count, clamped to
/// [1, count - 1] so both sides keep at least one row.
Index stratified_train_count(Index class_count, double train_fraction);

/// Seeded split. Stratified splits shuffle each class independently and take
/// stratified_train_count rows of each for training; row order inside each
/// side follows the source.
Split train_test_split(const Dataset& ds, const SplitSpec& spec);

struct ClassPartition {
    std::vector<Index> minority;
    std::vector<Index> majority;
};

ClassPartition class_partition(const Dataset& ds);

/// Minority rows as a dense matrix.
Matrix minority_features(const Dataset& ds);

/// Throws DegenerateDataError unless both classes have at least
/// `min_per_class` rows.
void require_two_classes(const Dataset& ds, Index min_per_class = 2);

/// Fisher-Yates shuffle driven by Rng::uniform_index.
template <typename T>
void shuffle(std::vector<T>& v, Rng& rng) {
    for (std::size_t i = v.size(); i > 1; --i) {
        const auto j = static_cast<std::size_t>(rng.uniform_index(i));
        std::swap(v[i - 1], v[j]);
    }
}

}  // namespace imbgan
