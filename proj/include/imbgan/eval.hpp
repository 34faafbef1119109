#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "imbgan/core.hpp"

namespace imbgan {

/// Binary confusion counts with class 1 as the positive (minority) class.
struct Confusion {
    std::int64_t tp = 0;
    std::int64_t fp = 0;
    std::int64_t tn = 0;
    std::int64_t fn = 0;

    std::int64_t total() const { return tp + fp + tn + fn; }
    bool operator==(const Confusion&) const = default;
};

Confusion confusion(const Labels& predictions, const Labels& labels);

/// Positive-class metrics. Recall is tp / (tp + fn). A ratio whose
/// denominator is zero is reported as 0 and flagged.
struct MetricSet {
    double accuracy = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    bool precision_undefined = false;
    bool recall_undefined = false;
    bool f1_undefined = false;
};

MetricSet metrics(const Confusion& c);

inline std::int64_t misclassification_count(const Confusion& c) { return c.fp + c.fn; }

struct FeatureStd {
    Vector per_feature;
    /// sqrt of the mean per-feature variance.
    double pooled = 0.0;
};

/// Sample standard deviation (n - 1 denominator) of each column.
FeatureStd feature_std(const Matrix& rows);

struct Histogram {
    std::vector<double> edges;  // bins + 1 ascending edges
    std::vector<std::int64_t> counts;
};

/// Equal-width bins over [min, max]; the last bin is closed on the right.
/// A constant input puts every value in the first bin of [v - 0.5, v + 0.5].
Histogram histogram(std::span<const double> values, int bins);

/// Kolmogorov-Smirnov distance between the empirical CDF of `values` and a
/// normal with the sample mean and sample standard deviation. A constant
/// sample has no fitted normal and scores 1.
double ks_statistic(std::span<const double> values);

/// Mean, max, min, and sample standard deviation (0 for one run).
struct Summary {
    double mean = 0.0;
    double max = 0.0;
    double min = 0.0;
    double std = 0.0;
    std::size_t n = 0;
};

Summary summarize(std::span<const double> values);

struct RunAggregate {
    Summary accuracy;
    Summary precision;
    Summary recall;
    Summary f1;
};

RunAggregate aggregate(std::span<const MetricSet> runs);

}  // namespace imbgan
