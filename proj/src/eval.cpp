#include "imbgan/eval.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace imbgan {

Confusion confusion(const Labels& predictions, const Labels& labels) {
    if (predictions.size() != labels.size())
        throw ParameterError("confusion: " + std::to_string(predictions.size()) + " predictions vs " +
                             std::to_string(labels.size()) + " labels");
    Confusion c;
    for (Index i = 0; i < labels.size(); ++i) {
        const bool pred = predictions(i) == kMinority;
        const bool truth = labels(i) == kMinority;
        if (pred && truth) ++c.tp;
        else if (pred) ++c.fp;
        else if (truth) ++c.fn;
        else ++c.tn;
    }
    return c;
}

MetricSet metrics(const Confusion& c) {
    if (c.tp < 0 || c.fp < 0 || c.tn < 0 || c.fn < 0) throw ParameterError("confusion counts must be non-negative");
    if (c.total() == 0) throw ParameterError("metrics: empty confusion matrix");
    MetricSet m;
    m.accuracy = 1.0 - static_cast<double>(misclassification_count(c)) / static_cast<double>(c.total());
    if (c.tp + c.fp > 0) m.precision = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
    else m.precision_undefined = true;
    if (c.tp + c.fn > 0) m.recall = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
    else m.recall_undefined = true;
    if (m.precision + m.recall > 0.0) m.f1 = 2.0 * m.precision * m.recall / (m.precision + m.recall);
    else m.f1_undefined = true;
    return m;
}

FeatureStd feature_std(const Matrix& rows) {
    if (rows.rows() < 2) throw DegenerateDataError("feature_std needs at least 2 rows");
    const RowVector mean = rows.colwise().mean();
    const RowVector var = (rows.rowwise() - mean).colwise().squaredNorm() / static_cast<double>(rows.rows() - 1);
    FeatureStd out;
    out.per_feature = var.transpose().array().sqrt();
    out.pooled = std::sqrt(var.mean());
    return out;
}

Histogram histogram(std::span<const double> values, int bins) {
    if (values.empty()) throw ParameterError("histogram: empty input");
    if (bins < 1) throw ParameterError("histogram: bins must be >= 1");
    auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
    double lo = *lo_it;
    double hi = *hi_it;
    if (hi <= lo) {
        lo -= 0.5;
        hi += 0.5;
    }
    Histogram h;
    h.counts.assign(static_cast<std::size_t>(bins), 0);
    for (int b = 0; b < bins; ++b) h.edges.push_back(lo + (hi - lo) * b / bins);
    h.edges.push_back(hi);
    const bool constant = *hi_it <= *lo_it;
    for (double v : values) {
        auto b = constant ? 0 : static_cast<int>(std::floor((v - lo) / (hi - lo) * bins));
        b = std::clamp(b, 0, bins - 1);
        ++h.counts[static_cast<std::size_t>(b)];
    }
    return h;
}

double ks_statistic(std::span<const double> values) {
    if (values.empty()) throw ParameterError("ks_statistic: empty input");
    const auto n = static_cast<double>(values.size());
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= n;
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    const double sd = values.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
    if (!(sd > 0.0)) return 1.0;

    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    double d = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        const double cdf = 0.5 * std::erfc(-(sorted[i] - mean) / (sd * std::numbers::sqrt2));
        d = std::max({d, static_cast<double>(i + 1) / n - cdf, cdf - static_cast<double>(i) / n});
    }
    return std::clamp(d, 0.0, 1.0);
}

Summary summarize(std::span<const double> values) {
    if (values.empty()) throw ParameterError("summarize: no values");
    Summary s;
    s.n = values.size();
    double total = 0.0;
    s.max = values.front();
    s.min = values.front();
    for (double v : values) {
        total += v;
        s.max = std::max(s.max, v);
        s.min = std::min(s.min, v);
    }
    s.mean = total / static_cast<double>(s.n);
    if (s.n > 1) {
        double ss = 0.0;
        for (double v : values) ss += (v - s.mean) * (v - s.mean);
        s.std = std::sqrt(ss / static_cast<double>(s.n - 1));
    }
    // Rounding in the mean can step outside [min, max] for near-equal runs.
    s.mean = std::clamp(s.mean, s.min, s.max);
    return s;
}

RunAggregate aggregate(std::span<const MetricSet> runs) {
    if (runs.empty()) throw ParameterError("aggregate: no runs");
    std::vector<double> acc, prec, rec, f1;
    for (const auto& r : runs) {
        acc.push_back(r.accuracy);
        prec.push_back(r.precision);
        rec.push_back(r.recall);
        f1.push_back(r.f1);
    }
    return {summarize(acc), summarize(prec), summarize(rec), summarize(f1)};
}

}  // namespace imbgan
