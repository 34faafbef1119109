#include "imbgan/core.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <optional>
#include <sstream>

namespace imbgan {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            out.push_back(trim(line.substr(start)));
            return out;
        }
        out.push_back(trim(line.substr(start, comma - start)));
        start = comma + 1;
    }
}

std::optional<double> parse_number(std::string_view s) {
    if (s.empty()) return std::nullopt;
    if (s.front() == '+') s.remove_prefix(1);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
    return value;
}

bool label_matches(std::string_view cell, std::string_view minority) {
    if (cell == minority) return true;
    const auto a = parse_number(cell);
    const auto b = parse_number(minority);
    return a && b && *a == *b;
}

void append_number(std::string& out, double v) {
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    out.append(buf, ptr);
}

}  // namespace

void Dataset::validate() const {
    if (features.rows() != labels.size())
        throw ConfigError("dataset has " + std::to_string(features.rows()) + " feature rows but " +
                          std::to_string(labels.size()) + " labels");
    if (features.cols() < 1) throw ConfigError("dataset has no feature columns");
    if (!feature_names.empty() && static_cast<Index>(feature_names.size()) != features.cols())
        throw ConfigError("feature_names length does not match feature count");
    if (!features.allFinite()) throw ConfigError("dataset contains non-finite feature values");
    if (((labels.array() != 0) && (labels.array() != 1)).any())
        throw ConfigError("labels must be 0 or 1");
}

Dataset Dataset::select(std::span<const Index> rows) const {
    Dataset out;
    out.features.resize(static_cast<Index>(rows.size()), features.cols());
    out.labels.resize(static_cast<Index>(rows.size()));
    for (Index i = 0; i < static_cast<Index>(rows.size()); ++i) {
        out.features.row(i) = features.row(rows[static_cast<std::size_t>(i)]);
        out.labels(i) = labels(rows[static_cast<std::size_t>(i)]);
    }
    out.feature_names = feature_names;
    return out;
}

Dataset Dataset::concat(const Dataset& other) const {
    if (other.n_features() != n_features() && other.n_samples() > 0)
        throw ConfigError("cannot concatenate datasets with different feature counts");
    Dataset out;
    out.features.resize(n_samples() + other.n_samples(), n_features());
    out.features.topRows(n_samples()) = features;
    out.features.bottomRows(other.n_samples()) = other.features;
    out.labels.resize(n_samples() + other.n_samples());
    out.labels.head(n_samples()) = labels;
    out.labels.tail(other.n_samples()) = other.labels;
    out.feature_names = feature_names;
    return out;
}

bool Dataset::operator==(const Dataset& other) const {
    return features.rows() == other.features.rows() && features.cols() == other.features.cols() &&
           features == other.features && labels == other.labels &&
           feature_names == other.feature_names;
}

std::vector<std::string> default_feature_names(Index n_features) {
    std::vector<std::string> names;
    names.reserve(static_cast<std::size_t>(n_features));
    for (Index j = 0; j < n_features; ++j) names.push_back("f" + std::to_string(j));
    return names;
}

Dataset read_csv(std::istream& in, const LabelColumn& label_column,
                 const std::string& minority_label) {
    std::vector<std::pair<std::size_t, std::string>> lines;
    {
        std::string line;
        std::size_t number = 0;
        while (std::getline(in, line)) {
            ++number;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (trim(line).empty()) continue;
            lines.emplace_back(number, std::move(line));
        }
    }
    if (lines.empty()) throw ParseError("file is empty", 0);

    const auto first = split_fields(lines.front().second);
    const std::size_t arity = first.size();
    if (arity < 2) throw ParseError("need at least one feature column and a label column", lines.front().first);

    std::size_t label_idx = 0;
    bool header_required = false;
    if (const auto* idx = std::get_if<std::size_t>(&label_column)) {
        if (*idx >= arity)
            throw ConfigError("label column " + std::to_string(*idx) + " out of range (file has " +
                              std::to_string(arity) + " columns)");
        label_idx = *idx;
    } else {
        const auto& name = std::get<std::string>(label_column);
        const auto it = std::find(first.begin(), first.end(), name);
        if (it == first.end()) throw ConfigError("label column '" + name + "' not found in header");
        label_idx = static_cast<std::size_t>(it - first.begin());
        header_required = true;
    }

    bool has_header = header_required;
    if (!has_header) {
        for (std::size_t c = 0; c < arity; ++c)
            if (c != label_idx && !parse_number(first[c])) has_header = true;
    }

    std::vector<std::string> names;
    if (has_header) {
        for (std::size_t c = 0; c < arity; ++c)
            if (c != label_idx) names.emplace_back(first[c]);
    } else {
        names = default_feature_names(static_cast<Index>(arity - 1));
    }

    const std::size_t begin = has_header ? 1 : 0;
    const auto n_rows = static_cast<Index>(lines.size() - begin);
    Dataset ds;
    ds.features.resize(n_rows, static_cast<Index>(arity - 1));
    ds.labels.resize(n_rows);
    ds.feature_names = std::move(names);

    for (std::size_t r = begin; r < lines.size(); ++r) {
        const auto& [number, text] = lines[r];
        const auto fields = split_fields(text);
        if (fields.size() != arity)
            throw ParseError("expected " + std::to_string(arity) + " fields, found " +
                                 std::to_string(fields.size()),
                             number);
        const auto row = static_cast<Index>(r - begin);
        Index col = 0;
        for (std::size_t c = 0; c < arity; ++c) {
            if (c == label_idx) {
                ds.labels(row) = label_matches(fields[c], minority_label) ? kMinority : kMajority;
                continue;
            }
            const auto value = parse_number(fields[c]);
            if (!value) throw ParseError("non-numeric value '" + std::string(fields[c]) + "'", number);
            if (!std::isfinite(*value))
                throw ParseError("non-finite value '" + std::string(fields[c]) + "'", number);
            ds.features(row, col++) = *value;
        }
    }

    const Index n_min = ds.count(kMinority);
    const Index n_maj = ds.count(kMajority);
    if (n_min < 2 || n_maj < 2)
        throw DegenerateDataError("need at least 2 samples per class, found minority=" +
                                  std::to_string(n_min) + " majority=" + std::to_string(n_maj));
    if (n_min > n_maj)
        throw ConfigError("minority label '" + minority_label + "' selects the larger class (" +
                          std::to_string(n_min) + " vs " + std::to_string(n_maj) + ")");
    return ds;
}

Dataset load_csv(const std::string& path, const LabelColumn& label_column,
                 const std::string& minority_label) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open '" + path + "'");
    return read_csv(in, label_column, minority_label);
}

void write_csv(std::ostream& out, const Dataset& ds) {
    ds.validate();
    const auto names = ds.feature_names.empty() ? default_feature_names(ds.n_features()) : ds.feature_names;
    std::string buf;
    for (const auto& name : names) {
        buf += name;
        buf += ',';
    }
    buf += "label\n";
    for (Index i = 0; i < ds.n_samples(); ++i) {
        for (Index j = 0; j < ds.n_features(); ++j) {
            append_number(buf, ds.features(i, j));
            buf += ',';
        }
        buf += ds.labels(i) == kMinority ? '1' : '0';
        buf += '\n';
    }
    out << buf;
}

void write_csv(const std::string& path, const Dataset& ds) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write '" + path + "'");
    write_csv(out, ds);
}

ScalerParams minmax_fit(const Matrix& features) {
    if (features.rows() == 0) throw DegenerateDataError("cannot fit a scaler on zero rows");
    if (!features.allFinite()) throw ConfigError("scaler input contains non-finite values");
    return {features.colwise().minCoeff().transpose(), features.colwise().maxCoeff().transpose()};
}

Matrix minmax_apply(const Matrix& features, const ScalerParams& params, Range target, bool clip) {
    if (!features.allFinite()) throw ConfigError("scaler input contains non-finite values");
    if (features.cols() != params.per_feature_min.size())
        throw ConfigError("scaler was fitted on a different feature count");
    Matrix out(features.rows(), features.cols());
    const double mid = 0.5 * (target.lo + target.hi);
    for (Index j = 0; j < features.cols(); ++j) {
        const double lo = params.per_feature_min(j);
        const double span = params.per_feature_max(j) - lo;
        if (span <= 0.0) {
            out.col(j).setConstant(mid);
            continue;
        }
        out.col(j) = target.lo + (features.col(j).array() - lo) * ((target.hi - target.lo) / span);
        if (clip) out.col(j) = out.col(j).cwiseMax(target.lo).cwiseMin(target.hi);
    }
    return out;
}

Dataset minmax_apply(const Dataset& ds, const ScalerParams& params, Range target, bool clip) {
    Dataset out{minmax_apply(ds.features, params, target, clip), ds.labels, ds.feature_names};
    return out;
}

Matrix minmax_invert(const Matrix& scaled, const ScalerParams& params, Range target) {
    Matrix out(scaled.rows(), scaled.cols());
    for (Index j = 0; j < scaled.cols(); ++j) {
        const double lo = params.per_feature_min(j);
        const double span = params.per_feature_max(j) - lo;
        if (span <= 0.0) {
            out.col(j).setConstant(lo);
            continue;
        }
        out.col(j) = lo + (scaled.col(j).array() - target.lo) * (span / (target.hi - target.lo));
    }
    return out;
}

Index stratified_train_count(Index class_count, double train_fraction) {
    const auto n = static_cast<Index>(std::llround(train_fraction * static_cast<double>(class_count)));
    return std::clamp<Index>(n, 1, class_count - 1);
}

Split train_test_split(const Dataset& ds, const SplitSpec& spec) {
    if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0))
        throw ParameterError("train_fraction must lie in (0,1)");
    require_two_classes(ds, 2);

    Rng rng(spec.seed);
    std::vector<Index> train_rows;
    std::vector<Index> test_rows;
    if (spec.stratified) {
        auto [minority, majority] = class_partition(ds);
        for (auto* rows : {&majority, &minority}) {
            shuffle(*rows, rng);
            const Index n_train = stratified_train_count(static_cast<Index>(rows->size()), spec.train_fraction);
            train_rows.insert(train_rows.end(), rows->begin(), rows->begin() + n_train);
            test_rows.insert(test_rows.end(), rows->begin() + n_train, rows->end());
        }
    } else {
        std::vector<Index> rows(static_cast<std::size_t>(ds.n_samples()));
        std::iota(rows.begin(), rows.end(), Index{0});
        shuffle(rows, rng);
        const Index n_train = stratified_train_count(ds.n_samples(), spec.train_fraction);
        train_rows.assign(rows.begin(), rows.begin() + n_train);
        test_rows.assign(rows.begin() + n_train, rows.end());
    }
    std::sort(train_rows.begin(), train_rows.end());
    std::sort(test_rows.begin(), test_rows.end());

    Split out;
    out.train = ds.select(train_rows);
    out.test = ds.select(test_rows);
    out.train_rows = std::move(train_rows);
    out.test_rows = std::move(test_rows);
    return out;
}

ClassPartition class_partition(const Dataset& ds) {
    ClassPartition p;
    for (Index i = 0; i < ds.labels.size(); ++i)
        (ds.labels(i) == kMinority ? p.minority : p.majority).push_back(i);
    return p;
}

Matrix minority_features(const Dataset& ds) {
    const auto rows = class_partition(ds).minority;
    Matrix out(static_cast<Index>(rows.size()), ds.n_features());
    for (Index i = 0; i < out.rows(); ++i) out.row(i) = ds.features.row(rows[static_cast<std::size_t>(i)]);
    return out;
}

void require_two_classes(const Dataset& ds, Index min_per_class) {
    const Index n_min = ds.count(kMinority);
    const Index n_maj = ds.count(kMajority);
    if (n_min < min_per_class || n_maj < min_per_class)
        throw DegenerateDataError("each class needs at least " + std::to_string(min_per_class) +
                                  " rows (minority=" + std::to_string(n_min) +
                                  ", majority=" + std::to_string(n_maj) + ")");
}

}  // namespace imbgan
