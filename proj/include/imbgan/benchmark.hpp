#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "imbgan/balance.hpp"
#include "imbgan/classifier.hpp"
#include "imbgan/eval.hpp"

namespace imbgan {

/// A dataset entry of a benchmark: either a CSV file or a named synthetic
/// fixture shape.
struct DatasetSource {
    std::string name;
    std::string path;
    LabelColumn label_column = std::string("label");
    std::string minority_label = "1";
    std::optional<std::string> fixture;
    std::uint64_t fixture_seed = 7;
};

struct BenchmarkConfig {
    std::vector<DatasetSource> datasets;
    std::vector<Strategy> strategies;
    int repetitions = 10;
    SplitSpec split;
    std::uint64_t master_seed = 42;
    std::string output_dir = "bundle";
    /// Share of the training split held out (stratified, real rows only) for
    /// classifier early stopping; 0 disables early stopping.
    double validation_fraction = 0.1;
    ClassifierSpec classifier;
    TrainConfig training{32, 200, 1e-3, 10, 1e-4, 0};
    BalanceOptions balance;
    int histogram_bins = 20;
    /// Worker threads for independent cells; output does not depend on it.
    int threads = 1;

    void validate() const;
};

/// Parse the JSON config schema documented in the README. Unknown keys are
/// rejected.
BenchmarkConfig benchmark_config_from_json(const nlohmann::json& j);
nlohmann::json benchmark_config_to_json(const BenchmarkConfig& cfg);
BenchmarkConfig load_benchmark_config(const std::string& path);

/// The "oversample", "svm" and "gan" sections of a config; other benchmark
/// keys are accepted and ignored.
BalanceOptions balance_options_from_json(const nlohmann::json& j);

Dataset load_source(const DatasetSource& src);

/// One (dataset, strategy, repetition) cell.
struct RunRecord {
    std::string dataset;
    std::string strategy;
    int run = 0;
    std::uint64_t split_seed = 0;
    bool ok = false;
    Index n_train = 0;
    Index n_synthetic = 0;
    Index n_test = 0;
    double train_accuracy = 0.0;
    Confusion test;
    MetricSet metrics;
    /// Pooled std of the training minority rows after oversampling, in the
    /// [0,1] units of the pre-oversampling scaler.
    double minority_std = 0.0;
    /// Mean KS distance to a fitted normal over features of the synthetic
    /// rows; negative when there are none.
    double synthetic_ks = -1.0;
    int gan_epochs = 0;
    std::string message;
};

std::string run_records_header();
std::string to_csv_line(const RunRecord& r);
std::vector<RunRecord> read_run_records(const std::filesystem::path& path);
void write_run_records(const std::filesystem::path& path, const std::vector<RunRecord>& records);
/// One object per record, keyed by dataset, strategy, run and split seed.
nlohmann::json run_records_to_json(const std::vector<RunRecord>& records);

struct BenchmarkResult {
    std::vector<RunRecord> records;
    std::filesystem::path bundle;
    int failures = 0;
};

/// For every dataset x strategy x repetition: split with the repetition's
/// seed, oversample the training rows only, scale, train the classifier,
/// evaluate on train and test. Writes the bundle (runs.csv, config.json,
/// tables, loss and histogram CSVs, classifier reports) under
/// cfg.output_dir. Failing cells are recorded and skipped in aggregation.
BenchmarkResult run_benchmark(const BenchmarkConfig& cfg);

enum class ReportFormat { markdown, csv };

struct ReportTables {
    std::string performance;       // train/test metrics, mean (max, std)
    std::string misclassification; // mean fp + fn per dataset and strategy
    std::string spread;            // minority pooled std per dataset and strategy
};

/// Tables recomputed from raw run records. The best entry of each column
/// within a dataset is marked (bold in markdown, a `best` column in CSV).
ReportTables render_report(const std::vector<RunRecord>& records, ReportFormat format);

/// Reads runs.csv from a bundle directory; throws ConfigError listing
/// missing files.
ReportTables report_bundle(const std::filesystem::path& bundle, ReportFormat format);

/// Writes table2/table3/table4 in both formats into the bundle directory.
void write_report_files(const std::filesystem::path& bundle, const std::vector<RunRecord>& records);

}  // namespace imbgan
