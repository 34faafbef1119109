// imbgan command-line front end.
#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "imbgan/benchmark.hpp"
#include "imbgan/fixtures.hpp"
#include "imbgan/gradcheck.hpp"

namespace fs = std::filesystem;
using namespace imbgan;

namespace {

constexpr int kOk = 0;
constexpr int kRuntime = 1;
constexpr int kUsage = 2;

LabelColumn parse_label_column(const std::string& s) {
    if (!s.empty() && s.find_first_not_of("0123456789") == std::string::npos) return std::stoul(s);
    return s;
}

void print_counts(const char* when, const Dataset& ds) {
    std::cout << when << ": majority=" << ds.count(kMajority) << " minority=" << ds.count(kMinority) << '\n';
}

nlohmann::json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config '" + path + "'");
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
}

struct OversampleArgs {
    std::string input;
    std::string out;
    std::string strategy = "smote";
    std::string label_column = "label";
    std::string minority_label = "1";
    std::string config;
    std::uint64_t seed = 0;
    std::optional<Index> k;
    std::optional<Index> m;
    std::optional<int> gan_epochs;
    std::string loss_out;
};

int cmd_oversample(const OversampleArgs& a) {
    const Strategy strategy = strategy_from_string(a.strategy);
    const Dataset ds = load_csv(a.input, parse_label_column(a.label_column), a.minority_label);
    print_counts("before", ds);
    if (strategy == Strategy::none) {
        fs::copy_file(a.input, a.out, fs::copy_options::overwrite_existing);
        print_counts("after", ds);
        return kOk;
    }
    BalanceOptions options = a.config.empty() ? BalanceOptions{} : balance_options_from_json(read_json(a.config));
    if (a.k) options.k = *a.k;
    if (a.m) options.m = *a.m;
    if (a.gan_epochs) options.gan.epochs = *a.gan_epochs;
    const BalanceResult result = balance_to_parity(ds, strategy, a.seed, options);
    write_csv(a.out, result.balanced);
    if (result.gan && !a.loss_out.empty()) write_loss_history_csv(a.loss_out, *result.gan);
    print_counts("after", result.balanced);
    return kOk;
}

int cmd_benchmark(const std::string& config, std::optional<std::uint64_t> seed, const std::string& out,
                  std::optional<int> threads) {
    BenchmarkConfig cfg = load_benchmark_config(config);
    if (seed) cfg.master_seed = *seed;
    if (!out.empty()) cfg.output_dir = out;
    if (threads) cfg.threads = *threads;
    const BenchmarkResult result = run_benchmark(cfg);
    std::cout << "bundle: " << result.bundle.string() << '\n'
              << "cells: " << result.records.size() << " failed: " << result.failures << '\n';
    std::cout << report_bundle(result.bundle, ReportFormat::markdown).performance;
    return result.failures == 0 ? kOk : kRuntime;
}

int cmd_report(const std::string& bundle, const std::string& format, const std::string& out) {
    const ReportFormat f = format == "csv" ? ReportFormat::csv : ReportFormat::markdown;
    const ReportTables t = report_bundle(bundle, f);
    const std::string text = "# performance\n" + t.performance + "\n# misclassification\n" +
                             t.misclassification + "\n# minority spread\n" + t.spread;
    if (out.empty()) {
        std::cout << text;
    } else {
        std::ofstream o(out, std::ios::binary);
        if (!o) throw ConfigError("cannot write '" + out + "'");
        o << text;
    }
    return kOk;
}

int cmd_gradcheck(const GradCheckOptions& options, double threshold) {
    bool ok = true;
    for (const auto& c : run_gradcheck_suite(options)) {
        const bool pass = c.worst.max_relative_error < threshold && c.worst.checked > 0;
        ok = ok && pass;
        std::printf("%-32s max_rel_err=%.3e checked=%lld skipped=%lld batches=%d %s\n", c.name.c_str(),
                    c.worst.max_relative_error, static_cast<long long>(c.worst.checked),
                    static_cast<long long>(c.worst.skipped), c.batches, pass ? "ok" : "FAIL");
    }
    return ok ? kOk : kRuntime;
}

int cmd_fixture(const std::string& shape_name, std::uint64_t seed, const std::string& out) {
    const auto shape = find_shape(shape_name);
    if (!shape) throw UsageError("unknown fixture shape '" + shape_name + "'");
    const Dataset ds = make_shape_fixture(*shape, seed);
    write_csv(out, ds);
    print_counts("fixture", ds);
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"GAN-based oversampling for imbalanced binary classification"};
    app.require_subcommand(1);

    OversampleArgs os;
    auto* oversample = app.add_subcommand("oversample", "Balance a CSV dataset to class parity");
    oversample->add_option("input", os.input, "Input CSV")->required();
    oversample->add_option("--out,-o", os.out, "Output CSV")->required();
    oversample->add_option("--strategy,-s", os.strategy, "none | smote | svm_smote | gbo | ssg")
        ->capture_default_str();
    oversample->add_option("--label-column", os.label_column, "Label column name or 0-based index")
        ->capture_default_str();
    oversample->add_option("--minority-label", os.minority_label, "Label value of the minority class")
        ->capture_default_str();
    oversample->add_option("--seed", os.seed, "Seed")->capture_default_str();
    oversample->add_option("--config", os.config, "JSON file with oversample/svm/gan sections");
    oversample->add_option("--k", os.k, "Neighbours for SMOTE");
    oversample->add_option("--m", os.m, "Neighbours for the SVM-SMOTE mode decision");
    oversample->add_option("--gan-epochs", os.gan_epochs, "GAN epoch cap");
    oversample->add_option("--loss-out", os.loss_out, "Write the GAN loss history CSV here");

    std::string bench_config, bench_out;
    std::optional<std::uint64_t> bench_seed;
    std::optional<int> bench_threads;
    auto* benchmark = app.add_subcommand("benchmark", "Run the dataset x strategy x repetition benchmark");
    benchmark->add_option("--config,-c", bench_config, "Benchmark JSON config")->required();
    benchmark->add_option("--seed", bench_seed, "Override master_seed");
    benchmark->add_option("--out,-o", bench_out, "Override output_dir");
    benchmark->add_option("--threads", bench_threads, "Worker threads");

    std::string report_dir, report_format = "markdown", report_out;
    auto* report = app.add_subcommand("report", "Render tables from a benchmark bundle");
    report->add_option("bundle", report_dir, "Bundle directory")->required();
    report->add_option("--format,-f", report_format, "markdown | csv")
        ->check(CLI::IsMember({"markdown", "csv"}))
        ->capture_default_str();
    report->add_option("--out,-o", report_out, "Write tables to this file instead of stdout");

    GradCheckOptions gc;
    double gc_threshold = 1e-4;
    auto* gradcheck = app.add_subcommand("gradcheck", "Finite-difference check of every network");
    gradcheck->add_option("--seed", gc.seed, "Seed")->capture_default_str();
    gradcheck->add_option("--batches", gc.batches, "Random batches per network")->capture_default_str();
    gradcheck->add_option("--per-tensor", gc.max_per_tensor, "Coordinates per tensor (0 = all)")
        ->capture_default_str();
    gradcheck->add_option("--threshold", gc_threshold, "Maximum relative error")->capture_default_str();

    std::string fx_shape = "blobs500", fx_out;
    std::uint64_t fx_seed = 7;
    auto* fixture = app.add_subcommand("fixture", "Write a synthetic dataset with benchmark class counts");
    fixture->add_option("shape", fx_shape, "Shape name (e.g. abalone, blobs500)")->capture_default_str();
    fixture->add_option("--seed", fx_seed, "Seed")->capture_default_str();
    fixture->add_option("--out,-o", fx_out, "Output CSV")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (*oversample) return cmd_oversample(os);
        if (*benchmark) return cmd_benchmark(bench_config, bench_seed, bench_out, bench_threads);
        if (*report) return cmd_report(report_dir, report_format, report_out);
        if (*gradcheck) return cmd_gradcheck(gc, gc_threshold);
        if (*fixture) return cmd_fixture(fx_shape, fx_seed, fx_out);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kRuntime;
    }
    return kUsage;
}
