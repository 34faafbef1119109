#include "imbgan/benchmark.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <thread>

#include "imbgan/fixtures.hpp"
#include "imbgan/serialize.hpp"

namespace imbgan {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void require_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
    if (!j.is_object()) throw ConfigError(where + ": expected an object");
    for (const auto& [key, value] : j.items())
        if (!allowed.count(key)) throw ConfigError(where + ": unknown key '" + key + "'");
}

template <typename T>
void read_opt(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

std::string label_value_string(const json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_integer()) return std::to_string(v.get<long long>());
    if (v.is_number()) {
        std::ostringstream s;
        s << v.get<double>();
        return s.str();
    }
    throw ConfigError("minority_label must be a string or number");
}

std::string file_token(const std::string& s) {
    std::string out = s;
    for (char& c : out)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '_') c = '_';
    return out;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string clean_message(std::string s) {
    for (char& c : s)
        if (c == ',' || c == '\n' || c == '\r' || c == '"') c = ';';
    return s;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write '" + path.string() + "'");
    out << text;
}

void read_balance_sections(const json& j, BalanceOptions& b) {
    if (j.contains("oversample")) {
        const auto& jo = j.at("oversample");
        require_keys(jo, {"k", "m"}, "oversample");
        read_opt(jo, "k", b.k);
        read_opt(jo, "m", b.m);
    }
    if (j.contains("svm")) {
        const auto& jv = j.at("svm");
        require_keys(jv, {"C", "epochs", "learning_rate", "tol", "batch_size"}, "svm");
        read_opt(jv, "C", b.svm.C);
        read_opt(jv, "epochs", b.svm.epochs);
        read_opt(jv, "learning_rate", b.svm.learning_rate);
        read_opt(jv, "tol", b.svm.tol);
        read_opt(jv, "batch_size", b.svm.batch_size);
    }
    if (j.contains("gan")) {
        const auto& jg = j.at("gan");
        require_keys(jg,
                     {"latent_dim", "generator_hidden", "discriminator_hidden", "batch_size", "learning_rate",
                      "epochs", "d_steps_per_g_step", "min_epochs", "stability_window", "stability_tol"},
                     "gan");
        auto& g = b.gan;
        read_opt(jg, "latent_dim", g.latent_dim);
        read_opt(jg, "generator_hidden", g.generator_hidden);
        read_opt(jg, "discriminator_hidden", g.discriminator_hidden);
        read_opt(jg, "batch_size", g.batch_size);
        read_opt(jg, "learning_rate", g.learning_rate);
        read_opt(jg, "epochs", g.epochs);
        read_opt(jg, "d_steps_per_g_step", g.d_steps_per_g_step);
        read_opt(jg, "min_epochs", g.min_epochs);
        read_opt(jg, "stability_window", g.stability_window);
        read_opt(jg, "stability_tol", g.stability_tol);
    }
}

}  // namespace

void BenchmarkConfig::validate() const {
    if (datasets.empty()) throw ConfigError("benchmark: no datasets");
    if (strategies.empty()) throw ConfigError("benchmark: no strategies");
    if (repetitions < 1) throw ConfigError("benchmark: repetitions must be >= 1");
    if (!(split.train_fraction > 0.0 && split.train_fraction < 1.0))
        throw ConfigError("benchmark: train_fraction must lie in (0,1)");
    if (validation_fraction < 0.0 || validation_fraction >= 1.0)
        throw ConfigError("benchmark: validation_fraction must lie in [0,1)");
    if (histogram_bins < 1) throw ConfigError("benchmark: histogram_bins must be >= 1");
    std::set<std::string> names;
    for (const auto& d : datasets) {
        if (d.name.empty()) throw ConfigError("benchmark: dataset without a name");
        if (!names.insert(d.name).second) throw ConfigError("benchmark: duplicate dataset name '" + d.name + "'");
        if (d.path.empty() && !d.fixture) throw ConfigError("dataset '" + d.name + "' needs a path or a fixture");
        if (d.fixture && !find_shape(*d.fixture)) throw ConfigError("unknown fixture shape '" + *d.fixture + "'");
    }
}

BenchmarkConfig benchmark_config_from_json(const json& j) {
    BenchmarkConfig cfg;
    try {
        require_keys(j,
                     {"datasets", "strategies", "repetitions", "split", "master_seed", "output_dir",
                      "validation_fraction", "classifier", "oversample", "svm", "gan", "histogram_bins", "threads"},
                     "config");
        for (const auto& jd : j.at("datasets")) {
            require_keys(jd, {"name", "path", "label_column", "minority_label", "fixture", "fixture_seed"}, "dataset");
            DatasetSource d;
            d.name = jd.at("name").get<std::string>();
            read_opt(jd, "path", d.path);
            if (jd.contains("label_column")) {
                const auto& lc = jd.at("label_column");
                if (lc.is_number_unsigned() || lc.is_number_integer())
                    d.label_column = lc.get<std::size_t>();
                else
                    d.label_column = lc.get<std::string>();
            }
            if (jd.contains("minority_label")) d.minority_label = label_value_string(jd.at("minority_label"));
            if (jd.contains("fixture")) d.fixture = jd.at("fixture").get<std::string>();
            read_opt(jd, "fixture_seed", d.fixture_seed);
            cfg.datasets.push_back(std::move(d));
        }
        for (const auto& s : j.at("strategies")) cfg.strategies.push_back(strategy_from_string(s.get<std::string>()));
        read_opt(j, "repetitions", cfg.repetitions);
        if (j.contains("split")) {
            const auto& js = j.at("split");
            require_keys(js, {"train_fraction", "stratified"}, "split");
            read_opt(js, "train_fraction", cfg.split.train_fraction);
            read_opt(js, "stratified", cfg.split.stratified);
        }
        read_opt(j, "master_seed", cfg.master_seed);
        read_opt(j, "output_dir", cfg.output_dir);
        read_opt(j, "validation_fraction", cfg.validation_fraction);
        read_opt(j, "histogram_bins", cfg.histogram_bins);
        read_opt(j, "threads", cfg.threads);
        if (j.contains("classifier")) {
            const auto& jc = j.at("classifier");
            require_keys(jc,
                         {"hidden", "hidden_activation", "batch_size", "epochs", "learning_rate",
                          "early_stop_patience", "min_delta"},
                         "classifier");
            read_opt(jc, "hidden", cfg.classifier.hidden);
            if (jc.contains("hidden_activation"))
                cfg.classifier.hidden_activation = activation_from_string(jc.at("hidden_activation").get<std::string>());
            read_opt(jc, "batch_size", cfg.training.batch_size);
            read_opt(jc, "epochs", cfg.training.epochs);
            read_opt(jc, "learning_rate", cfg.training.learning_rate);
            read_opt(jc, "early_stop_patience", cfg.training.early_stop_patience);
            read_opt(jc, "min_delta", cfg.training.min_delta);
        }
        read_balance_sections(j, cfg.balance);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed benchmark config: ") + e.what());
    }
    cfg.validate();
    return cfg;
}

json benchmark_config_to_json(const BenchmarkConfig& cfg) {
    json datasets = json::array();
    for (const auto& d : cfg.datasets) {
        json jd{{"name", d.name}, {"minority_label", d.minority_label}};
        if (!d.path.empty()) jd["path"] = d.path;
        if (const auto* idx = std::get_if<std::size_t>(&d.label_column)) jd["label_column"] = *idx;
        else jd["label_column"] = std::get<std::string>(d.label_column);
        if (d.fixture) {
            jd["fixture"] = *d.fixture;
            jd["fixture_seed"] = d.fixture_seed;
        }
        datasets.push_back(jd);
    }
    json strategies = json::array();
    for (auto s : cfg.strategies) strategies.push_back(to_string(s));
    const auto& g = cfg.balance.gan;
    return {{"datasets", datasets},
            {"strategies", strategies},
            {"repetitions", cfg.repetitions},
            {"split", {{"train_fraction", cfg.split.train_fraction}, {"stratified", cfg.split.stratified}}},
            {"master_seed", cfg.master_seed},
            {"output_dir", cfg.output_dir},
            {"validation_fraction", cfg.validation_fraction},
            {"histogram_bins", cfg.histogram_bins},
            {"threads", cfg.threads},
            {"classifier",
             {{"hidden", cfg.classifier.hidden},
              {"hidden_activation", to_string(cfg.classifier.hidden_activation)},
              {"batch_size", cfg.training.batch_size},
              {"epochs", cfg.training.epochs},
              {"learning_rate", cfg.training.learning_rate},
              {"early_stop_patience", cfg.training.early_stop_patience},
              {"min_delta", cfg.training.min_delta}}},
            {"oversample", {{"k", cfg.balance.k}, {"m", cfg.balance.m}}},
            {"svm",
             {{"C", cfg.balance.svm.C},
              {"epochs", cfg.balance.svm.epochs},
              {"learning_rate", cfg.balance.svm.learning_rate},
              {"tol", cfg.balance.svm.tol},
              {"batch_size", cfg.balance.svm.batch_size}}},
            {"gan",
             {{"latent_dim", g.latent_dim},
              {"generator_hidden", g.generator_hidden},
              {"discriminator_hidden", g.discriminator_hidden},
              {"batch_size", g.batch_size},
              {"learning_rate", g.learning_rate},
              {"epochs", g.epochs},
              {"d_steps_per_g_step", g.d_steps_per_g_step},
              {"min_epochs", g.min_epochs},
              {"stability_window", g.stability_window},
              {"stability_tol", g.stability_tol}}}};
}

BalanceOptions balance_options_from_json(const json& j) {
    BalanceOptions b;
    try {
        require_keys(j,
                     {"datasets", "strategies", "repetitions", "split", "master_seed", "output_dir",
                      "validation_fraction", "classifier", "oversample", "svm", "gan", "histogram_bins", "threads"},
                     "config");
        read_balance_sections(j, b);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed config: ") + e.what());
    }
    return b;
}

BenchmarkConfig load_benchmark_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config '" + path + "'");
    try {
        return benchmark_config_from_json(json::parse(in));
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
}

Dataset load_source(const DatasetSource& src) {
    if (src.fixture) {
        const auto shape = find_shape(*src.fixture);
        if (!shape) throw ConfigError("unknown fixture shape '" + *src.fixture + "'");
        return make_shape_fixture(*shape, src.fixture_seed);
    }
    return load_csv(src.path, src.label_column, src.minority_label);
}

std::string run_records_header() {
    return "dataset,strategy,run,split_seed,status,n_train,n_synthetic,n_test,train_accuracy,test_accuracy,"
           "precision,recall,f1,tp,fp,tn,fn,misclassification,minority_std,synthetic_ks,gan_epochs,message";
}

std::string to_csv_line(const RunRecord& r) {
    std::string s = r.dataset + ',' + r.strategy + ',' + std::to_string(r.run) + ',' + std::to_string(r.split_seed) +
                    ',' + (r.ok ? "ok" : "failed") + ',' + std::to_string(r.n_train) + ',' +
                    std::to_string(r.n_synthetic) + ',' + std::to_string(r.n_test) + ',' + fmt(r.train_accuracy) +
                    ',' + fmt(r.metrics.accuracy) + ',' + fmt(r.metrics.precision) + ',' + fmt(r.metrics.recall) +
                    ',' + fmt(r.metrics.f1) + ',' + std::to_string(r.test.tp) + ',' + std::to_string(r.test.fp) +
                    ',' + std::to_string(r.test.tn) + ',' + std::to_string(r.test.fn) + ',' +
                    std::to_string(misclassification_count(r.test)) + ',' + fmt(r.minority_std) + ',' +
                    fmt(r.synthetic_ks) + ',' + std::to_string(r.gan_epochs) + ',' + clean_message(r.message);
    return s;
}

std::vector<RunRecord> read_run_records(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open '" + path.string() + "'");
    std::string line;
    std::getline(in, line);
    if (line != run_records_header()) throw ParseError("unexpected runs.csv header", 1);
    std::vector<RunRecord> out;
    std::size_t number = 1;
    while (std::getline(in, line)) {
        ++number;
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) f.push_back(cell);
        if (!line.empty() && line.back() == ',') f.emplace_back();
        if (f.size() != 22) throw ParseError("expected 22 fields in runs.csv", number);
        try {
            RunRecord r;
            r.dataset = f[0];
            r.strategy = f[1];
            r.run = std::stoi(f[2]);
            r.split_seed = std::stoull(f[3]);
            r.ok = f[4] == "ok";
            r.n_train = std::stoll(f[5]);
            r.n_synthetic = std::stoll(f[6]);
            r.n_test = std::stoll(f[7]);
            r.train_accuracy = std::stod(f[8]);
            r.metrics.accuracy = std::stod(f[9]);
            r.metrics.precision = std::stod(f[10]);
            r.metrics.recall = std::stod(f[11]);
            r.metrics.f1 = std::stod(f[12]);
            r.test = {std::stoll(f[13]), std::stoll(f[14]), std::stoll(f[15]), std::stoll(f[16])};
            r.minority_std = std::stod(f[18]);
            r.synthetic_ks = std::stod(f[19]);
            r.gan_epochs = std::stoi(f[20]);
            r.message = f[21];
            out.push_back(std::move(r));
        } catch (const std::logic_error&) {
            throw ParseError("malformed runs.csv row", number);
        }
    }
    return out;
}

void write_run_records(const fs::path& path, const std::vector<RunRecord>& records) {
    std::string text = run_records_header() + '\n';
    for (const auto& r : records) text += to_csv_line(r) + '\n';
    write_text(path, text);
}

json run_records_to_json(const std::vector<RunRecord>& records) {
    json out = json::array();
    for (const auto& r : records) {
        json row = {{"dataset", r.dataset},
                    {"strategy", r.strategy},
                    {"run", r.run},
                    {"split_seed", r.split_seed},
                    {"status", r.ok ? "ok" : "failed"}};
        if (r.ok) {
            row["n_train"] = r.n_train;
            row["n_synthetic"] = r.n_synthetic;
            row["n_test"] = r.n_test;
            row["train_accuracy"] = r.train_accuracy;
            row["test"] = {{"tp", r.test.tp}, {"fp", r.test.fp}, {"tn", r.test.tn}, {"fn", r.test.fn}};
            row["test_accuracy"] = r.metrics.accuracy;
            row["precision"] = r.metrics.precision;
            row["recall"] = r.metrics.recall;
            row["f1"] = r.metrics.f1;
            row["misclassification"] = misclassification_count(r.test);
            row["minority_std"] = r.minority_std;
            if (r.synthetic_ks >= 0.0) row["synthetic_ks"] = r.synthetic_ks;
            row["gan_epochs"] = r.gan_epochs;
        } else {
            row["message"] = r.message;
        }
        out.push_back(std::move(row));
    }
    return out;
}

namespace {

struct Cell {
    std::size_t dataset = 0;
    std::size_t strategy = 0;
    int run = 0;
};

RunRecord run_cell(const BenchmarkConfig& cfg, const Dataset& data, const Cell& cell, const fs::path& bundle) {
    const auto& source = cfg.datasets[cell.dataset];
    const Strategy strategy = cfg.strategies[cell.strategy];
    RunRecord rec;
    rec.dataset = source.name;
    rec.strategy = to_string(strategy);
    rec.run = cell.run;
    rec.split_seed = derive_seed(derive_seed(cfg.master_seed, cell.dataset), static_cast<std::uint64_t>(cell.run));
    const std::string stem = file_token(source.name) + "__" + rec.strategy;

    try {
        SplitSpec spec = cfg.split;
        spec.seed = rec.split_seed;
        const Split split = train_test_split(data, spec);
        rec.n_test = split.test.n_samples();

        Dataset fit = split.train;
        std::optional<Dataset> validation;
        if (cfg.validation_fraction > 0.0) {
            auto inner = train_test_split(split.train, {1.0 - cfg.validation_fraction, derive_seed(rec.split_seed, 1), true});
            fit = std::move(inner.train);
            validation = std::move(inner.test);
        }

        const auto oversample_seed = derive_seed(rec.split_seed, 2 + static_cast<std::uint64_t>(strategy));
        const BalanceResult balanced = balance_to_parity(fit, strategy, oversample_seed, cfg.balance);
        rec.n_synthetic = balanced.synthetic.size();
        rec.n_train = balanced.balanced.n_samples();
        if (balanced.gan) {
            rec.gan_epochs = balanced.gan->stopped_epoch;
            write_loss_history_csv((bundle / "loss" / (stem + "__run" + std::to_string(cell.run) + ".csv")).string(),
                                   *balanced.gan);
        }

        // Spread and histograms in the units of the pre-oversampling scaler.
        const Matrix minority_scaled =
            minmax_apply(minority_features(balanced.balanced), balanced.scaler, Range{}, false);
        rec.minority_std = feature_std(minority_scaled).pooled;
        if (balanced.synthetic.size() > 0) {
            double ks = 0.0;
            for (Index j = 0; j < balanced.synthetic.samples.cols(); ++j) {
                const Vector col = balanced.synthetic.samples.col(j);
                ks += ks_statistic(std::span<const double>(col.data(), static_cast<std::size_t>(col.size())));
            }
            rec.synthetic_ks = ks / static_cast<double>(balanced.synthetic.samples.cols());
        }
        if (cell.run == 0) {
            for (Index j = 0; j < minority_scaled.cols(); ++j) {
                const Vector col = minority_scaled.col(j);
                const auto h = histogram(std::span<const double>(col.data(), static_cast<std::size_t>(col.size())),
                                         cfg.histogram_bins);
                std::string text = "bin_lo,bin_hi,count\n";
                for (std::size_t b = 0; b < h.counts.size(); ++b)
                    text += fmt(h.edges[b]) + ',' + fmt(h.edges[b + 1]) + ',' + std::to_string(h.counts[b]) + '\n';
                write_text(bundle / "hist" / (stem + "__f" + std::to_string(j) + ".csv"), text);
            }
        }

        const ScalerParams scaler = minmax_fit(balanced.balanced);
        const Dataset train_scaled = minmax_apply(balanced.balanced, scaler);
        const Dataset test_scaled = minmax_apply(split.test, scaler);
        std::optional<Dataset> val_scaled;
        if (validation) val_scaled = minmax_apply(*validation, scaler);

        DenseNet net = make_classifier(data.n_features(), cfg.classifier, derive_seed(rec.split_seed, 20));
        TrainConfig training = cfg.training;
        training.seed = derive_seed(rec.split_seed, 21);
        const TrainReport report = train_supervised(net, train_scaled, training, val_scaled ? &*val_scaled : nullptr);
        write_text(bundle / "classifier" / (stem + "__run" + std::to_string(cell.run) + ".json"),
                   train_report_to_json(report).dump() + '\n');

        rec.train_accuracy = report.final_train_accuracy;
        rec.test = confusion(predict_labels(net, test_scaled.features), test_scaled.labels);
        rec.metrics = metrics(rec.test);
        rec.ok = true;
    } catch (const std::exception& e) {
        rec.ok = false;
        rec.message = e.what();
    }
    return rec;
}

}  // namespace

BenchmarkResult run_benchmark(const BenchmarkConfig& cfg) {
    cfg.validate();
    BenchmarkResult result;
    result.bundle = cfg.output_dir;
    for (const char* sub : {"loss", "hist", "classifier"}) fs::create_directories(result.bundle / sub);
    write_text(result.bundle / "config.json", benchmark_config_to_json(cfg).dump(2) + '\n');

    std::vector<std::optional<Dataset>> data(cfg.datasets.size());
    std::vector<std::string> load_errors(cfg.datasets.size());
    for (std::size_t d = 0; d < cfg.datasets.size(); ++d) {
        try {
            data[d] = load_source(cfg.datasets[d]);
        } catch (const std::exception& e) {
            load_errors[d] = e.what();
        }
    }

    std::vector<Cell> cells;
    for (std::size_t d = 0; d < cfg.datasets.size(); ++d)
        for (std::size_t s = 0; s < cfg.strategies.size(); ++s)
            for (int r = 0; r < cfg.repetitions; ++r) cells.push_back({d, s, r});
    result.records.resize(cells.size());

    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (std::size_t i = next++; i < cells.size(); i = next++) {
            const auto& c = cells[i];
            if (data[c.dataset]) {
                result.records[i] = run_cell(cfg, *data[c.dataset], c, result.bundle);
            } else {
                RunRecord rec;
                rec.dataset = cfg.datasets[c.dataset].name;
                rec.strategy = to_string(cfg.strategies[c.strategy]);
                rec.run = c.run;
                rec.message = load_errors[c.dataset];
                result.records[i] = rec;
            }
        }
    };
    const int threads = std::max(1, cfg.threads);
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    }

    for (const auto& r : result.records) {
        if (r.ok) continue;
        ++result.failures;
        std::clog << "cell " << r.dataset << '/' << r.strategy << '/' << r.run << " failed: " << r.message << '\n';
    }
    write_run_records(result.bundle / "runs.csv", result.records);
    write_text(result.bundle / "runs.json", run_records_to_json(result.records).dump(2) + '\n');
    write_report_files(result.bundle, result.records);
    return result;
}

}  // namespace imbgan
