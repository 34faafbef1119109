#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>

#include "imbgan/benchmark.hpp"

namespace imbgan {

namespace fs = std::filesystem;

namespace {

std::string num(double v, int digits = 4) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

std::string full(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

template <typename T>
void push_unique(std::vector<T>& v, const T& x) {
    if (std::find(v.begin(), v.end(), x) == v.end()) v.push_back(x);
}

struct Group {
    std::string dataset;
    std::string strategy;
    std::vector<const RunRecord*> ok;
    std::size_t total = 0;
};

// Groups in first-appearance order of dataset, then strategy.
std::vector<Group> group_records(const std::vector<RunRecord>& records) {
    std::vector<std::string> datasets, strategies;
    for (const auto& r : records) {
        push_unique(datasets, r.dataset);
        push_unique(strategies, r.strategy);
    }
    std::vector<Group> groups;
    for (const auto& d : datasets)
        for (const auto& s : strategies) {
            Group g{d, s, {}, 0};
            for (const auto& r : records) {
                if (r.dataset != d || r.strategy != s) continue;
                ++g.total;
                if (r.ok) g.ok.push_back(&r);
            }
            if (g.total > 0) groups.push_back(std::move(g));
        }
    return groups;
}

using Getter = double (*)(const RunRecord&);

Summary summary_of(const Group& g, Getter get) {
    if (g.ok.empty()) return {};
    std::vector<double> v;
    for (const auto* r : g.ok) v.push_back(get(*r));
    return summarize(v);
}

// Index of the best group per dataset; `score` is maximised, NaN skipped.
std::map<std::string, std::size_t> best_per_dataset(const std::vector<Group>& groups,
                                                    const std::vector<double>& score) {
    std::map<std::string, std::size_t> best;
    for (std::size_t i = 0; i < groups.size(); ++i) {
        if (std::isnan(score[i])) continue;
        auto it = best.find(groups[i].dataset);
        if (it == best.end() || score[i] > score[it->second]) best[groups[i].dataset] = i;
    }
    return best;
}

bool is_best(const std::map<std::string, std::size_t>& best, const Group& g, std::size_t i) {
    auto it = best.find(g.dataset);
    return it != best.end() && it->second == i;
}

std::string bold_if(const std::string& s, bool b) { return b ? "**" + s + "**" : s; }

struct Column {
    const char* name;
    Getter get;
};

const std::vector<Column>& performance_columns() {
    static const std::vector<Column> cols{
        {"train_accuracy", [](const RunRecord& r) { return r.train_accuracy; }},
        {"test_accuracy", [](const RunRecord& r) { return r.metrics.accuracy; }},
        {"precision", [](const RunRecord& r) { return r.metrics.precision; }},
        {"recall", [](const RunRecord& r) { return r.metrics.recall; }},
        {"f1", [](const RunRecord& r) { return r.metrics.f1; }},
    };
    return cols;
}

std::string performance_table(const std::vector<Group>& groups, ReportFormat format) {
    const auto& cols = performance_columns();
    std::vector<std::vector<Summary>> sums(groups.size());
    std::vector<std::map<std::string, std::size_t>> best(cols.size());
    for (std::size_t c = 0; c < cols.size(); ++c) {
        std::vector<double> score(groups.size(), std::nan(""));
        for (std::size_t i = 0; i < groups.size(); ++i) {
            sums[i].push_back(summary_of(groups[i], cols[c].get));
            if (!groups[i].ok.empty()) score[i] = sums[i][c].mean;
        }
        best[c] = best_per_dataset(groups, score);
    }

    std::string out;
    if (format == ReportFormat::markdown) {
        out = "| dataset | strategy |";
        for (const auto& c : cols) out += std::string(" ") + c.name + " |";
        out += "\n|---|---|";
        for (std::size_t c = 0; c < cols.size(); ++c) out += "---|";
        out += '\n';
        for (std::size_t i = 0; i < groups.size(); ++i) {
            out += "| " + groups[i].dataset + " | " + groups[i].strategy + " |";
            for (std::size_t c = 0; c < cols.size(); ++c) {
                if (groups[i].ok.empty()) {
                    out += " failed |";
                    continue;
                }
                const auto& s = sums[i][c];
                const std::string cell = num(s.mean) + " (" + num(s.max) + ", " + num(s.std) + ")";
                out += " " + bold_if(cell, is_best(best[c], groups[i], i)) + " |";
            }
            out += '\n';
        }
    } else {
        out = "dataset,strategy,metric,mean,max,std,runs,failed,best\n";
        for (std::size_t i = 0; i < groups.size(); ++i)
            for (std::size_t c = 0; c < cols.size(); ++c) {
                const auto& s = sums[i][c];
                const std::size_t failed = groups[i].total - groups[i].ok.size();
                out += groups[i].dataset + ',' + groups[i].strategy + ',' + cols[c].name + ',';
                if (groups[i].ok.empty())
                    out += ",,,0," + std::to_string(failed) + ",0\n";
                else
                    out += full(s.mean) + ',' + full(s.max) + ',' + full(s.std) + ',' + std::to_string(s.n) + ',' +
                           std::to_string(failed) + ',' + (is_best(best[c], groups[i], i) ? "1" : "0") + '\n';
            }
    }
    return out;
}

// Single-value table; `score` maps a mean to the quantity that is maximised.
std::string scalar_table(const std::vector<Group>& groups, ReportFormat format, const char* column, Getter get,
                         const std::vector<double>& score) {
    const auto best = best_per_dataset(groups, score);
    std::string out;
    if (format == ReportFormat::markdown)
        out = std::string("| dataset | strategy | ") + column + " |\n|---|---|---|\n";
    else
        out = std::string("dataset,strategy,") + column + ",runs,failed,best\n";
    for (std::size_t i = 0; i < groups.size(); ++i) {
        const auto& g = groups[i];
        const Summary s = summary_of(g, get);
        const std::size_t failed = g.total - g.ok.size();
        if (format == ReportFormat::markdown) {
            const std::string cell = g.ok.empty() ? "failed" : bold_if(num(s.mean), is_best(best, g, i));
            out += "| " + g.dataset + " | " + g.strategy + " | " + cell + " |\n";
        } else {
            out += g.dataset + ',' + g.strategy + ',' + (g.ok.empty() ? std::string() : full(s.mean)) + ',' +
                   std::to_string(s.n) + ',' + std::to_string(failed) + ',' + (is_best(best, g, i) ? "1" : "0") + '\n';
        }
    }
    return out;
}

}  // namespace

ReportTables render_report(const std::vector<RunRecord>& records, ReportFormat format) {
    const auto groups = group_records(records);
    ReportTables t;
    t.performance = performance_table(groups, format);

    const Getter miscls = [](const RunRecord& r) { return static_cast<double>(misclassification_count(r.test)); };
    std::vector<double> fewer(groups.size(), std::nan(""));
    for (std::size_t i = 0; i < groups.size(); ++i)
        if (!groups[i].ok.empty()) fewer[i] = -summary_of(groups[i], miscls).mean;
    t.misclassification = scalar_table(groups, format, "misclassified", miscls, fewer);

    // Closest to the spread of the untouched minority within the same dataset.
    const Getter spread = [](const RunRecord& r) { return r.minority_std; };
    std::map<std::string, double> reference;
    for (const auto& g : groups)
        if (g.strategy == "none" && !g.ok.empty()) reference[g.dataset] = summary_of(g, spread).mean;
    std::vector<double> closeness(groups.size(), std::nan(""));
    for (std::size_t i = 0; i < groups.size(); ++i) {
        const auto& g = groups[i];
        auto it = reference.find(g.dataset);
        if (g.strategy == "none" || g.ok.empty() || it == reference.end()) continue;
        closeness[i] = -std::abs(summary_of(g, spread).mean - it->second);
    }
    t.spread = scalar_table(groups, format, "minority_std", spread, closeness);
    return t;
}

ReportTables report_bundle(const fs::path& bundle, ReportFormat format) {
    const fs::path runs = bundle / "runs.csv";
    if (!fs::exists(runs)) throw ConfigError("incomplete bundle '" + bundle.string() + "': missing runs.csv");
    return render_report(read_run_records(runs), format);
}

void write_report_files(const fs::path& bundle, const std::vector<RunRecord>& records) {
    const auto md = render_report(records, ReportFormat::markdown);
    const auto csv = render_report(records, ReportFormat::csv);
    const std::pair<const char*, const std::string*> files[] = {
        {"table2.md", &md.performance},        {"table2.csv", &csv.performance}, {"table3.md", &md.misclassification},
        {"table3.csv", &csv.misclassification}, {"table4.md", &md.spread},        {"table4.csv", &csv.spread},
    };
    for (const auto& [name, text] : files) {
        std::ofstream out(bundle / name, std::ios::binary);
        if (!out) throw ConfigError("cannot write '" + (bundle / name).string() + "'");
        out << *text;
    }
}

}  // namespace imbgan
