#include "cacnn/experiment.hpp"

#include <algorithm>
#include <iomanip>
#include <map>
#include <sstream>

namespace cacnn {

ExperimentReport run_experiment(const std::vector<ExperimentCondition>& conditions,
                                const TrainConfig& config, const std::string& architecture) {
    if (conditions.empty()) throw std::invalid_argument("run_experiment: no conditions");
    ExperimentReport report;

    DatasetFile all_train, all_val, all_test;
    for (const ExperimentCondition& cond : conditions) {
        Model model = Model::from_config(architecture, config.seed);
        TrainResult tr = train(model, cond.train, cond.val, config);
        ExperimentRow row;
        row.name = cond.name;
        row.n = cond.n;
        row.iterations = cond.iterations;
        row.metrics = evaluate(model, cond.test, config.batch_size);
        row.history = tr.history;
        report.rows.push_back(std::move(row));

        auto append = [](DatasetFile& dst, const DatasetFile& src) {
            dst.samples.insert(dst.samples.end(), src.samples.begin(), src.samples.end());
        };
        append(all_train, cond.train);
        append(all_val, cond.val);
        append(all_test, cond.test);
    }

    if (conditions.size() > 1) {
        Model combined = Model::from_config(architecture, config.seed);
        TrainResult tr = train(combined, all_train, all_val, config);
        ExperimentRow row;
        row.name = "combined";
        row.metrics = evaluate(combined, all_test, config.batch_size);
        row.history = tr.history;
        report.rows.push_back(std::move(row));
    }

    // Trend flags. Domain-size trend: conditions sharing the most common T,
    // ordered by N, must have non-decreasing top-1. Iteration trend: at the
    // most common N, the two largest T differ by at most 5 points.
    std::map<int, std::vector<const ExperimentRow*>> by_t, by_n;
    for (const auto& row : report.rows) {
        if (row.name == "combined") continue;
        by_t[row.iterations].push_back(&row);
        by_n[row.n].push_back(&row);
    }
    for (auto& [t, rows] : by_t) {
        if (rows.size() < 2) continue;
        std::sort(rows.begin(), rows.end(),
                  [](const ExperimentRow* a, const ExperimentRow* b) { return a->n < b->n; });
        bool monotone = true;
        for (std::size_t i = 1; i < rows.size(); ++i)
            if (rows[i]->metrics.top1 < rows[i - 1]->metrics.top1) monotone = false;
        report.monotone_in_domain = report.monotone_in_domain || monotone;
    }
    for (auto& [n, rows] : by_n) {
        if (rows.size() < 2) continue;
        std::sort(rows.begin(), rows.end(), [](const ExperimentRow* a, const ExperimentRow* b) {
            return a->iterations < b->iterations;
        });
        const double last = rows[rows.size() - 1]->metrics.top1;
        const double prev = rows[rows.size() - 2]->metrics.top1;
        if (std::abs(last - prev) <= 0.05) report.flattening_in_iterations = true;
    }
    return report;
}

std::string ExperimentReport::table_text() const {
    std::ostringstream out;
    out << std::left << std::setw(16) << "condition" << std::right << std::setw(8) << "N"
        << std::setw(8) << "T" << std::setw(10) << "top-1" << std::setw(10) << "top-3" << "\n";
    out << std::fixed << std::setprecision(4);
    for (const auto& row : rows) {
        out << std::left << std::setw(16) << row.name << std::right;
        if (row.name == "combined")
            out << std::setw(8) << '-' << std::setw(8) << '-';
        else
            out << std::setw(8) << row.n << std::setw(8) << row.iterations;
        out << std::setw(10) << row.metrics.top1 << std::setw(10) << row.metrics.top3 << "\n";
    }
    out << "trend: top-1 monotone in domain size: " << (monotone_in_domain ? "yes" : "no") << "\n";
    out << "trend: top-1 flattening in iterations: " << (flattening_in_iterations ? "yes" : "no")
        << "\n";
    return out.str();
}

std::string ExperimentReport::metrics_csv() const {
    std::string out = Metrics::csv_header();
    for (const auto& row : rows) out += row.metrics.csv_row(row.name);
    return out;
}

}  // namespace cacnn
