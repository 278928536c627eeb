#pragma once

#include <string>
#include <vector>

#include "cacnn/train.hpp"

namespace cacnn {

struct ExperimentCondition {
    std::string name;  // e.g. "n100_t25"
    int n = 0;
    int iterations = 0;
    DatasetFile train, val, test;
};

struct ExperimentRow {
    std::string name;
    int n = 0;
    int iterations = 0;
    Metrics metrics;
    std::vector<EpochStats> history;
};

struct ExperimentReport {
    std::vector<ExperimentRow> rows;  // one per condition, then "combined"
    bool monotone_in_domain = false;      // top-1 non-decreasing in N at fixed T
    bool flattening_in_iterations = false;  // top-1 gap between two largest T <= 5 points

    std::string table_text() const;
    std::string metrics_csv() const;
};

// Trains one model per condition and one on the union of all conditions
// (evaluated on the union of the test sets). The same TrainConfig and
// architecture are used throughout.
ExperimentReport run_experiment(const std::vector<ExperimentCondition>& conditions,
                                const TrainConfig& config, const std::string& architecture);

}  // namespace cacnn
