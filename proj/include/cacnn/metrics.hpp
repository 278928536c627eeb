#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "cacnn/tensor.hpp"

namespace cacnn {

constexpr int kNumClasses = 10;

struct Metrics {
    double top1 = 0.0;
    double top3 = 0.0;
    std::array<std::array<std::uint64_t, kNumClasses>, kNumClasses> confusion{};  // [true][pred]
    std::array<double, kNumClasses> per_class_recall{};
    std::uint64_t total = 0;

    std::string to_text() const;
    std::string confusion_csv() const;
    std::string csv_row(const std::string& condition) const;
    static std::string csv_header();
};

// Fraction of rows whose true class is among the k most probable classes.
// Probability ties rank the lower class index first. Throws if k exceeds the
// class count.
double topk_accuracy(const Tensor& probs, const std::vector<int>& labels, int k);

class MetricsAccumulator {
public:
    void add(const Tensor& probs, const std::vector<int>& labels);
    Metrics finalize() const;  // throws std::invalid_argument when empty

private:
    std::array<std::array<std::uint64_t, kNumClasses>, kNumClasses> confusion_{};
    std::uint64_t top1_hits_ = 0;
    std::uint64_t top3_hits_ = 0;
    std::uint64_t total_ = 0;
};

}  // namespace cacnn
