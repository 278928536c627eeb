#include "cacnn/metrics.hpp"

#include <algorithm>
#include <iomanip>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace cacnn {

namespace {

std::pair<int, int> row_dims(const Tensor& probs) {
    if (probs.rank() == 2) return {probs.dim(0), probs.dim(1)};
    if (probs.rank() == 4 && probs.dim(2) == 1 && probs.dim(3) == 1)
        return {probs.dim(0), probs.dim(1)};
    throw std::invalid_argument("metrics: expected (BxK) probability rows, got " +
                                probs.shape_str());
}

// Class ranking: probability descending, index ascending on ties.
std::vector<int> ranked_classes(const double* row, int k_classes) {
    std::vector<int> order(k_classes);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return row[a] > row[b]; });
    return order;
}

}  // namespace

double topk_accuracy(const Tensor& probs, const std::vector<int>& labels, int k) {
    const auto [B, K] = row_dims(probs);
    if (k < 1 || k > K) throw std::invalid_argument("topk_accuracy: k out of range");
    if (static_cast<int>(labels.size()) != B)
        throw std::invalid_argument("topk_accuracy: label count != batch size");
    std::uint64_t hits = 0;
    for (int b = 0; b < B; ++b) {
        const double* row = probs.data() + static_cast<std::size_t>(b) * K;
        const auto order = ranked_classes(row, K);
        for (int i = 0; i < k; ++i)
            if (order[i] == labels[b]) {
                ++hits;
                break;
            }
    }
    return static_cast<double>(hits) / B;
}

void MetricsAccumulator::add(const Tensor& probs, const std::vector<int>& labels) {
    const auto [B, K] = row_dims(probs);
    if (K != kNumClasses) throw std::invalid_argument("metrics: expected 10 classes");
    if (static_cast<int>(labels.size()) != B)
        throw std::invalid_argument("metrics: label count != batch size");
    for (int b = 0; b < B; ++b) {
        const int y = labels[b];
        if (y < 0 || y >= kNumClasses) throw std::invalid_argument("metrics: label out of range");
        const double* row = probs.data() + static_cast<std::size_t>(b) * K;
        const auto order = ranked_classes(row, K);
        ++confusion_[y][order[0]];
        if (order[0] == y) ++top1_hits_;
        if (order[0] == y || order[1] == y || order[2] == y) ++top3_hits_;
        ++total_;
    }
}

Metrics MetricsAccumulator::finalize() const {
    if (total_ == 0) throw std::invalid_argument("metrics: no samples evaluated");
    Metrics m;
    m.confusion = confusion_;
    m.total = total_;
    m.top1 = static_cast<double>(top1_hits_) / total_;
    m.top3 = static_cast<double>(top3_hits_) / total_;
    for (int c = 0; c < kNumClasses; ++c) {
        std::uint64_t row_total = 0;
        for (int p = 0; p < kNumClasses; ++p) row_total += m.confusion[c][p];
        m.per_class_recall[c] =
            row_total == 0 ? 0.0 : static_cast<double>(m.confusion[c][c]) / row_total;
    }
    return m;
}

std::string Metrics::to_text() const {
    std::ostringstream out;
    out << std::fixed << std::setprecision(4);
    out << "samples: " << total << "\n";
    out << "top-1 accuracy: " << top1 << "\n";
    out << "top-3 accuracy: " << top3 << "\n";
    out << "per-class recall:";
    for (double r : per_class_recall) out << ' ' << r;
    out << "\nconfusion matrix (rows = true class, cols = predicted):\n";
    for (int c = 0; c < kNumClasses; ++c) {
        for (int p = 0; p < kNumClasses; ++p)
            out << std::setw(6) << confusion[c][p] << (p + 1 == kNumClasses ? '\n' : ' ');
    }
    return out.str();
}

std::string Metrics::confusion_csv() const {
    std::ostringstream out;
    out << "true\\pred";
    for (int p = 0; p < kNumClasses; ++p) out << ',' << p;
    out << '\n';
    for (int c = 0; c < kNumClasses; ++c) {
        out << c;
        for (int p = 0; p < kNumClasses; ++p) out << ',' << confusion[c][p];
        out << '\n';
    }
    return out.str();
}

std::string Metrics::csv_header() {
    std::ostringstream out;
    out << "condition,samples,top1,top3";
    for (int c = 0; c < kNumClasses; ++c) out << ",recall_" << c;
    out << '\n';
    return out.str();
}

std::string Metrics::csv_row(const std::string& condition) const {
    std::ostringstream out;
    out << condition << ',' << total << ',' << std::setprecision(17) << top1 << ',' << top3;
    for (double r : per_class_recall) out << ',' << r;
    out << '\n';
    return out.str();
}

}  // namespace cacnn
