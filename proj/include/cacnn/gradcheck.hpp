#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cacnn/model.hpp"

namespace cacnn {

struct GradCheckEntry {
    std::string tensor;
    std::size_t checked = 0;
    double max_rel_error = 0.0;
};

struct GradCheckReport {
    double max_rel_error = 0.0;
    bool passed = false;
    double tolerance = 0.0;
    std::vector<GradCheckEntry> entries;

    std::string to_text() const;
};

// Compares backprop gradients of the softmax + cross-entropy loss against
// central finite differences. Checks up to `samples_per_tensor` seeded-random
// entries of every parameter tensor (0 = every entry). Relative error is
// |a - b| / max(1e-8, |a| + |b|).
GradCheckReport gradient_check(Model& model, const Tensor& input, const std::vector<int>& labels,
                               double h = 1e-5, double tolerance = 1e-4,
                               std::size_t samples_per_tensor = 40, std::uint64_t seed = 0);

}  // namespace cacnn
