#include "cacnn/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cacnn/loss.hpp"
#include "cacnn/rng.hpp"

namespace cacnn {

namespace {

double eval_loss(Model& model, const Tensor& input, const std::vector<int>& labels) {
    const Tensor logits = model.forward_logits(input, Mode::Train);
    return sparse_ce_loss(softmax(logits), labels).loss;
}

}  // namespace

std::string GradCheckReport::to_text() const {
    std::ostringstream out;
    out << "gradient check: max relative error " << max_rel_error << " (tolerance " << tolerance
        << ") -> " << (passed ? "PASS" : "FAIL") << "\n";
    for (const auto& e : entries)
        out << "  " << e.tensor << ": checked " << e.checked << ", max rel err " << e.max_rel_error
            << "\n";
    return out.str();
}

GradCheckReport gradient_check(Model& model, const Tensor& input, const std::vector<int>& labels,
                               double h, double tolerance, std::size_t samples_per_tensor,
                               std::uint64_t seed) {
    GradCheckReport report;
    report.tolerance = tolerance;

    // Analytic gradients via the fused softmax + cross-entropy path.
    model.zero_grads();
    const Tensor logits = model.forward_logits(input, Mode::Train);
    const LossResult lr = sparse_ce_loss(softmax(logits), labels);
    model.backward_from_logits(lr.dlogits);

    // Copy gradients out: finite-difference forwards overwrite layer caches.
    std::vector<Tensor> grads;
    for (const ParamRef& p : model.params()) grads.push_back(*p.grad);

    SplitMix64 rng(mix_seed(seed, {0x67636865636BULL}));
    auto params = model.params();
    for (std::size_t pi = 0; pi < params.size(); ++pi) {
        ParamRef& p = params[pi];
        GradCheckEntry entry;
        entry.tensor = p.name;
        std::vector<std::size_t> indices;
        if (samples_per_tensor == 0 || p.value->size() <= samples_per_tensor) {
            indices.resize(p.value->size());
            for (std::size_t i = 0; i < indices.size(); ++i) indices[i] = i;
        } else {
            for (std::size_t i = 0; i < samples_per_tensor; ++i)
                indices.push_back(rng.next_below(p.value->size()));
            std::sort(indices.begin(), indices.end());
            indices.erase(std::unique(indices.begin(), indices.end()), indices.end());
        }
        for (std::size_t i : indices) {
            const double saved = (*p.value)[i];
            (*p.value)[i] = saved + h;
            const double lp = eval_loss(model, input, labels);
            (*p.value)[i] = saved - h;
            const double lm = eval_loss(model, input, labels);
            (*p.value)[i] = saved;
            const double fd = (lp - lm) / (2.0 * h);
            const double bp = grads[pi][i];
            const double rel = std::abs(fd - bp) / std::max(1e-8, std::abs(fd) + std::abs(bp));
            entry.max_rel_error = std::max(entry.max_rel_error, rel);
            ++entry.checked;
        }
        report.max_rel_error = std::max(report.max_rel_error, entry.max_rel_error);
        report.entries.push_back(std::move(entry));
    }
    report.passed = report.max_rel_error < tolerance;
    return report;
}

}  // namespace cacnn
