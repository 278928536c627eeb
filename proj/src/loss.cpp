#include "cacnn/loss.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace cacnn {

namespace {

// Accepts (B x K) or (B x K x 1 x 1); returns {B, K}.
std::pair<int, int> row_dims(const Tensor& t, const char* what) {
    if (t.rank() == 2) return {t.dim(0), t.dim(1)};
    if (t.rank() == 4 && t.dim(2) == 1 && t.dim(3) == 1) return {t.dim(0), t.dim(1)};
    throw std::invalid_argument(std::string(what) + ": expected (BxK) rows, got " + t.shape_str());
}

}  // namespace

LossResult sparse_ce_loss(const Tensor& probs, const std::vector<int>& labels) {
    const auto [B, K] = row_dims(probs, "sparse_ce_loss");
    if (static_cast<int>(labels.size()) != B)
        throw std::invalid_argument("sparse_ce_loss: label count != batch size");
    for (int b = 0; b < B; ++b) {
        if (labels[b] < 0 || labels[b] >= K)
            throw std::invalid_argument("sparse_ce_loss: label " + std::to_string(labels[b]) +
                                        " out of range [0, " + std::to_string(K) + ")");
        double sum = 0.0;
        for (int c = 0; c < K; ++c) sum += probs[static_cast<std::size_t>(b) * K + c];
        if (std::abs(sum - 1.0) > 1e-6)
            throw std::invalid_argument("sparse_ce_loss: probability row " + std::to_string(b) +
                                        " sums to " + std::to_string(sum));
    }
    LossResult out;
    out.dlogits = Tensor(probs.shape());
    double loss = 0.0;
    for (int b = 0; b < B; ++b) {
        const std::size_t base = static_cast<std::size_t>(b) * K;
        const double p = std::max(probs[base + labels[b]], 1e-300);
        loss -= std::log(p);
        for (int c = 0; c < K; ++c)
            out.dlogits[base + c] = (probs[base + c] - (c == labels[b] ? 1.0 : 0.0)) / B;
    }
    out.loss = loss / B;
    return out;
}

Tensor softmax(const Tensor& logits) {
    const auto [B, K] = row_dims(logits, "softmax");
    Tensor out(logits.shape());
    for (int b = 0; b < B; ++b) {
        const std::size_t base = static_cast<std::size_t>(b) * K;
        double mx = logits[base];
        for (int c = 1; c < K; ++c) mx = std::max(mx, logits[base + c]);
        double sum = 0.0;
        for (int c = 0; c < K; ++c) {
            out[base + c] = std::exp(logits[base + c] - mx);
            sum += out[base + c];
        }
        for (int c = 0; c < K; ++c) out[base + c] /= sum;
    }
    return out;
}

}  // namespace cacnn
