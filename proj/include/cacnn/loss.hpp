#pragma once

#include <cstdint>
#include <vector>

#include "cacnn/tensor.hpp"

namespace cacnn {

struct LossResult {
    double loss = 0.0;
    Tensor dlogits;  // gradient wrt pre-softmax logits (fused form)
};

// Mean negative log probability of the true class. `probs` is (B x K x 1 x 1)
// or (B x K); rows must sum to 1 within 1e-6. The returned gradient is the
// fused softmax + cross-entropy form, (probs - onehot) / B.
LossResult sparse_ce_loss(const Tensor& probs, const std::vector<int>& labels);

// Numerically stable softmax over the channel axis of (B x K x 1 x 1) logits.
Tensor softmax(const Tensor& logits);

}  // namespace cacnn
