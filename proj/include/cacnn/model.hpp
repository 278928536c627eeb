#pragma once

#include <memory>
#include <string>
#include <vector>

#include "cacnn/layers.hpp"

namespace cacnn {

// Ordered layer stack built from a line-oriented architecture config.
// Blank lines and lines starting with '#' are ignored.
class Model {
public:
    Model() = default;

    // Parses the config and initializes weights (seeded, He-uniform).
    static Model from_config(const std::string& config_text, std::uint64_t seed,
                             int input_channels = 1);
    static std::string default_architecture();

    Tensor forward(const Tensor& input, Mode mode);

    // Forward pass that stops before a trailing softmax, for use with the
    // fused softmax + cross-entropy gradient.
    Tensor forward_logits(const Tensor& input, Mode mode);

    // Backpropagates d(loss)/d(logits) through every layer below the trailing
    // softmax. Returns d(loss)/d(input).
    Tensor backward_from_logits(const Tensor& dlogits);

    std::vector<ParamRef> params();
    std::vector<ParamRef> state();
    void zero_grads();

    const std::string& architecture() const { return config_text_; }
    std::size_t layer_count() const { return layers_.size(); }
    Layer& layer(std::size_t i) { return *layers_[i]; }

    // Swaps in an already-built layer (ablations and test instrumentation).
    void replace_layer(std::size_t i, std::unique_ptr<Layer> layer) {
        layers_.at(i) = std::move(layer);
    }
    bool ends_with_softmax() const { return has_trailing_softmax_; }

    std::size_t parameter_count();

private:
    std::vector<std::unique_ptr<Layer>> layers_;
    std::string config_text_;
    bool has_trailing_softmax_ = false;
};

}  // namespace cacnn
