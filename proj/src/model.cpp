#include "cacnn/model.hpp"

#include <cmath>
#include <sstream>

namespace cacnn {

std::string Model::default_architecture() {
    return "conv out=16 k=3 stride=1 pad=same\n"
           "batchnorm momentum=0.9 eps=1e-05\n"
           "relu\n"
           "maxpool k=2 stride=2\n"
           "conv out=32 k=3 stride=1 pad=same\n"
           "batchnorm momentum=0.9 eps=1e-05\n"
           "relu\n"
           "maxpool k=2 stride=2\n"
           "conv out=64 k=3 stride=1 pad=same\n"
           "batchnorm momentum=0.9 eps=1e-05\n"
           "relu\n"
           "globalavgpool\n"
           "dense units=64\n"
           "relu\n"
           "dense units=10\n"
           "softmax\n";
}

Model Model::from_config(const std::string& config_text, std::uint64_t seed, int input_channels) {
    Model model;
    model.config_text_ = config_text;
    std::istringstream in(config_text);
    std::string line;
    while (std::getline(in, line)) {
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        model.layers_.push_back(parse_layer_line(line));
    }
    if (model.layers_.empty()) throw std::invalid_argument("architecture config has no layers");
    SplitMix64 rng(mix_seed(seed, {0x6D6F64656CULL}));  // distinct stream for weight init
    int channels = input_channels;
    for (auto& layer : model.layers_) channels = layer->build(channels, rng);
    // A dense layer that doesn't feed a ReLU is a classifier head. He gain
    // there only inflates the initial logits, so shrink it to start from
    // near-uniform class probabilities.
    for (std::size_t i = 0; i < model.layers_.size(); ++i) {
        auto* dense = dynamic_cast<Dense*>(model.layers_[i].get());
        if (!dense) continue;
        if (i + 1 < model.layers_.size() &&
            dynamic_cast<ReLU*>(model.layers_[i + 1].get()) != nullptr)
            continue;
        const double he_limit = std::sqrt(6.0 / dense->weight.dim(1));
        const double scale = 0.01 / he_limit;
        for (std::size_t j = 0; j < dense->weight.size(); ++j) dense->weight[j] *= scale;
    }
    model.has_trailing_softmax_ = dynamic_cast<Softmax*>(model.layers_.back().get()) != nullptr;
    return model;
}

Tensor Model::forward(const Tensor& input, Mode mode) {
    Tensor x = input;
    for (auto& layer : layers_) x = layer->forward(x, mode);
    return x;
}

Tensor Model::forward_logits(const Tensor& input, Mode mode) {
    Tensor x = input;
    const std::size_t stop = layers_.size() - (has_trailing_softmax_ ? 1 : 0);
    for (std::size_t i = 0; i < stop; ++i) x = layers_[i]->forward(x, mode);
    return x;
}

Tensor Model::backward_from_logits(const Tensor& dlogits) {
    Tensor g = dlogits;
    const std::size_t stop = layers_.size() - (has_trailing_softmax_ ? 1 : 0);
    for (std::size_t i = stop; i-- > 0;) g = layers_[i]->backward(g);
    return g;
}

std::vector<ParamRef> Model::params() {
    std::vector<ParamRef> out;
    for (std::size_t i = 0; i < layers_.size(); ++i) {
        for (ParamRef p : layers_[i]->params()) {
            p.name = "layer" + std::to_string(i) + "/" + p.name;
            out.push_back(p);
        }
    }
    return out;
}

std::vector<ParamRef> Model::state() {
    std::vector<ParamRef> out;
    for (std::size_t i = 0; i < layers_.size(); ++i) {
        for (ParamRef p : layers_[i]->state()) {
            p.name = "layer" + std::to_string(i) + "/" + p.name;
            out.push_back(p);
        }
    }
    return out;
}

void Model::zero_grads() {
    for (ParamRef p : params())
        if (p.grad) p.grad->fill(0.0);
}

std::size_t Model::parameter_count() {
    std::size_t n = 0;
    for (const ParamRef& p : params()) n += p.value->size();
    return n;
}

}  // namespace cacnn
