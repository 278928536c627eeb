#pragma once

#include <memory>
#include <string>
#include <vector>

#include "cacnn/rng.hpp"
#include "cacnn/tensor.hpp"

namespace cacnn {

enum class Mode { Train, Infer };

enum class Padding { Same, Valid };

struct ParamRef {
    std::string name;
    Tensor* value;
    Tensor* grad;  // nullptr for non-trainable state (running stats)
};

class Layer {
public:
    virtual ~Layer() = default;

    // Resolves weight shapes given the input channel count; returns the output
    // channel count. Weight init draws from `rng`.
    virtual int build(int in_channels, SplitMix64& rng) = 0;

    virtual Tensor forward(const Tensor& x, Mode mode) = 0;
    virtual Tensor backward(const Tensor& upstream) = 0;

    virtual std::vector<ParamRef> params() { return {}; }  // trainable
    virtual std::vector<ParamRef> state() { return {}; }   // running stats etc.

    // One architecture-config line, e.g. "conv out=16 k=3 stride=1 pad=same".
    virtual std::string describe() const = 0;
};

class Conv2D : public Layer {
public:
    Conv2D(int out_channels, int kernel, int stride = 1, Padding padding = Padding::Same);

    int build(int in_channels, SplitMix64& rng) override;
    Tensor forward(const Tensor& x, Mode mode) override;
    Tensor backward(const Tensor& upstream) override;
    std::vector<ParamRef> params() override;
    std::string describe() const override;

    Tensor weight, bias, dweight, dbias;

private:
    int out_channels_, kernel_, stride_, in_channels_ = 0;
    Padding padding_;
    Tensor cached_input_;
};

class BatchNorm : public Layer {
public:
    explicit BatchNorm(double momentum = 0.9, double epsilon = 1e-5);

    int build(int in_channels, SplitMix64& rng) override;
    Tensor forward(const Tensor& x, Mode mode) override;
    Tensor backward(const Tensor& upstream) override;
    std::vector<ParamRef> params() override;
    std::vector<ParamRef> state() override;
    std::string describe() const override;

    // Population-statistics capture: between begin and end, train-mode forward
    // accumulates exact batch moments instead of updating the running EMA;
    // end_stat_capture writes the aggregated population stats into
    // running_mean / running_var.
    void begin_stat_capture();
    void end_stat_capture();

    Tensor gamma, beta, dgamma, dbeta;
    Tensor running_mean, running_var;

private:
    double momentum_, epsilon_;
    int channels_ = 0;
    bool capturing_ = false;
    std::vector<double> cap_mean_, cap_sq_;  // element-weighted sums of E[x], E[x^2]
    double cap_weight_ = 0.0;
    Tensor cached_norm_;           // normalized input
    std::vector<double> inv_std_;  // per channel, train mode
    std::vector<int> cached_shape_;
};

class ReLU : public Layer {
public:
    int build(int in_channels, SplitMix64&) override { return in_channels; }
    Tensor forward(const Tensor& x, Mode mode) override;
    Tensor backward(const Tensor& upstream) override;
    std::string describe() const override { return "relu"; }

private:
    Tensor cached_input_;
};

class MaxPool : public Layer {
public:
    explicit MaxPool(int window = 2, int stride = 2);

    int build(int in_channels, SplitMix64&) override { return in_channels; }
    Tensor forward(const Tensor& x, Mode mode) override;
    Tensor backward(const Tensor& upstream) override;
    std::string describe() const override;

private:
    int window_, stride_;
    std::vector<int> in_shape_;
    std::vector<std::size_t> argmax_;  // flat input index per output element
};

class GlobalAvgPool : public Layer {
public:
    int build(int in_channels, SplitMix64&) override { return in_channels; }
    Tensor forward(const Tensor& x, Mode mode) override;
    Tensor backward(const Tensor& upstream) override;
    std::string describe() const override { return "globalavgpool"; }

private:
    std::vector<int> in_shape_;
};

// Fully connected layer; requires a fixed-length input (spatial dims 1x1),
// i.e. it must follow GlobalAvgPool or another Dense.
class Dense : public Layer {
public:
    explicit Dense(int units);

    int build(int in_channels, SplitMix64& rng) override;
    Tensor forward(const Tensor& x, Mode mode) override;
    Tensor backward(const Tensor& upstream) override;
    std::vector<ParamRef> params() override;
    std::string describe() const override;

    Tensor weight, bias, dweight, dbias;  // weight is (units, in_features)

private:
    int units_, in_features_ = 0;
    Tensor cached_input_;
};

class Softmax : public Layer {
public:
    int build(int in_channels, SplitMix64&) override { return in_channels; }
    Tensor forward(const Tensor& x, Mode mode) override;
    Tensor backward(const Tensor& upstream) override;
    std::string describe() const override { return "softmax"; }

private:
    Tensor cached_output_;
};

// Parses one architecture-config line into a layer. Throws
// std::invalid_argument on unknown layer names or malformed options.
std::unique_ptr<Layer> parse_layer_line(const std::string& line);

}  // namespace cacnn
