#pragma once

#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace cacnn {

// Dense row-major array of 64-bit floats. Activations are (batch, channels,
// height, width); conv kernels are (out_ch, in_ch, kh, kw).
class Tensor {
public:
    Tensor() = default;
    explicit Tensor(std::vector<int> shape, double fill = 0.0) : shape_(std::move(shape)) {
        std::size_t count = 1;
        for (int e : shape_) {
            if (e < 1) throw std::invalid_argument("Tensor: extents must be positive");
            count *= static_cast<std::size_t>(e);
        }
        data_.assign(count, fill);
    }

    const std::vector<int>& shape() const { return shape_; }
    int dim(std::size_t i) const { return shape_.at(i); }
    std::size_t rank() const { return shape_.size(); }
    std::size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }
    double& operator[](std::size_t i) { return data_[i]; }
    double operator[](std::size_t i) const { return data_[i]; }

    void fill(double v) { std::fill(data_.begin(), data_.end(), v); }

    bool same_shape(const Tensor& other) const { return shape_ == other.shape_; }

    std::string shape_str() const {
        std::string s = "(";
        for (std::size_t i = 0; i < shape_.size(); ++i)
            s += (i ? "x" : "") + std::to_string(shape_[i]);
        return s + ")";
    }

    bool operator==(const Tensor& other) const = default;

private:
    std::vector<int> shape_;
    std::vector<double> data_;
};

inline void require_shape(const Tensor& t, const std::vector<int>& shape, const char* what) {
    if (t.shape() != shape) {
        std::string want = "(";
        for (std::size_t i = 0; i < shape.size(); ++i)
            want += (i ? "x" : "") + std::to_string(shape[i]);
        want += ")";
        throw std::invalid_argument(std::string(what) + ": expected shape " + want + ", got " +
                                    t.shape_str());
    }
}

}  // namespace cacnn
