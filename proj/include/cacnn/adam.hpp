#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "cacnn/layers.hpp"

namespace cacnn {

// Adam with bias correction over a fixed parameter list. Moment buffers are
// kept flat, aligned with the order of the ParamRef list given at reset.
class Adam {
public:
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;

    explicit Adam(double learning_rate = 1e-3) : lr(learning_rate) {}

    void reset(const std::vector<ParamRef>& params) {
        std::size_t total = 0;
        for (const auto& p : params) total += p.value->size();
        m_.assign(total, 0.0);
        v_.assign(total, 0.0);
        t_ = 0;
    }

    std::uint64_t steps() const { return t_; }
    std::vector<double>& first_moment() { return m_; }
    std::vector<double>& second_moment() { return v_; }
    void set_steps(std::uint64_t t) { t_ = t; }

    // One update over all parameters. Throws on non-finite gradients, naming
    // the offending tensor.
    void step(const std::vector<ParamRef>& params) {
        std::size_t total = 0;
        for (const auto& p : params) total += p.value->size();
        if (total != m_.size()) throw std::logic_error("adam: parameter list changed; call reset");
        ++t_;
        const double corr1 = 1.0 - std::pow(beta1, static_cast<double>(t_));
        const double corr2 = 1.0 - std::pow(beta2, static_cast<double>(t_));
        std::size_t off = 0;
        for (const auto& p : params) {
            if (!p.grad) throw std::logic_error("adam: parameter without gradient: " + p.name);
            for (std::size_t i = 0; i < p.value->size(); ++i, ++off) {
                const double g = (*p.grad)[i];
                if (!std::isfinite(g))
                    throw std::runtime_error("adam: non-finite gradient in " + p.name);
                m_[off] = beta1 * m_[off] + (1.0 - beta1) * g;
                v_[off] = beta2 * v_[off] + (1.0 - beta2) * g * g;
                const double mhat = m_[off] / corr1;
                const double vhat = v_[off] / corr2;
                (*p.value)[i] -= lr * mhat / (std::sqrt(vhat) + epsilon);
            }
        }
    }

private:
    std::vector<double> m_, v_;
    std::uint64_t t_ = 0;
};

}  // namespace cacnn
