#include "cacnn/layers.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace cacnn {

namespace {

void require_rank4(const Tensor& x, const char* what) {
    if (x.rank() != 4)
        throw std::invalid_argument(std::string(what) + ": expected rank-4 input, got " +
                                    x.shape_str());
}

double he_uniform_limit(int fan_in) { return std::sqrt(6.0 / fan_in); }

void init_he_uniform(Tensor& t, int fan_in, SplitMix64& rng) {
    const double limit = he_uniform_limit(fan_in);
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = rng.next_double(-limit, limit);
}

}  // namespace

// ---------------------------------------------------------------- Conv2D

Conv2D::Conv2D(int out_channels, int kernel, int stride, Padding padding)
    : out_channels_(out_channels), kernel_(kernel), stride_(stride), padding_(padding) {
    if (out_channels < 1 || kernel < 1 || stride < 1)
        throw std::invalid_argument("conv: out, k and stride must be positive");
    if (padding == Padding::Same && kernel % 2 == 0)
        throw std::invalid_argument("conv: same padding requires an odd kernel");
}

int Conv2D::build(int in_channels, SplitMix64& rng) {
    in_channels_ = in_channels;
    weight = Tensor({out_channels_, in_channels_, kernel_, kernel_});
    bias = Tensor({out_channels_});
    dweight = Tensor(weight.shape());
    dbias = Tensor(bias.shape());
    init_he_uniform(weight, in_channels_ * kernel_ * kernel_, rng);
    return out_channels_;
}

Tensor Conv2D::forward(const Tensor& x, Mode) {
    require_rank4(x, "conv");
    const int B = x.dim(0), C = x.dim(1), H = x.dim(2), W = x.dim(3);
    if (C != in_channels_)
        throw std::invalid_argument("conv: input has " + std::to_string(C) +
                                    " channels, layer built for " + std::to_string(in_channels_));
    const int k = kernel_, s = stride_;
    const int p = padding_ == Padding::Same ? (k - 1) / 2 : 0;
    const int OH = (H + 2 * p - k) / s + 1;
    const int OW = (W + 2 * p - k) / s + 1;
    if (OH < 1 || OW < 1)
        throw std::invalid_argument("conv: input " + x.shape_str() + " too small for kernel");

    cached_input_ = x;
    Tensor out({B, out_channels_, OH, OW});
    for (int b = 0; b < B; ++b) {
        for (int oc = 0; oc < out_channels_; ++oc) {
            double* oplane = out.data() + (static_cast<std::size_t>(b) * out_channels_ + oc) *
                                              static_cast<std::size_t>(OH) * OW;
            std::fill(oplane, oplane + static_cast<std::size_t>(OH) * OW, bias[oc]);
            for (int ic = 0; ic < C; ++ic) {
                const double* xplane = x.data() + (static_cast<std::size_t>(b) * C + ic) *
                                                      static_cast<std::size_t>(H) * W;
                const double* wbase =
                    weight.data() +
                    (static_cast<std::size_t>(oc) * C + ic) * static_cast<std::size_t>(k) * k;
                for (int ky = 0; ky < k; ++ky) {
                    for (int kx = 0; kx < k; ++kx) {
                        const double w = wbase[ky * k + kx];
                        const int shift = kx - p;
                        for (int oy = 0; oy < OH; ++oy) {
                            const int iy = oy * s - p + ky;
                            if (iy < 0 || iy >= H) continue;
                            const double* xrow = xplane + static_cast<std::size_t>(iy) * W;
                            double* orow = oplane + static_cast<std::size_t>(oy) * OW;
                            if (s == 1) {
                                const int lo = std::max(0, -shift);
                                const int hi = std::min(OW - 1, W - 1 - shift);
                                for (int ox = lo; ox <= hi; ++ox)
                                    orow[ox] += w * xrow[ox + shift];
                            } else {
                                for (int ox = 0; ox < OW; ++ox) {
                                    const int ix = ox * s + shift;
                                    if (ix >= 0 && ix < W) orow[ox] += w * xrow[ix];
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    return out;
}

Tensor Conv2D::backward(const Tensor& upstream) {
    const Tensor& x = cached_input_;
    if (x.empty()) throw std::logic_error("conv backward before forward");
    const int B = x.dim(0), C = x.dim(1), H = x.dim(2), W = x.dim(3);
    const int k = kernel_, s = stride_;
    const int p = padding_ == Padding::Same ? (k - 1) / 2 : 0;
    const int OH = upstream.dim(2), OW = upstream.dim(3);
    require_shape(upstream, {B, out_channels_, OH, OW}, "conv backward");

    Tensor dx(x.shape());
    dweight.fill(0.0);
    dbias.fill(0.0);
    for (int b = 0; b < B; ++b) {
        for (int oc = 0; oc < out_channels_; ++oc) {
            const double* dplane = upstream.data() +
                                   (static_cast<std::size_t>(b) * out_channels_ + oc) *
                                       static_cast<std::size_t>(OH) * OW;
            double bsum = 0.0;
            for (std::size_t i = 0; i < static_cast<std::size_t>(OH) * OW; ++i) bsum += dplane[i];
            dbias[oc] += bsum;
            for (int ic = 0; ic < C; ++ic) {
                const double* xplane = x.data() + (static_cast<std::size_t>(b) * C + ic) *
                                                      static_cast<std::size_t>(H) * W;
                double* dxplane = dx.data() + (static_cast<std::size_t>(b) * C + ic) *
                                                  static_cast<std::size_t>(H) * W;
                const double* wbase =
                    weight.data() +
                    (static_cast<std::size_t>(oc) * C + ic) * static_cast<std::size_t>(k) * k;
                double* dwbase =
                    dweight.data() +
                    (static_cast<std::size_t>(oc) * C + ic) * static_cast<std::size_t>(k) * k;
                for (int ky = 0; ky < k; ++ky) {
                    for (int kx = 0; kx < k; ++kx) {
                        const double w = wbase[ky * k + kx];
                        const int shift = kx - p;
                        double wgrad = 0.0;
                        for (int oy = 0; oy < OH; ++oy) {
                            const int iy = oy * s - p + ky;
                            if (iy < 0 || iy >= H) continue;
                            const double* xrow = xplane + static_cast<std::size_t>(iy) * W;
                            double* dxrow = dxplane + static_cast<std::size_t>(iy) * W;
                            const double* drow = dplane + static_cast<std::size_t>(oy) * OW;
                            if (s == 1) {
                                const int lo = std::max(0, -shift);
                                const int hi = std::min(OW - 1, W - 1 - shift);
                                for (int ox = lo; ox <= hi; ++ox) {
                                    wgrad += drow[ox] * xrow[ox + shift];
                                    dxrow[ox + shift] += w * drow[ox];
                                }
                            } else {
                                for (int ox = 0; ox < OW; ++ox) {
                                    const int ix = ox * s + shift;
                                    if (ix >= 0 && ix < W) {
                                        wgrad += drow[ox] * xrow[ix];
                                        dxrow[ix] += w * drow[ox];
                                    }
                                }
                            }
                        }
                        dwbase[ky * k + kx] += wgrad;
                    }
                }
            }
        }
    }
    return dx;
}

std::vector<ParamRef> Conv2D::params() {
    return {{describe() + "/weight", &weight, &dweight}, {describe() + "/bias", &bias, &dbias}};
}

std::string Conv2D::describe() const {
    std::ostringstream out;
    out << "conv out=" << out_channels_ << " k=" << kernel_ << " stride=" << stride_
        << " pad=" << (padding_ == Padding::Same ? "same" : "valid");
    return out.str();
}

// ------------------------------------------------------------- BatchNorm

BatchNorm::BatchNorm(double momentum, double epsilon) : momentum_(momentum), epsilon_(epsilon) {
    if (!(momentum >= 0.0 && momentum < 1.0))
        throw std::invalid_argument("batchnorm: momentum must be in [0, 1)");
    if (!(epsilon > 0.0)) throw std::invalid_argument("batchnorm: eps must be positive");
}

int BatchNorm::build(int in_channels, SplitMix64&) {
    channels_ = in_channels;
    gamma = Tensor({channels_}, 1.0);
    beta = Tensor({channels_});
    dgamma = Tensor({channels_});
    dbeta = Tensor({channels_});
    running_mean = Tensor({channels_});
    running_var = Tensor({channels_}, 1.0);
    return channels_;
}

Tensor BatchNorm::forward(const Tensor& x, Mode mode) {
    require_rank4(x, "batchnorm");
    const int B = x.dim(0), C = x.dim(1), H = x.dim(2), W = x.dim(3);
    if (C != channels_) throw std::invalid_argument("batchnorm: channel mismatch");
    const std::size_t plane = static_cast<std::size_t>(H) * W;
    Tensor out(x.shape());

    if (mode == Mode::Infer) {
        for (int b = 0; b < B; ++b) {
            for (int c = 0; c < C; ++c) {
                const double inv = 1.0 / std::sqrt(running_var[c] + epsilon_);
                const double scale = gamma[c] * inv;
                const double off = beta[c] - scale * running_mean[c];
                const double* xp = x.data() + (static_cast<std::size_t>(b) * C + c) * plane;
                double* op = out.data() + (static_cast<std::size_t>(b) * C + c) * plane;
                for (std::size_t i = 0; i < plane; ++i) op[i] = scale * xp[i] + off;
            }
        }
        return out;
    }

    if (B < 2) throw std::invalid_argument("batchnorm: train mode needs batch size >= 2");
    cached_shape_ = x.shape();
    cached_norm_ = Tensor(x.shape());
    inv_std_.assign(C, 0.0);
    const double m = static_cast<double>(B) * plane;
    if (capturing_) cap_weight_ += m;
    for (int c = 0; c < C; ++c) {
        double sum = 0.0, sq = 0.0;
        for (int b = 0; b < B; ++b) {
            const double* xp = x.data() + (static_cast<std::size_t>(b) * C + c) * plane;
            for (std::size_t i = 0; i < plane; ++i) {
                sum += xp[i];
                sq += xp[i] * xp[i];
            }
        }
        const double mean = sum / m;
        const double var = std::max(0.0, sq / m - mean * mean);
        const double inv = 1.0 / std::sqrt(var + epsilon_);
        inv_std_[c] = inv;
        if (capturing_) {
            cap_mean_[c] += sum;
            cap_sq_[c] += sq;
        } else {
            running_mean[c] = momentum_ * running_mean[c] + (1.0 - momentum_) * mean;
            running_var[c] = momentum_ * running_var[c] + (1.0 - momentum_) * var;
        }
        for (int b = 0; b < B; ++b) {
            const double* xp = x.data() + (static_cast<std::size_t>(b) * C + c) * plane;
            double* np = cached_norm_.data() + (static_cast<std::size_t>(b) * C + c) * plane;
            double* op = out.data() + (static_cast<std::size_t>(b) * C + c) * plane;
            for (std::size_t i = 0; i < plane; ++i) {
                const double nv = (xp[i] - mean) * inv;
                np[i] = nv;
                op[i] = gamma[c] * nv + beta[c];
            }
        }
    }
    return out;
}

Tensor BatchNorm::backward(const Tensor& upstream) {
    if (cached_norm_.empty()) throw std::logic_error("batchnorm backward before train forward");
    require_shape(upstream, cached_shape_, "batchnorm backward");
    const int B = cached_shape_[0], C = cached_shape_[1];
    const std::size_t plane = static_cast<std::size_t>(cached_shape_[2]) * cached_shape_[3];
    const double m = static_cast<double>(B) * plane;
    Tensor dx(cached_shape_);
    dgamma.fill(0.0);
    dbeta.fill(0.0);
    for (int c = 0; c < C; ++c) {
        double sum_dy = 0.0, sum_dy_norm = 0.0;
        for (int b = 0; b < B; ++b) {
            const std::size_t base = (static_cast<std::size_t>(b) * C + c) * plane;
            const double* dy = upstream.data() + base;
            const double* nv = cached_norm_.data() + base;
            for (std::size_t i = 0; i < plane; ++i) {
                sum_dy += dy[i];
                sum_dy_norm += dy[i] * nv[i];
            }
        }
        dbeta[c] += sum_dy;
        dgamma[c] += sum_dy_norm;
        const double scale = gamma[c] * inv_std_[c] / m;
        for (int b = 0; b < B; ++b) {
            const std::size_t base = (static_cast<std::size_t>(b) * C + c) * plane;
            const double* dy = upstream.data() + base;
            const double* nv = cached_norm_.data() + base;
            double* dxp = dx.data() + base;
            for (std::size_t i = 0; i < plane; ++i)
                dxp[i] = scale * (m * dy[i] - sum_dy - nv[i] * sum_dy_norm);
        }
    }
    return dx;
}

std::vector<ParamRef> BatchNorm::params() {
    return {{describe() + "/gamma", &gamma, &dgamma}, {describe() + "/beta", &beta, &dbeta}};
}

std::vector<ParamRef> BatchNorm::state() {
    return {{describe() + "/running_mean", &running_mean, nullptr},
            {describe() + "/running_var", &running_var, nullptr}};
}

void BatchNorm::begin_stat_capture() {
    capturing_ = true;
    cap_mean_.assign(channels_, 0.0);
    cap_sq_.assign(channels_, 0.0);
    cap_weight_ = 0.0;
}

void BatchNorm::end_stat_capture() {
    capturing_ = false;
    if (cap_weight_ <= 0.0) return;  // no train-mode forward happened
    for (int c = 0; c < channels_; ++c) {
        const double mean = cap_mean_[c] / cap_weight_;
        const double var = std::max(0.0, cap_sq_[c] / cap_weight_ - mean * mean);
        running_mean[c] = mean;
        running_var[c] = var;
    }
}

std::string BatchNorm::describe() const {
    std::ostringstream out;
    out << "batchnorm momentum=" << momentum_ << " eps=" << epsilon_;
    return out.str();
}

// ------------------------------------------------------------------ ReLU

Tensor ReLU::forward(const Tensor& x, Mode) {
    cached_input_ = x;
    Tensor out(x.shape());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] > 0.0 ? x[i] : 0.0;
    return out;
}

Tensor ReLU::backward(const Tensor& upstream) {
    if (cached_input_.empty()) throw std::logic_error("relu backward before forward");
    if (!upstream.same_shape(cached_input_))
        throw std::invalid_argument("relu backward: shape mismatch");
    Tensor dx(upstream.shape());
    for (std::size_t i = 0; i < dx.size(); ++i)
        dx[i] = cached_input_[i] > 0.0 ? upstream[i] : 0.0;
    return dx;
}

// --------------------------------------------------------------- MaxPool

MaxPool::MaxPool(int window, int stride) : window_(window), stride_(stride) {
    if (window < 1 || stride < 1)
        throw std::invalid_argument("maxpool: window and stride must be positive");
}

Tensor MaxPool::forward(const Tensor& x, Mode) {
    require_rank4(x, "maxpool");
    const int B = x.dim(0), C = x.dim(1), H = x.dim(2), W = x.dim(3);
    const int OH = (H - window_) / stride_ + 1;
    const int OW = (W - window_) / stride_ + 1;
    if (OH < 1 || OW < 1)
        throw std::invalid_argument("maxpool: input " + x.shape_str() + " smaller than window");
    in_shape_ = x.shape();
    Tensor out({B, C, OH, OW});
    argmax_.assign(out.size(), 0);
    std::size_t o = 0;
    for (int b = 0; b < B; ++b) {
        for (int c = 0; c < C; ++c) {
            const double* xp = x.data() + (static_cast<std::size_t>(b) * C + c) *
                                              static_cast<std::size_t>(H) * W;
            const std::size_t plane_base =
                (static_cast<std::size_t>(b) * C + c) * static_cast<std::size_t>(H) * W;
            for (int oy = 0; oy < OH; ++oy) {
                for (int ox = 0; ox < OW; ++ox, ++o) {
                    const int y0 = oy * stride_, x0 = ox * stride_;
                    double best = xp[static_cast<std::size_t>(y0) * W + x0];
                    std::size_t best_i = static_cast<std::size_t>(y0) * W + x0;
                    for (int wy = 0; wy < window_; ++wy) {
                        for (int wx = 0; wx < window_; ++wx) {
                            const std::size_t i = static_cast<std::size_t>(y0 + wy) * W + x0 + wx;
                            if (xp[i] > best) {  // strict: first index wins ties
                                best = xp[i];
                                best_i = i;
                            }
                        }
                    }
                    out[o] = best;
                    argmax_[o] = plane_base + best_i;
                }
            }
        }
    }
    return out;
}

Tensor MaxPool::backward(const Tensor& upstream) {
    if (in_shape_.empty()) throw std::logic_error("maxpool backward before forward");
    if (upstream.size() != argmax_.size())
        throw std::invalid_argument("maxpool backward: shape mismatch");
    Tensor dx(in_shape_);
    for (std::size_t o = 0; o < upstream.size(); ++o) dx[argmax_[o]] += upstream[o];
    return dx;
}

std::string MaxPool::describe() const {
    std::ostringstream out;
    out << "maxpool k=" << window_ << " stride=" << stride_;
    return out.str();
}

// --------------------------------------------------------- GlobalAvgPool

Tensor GlobalAvgPool::forward(const Tensor& x, Mode) {
    require_rank4(x, "globalavgpool");
    const int B = x.dim(0), C = x.dim(1);
    const std::size_t plane = static_cast<std::size_t>(x.dim(2)) * x.dim(3);
    in_shape_ = x.shape();
    Tensor out({B, C, 1, 1});
    for (int b = 0; b < B; ++b) {
        for (int c = 0; c < C; ++c) {
            const double* xp = x.data() + (static_cast<std::size_t>(b) * C + c) * plane;
            double sum = 0.0;
            for (std::size_t i = 0; i < plane; ++i) sum += xp[i];
            out[static_cast<std::size_t>(b) * C + c] = sum / static_cast<double>(plane);
        }
    }
    return out;
}

Tensor GlobalAvgPool::backward(const Tensor& upstream) {
    if (in_shape_.empty()) throw std::logic_error("globalavgpool backward before forward");
    const int B = in_shape_[0], C = in_shape_[1];
    require_shape(upstream, {B, C, 1, 1}, "globalavgpool backward");
    const std::size_t plane = static_cast<std::size_t>(in_shape_[2]) * in_shape_[3];
    Tensor dx(in_shape_);
    for (int b = 0; b < B; ++b) {
        for (int c = 0; c < C; ++c) {
            const double g =
                upstream[static_cast<std::size_t>(b) * C + c] / static_cast<double>(plane);
            double* dxp = dx.data() + (static_cast<std::size_t>(b) * C + c) * plane;
            for (std::size_t i = 0; i < plane; ++i) dxp[i] = g;
        }
    }
    return dx;
}

// ----------------------------------------------------------------- Dense

Dense::Dense(int units) : units_(units) {
    if (units < 1) throw std::invalid_argument("dense: units must be positive");
}

int Dense::build(int in_channels, SplitMix64& rng) {
    in_features_ = in_channels;
    weight = Tensor({units_, in_features_});
    bias = Tensor({units_});
    dweight = Tensor(weight.shape());
    dbias = Tensor(bias.shape());
    init_he_uniform(weight, in_features_, rng);
    return units_;
}

Tensor Dense::forward(const Tensor& x, Mode) {
    require_rank4(x, "dense");
    const int B = x.dim(0);
    if (x.dim(1) != in_features_ || x.dim(2) != 1 || x.dim(3) != 1)
        throw std::invalid_argument("dense: expected (Bx" + std::to_string(in_features_) +
                                    "x1x1) input, got " + x.shape_str() +
                                    " (dense must follow globalavgpool or dense)");
    cached_input_ = x;
    Tensor out({B, units_, 1, 1});
    for (int b = 0; b < B; ++b) {
        const double* xb = x.data() + static_cast<std::size_t>(b) * in_features_;
        double* ob = out.data() + static_cast<std::size_t>(b) * units_;
        for (int u = 0; u < units_; ++u) {
            const double* wrow = weight.data() + static_cast<std::size_t>(u) * in_features_;
            double acc = bias[u];
            for (int f = 0; f < in_features_; ++f) acc += wrow[f] * xb[f];
            ob[u] = acc;
        }
    }
    return out;
}

Tensor Dense::backward(const Tensor& upstream) {
    if (cached_input_.empty()) throw std::logic_error("dense backward before forward");
    const int B = cached_input_.dim(0);
    require_shape(upstream, {B, units_, 1, 1}, "dense backward");
    Tensor dx(cached_input_.shape());
    dweight.fill(0.0);
    dbias.fill(0.0);
    for (int b = 0; b < B; ++b) {
        const double* xb = cached_input_.data() + static_cast<std::size_t>(b) * in_features_;
        const double* dyb = upstream.data() + static_cast<std::size_t>(b) * units_;
        double* dxb = dx.data() + static_cast<std::size_t>(b) * in_features_;
        for (int u = 0; u < units_; ++u) {
            const double g = dyb[u];
            dbias[u] += g;
            const double* wrow = weight.data() + static_cast<std::size_t>(u) * in_features_;
            double* dwrow = dweight.data() + static_cast<std::size_t>(u) * in_features_;
            for (int f = 0; f < in_features_; ++f) {
                dwrow[f] += g * xb[f];
                dxb[f] += g * wrow[f];
            }
        }
    }
    return dx;
}

std::vector<ParamRef> Dense::params() {
    return {{describe() + "/weight", &weight, &dweight}, {describe() + "/bias", &bias, &dbias}};
}

std::string Dense::describe() const { return "dense units=" + std::to_string(units_); }

// --------------------------------------------------------------- Softmax

Tensor Softmax::forward(const Tensor& x, Mode) {
    require_rank4(x, "softmax");
    const int B = x.dim(0), C = x.dim(1);
    if (x.dim(2) != 1 || x.dim(3) != 1)
        throw std::invalid_argument("softmax: expected (BxCx1x1) input, got " + x.shape_str());
    Tensor out(x.shape());
    for (int b = 0; b < B; ++b) {
        const double* xb = x.data() + static_cast<std::size_t>(b) * C;
        double* ob = out.data() + static_cast<std::size_t>(b) * C;
        double mx = xb[0];
        for (int c = 1; c < C; ++c) mx = std::max(mx, xb[c]);
        double sum = 0.0;
        for (int c = 0; c < C; ++c) {
            ob[c] = std::exp(xb[c] - mx);
            sum += ob[c];
        }
        for (int c = 0; c < C; ++c) ob[c] /= sum;
    }
    cached_output_ = out;
    return out;
}

Tensor Softmax::backward(const Tensor& upstream) {
    if (cached_output_.empty()) throw std::logic_error("softmax backward before forward");
    if (!upstream.same_shape(cached_output_))
        throw std::invalid_argument("softmax backward: shape mismatch");
    const int B = cached_output_.dim(0), C = cached_output_.dim(1);
    Tensor dx(upstream.shape());
    for (int b = 0; b < B; ++b) {
        const double* p = cached_output_.data() + static_cast<std::size_t>(b) * C;
        const double* dy = upstream.data() + static_cast<std::size_t>(b) * C;
        double* dxb = dx.data() + static_cast<std::size_t>(b) * C;
        double dot = 0.0;
        for (int c = 0; c < C; ++c) dot += dy[c] * p[c];
        for (int c = 0; c < C; ++c) dxb[c] = p[c] * (dy[c] - dot);
    }
    return dx;
}

// ----------------------------------------------------------- config lines

std::unique_ptr<Layer> parse_layer_line(const std::string& line) {
    std::istringstream in(line);
    std::string name;
    in >> name;
    std::map<std::string, std::string> opts;
    std::string tok;
    while (in >> tok) {
        const auto eq = tok.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("layer option must be key=value: " + tok);
        opts[tok.substr(0, eq)] = tok.substr(eq + 1);
    }
    auto get_int = [&](const std::string& key, int def, bool required = false) {
        auto it = opts.find(key);
        if (it == opts.end()) {
            if (required) throw std::invalid_argument(name + ": missing option " + key);
            return def;
        }
        return std::stoi(it->second);
    };
    auto get_double = [&](const std::string& key, double def) {
        auto it = opts.find(key);
        return it == opts.end() ? def : std::stod(it->second);
    };

    if (name == "conv") {
        const int out = get_int("out", 0, true);
        const int k = get_int("k", 0, true);
        const int stride = get_int("stride", 1);
        Padding pad = Padding::Same;
        if (auto it = opts.find("pad"); it != opts.end()) {
            if (it->second == "same")
                pad = Padding::Same;
            else if (it->second == "valid")
                pad = Padding::Valid;
            else
                throw std::invalid_argument("conv: pad must be same or valid");
        }
        return std::make_unique<Conv2D>(out, k, stride, pad);
    }
    if (name == "batchnorm")
        return std::make_unique<BatchNorm>(get_double("momentum", 0.9), get_double("eps", 1e-5));
    if (name == "relu") return std::make_unique<ReLU>();
    if (name == "maxpool") {
        const int k = get_int("k", 2);
        return std::make_unique<MaxPool>(k, get_int("stride", k));
    }
    if (name == "globalavgpool") return std::make_unique<GlobalAvgPool>();
    if (name == "dense") return std::make_unique<Dense>(get_int("units", 0, true));
    if (name == "softmax") return std::make_unique<Softmax>();
    throw std::invalid_argument("unknown layer: " + name);
}

}  // namespace cacnn
