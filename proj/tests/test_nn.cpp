#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "cacnn/adam.hpp"
#include "cacnn/checkpoint.hpp"
#include "cacnn/gradcheck.hpp"
#include "cacnn/loss.hpp"
#include "cacnn/model.hpp"
#include "oracles.hpp"

using namespace cacnn;

namespace {

Tensor random_tensor(std::vector<int> shape, SplitMix64& rng, double lo = -1.0, double hi = 1.0) {
    Tensor t(std::move(shape));
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = rng.next_double(lo, hi);
    return t;
}

// Central finite differences of a scalar function of one tensor entry.
template <typename F>
double fd_grad(Tensor& t, std::size_t i, F loss, double h = 1e-5) {
    const double saved = t[i];
    t[i] = saved + h;
    const double lp = loss();
    t[i] = saved - h;
    const double lm = loss();
    t[i] = saved;
    return (lp - lm) / (2.0 * h);
}

double rel_err(double a, double b) {
    return std::abs(a - b) / std::max(1e-8, std::abs(a) + std::abs(b));
}

}  // namespace

TEST_CASE("conv identity kernel") {
    SplitMix64 rng(1);
    Conv2D conv(1, 1);
    conv.build(1, rng);
    conv.weight[0] = 1.0;
    conv.bias[0] = 0.0;
    const Tensor x = random_tensor({2, 1, 5, 5}, rng);
    CHECK(conv.forward(x, Mode::Train) == x);
}

TEST_CASE("conv all-ones 3x3 same on constant input") {
    SplitMix64 rng(1);
    Conv2D conv(1, 3);
    conv.build(1, rng);
    conv.weight.fill(1.0);
    conv.bias.fill(0.0);
    const Tensor x({1, 1, 5, 5}, 1.0);
    const Tensor y = conv.forward(x, Mode::Train);
    // Interior pixels see the full 3x3 window.
    for (int iy = 1; iy < 4; ++iy)
        for (int ix = 1; ix < 4; ++ix) CHECK(y[static_cast<std::size_t>(iy) * 5 + ix] == 9.0);
    CHECK(y[0] == 4.0);  // corner
}

TEST_CASE("conv matches naive oracle on randomized shapes") {
    SplitMix64 rng(2);
    for (int trial = 0; trial < 30; ++trial) {
        const int B = 1 + static_cast<int>(rng.next_below(3));
        const int C = 1 + static_cast<int>(rng.next_below(3));
        const int OC = 1 + static_cast<int>(rng.next_below(4));
        const int k = 1 + 2 * static_cast<int>(rng.next_below(3));  // odd: 1, 3, 5
        const int H = k + static_cast<int>(rng.next_below(8));
        const int stride = 1 + static_cast<int>(rng.next_below(2));
        const Padding pad = rng.next_below(2) ? Padding::Same : Padding::Valid;
        Conv2D conv(OC, k, stride, pad);
        conv.build(C, rng);
        const Tensor x = random_tensor({B, C, H, H}, rng);
        const Tensor got = conv.forward(x, Mode::Train);
        const Tensor want =
            oracle::conv2d_naive(x, conv.weight, conv.bias, stride,
                                 pad == Padding::Same ? (k - 1) / 2 : 0);
        REQUIRE(got.shape() == want.shape());
        for (std::size_t i = 0; i < got.size(); ++i) CHECK(std::abs(got[i] - want[i]) < 1e-10);
    }
}

TEST_CASE("conv backward: zero upstream and finite differences") {
    SplitMix64 rng(3);
    Conv2D conv(2, 3);
    conv.build(1, rng);
    const Tensor x = random_tensor({1, 1, 6, 6}, rng);
    const Tensor y = conv.forward(x, Mode::Train);

    Tensor zero(y.shape());
    const Tensor dx0 = conv.backward(zero);
    for (std::size_t i = 0; i < dx0.size(); ++i) CHECK(dx0[i] == 0.0);
    for (std::size_t i = 0; i < conv.dweight.size(); ++i) CHECK(conv.dweight[i] == 0.0);

    // Loss = sum of outputs; FD on weights and inputs.
    Tensor ones(y.shape(), 1.0);
    Tensor xcopy = x;
    conv.forward(xcopy, Mode::Train);
    const Tensor dx = conv.backward(ones);
    auto loss = [&] {
        const Tensor out = conv.forward(xcopy, Mode::Train);
        double s = 0.0;
        for (std::size_t i = 0; i < out.size(); ++i) s += out[i];
        return s;
    };
    for (std::size_t i = 0; i < conv.weight.size(); i += 3)
        CHECK(rel_err(conv.dweight[i], fd_grad(conv.weight, i, loss)) < 1e-6);
    for (std::size_t i = 0; i < xcopy.size(); i += 7)
        CHECK(rel_err(dx[i], fd_grad(xcopy, i, loss)) < 1e-6);
}

TEST_CASE("conv single-pixel upstream gives the input patch as kernel grad") {
    SplitMix64 rng(4);
    Conv2D conv(1, 3, 1, Padding::Valid);
    conv.build(1, rng);
    const Tensor x = random_tensor({1, 1, 5, 5}, rng);
    const Tensor y = conv.forward(x, Mode::Train);
    Tensor up(y.shape());
    up[1 * y.dim(3) + 2] = 1.0;  // output pixel (1, 2)
    conv.backward(up);
    for (int ky = 0; ky < 3; ++ky)
        for (int kx = 0; kx < 3; ++kx)
            CHECK(conv.dweight[static_cast<std::size_t>(ky) * 3 + kx] ==
                  doctest::Approx(x[static_cast<std::size_t>(1 + ky) * 5 + 2 + kx]).epsilon(1e-12));
}

TEST_CASE("conv shape errors name both shapes") {
    SplitMix64 rng(5);
    Conv2D conv(2, 3);
    conv.build(3, rng);
    CHECK_THROWS_WITH_AS(conv.forward(Tensor({1, 2, 5, 5}), Mode::Train),
                         doctest::Contains("channels"), std::invalid_argument);
}

TEST_CASE("batchnorm forward train") {
    SplitMix64 rng(6);
    BatchNorm bn;
    bn.build(2, rng);

    // Constant input: normalized value 0, output = beta.
    bn.beta.fill(0.5);
    bn.gamma.fill(3.0);
    const Tensor constant({4, 2, 3, 3}, 2.5);
    const Tensor out = bn.forward(constant, Mode::Train);
    for (std::size_t i = 0; i < out.size(); ++i) CHECK(out[i] == doctest::Approx(0.5).epsilon(1e-9));

    // gamma=1, beta=0: batch mean 0, variance 1 per channel (to eps).
    bn.gamma.fill(1.0);
    bn.beta.fill(0.0);
    const Tensor x = random_tensor({4, 2, 3, 3}, rng);
    const Tensor y = bn.forward(x, Mode::Train);
    for (int c = 0; c < 2; ++c) {
        double mean = 0.0, var = 0.0;
        std::size_t count = 0;
        for (int b = 0; b < 4; ++b)
            for (int i = 0; i < 9; ++i, ++count)
                mean += y[(static_cast<std::size_t>(b) * 2 + c) * 9 + i];
        mean /= count;
        for (int b = 0; b < 4; ++b)
            for (int i = 0; i < 9; ++i) {
                const double d = y[(static_cast<std::size_t>(b) * 2 + c) * 9 + i] - mean;
                var += d * d;
            }
        var /= count;
        CHECK(std::abs(mean) < 1e-12);
        CHECK(std::abs(var - 1.0) < 1e-4);
    }
}

TEST_CASE("batchnorm matches two-pass oracle") {
    SplitMix64 rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        const int B = 2 + static_cast<int>(rng.next_below(4));
        const int C = 1 + static_cast<int>(rng.next_below(4));
        const int H = 1 + static_cast<int>(rng.next_below(6));
        BatchNorm bn(0.9, 1e-5);
        bn.build(C, rng);
        for (std::size_t i = 0; i < bn.gamma.size(); ++i) {
            bn.gamma[i] = rng.next_double(0.5, 2.0);
            bn.beta[i] = rng.next_double(-1.0, 1.0);
        }
        const Tensor x = random_tensor({B, C, H, H}, rng);
        const Tensor got = bn.forward(x, Mode::Train);
        const Tensor want = oracle::batchnorm_naive(x, bn.gamma, bn.beta, 1e-5);
        for (std::size_t i = 0; i < got.size(); ++i) CHECK(std::abs(got[i] - want[i]) < 1e-10);
    }
}

TEST_CASE("batchnorm rejects degenerate train batch") {
    SplitMix64 rng(8);
    BatchNorm bn;
    bn.build(1, rng);
    CHECK_THROWS_AS(bn.forward(Tensor({1, 1, 3, 3}), Mode::Train), std::invalid_argument);
    CHECK_NOTHROW(bn.forward(Tensor({1, 1, 3, 3}), Mode::Infer));
}

TEST_CASE("batchnorm backward properties and finite differences") {
    SplitMix64 rng(9);
    BatchNorm bn;
    bn.build(2, rng);
    Tensor x = random_tensor({3, 2, 2, 2}, rng);
    bn.forward(x, Mode::Train);

    // Constant upstream with gamma=1: input gradient sums to 0 per channel.
    Tensor up({3, 2, 2, 2}, 1.0);
    const Tensor dx_const = bn.backward(up);
    for (int c = 0; c < 2; ++c) {
        double sum = 0.0;
        for (int b = 0; b < 3; ++b)
            for (int i = 0; i < 4; ++i) sum += dx_const[(static_cast<std::size_t>(b) * 2 + c) * 4 + i];
        CHECK(std::abs(sum) < 1e-9);
    }

    // Zero upstream: zero grads.
    const Tensor dx0 = bn.backward(Tensor({3, 2, 2, 2}));
    for (std::size_t i = 0; i < dx0.size(); ++i) CHECK(dx0[i] == 0.0);

    // FD on inputs, gamma and beta against a fixed random upstream weighting.
    const Tensor w = random_tensor({3, 2, 2, 2}, rng);
    auto loss = [&] {
        const Tensor out = bn.forward(x, Mode::Train);
        double s = 0.0;
        for (std::size_t i = 0; i < out.size(); ++i) s += w[i] * out[i];
        return s;
    };
    bn.forward(x, Mode::Train);
    const Tensor dx = bn.backward(w);
    for (std::size_t i = 0; i < x.size(); i += 3) CHECK(rel_err(dx[i], fd_grad(x, i, loss)) < 1e-6);
    for (std::size_t i = 0; i < bn.gamma.size(); ++i) {
        bn.forward(x, Mode::Train);
        bn.backward(w);
        CHECK(rel_err(bn.dgamma[i], fd_grad(bn.gamma, i, loss)) < 1e-6);
        CHECK(rel_err(bn.dbeta[i], fd_grad(bn.beta, i, loss)) < 1e-6);
    }
}

TEST_CASE("maxpool matches oracle and routes gradient to first argmax") {
    SplitMix64 rng(10);
    for (int trial = 0; trial < 10; ++trial) {
        MaxPool pool(2, 2);
        const int H = 4 + 2 * static_cast<int>(rng.next_below(4));
        const Tensor x = random_tensor({2, 2, H, H}, rng);
        const Tensor got = pool.forward(x, Mode::Train);
        const Tensor want = oracle::maxpool_naive(x, 2, 2);
        for (std::size_t i = 0; i < got.size(); ++i) CHECK(got[i] == want[i]);
    }

    // Tie: all-equal window routes to the first index.
    MaxPool pool(2, 2);
    const Tensor x({1, 1, 2, 2}, 1.0);
    pool.forward(x, Mode::Train);
    Tensor up({1, 1, 1, 1}, 1.0);
    const Tensor dx = pool.backward(up);
    CHECK(dx[0] == 1.0);
    CHECK(dx[1] == 0.0);
    CHECK(dx[2] == 0.0);
    CHECK(dx[3] == 0.0);
}

TEST_CASE("global average pool collapses any resolution") {
    GlobalAvgPool gap;
    // Two resolutions with equal channel means give equal outputs.
    Tensor small({1, 2, 5, 5});
    Tensor large({1, 2, 30, 30});
    for (std::size_t i = 0; i < small.size(); ++i) small[i] = i < 25 ? 2.0 : -1.0;
    for (std::size_t i = 0; i < large.size(); ++i) large[i] = i < 900 ? 2.0 : -1.0;
    const Tensor a = gap.forward(small, Mode::Train);
    const Tensor b = gap.forward(large, Mode::Train);
    REQUIRE(a.shape() == std::vector<int>{1, 2, 1, 1});
    CHECK(a[0] == doctest::Approx(b[0]));
    CHECK(a[1] == doctest::Approx(b[1]));

    // Backward spreads evenly.
    gap.forward(small, Mode::Train);
    Tensor up({1, 2, 1, 1});
    up[0] = 25.0;
    const Tensor dx = gap.backward(up);
    CHECK(dx[0] == doctest::Approx(1.0));
}

TEST_CASE("dense matches oracle and passes finite differences") {
    SplitMix64 rng(11);
    Dense dense(7);
    dense.build(5, rng);
    Tensor x = random_tensor({3, 5, 1, 1}, rng);
    const Tensor got = dense.forward(x, Mode::Train);
    const Tensor want = oracle::dense_naive(x, dense.weight, dense.bias);
    for (std::size_t i = 0; i < got.size(); ++i) CHECK(std::abs(got[i] - want[i]) < 1e-12);

    const Tensor w = random_tensor({3, 7, 1, 1}, rng);
    auto loss = [&] {
        const Tensor out = dense.forward(x, Mode::Train);
        double s = 0.0;
        for (std::size_t i = 0; i < out.size(); ++i) s += w[i] * out[i];
        return s;
    };
    dense.forward(x, Mode::Train);
    const Tensor dx = dense.backward(w);
    for (std::size_t i = 0; i < dense.weight.size(); i += 2)
        CHECK(rel_err(dense.dweight[i], fd_grad(dense.weight, i, loss)) < 1e-7);
    for (std::size_t i = 0; i < x.size(); ++i) CHECK(rel_err(dx[i], fd_grad(x, i, loss)) < 1e-7);
}

TEST_CASE("softmax properties") {
    Softmax sm;
    Tensor equal({2, 10, 1, 1}, 1.7);
    const Tensor p = sm.forward(equal, Mode::Infer);
    for (std::size_t i = 0; i < p.size(); ++i) CHECK(p[i] == doctest::Approx(0.1).epsilon(1e-12));

    SplitMix64 rng(12);
    Tensor z = random_tensor({4, 10, 1, 1}, rng, -5.0, 5.0);
    Tensor shifted = z;
    for (int b = 0; b < 4; ++b)
        for (int c = 0; c < 10; ++c) shifted[static_cast<std::size_t>(b) * 10 + c] += 3.25;
    const Tensor pa = sm.forward(z, Mode::Infer);
    const Tensor pb = sm.forward(shifted, Mode::Infer);
    for (std::size_t i = 0; i < pa.size(); ++i) CHECK(std::abs(pa[i] - pb[i]) < 1e-12);
    for (int b = 0; b < 4; ++b) {
        double sum = 0.0;
        for (int c = 0; c < 10; ++c) sum += pa[static_cast<std::size_t>(b) * 10 + c];
        CHECK(std::abs(sum - 1.0) < 1e-12);
    }
}

TEST_CASE("sparse cross-entropy values") {
    // Perfect prediction: loss 0.
    Tensor perfect({2, 10, 1, 1});
    perfect[3] = 1.0;
    perfect[10 + 7] = 1.0;
    CHECK(sparse_ce_loss(perfect, {3, 7}).loss == doctest::Approx(0.0).epsilon(1e-12));

    // Uniform predictions: ln 10.
    Tensor uniform({4, 10, 1, 1}, 0.1);
    CHECK(sparse_ce_loss(uniform, {0, 3, 5, 9}).loss ==
          doctest::Approx(std::log(10.0)).epsilon(1e-12));

    // Batch of 2 with true-class probabilities 0.5 and 0.25.
    Tensor probs({2, 10, 1, 1}, 0.5 / 9.0);
    probs[0] = 0.5;
    for (int c = 1; c < 10; ++c) probs[10 + c] = 0.75 / 9.0;
    probs[10] = 0.25;
    CHECK(sparse_ce_loss(probs, {0, 0}).loss ==
          doctest::Approx(-(std::log(0.5) + std::log(0.25)) / 2).epsilon(1e-9));

    // Errors: label range and unnormalized rows.
    CHECK_THROWS_AS(sparse_ce_loss(uniform, {0, 3, 5, 10}), std::invalid_argument);
    Tensor bad({1, 10, 1, 1}, 0.3);
    CHECK_THROWS_AS(sparse_ce_loss(bad, {0}), std::invalid_argument);

    // Fused gradient equals (p - onehot)/N.
    const LossResult lr = sparse_ce_loss(uniform, {0, 3, 5, 9});
    CHECK(lr.dlogits[0] == doctest::Approx((0.1 - 1.0) / 4));
    CHECK(lr.dlogits[1] == doctest::Approx(0.1 / 4));
}

TEST_CASE("adam first step magnitude and zero-grad fixpoint") {
    Tensor param({1});
    Tensor grad({1});
    param[0] = 1.0;
    grad[0] = 0.5;
    std::vector<ParamRef> refs = {{"p", &param, &grad}};
    Adam adam(1e-3);
    adam.reset(refs);
    adam.step(refs);
    // First Adam step is ~ lr * sign(g).
    CHECK(std::abs((1.0 - param[0]) - 1e-3) < 1e-6);

    // Zero gradient from the start: parameters never move.
    Tensor p2({3}, 0.7);
    Tensor g2({3});
    std::vector<ParamRef> refs2 = {{"p2", &p2, &g2}};
    Adam idle(1e-3);
    idle.reset(refs2);
    for (int i = 0; i < 10; ++i) idle.step(refs2);
    for (std::size_t i = 0; i < p2.size(); ++i) CHECK(p2[i] == 0.7);
}

TEST_CASE("adam drives a quadratic toward zero") {
    Tensor param({1});
    Tensor grad({1});
    param[0] = 1.0;
    std::vector<ParamRef> refs = {{"x", &param, &grad}};
    Adam adam(1e-1);
    adam.reset(refs);
    double max_after_burnin = 0.0;
    for (int t = 0; t < 100; ++t) {
        grad[0] = 2.0 * param[0];
        adam.step(refs);
        if (t >= 60) max_after_burnin = std::max(max_after_burnin, std::abs(param[0]));
    }
    CHECK(max_after_burnin < 0.1);
}

TEST_CASE("adam aborts on non-finite gradients") {
    Tensor param({1});
    Tensor grad({1});
    grad[0] = std::nan("");
    std::vector<ParamRef> refs = {{"p", &param, &grad}};
    Adam adam;
    adam.reset(refs);
    CHECK_THROWS_AS(adam.step(refs), std::runtime_error);
}

TEST_CASE("default model accepts every paper resolution") {
    Model model = Model::from_config(Model::default_architecture(), 42);
    for (int n : {25, 50, 100, 150}) {
        const Tensor probs = model.forward(Tensor({2, 1, n, n}, 0.5), Mode::Infer);
        REQUIRE(probs.shape() == std::vector<int>{2, 10, 1, 1});
        double sum = 0.0;
        for (int c = 0; c < 10; ++c) sum += probs[c];
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("architecture config round trip") {
    Model model = Model::from_config(Model::default_architecture(), 1);
    std::string rebuilt;
    for (std::size_t i = 0; i < model.layer_count(); ++i)
        rebuilt += model.layer(i).describe() + "\n";
    Model again = Model::from_config(rebuilt, 1);
    CHECK(again.layer_count() == model.layer_count());
    CHECK(again.parameter_count() == model.parameter_count());
    CHECK_THROWS_AS(Model::from_config("frobnicate units=3\n", 1), std::invalid_argument);
    CHECK_THROWS_AS(Model::from_config("", 1), std::invalid_argument);
}

TEST_CASE("gradient_check: linear model is exact, corrupted conv fails") {
    SplitMix64 rng(13);
    // Single dense model on a 6-feature input: loss is smooth, error tiny.
    Model linear = Model::from_config("dense units=10\nsoftmax\n", 3, 6);
    Tensor x({4, 6, 1, 1});
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = rng.next_double(0.2, 1.0);
    const auto report = gradient_check(linear, x, {0, 1, 2, 3}, 1e-5, 1e-4, 0);
    CHECK(report.passed);
    CHECK(report.max_rel_error < 1e-7);

    const std::string conv_arch =
        "conv out=2 k=3 stride=1 pad=same\nrelu\nglobalavgpool\ndense units=10\nsoftmax\n";
    Model convnet = Model::from_config(conv_arch, 5, 1);
    Tensor img({4, 1, 8, 8});
    for (std::size_t i = 0; i < img.size(); ++i) img[i] = rng.next_double(0.1, 1.0);
    auto good = gradient_check(convnet, img, {1, 2, 3, 4}, 1e-5, 1e-4, 0);
    CHECK(good.passed);

    // Negative control: a conv whose backward scales its weight gradient must
    // be flagged.
    struct BrokenConv : Conv2D {
        using Conv2D::Conv2D;
        Tensor backward(const Tensor& up) override {
            Tensor dx = Conv2D::backward(up);
            for (std::size_t i = 0; i < dweight.size(); ++i) dweight[i] *= 1.5;
            return dx;
        }
    };
    Model corrupted = Model::from_config(conv_arch, 5, 1);
    auto broken = std::make_unique<BrokenConv>(2, 3, 1, Padding::Same);
    SplitMix64 init_rng(5);
    broken->build(1, init_rng);
    broken->weight = dynamic_cast<Conv2D&>(corrupted.layer(0)).weight;
    broken->bias = dynamic_cast<Conv2D&>(corrupted.layer(0)).bias;
    corrupted.replace_layer(0, std::move(broken));
    auto bad = gradient_check(corrupted, img, {1, 2, 3, 4}, 1e-5, 1e-4, 0);
    CHECK(!bad.passed);
}

TEST_CASE("checkpoint round trip preserves weights, stats and adam state") {
    Model model = Model::from_config(Model::default_architecture(), 99);
    // Perturb running stats so they are distinguishable from defaults.
    for (const ParamRef& p : model.state())
        for (std::size_t i = 0; i < p.value->size(); ++i) (*p.value)[i] = 0.25 + 0.01 * i;

    AdamSnapshot adam;
    adam.steps = 17;
    adam.lr = 5e-4;
    adam.m.assign(model.parameter_count(), 0.5);
    adam.v.assign(model.parameter_count(), 0.25);

    const auto path = std::filesystem::temp_directory_path() / "cacnn_test_ckpt.camw";
    CheckpointMeta meta{3, 1234, 0xDEADBEEF};
    save_checkpoint(model, path.string(), meta, &adam);
    LoadedCheckpoint loaded = load_checkpoint(path.string());

    CHECK(loaded.meta.epoch == 3);
    CHECK(loaded.meta.seed == 1234);
    CHECK(loaded.meta.dataset_manifest_hash == 0xDEADBEEF);
    CHECK(loaded.model.architecture() == model.architecture());
    REQUIRE(loaded.adam.has_value());
    CHECK(loaded.adam->steps == 17);
    CHECK(loaded.adam->m.size() == adam.m.size());

    // Bit-identical inference.
    const Tensor x({2, 1, 25, 25}, 0.5);
    CHECK(model.forward(x, Mode::Infer) == loaded.model.forward(x, Mode::Infer));
    std::filesystem::remove(path);
}

TEST_CASE("untrained loss near ln 10 on balanced data") {
    Model model = Model::from_config(Model::default_architecture(), 7);
    SplitMix64 rng(14);
    Tensor x({20, 1, 25, 25});
    std::vector<int> labels;
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = rng.next_below(2);
    for (int b = 0; b < 20; ++b) labels.push_back(b % 10);
    const Tensor probs = model.forward(x, Mode::Infer);
    const double loss = sparse_ce_loss(probs, labels).loss;
    CHECK(loss > std::log(10.0) - 0.2);
    CHECK(loss < std::log(10.0) + 0.2);
}
