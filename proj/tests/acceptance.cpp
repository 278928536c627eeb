// End-to-end acceptance suite. Prints one PASS/FAIL line per criterion and
// exits nonzero if any criterion fails. The training criteria run the full
// desk-scale protocol (100 samples per class, 20 epochs) and take a while on
// one core; progress lines go to stdout as phases complete.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "cacnn/ca.hpp"
#include "cacnn/dataset.hpp"
#include "cacnn/experiment.hpp"
#include "cacnn/gradcheck.hpp"
#include "cacnn/loss.hpp"
#include "cacnn/train.hpp"
#include "oracles.hpp"

using namespace cacnn;
using Clock = std::chrono::steady_clock;

namespace {

int g_failures = 0;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

void report(int id, bool pass, const std::string& detail) {
    std::printf("criterion %2d: %s  %s\n", id, pass ? "PASS" : "FAIL", detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4f", v);
    return buf;
}

void fill_uniform(Tensor& t, SplitMix64& rng, double lo = -1.0, double hi = 1.0) {
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = rng.next_double(lo, hi);
}

// ---------------------------------------------------------------------------
// Shared experiment scaffolding.

constexpr int kSamplesPerClass = 100;
constexpr std::uint64_t kTrainSeedBase = 1001;  // training pools
constexpr std::uint64_t kTestSeedBase = 2002;   // held-out test pools
constexpr std::uint64_t kModelSeed = 7;

DatasetSpec one_condition_spec(int n, int t, std::uint64_t base) {
    DatasetSpec spec;
    spec.porosity = 0.7;
    spec.domain_sizes = {n};
    spec.iteration_counts = {t};
    for (int c = 1; c <= 10; ++c) spec.sigma_classes.push_back(c);
    spec.samples_per_class = kSamplesPerClass;
    spec.base_seed = mix_seed(base, {static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(t)});
    return spec;
}

struct Condition {
    std::string name;
    int n = 0, t = 0;
    DatasetFile train, val, test;
};

// Training pool is cut 90/10 into train/val per class (generation order is
// class-major, kSamplesPerClass each); the test set is a separate pool drawn
// from a different base seed.
Condition make_condition(const std::string& name, int n, int t) {
    const auto t0 = Clock::now();
    Condition cond{name, n, t, {}, {}, {}};
    const DatasetFile pool = generate(one_condition_spec(n, t, kTrainSeedBase));
    for (std::size_t i = 0; i < pool.samples.size(); ++i) {
        if (i % kSamplesPerClass < kSamplesPerClass * 9 / 10)
            cond.train.samples.push_back(pool.samples[i]);
        else
            cond.val.samples.push_back(pool.samples[i]);
    }
    cond.test = generate(one_condition_spec(n, t, kTestSeedBase));
    std::printf("  [data] %s: %zu train / %zu val / %zu test (%.1f s)\n", name.c_str(),
                cond.train.samples.size(), cond.val.samples.size(), cond.test.samples.size(),
                seconds_since(t0));
    std::fflush(stdout);
    return cond;
}

TrainConfig protocol_config() {
    TrainConfig cfg;
    cfg.epochs = 20;
    cfg.batch_size = 64;
    cfg.learning_rate = 1e-3;
    cfg.seed = kModelSeed;
    return cfg;
}

struct RunOutcome {
    Model model;
    TrainResult result;
    Metrics metrics;
};

RunOutcome run_condition(const Condition& cond) {
    const auto t0 = Clock::now();
    RunOutcome out;
    out.model = Model::from_config(Model::default_architecture(), kModelSeed);
    out.result = train(out.model, cond.train, cond.val, protocol_config());
    out.metrics = evaluate(out.model, cond.test);
    std::printf("  [train] %s: test top1=%.4f top3=%.4f (%.1f s)\n", cond.name.c_str(),
                out.metrics.top1, out.metrics.top3, seconds_since(t0));
    std::fflush(stdout);
    return out;
}

std::string metrics_fingerprint(const Condition& cond, const RunOutcome& run) {
    std::ostringstream out;
    out << Metrics::csv_header() << run.metrics.csv_row(cond.name) << run.metrics.confusion_csv()
        << run.result.history_csv();
    return out.str();
}

bool first_epochs_decrease(const std::vector<EpochStats>& history, int k = 3) {
    if (static_cast<int>(history.size()) < k) return false;
    for (int i = 1; i < k; ++i)
        if (!(history[i].train_loss < history[i - 1].train_loss)) return false;
    return true;
}

// ---------------------------------------------------------------------------
// Criterion 1: gradient fidelity on the default architecture.

void criterion_1() {
    const auto t0 = Clock::now();
    Model model = Model::from_config(Model::default_architecture(), 1);
    SplitMix64 rng(99);
    Tensor input({4, 1, 25, 25});
    for (std::size_t i = 0; i < input.size(); ++i) input[i] = rng.next_below(2);
    const auto rep = gradient_check(model, input, {0, 1, 2, 3}, 1e-5, 1e-4, 40, 3);
    const double secs = seconds_since(t0);
    report(1, rep.passed && rep.max_rel_error < 1e-4 && secs < 60.0,
           "gradient check max rel error " + fmt(rep.max_rel_error) + " (tol 1e-4), " + fmt(secs) +
               " s (limit 60)");
}

// ---------------------------------------------------------------------------
// Criterion 2: layer forwards vs naive oracles; components vs flood fill.

double max_abs_diff(const Tensor& a, const Tensor& b) {
    if (!a.same_shape(b)) return 1e300;
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
    return worst;
}

// Canonical component id per cell: the smallest lattice index in its component.
std::vector<long> canonical_components(const Lattice& lat, const std::vector<Agglomerate>& aggs) {
    std::vector<long> out(lat.size(), -1);
    for (const Agglomerate& a : aggs) {
        std::size_t lead = a.cells.front();
        for (std::size_t c : a.cells) lead = std::min(lead, c);
        for (std::size_t c : a.cells) out[c] = static_cast<long>(lead);
    }
    return out;
}

std::vector<long> canonical_components(const Lattice& lat, const std::vector<int>& comp_ids) {
    std::vector<long> lead;
    std::vector<long> out(lat.size(), -1);
    for (std::size_t i = 0; i < lat.size(); ++i) {
        const int id = comp_ids[i];
        if (id < 0) continue;
        if (static_cast<std::size_t>(id) >= lead.size()) lead.resize(id + 1, -1);
        if (lead[id] < 0) lead[id] = static_cast<long>(i);
    }
    for (std::size_t i = 0; i < lat.size(); ++i)
        out[i] = comp_ids[i] < 0 ? -1 : lead[comp_ids[i]];
    return out;
}

void criterion_2() {
    SplitMix64 rng(4242);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const int B = 2 + static_cast<int>(rng.next_below(3));
        const int C = 1 + static_cast<int>(rng.next_below(4));
        const int H = 4 + static_cast<int>(rng.next_below(9));
        const int W = 4 + static_cast<int>(rng.next_below(9));
        Tensor x({B, C, H, W});
        fill_uniform(x, rng);

        const int oc = 1 + static_cast<int>(rng.next_below(5));
        const int k = 1 + 2 * static_cast<int>(rng.next_below(2));  // 1 or 3
        const bool same = rng.next_below(2) == 0;
        Conv2D conv(oc, k, 1, same ? Padding::Same : Padding::Valid);
        conv.build(C, rng);
        fill_uniform(conv.weight, rng);
        fill_uniform(conv.bias, rng);
        worst = std::max(worst, max_abs_diff(conv.forward(x, Mode::Infer),
                                             oracle::conv2d_naive(x, conv.weight, conv.bias, 1,
                                                                  same ? (k - 1) / 2 : 0)));

        BatchNorm bn;
        bn.build(C, rng);
        fill_uniform(bn.gamma, rng, 0.5, 1.5);
        fill_uniform(bn.beta, rng);
        worst = std::max(worst, max_abs_diff(bn.forward(x, Mode::Train),
                                             oracle::batchnorm_naive(x, bn.gamma, bn.beta, 1e-5)));

        MaxPool pool(2, 2);
        pool.build(C, rng);
        worst = std::max(worst, max_abs_diff(pool.forward(x, Mode::Infer),
                                             oracle::maxpool_naive(x, 2, 2)));

        Tensor flat({B, C * H * W, 1, 1});
        for (std::size_t i = 0; i < flat.size(); ++i) flat[i] = x[i];
        Dense dense(1 + static_cast<int>(rng.next_below(8)));
        dense.build(C * H * W, rng);
        fill_uniform(dense.weight, rng);
        fill_uniform(dense.bias, rng);
        worst = std::max(worst, max_abs_diff(dense.forward(flat, Mode::Infer),
                                             oracle::dense_naive(flat, dense.weight, dense.bias)));
    }
    const bool layers_ok = worst <= 1e-10;

    std::size_t component_mismatches = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const int n = 3 + static_cast<int>(rng.next_below(18));  // up to 20
        Lattice lat(n);
        const double density = rng.next_double(0.05, 0.95);
        for (std::size_t i = 0; i < lat.size(); ++i) lat[i] = rng.next_double() < density;
        if (canonical_components(lat, find_agglomerates(lat)) !=
            canonical_components(lat, oracle::flood_fill_components(lat)))
            ++component_mismatches;
    }
    report(2, layers_ok && component_mismatches == 0,
           "layer-vs-oracle max abs diff " + fmt(worst) + " (tol 1e-10) over 100 shapes; " +
               std::to_string(component_mismatches) + "/1000 component mismatches");
}

// ---------------------------------------------------------------------------
// Criterion 3: conservation over 10,000 randomized steps + bit-exact reruns.

void criterion_3() {
    SplitMix64 meta(777);
    std::size_t conservation_violations = 0, determinism_violations = 0, steps_run = 0;
    for (int trial = 0; trial < 200; ++trial) {
        SimConfig cfg;
        cfg.n = 4 + static_cast<int>(meta.next_below(17));
        cfg.porosity = meta.next_double(0.1, 0.9);
        cfg.sigma = meta.next_double(0.0, 10.0);
        cfg.iterations = 0;
        cfg.seed = meta.next();

        SplitMix64 rng(cfg.seed);
        Lattice lat = init_lattice(cfg, rng);
        const std::size_t solids = lat.solid_count();
        for (int s = 0; s < 50; ++s, ++steps_run) {
            step(lat, cfg.sigma, rng);
            if (lat.solid_count() != solids) ++conservation_violations;
        }

        if (trial % 10 == 0) {
            SplitMix64 rng2(cfg.seed);
            Lattice lat2 = init_lattice(cfg, rng2);
            for (int s = 0; s < 50; ++s) step(lat2, cfg.sigma, rng2);
            if (!(lat2 == lat)) ++determinism_violations;
        }
    }
    report(3, conservation_violations == 0 && determinism_violations == 0,
           std::to_string(steps_run) + " steps: " + std::to_string(conservation_violations) +
               " conservation violations, " + std::to_string(determinism_violations) +
               " rerun mismatches");
}

}  // namespace

int main() {
    const auto suite_t0 = Clock::now();
    std::printf("acceptance suite starting\n");
    std::fflush(stdout);

    criterion_1();
    criterion_2();
    criterion_3();

    // ---- shared data and training runs for criteria 4-10 ----
    const Condition c_n50_t0 = make_condition("n50_t0", 50, 0);
    const Condition c_n25_t25 = make_condition("n25_t25", 25, 25);
    const Condition c_n50_t25 = make_condition("n50_t25", 50, 25);
    const Condition c_n100_t5 = make_condition("n100_t5", 100, 5);
    const Condition c_n100_t25 = make_condition("n100_t25", 100, 25);
    const Condition c_n100_t50 = make_condition("n100_t50", 100, 50);

    const RunOutcome r_n50_t0 = run_condition(c_n50_t0);
    const RunOutcome r_n25_t25 = run_condition(c_n25_t25);
    const RunOutcome r_n50_t25 = run_condition(c_n50_t25);
    const RunOutcome r_n100_t5 = run_condition(c_n100_t5);
    const RunOutcome r_n100_t25 = run_condition(c_n100_t25);
    const RunOutcome r_n100_t50 = run_condition(c_n100_t50);

    // Criterion 4: chance floor at T=0.
    report(4, r_n50_t0.metrics.top1 >= 0.05 && r_n50_t0.metrics.top1 <= 0.18,
           "n50_t0 test top1 " + fmt(r_n50_t0.metrics.top1) + " in [0.05, 0.18]");

    // Criterion 5: domain-size monotonicity at T=25.
    {
        const double lo = r_n25_t25.metrics.top1, hi = r_n100_t25.metrics.top1;
        report(5, hi - lo >= 0.05 && lo > 0.25 && hi > 0.25,
               "top1 n25=" + fmt(lo) + " n100=" + fmt(hi) + ", gap " + fmt(hi - lo) +
                   " (need >= 0.05, both > 0.25)");
    }

    // Criterion 6: iteration flattening at N=100.
    {
        const double t5 = r_n100_t5.metrics.top1;
        const double t25 = r_n100_t25.metrics.top1;
        const double t50 = r_n100_t50.metrics.top1;
        report(6, t25 - t5 >= 0.05 && std::abs(t50 - t25) <= 0.05,
               "top1 t5=" + fmt(t5) + " t25=" + fmt(t25) + " t50=" + fmt(t50) +
                   " (need t25-t5 >= 0.05, |t50-t25| <= 0.05)");
    }

    // Criterion 7: low classes easier than high classes in the n100_t25 run.
    {
        double low = 0.0, high = 0.0;
        for (int c = 0; c <= 3; ++c) low += r_n100_t25.metrics.per_class_recall[c] / 4.0;
        for (int c = 7; c <= 9; ++c) high += r_n100_t25.metrics.per_class_recall[c] / 3.0;
        report(7, low - high >= 0.10,
               "mean recall classes 0-3 " + fmt(low) + " vs 7-9 " + fmt(high) + ", gap " +
                   fmt(low - high) + " (need >= 0.10)");
    }

    // Criterion 8: combined multi-resolution model vs best single model,
    // all evaluated on the union of the three T=25 test sets.
    {
        const auto t0 = Clock::now();
        DatasetFile mixed_test, mixed_train, mixed_val;
        for (const Condition* c : {&c_n25_t25, &c_n50_t25, &c_n100_t25}) {
            mixed_test.samples.insert(mixed_test.samples.end(), c->test.samples.begin(),
                                      c->test.samples.end());
            mixed_train.samples.insert(mixed_train.samples.end(), c->train.samples.begin(),
                                       c->train.samples.end());
            mixed_val.samples.insert(mixed_val.samples.end(), c->val.samples.begin(),
                                     c->val.samples.end());
        }
        Model combined = Model::from_config(Model::default_architecture(), kModelSeed);
        train(combined, mixed_train, mixed_val, protocol_config());
        const double combined_top1 = evaluate(combined, mixed_test).top1;
        double best_single = 0.0;
        for (RunOutcome const* r : {&r_n25_t25, &r_n50_t25, &r_n100_t25})
            best_single =
                std::max(best_single, evaluate(const_cast<Model&>(r->model), mixed_test).top1);
        std::printf("  [train] combined: mixed-test top1=%.4f (%.1f s)\n", combined_top1,
                    seconds_since(t0));
        report(8, combined_top1 >= best_single - 0.02,
               "combined top1 " + fmt(combined_top1) + " vs best single " + fmt(best_single) +
                   " on mixed test (tolerance -0.02)");
    }

    // Criterion 9: untrained loss near ln 10; early-epoch loss decrease.
    {
        Model fresh = Model::from_config(Model::default_architecture(), 42);
        double loss_sum = 0.0;
        std::size_t total = 0;
        for (const Batch& b : make_batches(c_n50_t0.test, 64, 0, false)) {
            const Tensor probs = fresh.forward(b.input, Mode::Infer);
            loss_sum += sparse_ce_loss(probs, b.labels).loss * b.labels.size();
            total += b.labels.size();
        }
        const double loss = loss_sum / total;
        const bool near_ln10 = std::abs(loss - std::log(10.0)) <= 0.2;
        const bool decreasing = first_epochs_decrease(r_n50_t0.result.history) &&
                                first_epochs_decrease(r_n25_t25.result.history) &&
                                first_epochs_decrease(r_n100_t25.result.history) &&
                                first_epochs_decrease(r_n100_t5.result.history) &&
                                first_epochs_decrease(r_n100_t50.result.history);
        report(9, near_ln10 && decreasing,
               "untrained loss " + fmt(loss) + " (ln10 +- 0.2); first-3-epoch decrease " +
                   (decreasing ? "holds" : "violated") + " across runs 4-6");
    }

    // Criterion 10: rerun the criterion-4 pipeline from scratch; metrics and
    // history fingerprints must hash identically.
    {
        const std::string first = metrics_fingerprint(c_n50_t0, r_n50_t0);
        const Condition again = make_condition("n50_t0", 50, 0);
        const RunOutcome rerun = run_condition(again);
        const std::string second = metrics_fingerprint(again, rerun);
        report(10, fnv1a64(first) == fnv1a64(second),
               "criterion-4 pipeline rerun fingerprints " +
                   std::string(fnv1a64(first) == fnv1a64(second) ? "match" : "differ") +
                   " (fnv1a64 " + std::to_string(fnv1a64(first)) + ")");
    }

    std::printf("acceptance suite finished in %.1f s: %d criterion(s) failed\n",
                seconds_since(suite_t0), g_failures);
    return g_failures == 0 ? 0 : 1;
}
