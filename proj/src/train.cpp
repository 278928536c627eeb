#include "cacnn/train.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <thread>

#include "cacnn/loss.hpp"

namespace cacnn {

void TrainConfig::validate() const {
    if (epochs < 1) throw std::invalid_argument("train: epochs must be >= 1");
    if (batch_size < 2) throw std::invalid_argument("train: batch_size must be >= 2 (batchnorm)");
    if (!(learning_rate > 0.0)) throw std::invalid_argument("train: learning rate must be > 0");
}

std::vector<Batch> make_batches(const DatasetFile& dataset, int batch_size, std::uint64_t seed,
                                bool shuffle) {
    if (dataset.samples.empty()) throw std::invalid_argument("make_batches: empty dataset");
    if (batch_size < 1) throw std::invalid_argument("make_batches: batch_size must be >= 1");

    std::map<int, std::vector<std::uint32_t>> by_resolution;
    for (std::uint32_t i = 0; i < dataset.samples.size(); ++i)
        by_resolution[dataset.samples[i].grid.n()].push_back(i);

    SplitMix64 rng(mix_seed(seed, {0x62617463ULL}));
    std::vector<std::vector<std::uint32_t>> batch_ids;
    for (auto& [n, ids] : by_resolution) {
        if (shuffle) rng.shuffle(ids.data(), ids.size());
        for (std::size_t start = 0; start < ids.size(); start += batch_size) {
            const std::size_t end = std::min(ids.size(), start + batch_size);
            batch_ids.emplace_back(ids.begin() + start, ids.begin() + end);
        }
    }
    if (shuffle) rng.shuffle(batch_ids.data(), batch_ids.size());

    std::vector<Batch> out;
    out.reserve(batch_ids.size());
    for (const auto& ids : batch_ids) {
        const int n = dataset.samples[ids[0]].grid.n();
        Batch batch;
        batch.input = Tensor({static_cast<int>(ids.size()), 1, n, n});
        batch.labels.reserve(ids.size());
        std::size_t off = 0;
        for (std::uint32_t id : ids) {
            const Sample& s = dataset.samples[id];
            for (std::size_t i = 0; i < s.grid.size(); ++i)
                batch.input[off + i] = static_cast<double>(s.grid[i]);
            off += s.grid.size();
            batch.labels.push_back(s.label);
        }
        out.push_back(std::move(batch));
    }
    return out;
}

TrainResult train(Model& model, const DatasetFile& train_set, const DatasetFile& val_set,
                  const TrainConfig& config) {
    config.validate();
    TrainResult result;
    result.optimizer = Adam(config.learning_rate);
    result.optimizer.reset(model.params());

    for (int epoch = 1; epoch <= config.epochs; ++epoch) {
        const auto batches = make_batches(train_set, config.batch_size,
                                          mix_seed(config.seed, {static_cast<std::uint64_t>(epoch)}),
                                          config.shuffle);
        double loss_sum = 0.0;
        std::uint64_t seen = 0;
        for (std::size_t bi = 0; bi < batches.size(); ++bi) {
            const Batch& batch = batches[bi];
            model.zero_grads();
            const Tensor logits = model.forward_logits(batch.input, Mode::Train);
            const LossResult lr = sparse_ce_loss(softmax(logits), batch.labels);
            if (!std::isfinite(lr.loss))
                throw std::runtime_error("train: non-finite loss at epoch " +
                                         std::to_string(epoch) + ", batch " + std::to_string(bi));
            model.backward_from_logits(lr.dlogits);
            const auto params = model.params();
            result.optimizer.step(params);
            loss_sum += lr.loss * static_cast<double>(batch.labels.size());
            seen += batch.labels.size();
        }
        EpochStats stats;
        stats.epoch = epoch;
        stats.train_loss = loss_sum / static_cast<double>(seen);
        stats.val_top1 = val_set.samples.empty()
                             ? 0.0
                             : evaluate(model, val_set, config.batch_size).top1;
        result.history.push_back(stats);
    }
    recalibrate_batchnorm(model, train_set, config.batch_size);
    return result;
}

void recalibrate_batchnorm(Model& model, const DatasetFile& dataset, int batch_size) {
    std::vector<BatchNorm*> norms;
    for (std::size_t i = 0; i < model.layer_count(); ++i)
        if (auto* bn = dynamic_cast<BatchNorm*>(&model.layer(i))) norms.push_back(bn);
    if (norms.empty() || dataset.samples.empty()) return;
    for (BatchNorm* bn : norms) bn->begin_stat_capture();
    for (const Batch& batch : make_batches(dataset, batch_size, 0, /*shuffle=*/false)) {
        if (batch.labels.size() < 2) continue;  // train-mode batchnorm needs B >= 2
        model.forward(batch.input, Mode::Train);
    }
    for (BatchNorm* bn : norms) bn->end_stat_capture();
}

std::string TrainResult::history_csv() const {
    std::ostringstream out;
    out << "epoch,train_loss,val_top1\n";
    out << std::setprecision(17);
    for (const EpochStats& e : history)
        out << e.epoch << ',' << e.train_loss << ',' << e.val_top1 << '\n';
    return out.str();
}

Metrics evaluate(Model& model, const DatasetFile& dataset, int batch_size) {
    if (dataset.samples.empty()) throw std::invalid_argument("evaluate: empty dataset");
    MetricsAccumulator acc;
    for (const Batch& batch : make_batches(dataset, batch_size, 0, /*shuffle=*/false)) {
        const Tensor probs = model.forward(batch.input, Mode::Infer);
        acc.add(probs, batch.labels);
    }
    return acc.finalize();
}

namespace {

std::string hardware_descriptor() {
    std::string cpu = "unknown cpu";
    std::ifstream info("/proc/cpuinfo");
    std::string line;
    while (std::getline(info, line)) {
        if (line.rfind("model name", 0) == 0) {
            const auto colon = line.find(':');
            if (colon != std::string::npos) cpu = line.substr(colon + 2);
            break;
        }
    }
    return cpu + " (" + std::to_string(std::thread::hardware_concurrency()) + " hw threads)";
}

}  // namespace

InferenceTiming measure_inference(Model& model, const DatasetFile& dataset, int batch_size) {
    InferenceTiming timing;
    timing.hardware = hardware_descriptor();
    timing.samples = dataset.samples.size();
    if (dataset.samples.empty()) return timing;  // zero-division guarded
    const auto batches = make_batches(dataset, batch_size, 0, /*shuffle=*/false);
    const auto start = std::chrono::steady_clock::now();
    for (const Batch& batch : batches) model.forward(batch.input, Mode::Infer);
    const auto end = std::chrono::steady_clock::now();
    timing.seconds = std::chrono::duration<double>(end - start).count();
    timing.samples_per_second =
        timing.seconds > 0.0 ? static_cast<double>(timing.samples) / timing.seconds : 0.0;
    timing.seconds_per_sample = timing.seconds / static_cast<double>(timing.samples);
    return timing;
}

std::string InferenceTiming::to_text() const {
    std::ostringstream out;
    out << "samples: " << samples << "\n"
        << "total seconds: " << seconds << "\n"
        << "samples/sec: " << samples_per_second << "\n"
        << "seconds/sample: " << seconds_per_sample << "\n"
        << "hardware: " << hardware << "\n";
    return out.str();
}

}  // namespace cacnn
