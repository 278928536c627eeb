#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cacnn/adam.hpp"
#include "cacnn/dataset.hpp"
#include "cacnn/metrics.hpp"
#include "cacnn/model.hpp"

namespace cacnn {

struct TrainConfig {
    int epochs = 20;
    int batch_size = 64;
    double learning_rate = 1e-3;
    std::uint64_t seed = 0;
    bool shuffle = true;

    void validate() const;  // epochs >= 1, batch_size >= 2
};

struct Batch {
    Tensor input;  // (B x 1 x N x N)
    std::vector<int> labels;
};

// Groups samples by resolution so every batch is rectangular, shuffles within
// each group and the batch order across groups with the seed, and keeps the
// final short batch of each group. With shuffle = false the dataset order is
// preserved (still grouped by resolution).
std::vector<Batch> make_batches(const DatasetFile& dataset, int batch_size, std::uint64_t seed,
                                bool shuffle = true);

struct EpochStats {
    int epoch = 0;
    double train_loss = 0.0;
    double val_top1 = 0.0;
};

struct TrainResult {
    std::vector<EpochStats> history;
    Adam optimizer{};

    std::string history_csv() const;  // epoch,train_loss,val_top1
};

// epochs x batches of forward / loss / backward / adam. Deterministic given
// the seed. Aborts with std::runtime_error naming the batch index when the
// loss turns non-finite.
TrainResult train(Model& model, const DatasetFile& train_set, const DatasetFile& val_set,
                  const TrainConfig& config);

// Replaces every batchnorm layer's running statistics with exact population
// statistics of `dataset` under the current weights (one forward sweep in
// train mode). With few optimizer steps per epoch the EMA lags the weights
// badly enough to dominate inference error; train() calls this at the end so
// inference statistics match the final weights.
void recalibrate_batchnorm(Model& model, const DatasetFile& dataset, int batch_size = 64);

// Whole-dataset inference-mode evaluation.
Metrics evaluate(Model& model, const DatasetFile& dataset, int batch_size = 64);

struct InferenceTiming {
    std::uint64_t samples = 0;
    double seconds = 0.0;
    double samples_per_second = 0.0;
    double seconds_per_sample = 0.0;
    std::string hardware;

    std::string to_text() const;
};

// Timed inference pass. Reported only, never asserted against anything.
InferenceTiming measure_inference(Model& model, const DatasetFile& dataset, int batch_size = 64);

}  // namespace cacnn
