#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cacnn/adam.hpp"
#include "cacnn/model.hpp"

namespace cacnn {

struct CheckpointMeta {
    int epoch = 0;
    std::uint64_t seed = 0;
    std::uint64_t dataset_manifest_hash = 0;
};

struct AdamSnapshot {
    std::uint64_t steps = 0;
    double lr = 1e-3;
    std::vector<double> m, v;
};

// Model checkpoint container: magic "CAMW", version u16, length-prefixed
// architecture config text, metadata, then every parameter and running-stat
// tensor (name, shape, 64-bit little-endian values). Adam state is optional.
void save_checkpoint(Model& model, const std::string& path, const CheckpointMeta& meta,
                     const AdamSnapshot* adam = nullptr);

struct LoadedCheckpoint {
    Model model;
    CheckpointMeta meta;
    std::optional<AdamSnapshot> adam;
};

LoadedCheckpoint load_checkpoint(const std::string& path);

}  // namespace cacnn
