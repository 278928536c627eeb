#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "cacnn/lattice.hpp"

namespace cacnn {

// Class index 0..9 maps to sigma = index + 1.
inline double sigma_for_class(int class_index) { return class_index + 1.0; }

struct SampleMeta {
    int n = 0;
    int iterations = 0;
    double porosity = 0.0;
    std::uint64_t seed = 0;  // 0 when unknown (e.g. after reading from disk)
};

struct Sample {
    Lattice grid;
    std::uint8_t label = 0;
    SampleMeta meta;
};

struct DatasetSpec {
    double porosity = 0.7;
    std::vector<int> domain_sizes;
    std::vector<int> iteration_counts;
    std::vector<double> sigma_classes;  // class label = position in this list
    int samples_per_class = 0;
    std::uint64_t base_seed = 0;

    static DatasetSpec paper_group(int group, double scale = 1.0, std::uint64_t base_seed = 0);
};

class DatasetError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};
class BadMagicError : public DatasetError {
    using DatasetError::DatasetError;
};
class UnsupportedVersionError : public DatasetError {
    using DatasetError::DatasetError;
};
class TruncatedFileError : public DatasetError {
    using DatasetError::DatasetError;
};
class EmptySpecError : public DatasetError {
    using DatasetError::DatasetError;
};

// In-memory sample collection; `write`/`read` map it onto the on-disk
// container: magic "CADS", version u16, count u32, then per sample
// height u16, width u16, label u8, iterations u16 and row-major cells packed
// 8 per byte LSB-first, each row padded to a whole byte. Little-endian.
struct DatasetFile {
    std::vector<Sample> samples;

    static constexpr std::uint16_t kFormatVersion = 1;
};

// Runs samples_per_class simulations for every (N, T, class) combination.
// Sample seeds are mix_seed(base_seed, {N, T, class, index}); output order is
// (N, T, class, index) lexicographic. Throws EmptySpecError when the spec
// produces no samples.
DatasetFile generate(const DatasetSpec& spec);

void write(const DatasetFile& file, const std::string& path);
DatasetFile read(const std::string& path);

struct SplitResult {
    DatasetFile train, val, test;
    std::vector<std::string> warnings;
};

// Stratified split by (label, n, iterations). Each stratum is shuffled with
// the seed and cut by the fractions; strata smaller than 3 go wholly to train
// with a warning. Fractions must be positive and sum to 1 (1e-9).
SplitResult split(const DatasetFile& file, double train_frac, double val_frac, double test_frac,
                  std::uint64_t seed);

// One PGM per sample, named {index}_c{class}_n{N}_t{T}.pgm. Returns the
// number of files written.
std::size_t export_images(const DatasetFile& file, const std::string& dir);

// Plain-text key=value sidecar describing a generation spec.
std::string manifest_text(const DatasetSpec& spec);
void write_manifest(const DatasetSpec& spec, const std::string& path);

// FNV-1a 64-bit, used to fingerprint manifests and reports.
std::uint64_t fnv1a64(const std::string& text);

}  // namespace cacnn
