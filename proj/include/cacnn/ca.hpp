#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "cacnn/lattice.hpp"
#include "cacnn/rng.hpp"

namespace cacnn {

struct SimConfig {
    int n = 0;               // resolution, cells per side
    double porosity = 0.0;   // void fraction in [0, 1]
    double sigma = 0.0;      // jump parameter, >= 0
    int iterations = 0;
    std::uint64_t seed = 0;

    void validate() const;  // throws std::invalid_argument
};

struct Offset {
    int dx = 0;
    int dy = 0;
    bool operator==(const Offset&) const = default;
};

// Face-connected component of solid cells (4-connectivity, periodic).
struct Agglomerate {
    std::vector<std::size_t> cells;  // lattice indices
    std::size_t size() const { return cells.size(); }
};

// All displacements (dx, dy) with |dx|+|dy| <= r, in a fixed lexicographic
// order ((dy, dx) ascending). Cardinality is 2r(r+1)+1.
std::vector<Offset> vnn_offsets(int range);

// Movement range of a single cell: max{1, floor(sigma)}.
int cell_range(double sigma);

// Movement range of an agglomerate of size mu in dimension d:
// max{1, floor(sigma / mu^(1/d))}.
int agg_range(double sigma, std::size_t mu, int d = 2);

// Connected components of solid cells, 4-connectivity with periodic wrap.
// Components partition the solid cells; order is deterministic (by smallest
// contained index).
std::vector<Agglomerate> find_agglomerates(const Lattice& lattice);

// Number of distinct solid cells face-adjacent to the placed set, the set's
// own cells excluded. Throws std::invalid_argument if a placement cell
// overlaps a foreign solid.
int attractivity(const Lattice& lattice, const std::vector<std::size_t>& cells);

// Exactly round((1 - porosity) * n^2) solid cells, placed uniformly at random.
Lattice init_lattice(const SimConfig& config, SplitMix64& rng);

// One CA iteration: agglomerates are visited in shuffled order; each moves
// rigidly to a uniformly chosen displacement of maximal attractivity within
// vnn_offsets(agg_range(sigma, mu)). Solid count is preserved.
void step(Lattice& lattice, double sigma, SplitMix64& rng);

// init_lattice followed by `iterations` steps, all randomness from one
// stream seeded with config.seed.
Lattice simulate(const SimConfig& config);

}  // namespace cacnn
