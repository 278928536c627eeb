#include "cacnn/ca.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace cacnn {

void SimConfig::validate() const {
    if (n < 1) throw std::invalid_argument("SimConfig: n must be >= 1");
    if (!(porosity >= 0.0 && porosity <= 1.0))
        throw std::invalid_argument("SimConfig: porosity must be in [0, 1]");
    if (!(sigma >= 0.0)) throw std::invalid_argument("SimConfig: sigma must be >= 0");
    if (iterations < 0) throw std::invalid_argument("SimConfig: iterations must be >= 0");
}

std::vector<Offset> vnn_offsets(int range) {
    if (range < 0) throw std::invalid_argument("vnn_offsets: range must be >= 0");
    std::vector<Offset> out;
    out.reserve(static_cast<std::size_t>(2 * range * (range + 1) + 1));
    for (int dy = -range; dy <= range; ++dy) {
        const int rem = range - std::abs(dy);
        for (int dx = -rem; dx <= rem; ++dx) out.push_back({dx, dy});
    }
    return out;
}

int cell_range(double sigma) {
    if (!(sigma >= 0.0)) throw std::invalid_argument("cell_range: sigma must be >= 0");
    return std::max(1, static_cast<int>(std::floor(sigma)));
}

int agg_range(double sigma, std::size_t mu, int d) {
    if (!(sigma >= 0.0)) throw std::invalid_argument("agg_range: sigma must be >= 0");
    if (mu < 1) throw std::invalid_argument("agg_range: mu must be >= 1");
    if (d < 1) throw std::invalid_argument("agg_range: d must be >= 1");
    const double root = std::pow(static_cast<double>(mu), 1.0 / d);
    return std::max(1, static_cast<int>(std::floor(sigma / root)));
}

namespace {

struct UnionFind {
    std::vector<std::int32_t> parent;

    explicit UnionFind(std::size_t n) : parent(n) {
        std::iota(parent.begin(), parent.end(), 0);
    }
    std::int32_t find(std::int32_t i) {
        while (parent[i] != i) {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        return i;
    }
    void unite(std::int32_t a, std::int32_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return;
        if (a < b) parent[b] = a; else parent[a] = b;  // smallest index wins
    }
};

}  // namespace

std::vector<Agglomerate> find_agglomerates(const Lattice& lattice) {
    const int n = lattice.n();
    const std::size_t total = lattice.size();
    UnionFind uf(total);
    for (int y = 0; y < n; ++y) {
        const int yr = (y + 1 == n) ? 0 : y + 1;
        for (int x = 0; x < n; ++x) {
            const std::size_t i = static_cast<std::size_t>(y) * n + x;
            if (!lattice[i]) continue;
            const int xr = (x + 1 == n) ? 0 : x + 1;
            const std::size_t right = static_cast<std::size_t>(y) * n + xr;
            const std::size_t down = static_cast<std::size_t>(yr) * n + x;
            if (lattice[right]) uf.unite(static_cast<std::int32_t>(i), static_cast<std::int32_t>(right));
            if (lattice[down]) uf.unite(static_cast<std::int32_t>(i), static_cast<std::int32_t>(down));
        }
    }
    // Group by root; roots are the smallest index of each component, so
    // iterating in index order yields a deterministic component order.
    std::vector<std::int32_t> comp_of(total, -1);
    std::vector<Agglomerate> out;
    for (std::size_t i = 0; i < total; ++i) {
        if (!lattice[i]) continue;
        const std::int32_t root = uf.find(static_cast<std::int32_t>(i));
        if (comp_of[root] < 0) {
            comp_of[root] = static_cast<std::int32_t>(out.size());
            out.emplace_back();
        }
        out[comp_of[root]].cells.push_back(i);
    }
    return out;
}

int attractivity(const Lattice& lattice, const std::vector<std::size_t>& cells) {
    const int n = lattice.n();
    std::vector<std::uint8_t> in_set(lattice.size(), 0);
    for (std::size_t c : cells) {
        if (c >= lattice.size()) throw std::invalid_argument("attractivity: cell out of bounds");
        if (lattice[c]) throw std::invalid_argument("attractivity: placement overlaps a foreign solid");
        in_set[c] = 1;
    }
    std::vector<std::uint8_t> counted(lattice.size(), 0);
    int score = 0;
    for (std::size_t c : cells) {
        const int x = static_cast<int>(c % n);
        const int y = static_cast<int>(c / n);
        const std::size_t nb[4] = {lattice.idx(x + 1, y), lattice.idx(x - 1, y),
                                   lattice.idx(x, y + 1), lattice.idx(x, y - 1)};
        for (std::size_t b : nb) {
            if (lattice[b] && !in_set[b] && !counted[b]) {
                counted[b] = 1;
                ++score;
            }
        }
    }
    return score;
}

Lattice init_lattice(const SimConfig& config, SplitMix64& rng) {
    config.validate();
    const std::size_t total = static_cast<std::size_t>(config.n) * config.n;
    const std::size_t solids =
        static_cast<std::size_t>(std::llround((1.0 - config.porosity) * static_cast<double>(total)));
    Lattice lat(config.n);
    std::vector<std::uint32_t> order(total);
    std::iota(order.begin(), order.end(), 0);
    // Partial Fisher-Yates: the first `solids` entries are a uniform sample
    // without replacement.
    for (std::size_t i = 0; i < solids; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng.next_below(total - i));
        std::swap(order[i], order[j]);
        lat[order[i]] = 1;
    }
    return lat;
}

namespace {

// Per-step scratch buffers reused across agglomerates.
struct StepScratch {
    std::vector<std::uint32_t> target_stamp;   // marks candidate target cells
    std::vector<std::uint32_t> counted_stamp;  // marks already-counted neighbors
    std::uint32_t generation = 0;
    std::vector<std::vector<Offset>> offsets_by_range;

    explicit StepScratch(std::size_t total)
        : target_stamp(total, 0), counted_stamp(total, 0) {}

    const std::vector<Offset>& offsets(int r) {
        if (static_cast<std::size_t>(r) >= offsets_by_range.size())
            offsets_by_range.resize(r + 1);
        if (offsets_by_range[r].empty()) offsets_by_range[r] = vnn_offsets(r);
        return offsets_by_range[r];
    }
};

inline int wrap_add(int c, int d, int n) {
    c += d;
    while (c >= n) c -= n;
    while (c < 0) c += n;
    return c;
}

}  // namespace

void step(Lattice& lattice, double sigma, SplitMix64& rng) {
    if (!(sigma >= 0.0)) throw std::invalid_argument("step: sigma must be >= 0");
    const int n = lattice.n();
    auto aggs = find_agglomerates(lattice);
    if (aggs.empty()) return;

    std::vector<std::uint32_t> order(aggs.size());
    std::iota(order.begin(), order.end(), 0);
    rng.shuffle(order.data(), order.size());

    StepScratch scratch(lattice.size());
    std::vector<std::size_t> targets;
    std::vector<std::uint32_t> maximizers;

    for (std::uint32_t ai : order) {
        const Agglomerate& agg = aggs[ai];
        const std::size_t mu = agg.size();
        const int range = agg_range(sigma, mu);
        const auto& offs = scratch.offsets(range);

        // Lift the agglomerate off the grid; legality is then "all targets void".
        for (std::size_t c : agg.cells) lattice[c] = 0;

        int best = -1;
        maximizers.clear();
        targets.resize(mu);

        for (std::uint32_t oi = 0; oi < offs.size(); ++oi) {
            const Offset off = offs[oi];
            bool legal = true;
            int score = 0;
            if (mu == 1 && n >= 3) {
                // Fast path: a single cell has four distinct neighbors.
                const std::size_t c = agg.cells[0];
                const int x = wrap_add(static_cast<int>(c % n), off.dx, n);
                const int y = wrap_add(static_cast<int>(c / n), off.dy, n);
                const std::size_t t = static_cast<std::size_t>(y) * n + x;
                if (lattice[t]) {
                    legal = false;
                } else {
                    targets[0] = t;
                    const int xr = (x + 1 == n) ? 0 : x + 1;
                    const int xl = (x == 0) ? n - 1 : x - 1;
                    const int yd = (y + 1 == n) ? 0 : y + 1;
                    const int yu = (y == 0) ? n - 1 : y - 1;
                    score = lattice[static_cast<std::size_t>(y) * n + xr] +
                            lattice[static_cast<std::size_t>(y) * n + xl] +
                            lattice[static_cast<std::size_t>(yd) * n + x] +
                            lattice[static_cast<std::size_t>(yu) * n + x];
                }
            } else {
                const std::uint32_t gen = ++scratch.generation;
                for (std::size_t k = 0; k < mu; ++k) {
                    const std::size_t c = agg.cells[k];
                    const int x = wrap_add(static_cast<int>(c % n), off.dx, n);
                    const int y = wrap_add(static_cast<int>(c / n), off.dy, n);
                    const std::size_t t = static_cast<std::size_t>(y) * n + x;
                    if (lattice[t]) {
                        legal = false;
                        break;
                    }
                    targets[k] = t;
                    scratch.target_stamp[t] = gen;
                }
                if (legal) {
                    for (std::size_t k = 0; k < mu; ++k) {
                        const std::size_t t = targets[k];
                        const int x = static_cast<int>(t % n);
                        const int y = static_cast<int>(t / n);
                        const std::size_t nb[4] = {lattice.idx(x + 1, y), lattice.idx(x - 1, y),
                                                   lattice.idx(x, y + 1), lattice.idx(x, y - 1)};
                        for (std::size_t b : nb) {
                            if (lattice[b] && scratch.target_stamp[b] != gen &&
                                scratch.counted_stamp[b] != gen) {
                                scratch.counted_stamp[b] = gen;
                                ++score;
                            }
                        }
                    }
                }
            }
            if (!legal) continue;
            if (score > best) {
                best = score;
                maximizers.clear();
            }
            if (score == best) maximizers.push_back(oi);
        }

        // The zero displacement is always legal, so best >= 0.
        const std::uint32_t pick = maximizers[rng.next_below(maximizers.size())];
        const Offset off = offs[pick];
        for (std::size_t c : agg.cells) {
            const int x = wrap_add(static_cast<int>(c % n), off.dx, n);
            const int y = wrap_add(static_cast<int>(c / n), off.dy, n);
            lattice[static_cast<std::size_t>(y) * n + x] = 1;
        }
    }
}

Lattice simulate(const SimConfig& config) {
    config.validate();
    SplitMix64 rng(config.seed);
    Lattice lat = init_lattice(config, rng);
    for (int t = 0; t < config.iterations; ++t) step(lat, config.sigma, rng);
    return lat;
}

}  // namespace cacnn
