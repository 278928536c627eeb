#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace cacnn {

// Square two-phase grid with periodic topology. 0 = void, 1 = solid,
// stored row-major (y * n + x).
class Lattice {
public:
    Lattice() = default;
    explicit Lattice(int n, std::uint8_t fill = 0)
        : n_(n), cells_(static_cast<std::size_t>(n) * n, fill) {}

    int n() const { return n_; }
    std::size_t size() const { return cells_.size(); }

    std::uint8_t at(int x, int y) const { return cells_[idx(x, y)]; }
    void set(int x, int y, std::uint8_t v) { cells_[idx(x, y)] = v; }

    std::uint8_t operator[](std::size_t i) const { return cells_[i]; }
    std::uint8_t& operator[](std::size_t i) { return cells_[i]; }

    const std::vector<std::uint8_t>& cells() const { return cells_; }

    // Periodic wrap of a coordinate into [0, n).
    int wrap(int c) const {
        c %= n_;
        return c < 0 ? c + n_ : c;
    }

    std::size_t idx(int x, int y) const {
        return static_cast<std::size_t>(wrap(y)) * n_ + wrap(x);
    }

    std::size_t solid_count() const;

    // Mean number of solid face-neighbors per solid cell; 0 for all-void grids.
    double mean_solid_neighbors() const;

    bool operator==(const Lattice& other) const = default;

    // Debug text format: first line "n", then n rows of n chars '0'/'1'.
    std::string to_text() const;
    static Lattice from_text(std::istream& in);
    static Lattice from_text_file(const std::string& path);

private:
    int n_ = 0;
    std::vector<std::uint8_t> cells_;
};

}  // namespace cacnn
