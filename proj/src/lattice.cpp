#include "cacnn/lattice.hpp"

#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace cacnn {

std::size_t Lattice::solid_count() const {
    return std::accumulate(cells_.begin(), cells_.end(), std::size_t{0});
}

double Lattice::mean_solid_neighbors() const {
    std::size_t solids = 0;
    std::size_t contacts = 0;
    for (int y = 0; y < n_; ++y) {
        for (int x = 0; x < n_; ++x) {
            if (!at(x, y)) continue;
            ++solids;
            contacts += at(x + 1, y) + at(x - 1, y) + at(x, y + 1) + at(x, y - 1);
        }
    }
    return solids == 0 ? 0.0 : static_cast<double>(contacts) / static_cast<double>(solids);
}

std::string Lattice::to_text() const {
    std::ostringstream out;
    out << n_ << '\n';
    for (int y = 0; y < n_; ++y) {
        for (int x = 0; x < n_; ++x) out << (at(x, y) ? '1' : '0');
        out << '\n';
    }
    return out.str();
}

Lattice Lattice::from_text(std::istream& in) {
    int n = 0;
    if (!(in >> n) || n < 1) throw std::runtime_error("lattice text: bad size line");
    Lattice lat(n);
    std::string row;
    for (int y = 0; y < n; ++y) {
        if (!(in >> row) || static_cast<int>(row.size()) != n)
            throw std::runtime_error("lattice text: bad row " + std::to_string(y));
        for (int x = 0; x < n; ++x) {
            if (row[x] != '0' && row[x] != '1')
                throw std::runtime_error("lattice text: bad cell character");
            lat.set(x, y, row[x] == '1');
        }
    }
    return lat;
}

Lattice Lattice::from_text_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open lattice file: " + path);
    return from_text(in);
}

}  // namespace cacnn
