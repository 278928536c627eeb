#include "cacnn/pgm.hpp"

#include <fstream>
#include <stdexcept>
#include <vector>

namespace cacnn {

void write_pgm(const Lattice& lattice, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    const int n = lattice.n();
    out << "P5\n" << n << ' ' << n << "\n255\n";
    std::vector<unsigned char> row(n);
    for (int y = 0; y < n; ++y) {
        for (int x = 0; x < n; ++x) row[x] = lattice.at(x, y) ? 0 : 255;
        out.write(reinterpret_cast<const char*>(row.data()), n);
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

Lattice read_pgm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open: " + path);
    std::string magic;
    in >> magic;
    if (magic != "P5") throw std::runtime_error("not a P5 PGM: " + path);
    int w = 0, h = 0, maxval = 0;
    in >> w >> h >> maxval;
    if (!in || w < 1 || h < 1 || maxval < 1 || maxval > 255)
        throw std::runtime_error("bad PGM header: " + path);
    if (w != h) throw std::runtime_error("PGM is not square: " + path);
    in.get();  // single whitespace after maxval
    Lattice lat(w);
    std::vector<unsigned char> row(w);
    for (int y = 0; y < h; ++y) {
        in.read(reinterpret_cast<char*>(row.data()), w);
        if (!in) throw std::runtime_error("truncated PGM: " + path);
        for (int x = 0; x < w; ++x) lat.set(x, y, row[x] < 128);
    }
    return lat;
}

}  // namespace cacnn
