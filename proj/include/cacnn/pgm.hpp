#pragma once

#include <string>

#include "cacnn/lattice.hpp"

namespace cacnn {

// Binary PGM (P5), maxval 255. Solid = 0 (black), void = 255 (white).
void write_pgm(const Lattice& lattice, const std::string& path);

// Reads a P5 PGM written by write_pgm back into a lattice. Pixels < 128 are
// treated as solid. Throws std::runtime_error on malformed input.
Lattice read_pgm(const std::string& path);

}  // namespace cacnn
