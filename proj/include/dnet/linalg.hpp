#pragma once

// Gaussian elimination over the prime field Z_p on digit vectors.

#include <cstdint>
#include <vector>

namespace dnet {

using DigitVector = std::vector<std::uint8_t>;

int rank_mod_p(std::vector<DigitVector> rows, int p);

// Basis of {x : row . x = 0 mod p for every row}; every row has `cols` entries.
std::vector<DigitVector> nullspace_mod_p(std::vector<DigitVector> rows, int cols, int p);

}  // namespace dnet
