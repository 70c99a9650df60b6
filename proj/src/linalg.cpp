#include "dnet/linalg.hpp"

#include <utility>

namespace dnet {

namespace {

int inverse_mod(int a, int p) {
  // Fermat: a^(p-2) mod p.
  int result = 1;
  int base = a % p;
  for (int e = p - 2; e > 0; e >>= 1) {
    if (e & 1) result = result * base % p;
    base = base * base % p;
  }
  return result;
}

// Reduced row echelon form in place; returns pivot columns.
std::vector<int> row_reduce(std::vector<DigitVector>& rows, int cols, int p) {
  std::vector<int> pivots;
  std::size_t r = 0;
  for (int c = 0; c < cols && r < rows.size(); ++c) {
    std::size_t sel = r;
    while (sel < rows.size() && rows[sel][c] == 0) ++sel;
    if (sel == rows.size()) continue;
    std::swap(rows[r], rows[sel]);
    const int inv = inverse_mod(rows[r][c], p);
    if (inv != 1) {
      for (auto& v : rows[r]) v = static_cast<std::uint8_t>(v * inv % p);
    }
    for (std::size_t k = 0; k < rows.size(); ++k) {
      if (k == r || rows[k][c] == 0) continue;
      const int f = rows[k][c];
      for (int t = c; t < cols; ++t) {
        rows[k][t] = static_cast<std::uint8_t>(((rows[k][t] - f * rows[r][t]) % p + p) % p);
      }
    }
    pivots.push_back(c);
    ++r;
  }
  return pivots;
}

}  // namespace

int rank_mod_p(std::vector<DigitVector> rows, int p) {
  if (rows.empty()) return 0;
  const int cols = static_cast<int>(rows.front().size());
  return static_cast<int>(row_reduce(rows, cols, p).size());
}

std::vector<DigitVector> nullspace_mod_p(std::vector<DigitVector> rows, int cols, int p) {
  const std::vector<int> pivots = row_reduce(rows, cols, p);
  std::vector<bool> is_pivot(static_cast<std::size_t>(cols), false);
  for (int c : pivots) is_pivot[c] = true;
  std::vector<DigitVector> basis;
  for (int free = 0; free < cols; ++free) {
    if (is_pivot[free]) continue;
    DigitVector v(static_cast<std::size_t>(cols), 0);
    v[free] = 1;
    for (std::size_t r = 0; r < pivots.size(); ++r) {
      v[pivots[r]] = static_cast<std::uint8_t>((p - rows[r][free]) % p);
    }
    basis.push_back(std::move(v));
  }
  return basis;
}

}  // namespace dnet
