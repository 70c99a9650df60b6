#pragma once

// Incremental point walkers. Each visits a contiguous index range of a
// subgroup given by generators and hands the current element to a callback,
// updating it with one generator addition per step on average.

#include <bit>
#include <cstdint>
#include <span>
#include <vector>

namespace dnet::detail {

inline std::uint64_t gray(std::uint64_t k) { return k ^ (k >> 1); }

// b = 2. `basis` holds m generators of `s` packed rows each. Index k visits
// the element whose coefficient vector is gray(k).
template <class F>
void walk_gray(std::span<const std::uint64_t> basis, int s, int m, std::uint64_t begin, std::uint64_t end,
               F&& visit) {
  if (begin >= end) return;
  std::vector<std::uint64_t> rows(static_cast<std::size_t>(s), 0);
  const std::uint64_t g = gray(begin);
  for (int k = 0; k < m; ++k) {
    if ((g >> k) & 1U) {
      for (int i = 0; i < s; ++i) rows[i] ^= basis[static_cast<std::size_t>(k * s + i)];
    }
  }
  for (std::uint64_t idx = begin;;) {
    visit(static_cast<const std::uint64_t*>(rows.data()));
    if (++idx == end) break;
    const int k = std::countr_zero(idx);
    for (int i = 0; i < s; ++i) rows[i] ^= basis[static_cast<std::size_t>(k * s + i)];
  }
}

// b = 2, natural order: index k visits sum of generators at the set bits of k.
template <class F>
void walk_natural_b2(std::span<const std::uint64_t> basis, int s, int m, std::uint64_t begin, std::uint64_t end,
                     F&& visit) {
  std::vector<std::uint64_t> rows(static_cast<std::size_t>(s));
  for (std::uint64_t idx = begin; idx < end; ++idx) {
    std::fill(rows.begin(), rows.end(), 0);
    for (int k = 0; k < m; ++k) {
      if ((idx >> k) & 1U) {
        for (int i = 0; i < s; ++i) rows[i] ^= basis[static_cast<std::size_t>(k * s + i)];
      }
    }
    visit(static_cast<const std::uint64_t*>(rows.data()));
  }
}

// Any prime b. `basis` is m generators of `len` digits each, row-major.
// Index k visits sum_t c_t g_t where c is k written in base b (c_0 least
// significant). Advancing the counter adds g_t once for every digit position
// that changes, including the wrap from b-1 to 0.
template <class F>
void walk_odometer(std::span<const std::uint8_t> basis, int b, int len, int m, std::uint64_t begin,
                   std::uint64_t end, F&& visit) {
  if (begin >= end) return;
  std::vector<std::uint8_t> point(static_cast<std::size_t>(len), 0);
  std::vector<int> coeff(static_cast<std::size_t>(m), 0);
  std::uint64_t rest = begin;
  for (int t = 0; t < m; ++t) {
    coeff[t] = static_cast<int>(rest % static_cast<std::uint64_t>(b));
    rest /= static_cast<std::uint64_t>(b);
    const std::uint8_t* g = basis.data() + static_cast<std::size_t>(t) * len;
    for (int d = 0; d < len; ++d) point[d] = static_cast<std::uint8_t>((point[d] + coeff[t] * g[d]) % b);
  }
  for (std::uint64_t idx = begin;;) {
    visit(static_cast<const std::uint8_t*>(point.data()));
    if (++idx == end) break;
    for (int t = 0; t < m; ++t) {
      const std::uint8_t* g = basis.data() + static_cast<std::size_t>(t) * len;
      for (int d = 0; d < len; ++d) {
        int v = point[d] + g[d];
        point[d] = static_cast<std::uint8_t>(v >= b ? v - b : v);
      }
      if (++coeff[t] < b) break;
      coeff[t] = 0;
    }
  }
}

}  // namespace dnet::detail
