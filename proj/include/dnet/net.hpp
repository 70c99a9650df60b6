#pragma once

// Digital nets over Z_b: digit matrices, the psi/phi maps, digital shifts,
// point enumeration and the dual net.

#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dnet/error.hpp"
#include "dnet/rng.hpp"

namespace dnet {

bool is_prime(int v);

// b^e, throwing dnet::Error on 64-bit overflow.
std::uint64_t checked_pow(std::uint64_t b, int e);

struct NetParams {
  int b = 2;  // prime base, at most 251
  int s = 1;  // dimension
  int n = 1;  // digits per coordinate
  int m = 0;  // log_b of the number of points

  int digits() const { return s * n; }
  void validate() const;
  std::string to_string() const;
  bool operator==(const NetParams&) const = default;
};

// An s x n matrix over Z_b. Column j (0-based) holds the digit weighted by
// b^-(j+1) in psi.
class DigitMatrix {
 public:
  DigitMatrix() = default;
  DigitMatrix(int b, int s, int n);
  static DigitMatrix from_rows(int b, const std::vector<std::vector<int>>& rows);

  int base() const { return b_; }
  int rows() const { return s_; }
  int cols() const { return n_; }

  std::uint8_t operator()(int i, int j) const { return d_[static_cast<std::size_t>(i * n_ + j)]; }
  void set(int i, int j, int value);

  // Row-major digits, length s*n.
  std::span<const std::uint8_t> digits() const { return d_; }
  std::span<std::uint8_t> digits() { return d_; }

  bool is_zero() const;
  bool same_shape(const DigitMatrix& o) const { return b_ == o.b_ && s_ == o.s_ && n_ == o.n_; }

  DigitMatrix& operator+=(const DigitMatrix& o);
  DigitMatrix& operator-=(const DigitMatrix& o);
  friend DigitMatrix operator+(DigitMatrix a, const DigitMatrix& o) { return a += o; }
  friend DigitMatrix operator-(DigitMatrix a, const DigitMatrix& o) { return a -= o; }
  DigitMatrix scaled(int c) const;

  auto operator<=>(const DigitMatrix&) const = default;

 private:
  int b_ = 2;
  int s_ = 0;
  int n_ = 0;
  std::vector<std::uint8_t> d_;
};

// Sum_{i,j} a_{i,j} c_{i,j} mod b.
int pairing(const DigitMatrix& a, const DigitMatrix& c);

struct DigitalShift {
  DigitMatrix sigma;
};

enum class RankCheck { lenient, strict };
enum class PointOrder { natural, gray };

// A subgroup P of Z_b^{s x n} given by m generators. Construction records the
// rank of the generators but accepts dependent ones; everything that walks the
// points requires full rank.
class DigitalNet {
 public:
  DigitalNet(NetParams params, std::vector<DigitMatrix> basis);
  // The one-point net {0} in Z_2^{1 x 1}.
  DigitalNet() : DigitalNet({2, 1, 1, 0}, {}) {}

  const NetParams& params() const { return params_; }
  const std::vector<DigitMatrix>& basis() const { return basis_; }
  int rank() const { return rank_; }
  bool full_rank() const { return rank_ == params_.m; }
  void require_full_rank() const;

  // b^m
  std::uint64_t size() const;

  // Bit-packed rows for b = 2: word (k * s + i) is row i of generator k, with
  // digit j stored at bit n-1-j so that word / 2^n = psi coordinate.
  std::vector<std::uint64_t> packed_basis() const;

  bool operator==(const DigitalNet&) const = default;

 private:
  NetParams params_;
  std::vector<DigitMatrix> basis_;
  int rank_ = 0;
};

struct DualNet {
  NetParams params;  // m is the dimension of the dual, s*n - m(P)
  std::vector<DigitMatrix> basis;
};

// Elements of P in the requested order: natural = coefficient vector read as
// a base-b counter (generator 0 least significant), gray = reflected binary
// Gray code for b = 2 (falls back to natural otherwise).
std::vector<DigitMatrix> enumerate_points(const DigitalNet& net, PointOrder order = PointOrder::natural);

// All b^k combinations of the given matrices (no rank check).
std::vector<DigitMatrix> enumerate_span(int b, int s, int n, const std::vector<DigitMatrix>& generators);

std::vector<double> psi(const DigitMatrix& x);
void psi_into(const DigitMatrix& x, std::span<double> out);
std::vector<std::uint64_t> phi(const DigitMatrix& x);

// Packed-row psi coordinate for b = 2.
double psi_coordinate_b2(std::uint64_t row, int n);

std::vector<DigitMatrix> shift(std::span<const DigitMatrix> points, const DigitalShift& sigma);

DualNet dual(const DigitalNet& net);

template <class Gen>
DigitMatrix random_digit_matrix(int b, int s, int n, Gen& gen) {
  DigitMatrix x(b, s, n);
  for (auto& d : x.digits()) d = static_cast<std::uint8_t>(uniform_below(gen, static_cast<std::uint64_t>(b)));
  return x;
}

template <class Gen>
DigitalShift random_shift(int b, int s, int n, Gen& gen) {
  return {random_digit_matrix(b, s, n, gen)};
}

// m generators with i.i.d. uniform digits. Lenient mode keeps whatever is drawn;
// strict mode throws "degenerate basis" when the draw is rank deficient.
template <class Gen>
DigitalNet random_net(const NetParams& params, Gen& gen, RankCheck check = RankCheck::lenient) {
  params.validate();
  std::vector<DigitMatrix> basis;
  basis.reserve(static_cast<std::size_t>(params.m));
  for (int k = 0; k < params.m; ++k) basis.push_back(random_digit_matrix(params.b, params.s, params.n, gen));
  DigitalNet net(params, std::move(basis));
  if (check == RankCheck::strict) net.require_full_rank();
  return net;
}

DigitalNet random_net(const NetParams& params, std::uint64_t seed, RankCheck check = RankCheck::lenient);

}  // namespace dnet
