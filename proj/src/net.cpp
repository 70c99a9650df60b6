#include "dnet/net.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "dnet/detail/walk.hpp"
#include "dnet/linalg.hpp"

namespace dnet {

bool is_prime(int v) {
  if (v < 2) return false;
  for (int d = 2; d * d <= v; ++d) {
    if (v % d == 0) return false;
  }
  return true;
}

std::uint64_t checked_pow(std::uint64_t b, int e) {
  std::uint64_t r = 1;
  for (int k = 0; k < e; ++k) {
    if (r > std::numeric_limits<std::uint64_t>::max() / b) {
      throw Error(fmt::format("{}^{} does not fit in 64 bits", b, e));
    }
    r *= b;
  }
  return r;
}

void NetParams::validate() const {
  if (b > 251 || !is_prime(b)) throw Error(fmt::format("base b={} must be a prime <= 251", b));
  if (s < 1) throw Error(fmt::format("dimension s={} must be >= 1", s));
  if (n < 1) throw Error(fmt::format("precision n={} must be >= 1", n));
  if (m < 0 || m > s * n) throw Error(fmt::format("m={} must lie in [0, s*n={}]", m, s * n));
  // psi is evaluated from the integer sum_j x_j b^(n-j).
  if (std::log2(static_cast<double>(b)) * n > 64.0) {
    throw Error(fmt::format("b^n = {}^{} exceeds 64 bits", b, n));
  }
}

std::string NetParams::to_string() const { return fmt::format("b={} s={} n={} m={}", b, s, n, m); }

DigitMatrix::DigitMatrix(int b, int s, int n)
    : b_(b), s_(s), n_(n), d_(static_cast<std::size_t>(s) * static_cast<std::size_t>(n), 0) {}

DigitMatrix DigitMatrix::from_rows(int b, const std::vector<std::vector<int>>& rows) {
  const int s = static_cast<int>(rows.size());
  const int n = s == 0 ? 0 : static_cast<int>(rows.front().size());
  DigitMatrix x(b, s, n);
  for (int i = 0; i < s; ++i) {
    if (static_cast<int>(rows[i].size()) != n) throw Error("ragged digit matrix");
    for (int j = 0; j < n; ++j) x.set(i, j, rows[i][j]);
  }
  return x;
}

void DigitMatrix::set(int i, int j, int value) {
  if (value < 0 || value >= b_) throw Error(fmt::format("digit {} out of range for base {}", value, b_));
  d_[static_cast<std::size_t>(i * n_ + j)] = static_cast<std::uint8_t>(value);
}

bool DigitMatrix::is_zero() const {
  return std::all_of(d_.begin(), d_.end(), [](std::uint8_t v) { return v == 0; });
}

DigitMatrix& DigitMatrix::operator+=(const DigitMatrix& o) {
  if (!same_shape(o)) throw Error("shape mismatch");
  for (std::size_t t = 0; t < d_.size(); ++t) d_[t] = static_cast<std::uint8_t>((d_[t] + o.d_[t]) % b_);
  return *this;
}

DigitMatrix& DigitMatrix::operator-=(const DigitMatrix& o) {
  if (!same_shape(o)) throw Error("shape mismatch");
  for (std::size_t t = 0; t < d_.size(); ++t) d_[t] = static_cast<std::uint8_t>((d_[t] + b_ - o.d_[t]) % b_);
  return *this;
}

DigitMatrix DigitMatrix::scaled(int c) const {
  DigitMatrix r = *this;
  const int cc = ((c % b_) + b_) % b_;
  for (auto& v : r.d_) v = static_cast<std::uint8_t>(v * cc % b_);
  return r;
}

int pairing(const DigitMatrix& a, const DigitMatrix& c) {
  if (!a.same_shape(c)) throw Error("shape mismatch");
  int acc = 0;
  auto x = a.digits();
  auto y = c.digits();
  for (std::size_t t = 0; t < x.size(); ++t) acc = (acc + x[t] * y[t]) % a.base();
  return acc;
}

namespace {

std::vector<DigitVector> as_rows(const std::vector<DigitMatrix>& mats) {
  std::vector<DigitVector> rows;
  rows.reserve(mats.size());
  for (const auto& g : mats) rows.emplace_back(g.digits().begin(), g.digits().end());
  return rows;
}

std::vector<std::uint8_t> flatten(const std::vector<DigitMatrix>& mats) {
  std::vector<std::uint8_t> flat;
  for (const auto& g : mats) flat.insert(flat.end(), g.digits().begin(), g.digits().end());
  return flat;
}

}  // namespace

DigitalNet::DigitalNet(NetParams params, std::vector<DigitMatrix> basis)
    : params_(params), basis_(std::move(basis)) {
  params_.validate();
  if (static_cast<int>(basis_.size()) != params_.m) {
    throw Error(fmt::format("expected {} generators, got {}", params_.m, basis_.size()));
  }
  for (const auto& g : basis_) {
    if (g.base() != params_.b || g.rows() != params_.s || g.cols() != params_.n) {
      throw Error(fmt::format("generator shape does not match {}", params_.to_string()));
    }
  }
  rank_ = rank_mod_p(as_rows(basis_), params_.b);
}

void DigitalNet::require_full_rank() const {
  if (!full_rank()) throw Error(fmt::format("degenerate basis (rank {} < m = {})", rank_, params_.m));
}

std::uint64_t DigitalNet::size() const { return checked_pow(static_cast<std::uint64_t>(params_.b), params_.m); }

std::vector<std::uint64_t> DigitalNet::packed_basis() const {
  if (params_.b != 2) throw Error("packed rows require b = 2");
  const int s = params_.s;
  const int n = params_.n;
  std::vector<std::uint64_t> words(static_cast<std::size_t>(params_.m * s), 0);
  for (int k = 0; k < params_.m; ++k) {
    for (int i = 0; i < s; ++i) {
      std::uint64_t w = 0;
      for (int j = 0; j < n; ++j) w |= static_cast<std::uint64_t>(basis_[k](i, j)) << (n - 1 - j);
      words[static_cast<std::size_t>(k * s + i)] = w;
    }
  }
  return words;
}

std::vector<DigitMatrix> enumerate_span(int b, int s, int n, const std::vector<DigitMatrix>& generators) {
  const int k = static_cast<int>(generators.size());
  const std::uint64_t count = checked_pow(static_cast<std::uint64_t>(b), k);
  std::vector<DigitMatrix> out;
  out.reserve(count);
  const auto flat = flatten(generators);
  detail::walk_odometer(flat, b, s * n, k, 0, count, [&](const std::uint8_t* digits) {
    DigitMatrix x(b, s, n);
    std::copy(digits, digits + static_cast<std::ptrdiff_t>(s) * n, x.digits().begin());
    out.push_back(std::move(x));
  });
  return out;
}

std::vector<DigitMatrix> enumerate_points(const DigitalNet& net, PointOrder order) {
  net.require_full_rank();
  const auto& p = net.params();
  if (p.b != 2) return enumerate_span(p.b, p.s, p.n, net.basis());
  const auto packed = net.packed_basis();
  std::vector<DigitMatrix> out;
  out.reserve(net.size());
  auto unpack = [&](const std::uint64_t* rows) {
    DigitMatrix x(2, p.s, p.n);
    for (int i = 0; i < p.s; ++i) {
      for (int j = 0; j < p.n; ++j) x.set(i, j, static_cast<int>((rows[i] >> (p.n - 1 - j)) & 1U));
    }
    out.push_back(std::move(x));
  };
  if (order == PointOrder::gray) {
    detail::walk_gray(packed, p.s, p.m, 0, net.size(), unpack);
  } else {
    detail::walk_natural_b2(packed, p.s, p.m, 0, net.size(), unpack);
  }
  return out;
}

double psi_coordinate_b2(std::uint64_t row, int n) {
  if (n <= 53) return std::ldexp(static_cast<double>(row), -n);
  // Keep the leading 53 digits so the result stays below 1.
  return std::ldexp(static_cast<double>(row >> (n - 53)), -53);
}

void psi_into(const DigitMatrix& x, std::span<double> out) {
  const int b = x.base();
  const int n = x.cols();
  if (b == 2) {
    for (int i = 0; i < x.rows(); ++i) {
      std::uint64_t w = 0;
      for (int j = 0; j < n; ++j) w = (w << 1) | x(i, j);
      out[i] = psi_coordinate_b2(w, n);
    }
    return;
  }
  const double denom = static_cast<double>(checked_pow(static_cast<std::uint64_t>(b), n));
  for (int i = 0; i < x.rows(); ++i) {
    std::uint64_t v = 0;
    for (int j = 0; j < n; ++j) v = v * static_cast<std::uint64_t>(b) + x(i, j);
    double c = static_cast<double>(v) / denom;
    out[i] = c < 1.0 ? c : std::nextafter(1.0, 0.0);
  }
}

std::vector<double> psi(const DigitMatrix& x) {
  std::vector<double> out(static_cast<std::size_t>(x.rows()));
  psi_into(x, out);
  return out;
}

std::vector<std::uint64_t> phi(const DigitMatrix& x) {
  std::vector<std::uint64_t> out(static_cast<std::size_t>(x.rows()), 0);
  for (int i = 0; i < x.rows(); ++i) {
    std::uint64_t v = 0;
    for (int j = x.cols() - 1; j >= 0; --j) v = v * static_cast<std::uint64_t>(x.base()) + x(i, j);
    out[i] = v;
  }
  return out;
}

std::vector<DigitMatrix> shift(std::span<const DigitMatrix> points, const DigitalShift& sigma) {
  std::vector<DigitMatrix> out;
  out.reserve(points.size());
  for (const auto& x : points) out.push_back(x + sigma.sigma);
  return out;
}

DualNet dual(const DigitalNet& net) {
  const auto& p = net.params();
  if (!is_prime(p.b)) throw Error("dual computation requires prime base");
  const int cols = p.digits();
  auto null = nullspace_mod_p(as_rows(net.basis()), cols, p.b);
  DualNet d;
  d.params = p;
  d.params.m = static_cast<int>(null.size());
  for (auto& v : null) {
    DigitMatrix h(p.b, p.s, p.n);
    std::copy(v.begin(), v.end(), h.digits().begin());
    d.basis.push_back(std::move(h));
  }
  return d;
}

DigitalNet random_net(const NetParams& params, std::uint64_t seed, RankCheck check) {
  SplitMix64 gen(derive_seed(seed, {0x6e6574ULL}));
  return random_net(params, gen, check);
}

}  // namespace dnet
