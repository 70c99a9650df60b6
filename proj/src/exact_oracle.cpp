#include "dnet/exact_oracle.hpp"

#include <fmt/format.h>

#include <cmath>
#include <numbers>

#include "dnet/error.hpp"
#include "dnet/wafom.hpp"

namespace dnet {

namespace {

using cplx = std::complex<double>;

std::vector<cplx> roots_of_unity(int b) {
  std::vector<cplx> w(static_cast<std::size_t>(b));
  for (int k = 0; k < b; ++k) w[k] = std::polar(1.0, 2.0 * std::numbers::pi * k / b);
  return w;
}

void check_net_shape(const GroupFunction& F, const DigitalNet& net) {
  const auto& p = net.params();
  if (p.b != F.b || p.s != F.s || p.n != F.n) throw Error("net does not live in the function's group");
  net.require_full_rank();
}

// Lower corners of the cell of X: coordinate i is sum_j d_{ij} b^-(j+1).
std::vector<double> corner(int b, int s, int n, std::uint64_t index) {
  std::vector<double> x(static_cast<std::size_t>(s), 0.0);
  for (int i = 0; i < s; ++i) {
    double scale = 1.0;
    for (int j = 0; j < n; ++j) {
      scale /= b;
      x[i] += static_cast<double>(index % static_cast<std::uint64_t>(b)) * scale;
      index /= static_cast<std::uint64_t>(b);
    }
  }
  return x;
}

// Tensor midpoint average of f over the cell with the given corner.
double cell_average(const Integrand& f, const std::vector<double>& lo, double width, int q) {
  const int s = static_cast<int>(lo.size());
  std::vector<int> idx(static_cast<std::size_t>(s), 0);
  std::vector<double> x(static_cast<std::size_t>(s));
  const double h = width / q;
  double acc = 0.0;
  for (;;) {
    for (int i = 0; i < s; ++i) x[i] = lo[i] + (idx[i] + 0.5) * h;
    acc += f.eval(x);
    int i = 0;
    while (i < s && ++idx[i] == q) idx[i++] = 0;
    if (i == s) break;
  }
  return acc / std::pow(static_cast<double>(q), s);
}

// Base-b digits (least significant first) of the index, as a vector.
std::vector<int> digits_of(std::uint64_t index, int b, int len) {
  std::vector<int> d(static_cast<std::size_t>(len));
  for (int t = 0; t < len; ++t) {
    d[t] = static_cast<int>(index % static_cast<std::uint64_t>(b));
    index /= static_cast<std::uint64_t>(b);
  }
  return d;
}

}  // namespace

std::uint64_t group_size_checked(int b, int s, int n) {
  const double lg = s * n * std::log2(static_cast<double>(b));
  if (lg > kGroupLimitLog2) {
    throw Error(fmt::format("group Z_{}^({}x{}) has 2^{:.1f} elements; tables need about {:.0f} MiB (limit 2^{:.0f})",
                            b, s, n, lg, std::exp2(lg) * 16.0 / (1 << 20), kGroupLimitLog2));
  }
  return checked_pow(static_cast<std::uint64_t>(b), s * n);
}

std::uint64_t group_index(const DigitMatrix& x) {
  std::uint64_t idx = 0;
  const auto d = x.digits();
  for (std::size_t t = d.size(); t-- > 0;) idx = idx * static_cast<std::uint64_t>(x.base()) + d[t];
  return idx;
}

DigitMatrix group_element(int b, int s, int n, std::uint64_t index) {
  DigitMatrix x(b, s, n);
  for (auto& d : x.digits()) {
    d = static_cast<std::uint8_t>(index % static_cast<std::uint64_t>(b));
    index /= static_cast<std::uint64_t>(b);
  }
  return x;
}

double GroupFunction::mean() const {
  CompensatedSum acc;
  for (double v : values) acc.add(v);
  return acc.value() / static_cast<double>(values.size());
}

double GroupFunction::operator()(const DigitMatrix& x) const { return values[group_index(x)]; }

std::complex<double> FourierTable::operator()(const DigitMatrix& h) const { return values[group_index(h)]; }

GroupFunction tabulate(int b, int s, int n, const std::function<double(const DigitMatrix&)>& fn) {
  const auto size = group_size_checked(b, s, n);
  GroupFunction F{b, s, n, std::vector<double>(size), 0.0};
  for (std::uint64_t k = 0; k < size; ++k) F.values[k] = fn(group_element(b, s, n, k));
  return F;
}

GroupFunction discretize(const Integrand& f, int b, int n, int quad_cells) {
  if (quad_cells < 1) throw Error("quad_cells must be >= 1");
  const int s = f.s;
  const auto size = group_size_checked(b, s, n);
  const double width = std::pow(static_cast<double>(b), -n);
  GroupFunction F{b, s, n, std::vector<double>(size), 0.0};
  for (std::uint64_t k = 0; k < size; ++k) F.values[k] = cell_average(f, corner(b, s, n, k), width, quad_cells);
  return F;
}

GroupFunction discretize_refined(const Integrand& f, int b, int n, double tol, std::uint64_t max_evaluations) {
  const auto size = group_size_checked(b, f.s, n);
  std::vector<std::vector<double>> prev;  // previous Romberg row
  GroupFunction best;
  for (int level = 0;; ++level) {
    const int q = 1 << level;
    const double evals = static_cast<double>(size) * std::pow(static_cast<double>(q), f.s);
    if (level > 0 && evals > static_cast<double>(max_evaluations)) return best;
    std::vector<std::vector<double>> row{discretize(f, b, n, q).values};
    double factor = 1.0;
    for (int j = 1; j <= level; ++j) {
      factor *= 4.0;
      std::vector<double> r(size);
      for (std::uint64_t k = 0; k < size; ++k) {
        r[k] = row[j - 1][k] + (row[j - 1][k] - prev[j - 1][k]) / (factor - 1.0);
      }
      row.push_back(std::move(r));
    }
    GroupFunction cur{b, f.s, n, row.back(), 0.0};
    if (level > 0) {
      double diff = 0.0;
      for (std::uint64_t k = 0; k < size; ++k) diff = std::max(diff, std::fabs(cur.values[k] - best.values[k]));
      cur.quad_error = diff;
      if (diff < tol) return cur;
    } else {
      cur.quad_error = std::numeric_limits<double>::infinity();
    }
    best = std::move(cur);
    prev = std::move(row);
  }
}

FourierTable dft(const GroupFunction& F) {
  const int b = F.b;
  const int len = F.s * F.n;
  const auto size = static_cast<std::uint64_t>(F.values.size());
  const auto w = roots_of_unity(b);
  std::vector<cplx> cur(F.values.begin(), F.values.end());
  std::vector<cplx> tmp(static_cast<std::size_t>(b));
  std::uint64_t stride = 1;
  for (int t = 0; t < len; ++t) {
    const std::uint64_t block = stride * static_cast<std::uint64_t>(b);
    for (std::uint64_t base = 0; base < size; base += block) {
      for (std::uint64_t off = 0; off < stride; ++off) {
        for (int h = 0; h < b; ++h) {
          cplx acc = 0.0;
          for (int g = 0; g < b; ++g) acc += cur[base + off + g * stride] * w[(h * g) % b];
          tmp[h] = acc;
        }
        for (int h = 0; h < b; ++h) cur[base + off + h * stride] = tmp[h];
      }
    }
    stride = block;
  }
  const double inv = 1.0 / static_cast<double>(size);
  for (auto& v : cur) v *= inv;
  return {F.b, F.s, F.n, std::move(cur)};
}

FourierTable dft_direct(const GroupFunction& F) {
  const int b = F.b;
  const int len = F.s * F.n;
  const auto size = static_cast<std::uint64_t>(F.values.size());
  const auto w = roots_of_unity(b);
  std::vector<std::vector<int>> digits(size);
  for (std::uint64_t k = 0; k < size; ++k) digits[k] = digits_of(k, b, len);
  std::vector<cplx> out(size);
  for (std::uint64_t h = 0; h < size; ++h) {
    cplx acc = 0.0;
    for (std::uint64_t g = 0; g < size; ++g) {
      int e = 0;
      for (int t = 0; t < len; ++t) e += digits[h][t] * digits[g][t];
      acc += F.values[g] * w[e % b];
    }
    out[h] = acc / static_cast<double>(size);
  }
  return {F.b, F.s, F.n, std::move(out)};
}

std::complex<double> character(const DigitMatrix& h, const DigitMatrix& g) {
  return std::polar(1.0, 2.0 * std::numbers::pi * pairing(h, g) / h.base());
}

double shifted_mean(const GroupFunction& F, const DigitalNet& net, const DigitalShift& sigma) {
  check_net_shape(F, net);
  CompensatedSum acc;
  for (const auto& x : enumerate_points(net)) acc.add(F(x + sigma.sigma));
  return acc.value() / static_cast<double>(net.size());
}

namespace {

// I_{P+sigma}(F) for every sigma, indexed like the table.
std::vector<double> all_shifted_means(const GroupFunction& F, const DigitalNet& net) {
  check_net_shape(F, net);
  const auto pts = enumerate_points(net);
  std::vector<std::uint64_t> offsets;
  for (const auto& x : pts) offsets.push_back(group_index(x));
  const auto size = static_cast<std::uint64_t>(F.values.size());
  const int len = F.s * F.n;
  std::vector<double> out(size);
  std::vector<int> sd(static_cast<std::size_t>(len));
  std::vector<std::vector<int>> pd;
  for (auto o : offsets) pd.push_back(digits_of(o, F.b, len));
  for (std::uint64_t sigma = 0; sigma < size; ++sigma) {
    sd = digits_of(sigma, F.b, len);
    CompensatedSum acc;
    for (const auto& d : pd) {
      std::uint64_t idx = 0;
      for (int t = len; t-- > 0;) idx = idx * static_cast<std::uint64_t>(F.b) + (d[t] + sd[t]) % F.b;
      acc.add(F.values[idx]);
    }
    out[sigma] = acc.value() / static_cast<double>(pts.size());
  }
  return out;
}

}  // namespace

double shift_average(const GroupFunction& F, const DigitalNet& net) {
  CompensatedSum acc;
  const auto means = all_shifted_means(F, net);
  for (double v : means) acc.add(v);
  return acc.value() / static_cast<double>(means.size());
}

PoissonCheck poisson_check(const GroupFunction& F, const DigitalNet& net) {
  check_net_shape(F, net);
  const auto hat = dft(F);
  PoissonCheck out{};
  CompensatedSum lhs;
  for (const auto& x : enumerate_points(net)) lhs.add(F(x));
  out.lhs = lhs.value() / static_cast<double>(net.size());
  CompensatedSum re, im;
  for (const auto& h : enumerate_span(F.b, F.s, F.n, dual(net).basis)) {
    re.add(hat(h).real());
    im.add(hat(h).imag());
  }
  out.rhs = re.value();
  out.rhs_imag = im.value();
  return out;
}

VarianceCheck variance_exact(const GroupFunction& F, const DigitalNet& net) {
  const auto means = all_shifted_means(F, net);
  const double mean = F.mean();
  CompensatedSum by_shifts;
  for (double v : means) by_shifts.add((v - mean) * (v - mean));
  const auto hat = dft(F);
  CompensatedSum by_dual;
  for (const auto& h : enumerate_span(F.b, F.s, F.n, dual(net).basis)) {
    if (h.is_zero()) continue;
    by_dual.add(std::norm(hat(h)));
  }
  return {by_shifts.value() / static_cast<double>(means.size()), by_dual.value()};
}

double shifted_fourier_check(const GroupFunction& F, const DigitalShift& sigma) {
  if (sigma.sigma.base() != F.b || sigma.sigma.rows() != F.s || sigma.sigma.cols() != F.n) {
    throw Error("shift shape does not match the group");
  }
  GroupFunction moved = F;
  const auto size = static_cast<std::uint64_t>(F.values.size());
  for (std::uint64_t k = 0; k < size; ++k) {
    moved.values[k] = F(group_element(F.b, F.s, F.n, k) + sigma.sigma);
  }
  const auto hat = dft(F);
  const auto hat_moved = dft(moved);
  double worst = 0.0;
  for (std::uint64_t k = 0; k < size; ++k) {
    const auto h = group_element(F.b, F.s, F.n, k);
    const cplx expect = std::conj(character(h, sigma.sigma)) * hat.values[k];
    worst = std::max(worst, std::abs(hat_moved.values[k] - expect));
  }
  return worst;
}

std::complex<double> walsh_coefficient(const Integrand& f, int b, int n, const std::vector<std::uint64_t>& k,
                                       int quad_cells) {
  const int s = f.s;
  if (static_cast<int>(k.size()) != s) throw Error("Walsh index needs one entry per coordinate");
  const auto size = group_size_checked(b, s, n);
  const auto limit = checked_pow(static_cast<std::uint64_t>(b), n);
  std::vector<std::vector<int>> kappa;
  for (auto v : k) {
    if (v >= limit) throw Error("Walsh index must be below b^n");
    kappa.push_back(digits_of(v, b, n));
  }
  const auto w = roots_of_unity(b);
  const double width = std::pow(static_cast<double>(b), -n);
  const double h = width / quad_cells;
  std::vector<int> idx(static_cast<std::size_t>(s));
  std::vector<double> x(static_cast<std::size_t>(s));
  cplx total = 0.0;
  for (std::uint64_t cell = 0; cell < size; ++cell) {
    const auto lo = corner(b, s, n, cell);
    std::fill(idx.begin(), idx.end(), 0);
    for (;;) {
      int e = 0;
      for (int i = 0; i < s; ++i) {
        x[i] = lo[i] + (idx[i] + 0.5) * h;
        // wal_k(x) = omega^(sum_j kappa_j xi_{j+1}), xi the b-adic digits of x
        double r = x[i];
        for (int j = 0; j < n; ++j) {
          r *= b;
          const int digit = static_cast<int>(std::floor(r));
          r -= digit;
          e += kappa[i][j] * digit;
        }
      }
      total += f.eval(x) * std::conj(w[e % b]);
      int i = 0;
      while (i < s && ++idx[i] == quad_cells) idx[i++] = 0;
      if (i == s) break;
    }
  }
  return total / (static_cast<double>(size) * std::pow(static_cast<double>(quad_cells), s));
}

double walsh_bound_check(const Integrand& f, int n, double tol) {
  if (!f.bound) throw Error(fmt::format("{} has no derivative bounds", f.id));
  const auto F = discretize_refined(f, 2, n, tol);
  const auto hat = dft(F);
  const auto size = static_cast<std::uint64_t>(hat.values.size());
  double worst = 0.0;
  std::vector<int> order(static_cast<std::size_t>(f.s));
  for (std::uint64_t k = 1; k < size; ++k) {
    const auto a = group_element(2, f.s, n, k);
    int weight = 0;
    for (int i = 0; i < f.s; ++i) {
      order[i] = 0;
      for (int j = 0; j < n; ++j) {
        if (a(i, j) != 0) {
          ++order[i];
          weight += j + 2;  // Dick weight j+1 plus Hamming weight 1
        }
      }
    }
    const double bound = derivative_bound(f, order) * std::exp2(-weight);
    const double coef = std::abs(hat.values[k]);
    if (bound > 0.0) {
      worst = std::max(worst, coef / bound);
    } else if (coef > 1e-14) {
      return std::numeric_limits<double>::infinity();
    }
  }
  return worst;
}

KhCheck kh_rmse_check(const Integrand& f, const DigitalNet& net, double tol) {
  const auto& p = net.params();
  if (p.b != 2) throw Error("the RMSE inequality check needs b = 2");
  if (!f.bound) throw Error(fmt::format("{} has no derivative bounds", f.id));
  const auto F = discretize_refined(f, 2, p.n, tol);
  const auto var = variance_exact(F, net);
  std::vector<int> order(static_cast<std::size_t>(p.s), 0);
  double norm = 0.0;
  for (;;) {
    int i = 0;
    while (i < p.s && ++order[i] > p.n) order[i++] = 0;
    if (i == p.s) break;
    norm = std::max(norm, derivative_bound(f, order));
  }
  const double w = wafom_inversion(net, WeightSpec::dick_plus_hamming(p.s, p.n)).w;
  return {std::sqrt(std::max(0.0, var.var_by_shifts)), norm * w};
}

}  // namespace dnet
