#include "dnet/integrands.hpp"

#include <fmt/format.h>

#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <complex>
#include <numbers>

#include "dnet/error.hpp"

namespace dnet {

using boost::multiprecision::cpp_int;
using boost::multiprecision::cpp_rational;

std::string to_string(Smoothness s) {
  switch (s) {
    case Smoothness::smooth:
      return "smooth";
    case Smoothness::continuous_nondifferentiable:
      return "continuous";
    case Smoothness::discontinuous:
      return "discontinuous";
  }
  return "?";
}

double tent(double x) {
  const double u = 3.0 * x;
  const double r = u - 2.0 * std::floor(u / 2.0);
  return std::min(r, 2.0 - r);
}

double sign_cells(double x) {
  const auto k = static_cast<long long>(std::floor(3.0 * x));
  return (k % 2 == 0) ? 1.0 : -1.0;
}

Fraction irwin_hall_moment(int s, int k) {
  if (s < 0 || k < 0) throw Error("moment order and count must be nonnegative");
  // moments[j] = E[S^j] for the running sum S, starting from S = 0.
  std::vector<cpp_rational> moments(static_cast<std::size_t>(k + 1), cpp_rational(0));
  moments[0] = 1;
  for (int t = 0; t < s; ++t) {
    std::vector<cpp_rational> next(moments.size(), cpp_rational(0));
    for (int r = 0; r <= k; ++r) {
      cpp_int c = 1;
      for (int j = 0; j <= r; ++j) {
        // E[(S+U)^r] = sum_j C(r,j) E[S^j] E[U^(r-j)],  E[U^q] = 1/(q+1)
        next[r] += cpp_rational(c) * moments[j] / cpp_rational(r - j + 1);
        c = c * (r - j) / (j + 1);
      }
    }
    moments = std::move(next);
  }
  const cpp_rational& q = moments[static_cast<std::size_t>(k)];
  return {boost::multiprecision::numerator(q).str(), boost::multiprecision::denominator(q).str(),
          static_cast<double>(q)};
}

Enclosed gaussian_axis_integral() {
  // sum_k 1 / (k! (2k+1)); after stopping at term K the tail is below
  // t_K / (1 - 1/(K+1)) with t_K the first omitted term.
  long double sum = 0.0L;
  long double inv_fact = 1.0L;
  int k = 0;
  for (; k < 40; ++k) {
    sum += inv_fact / (2 * k + 1);
    inv_fact /= (k + 1);
  }
  const long double next = inv_fact / (2 * k + 1);
  const long double tail = next / (1.0L - 1.0L / (k + 1));
  const auto value = static_cast<double>(sum + tail / 2);
  // rounding of 40 long double additions plus the final conversion
  const double radius = static_cast<double>(tail / 2) + 4e-16;
  return {value, radius};
}

namespace {

double sum_of(std::span<const double> x) {
  double acc = 0.0;
  for (double v : x) acc += v;
  return acc;
}

int order_total(std::span<const int> order) {
  int t = 0;
  for (int v : order) {
    if (v < 0) throw Error("derivative order must be nonnegative");
    t += v;
  }
  return t;
}

// Sup over [0,1] of |d^k/dx^k exp(x^2)| = p_k(1) e with p_0 = 1 and
// p_{k+1} = 2x p_k + p_k'. All coefficients are nonnegative, so the
// maximum sits at x = 1.
double gaussian_axis_bound(int k) {
  std::vector<double> p{1.0};
  for (int t = 0; t < k; ++t) {
    std::vector<double> q(p.size() + 1, 0.0);
    for (std::size_t d = 0; d < p.size(); ++d) {
      q[d + 1] += 2.0 * p[d];
      if (d > 0) q[d - 1] += static_cast<double>(d) * p[d];
    }
    p = std::move(q);
  }
  double at_one = 0.0;
  for (double c : p) at_one += c;
  return at_one * std::numbers::e;
}

// Sup over [0,1] of |d^k/dx^k 1/(1+x^2)|. With x = cot(theta) the derivative
// is (-1)^k k! sin^(k+1)(theta) sin((k+1) theta), theta in [pi/4, pi/2]. The
// bracket has derivative (k+1) sin^k sin((k+2) theta), bounded by k+1, which
// gives the grid margin.
double peak_axis_bound(int k) {
  if (k == 0) return 1.0;
  constexpr int kGrid = 1 << 14;
  const double lo = std::numbers::pi / 4;
  const double hi = std::numbers::pi / 2;
  const double step = (hi - lo) / kGrid;
  double best = 0.0;
  for (int g = 0; g <= kGrid; ++g) {
    const double th = lo + step * g;
    best = std::max(best, std::fabs(std::pow(std::sin(th), k + 1) * std::sin((k + 1) * th)));
  }
  const double margin = (k + 1) * step / 2;
  return std::tgamma(k + 1.0) * std::min(1.0, best + margin);
}

Integrand exponential(const std::string& id, int s, double a) {
  Integrand f;
  f.id = id;
  f.s = s;
  f.eval = [a](std::span<const double> x) { return std::exp(a * sum_of(x)); };
  f.exact = std::pow(std::expm1(a) / a, s);
  f.exact_source = "closed form ((e^a-1)/a)^s";
  f.bound = [a, s](std::span<const int> order) {
    return std::pow(a, order_total(order)) * std::exp(a * s);
  };
  return f;
}

}  // namespace

Integrand make_integrand(const std::string& id, int s) {
  if (s < 1) throw Error(fmt::format("dimension s={} must be >= 1", s));
  Integrand f;
  f.id = id;
  f.s = s;
  if (id == "f0") {
    f.eval = [](std::span<const double> x) { return std::pow(sum_of(x), 6); };
    f.exact = irwin_hall_moment(s, 6).value;
    f.exact_source = "exact rational (Irwin-Hall moment)";
    f.bound = [s](std::span<const int> order) {
      const int t = order_total(order);
      if (t > 6) return 0.0;
      return std::tgamma(7.0) / std::tgamma(7.0 - t) * std::pow(static_cast<double>(s), 6 - t);
    };
  } else if (id == "f1") {
    return exponential(id, s, 2.0 / 3.0);
  } else if (id == "f2") {
    return exponential(id, s, 1.5);
  } else if (id == "f3") {
    f.eval = [](std::span<const double> x) { return std::cos(sum_of(x)); };
    // (e^i - 1)/i = sin 1 + i (1 - cos 1)
    const std::complex<long double> axis(std::sin(1.0L), 1.0L - std::cos(1.0L));
    std::complex<long double> acc(1.0L, 0.0L);
    for (int i = 0; i < s; ++i) acc *= axis;
    f.exact = static_cast<double>(acc.real());
    f.exact_source = "closed form Re(((e^i-1)/i)^s)";
    f.bound = [](std::span<const int> order) {
      order_total(order);
      return 1.0;
    };
  } else if (id == "f4") {
    f.eval = [](std::span<const double> x) {
      double acc = 0.0;
      for (double v : x) acc += v * v;
      return std::exp(acc);
    };
    f.exact = std::pow(gaussian_axis_integral().value, s);
    f.exact_source = "series sum 1/(k!(2k+1)) with bounded tail, to the power s";
    f.bound = [s](std::span<const int> order) {
      if (static_cast<int>(order.size()) != s) throw Error("derivative order has wrong length");
      double acc = 1.0;
      for (int k : order) {
        if (k < 0) throw Error("derivative order must be nonnegative");
        acc *= gaussian_axis_bound(k);
      }
      return acc;
    };
  } else if (id == "f5") {
    f.eval = [](std::span<const double> x) {
      double acc = 1.0;
      for (double v : x) acc *= 1.0 / (v * v + 1.0);
      return acc;
    };
    f.exact = std::pow(std::numbers::pi / 4, s);
    f.exact_source = "closed form (pi/4)^s";
    f.bound = [s](std::span<const int> order) {
      if (static_cast<int>(order.size()) != s) throw Error("derivative order has wrong length");
      double acc = 1.0;
      for (int k : order) {
        if (k < 0) throw Error("derivative order must be nonnegative");
        acc *= peak_axis_bound(k);
      }
      return acc;
    };
  } else if (id == "f6") {
    f.eval = [](std::span<const double> x) {
      double acc = 1.0;
      for (double v : x) acc *= tent(v);
      return acc;
    };
    f.exact = std::pow(0.5, s);
    f.exact_source = "closed form (1/2)^s";
    f.smoothness = Smoothness::continuous_nondifferentiable;
  } else if (id == "f7") {
    f.eval = [](std::span<const double> x) {
      double acc = 1.0;
      for (double v : x) acc *= sign_cells(v);
      return acc;
    };
    f.exact = std::pow(1.0 / 3.0, s);
    f.exact_source = "closed form (1/3)^s";
    f.smoothness = Smoothness::discontinuous;
  } else {
    throw Error(fmt::format("unknown integrand '{}' (expected f0..f7)", id));
  }
  return f;
}

const std::vector<std::string>& integrand_ids() {
  static const std::vector<std::string> ids{"f0", "f1", "f2", "f3", "f4", "f5", "f6", "f7"};
  return ids;
}

double evaluate(const Integrand& f, std::span<const double> x) {
  if (static_cast<int>(x.size()) != f.s) {
    throw Error(fmt::format("{} expects {} coordinates, got {}", f.id, f.s, x.size()));
  }
  for (double v : x) {
    if (!(v >= 0.0 && v < 1.0)) throw Error(fmt::format("{}: coordinate {} outside [0,1)", f.id, v));
  }
  return f.eval(x);
}

double exact_integral(const Integrand& f) {
  if (!f.exact) throw Error(fmt::format("no exact integral for {}", f.id));
  return *f.exact;
}

double derivative_bound(const Integrand& f, std::span<const int> order) {
  if (!f.bound) throw Error(fmt::format("{} is not differentiable", f.id));
  if (static_cast<int>(order.size()) != f.s) {
    throw Error(fmt::format("derivative order needs {} entries, got {}", f.s, order.size()));
  }
  return f.bound(order);
}

}  // namespace dnet
