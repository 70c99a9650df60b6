#pragma once

// Test integrands on [0,1)^s:
//   f0 = (sum x)^6            f4 = exp(sum x^2)
//   f1 = exp(2/3 sum x)       f5 = prod 1/(1 + x^2)
//   f2 = exp(3/2 sum x)       f6 = prod T(x),  T(x) = min_i |3x - 2i|
//   f3 = cos(sum x)           f7 = prod C(x),  C(x) = (-1)^floor(3x)

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace dnet {

enum class Smoothness { smooth, continuous_nondifferentiable, discontinuous };
std::string to_string(Smoothness s);

struct Integrand {
  std::string id;
  int s = 1;
  std::function<double(std::span<const double>)> eval;
  std::optional<double> exact;
  std::string exact_source;  // how the exact value was obtained
  Smoothness smoothness = Smoothness::smooth;
  // Sup norm over [0,1]^s of the mixed partial of order N (N_i >= 0).
  std::function<double(std::span<const int>)> bound;

  double operator()(std::span<const double> x) const { return eval(x); }
};

// "f0" ... "f7".
Integrand make_integrand(const std::string& id, int s);
const std::vector<std::string>& integrand_ids();

// Checked evaluation: x must have s coordinates in [0,1).
double evaluate(const Integrand& f, std::span<const double> x);
double exact_integral(const Integrand& f);
double derivative_bound(const Integrand& f, std::span<const int> order);

// Per-axis factors of the product-form integrands.
double tent(double x);        // T
double sign_cells(double x);  // C

// Value of the integral of exp(x^2) over [0,1] with a bound on its error.
struct Enclosed {
  double value;
  double radius;
};
Enclosed gaussian_axis_integral();

// k-th raw moment of a sum of s independent uniforms, exactly, as p/q.
struct Fraction {
  std::string numerator;
  std::string denominator;
  double value;
};
Fraction irwin_hall_moment(int s, int k);

}  // namespace dnet
