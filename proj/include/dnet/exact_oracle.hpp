#pragma once

// Brute-force checks on the whole group G = Z_b^{s x n}. Functions on G are
// stored as dense tables indexed by sum_t d_t b^t over the row-major digits
// d_t, t = i*n + j. Characters use the same indexing, with
// h . g = omega_b^(sum_t h_t g_t) and omega_b = exp(2 pi i / b).

#include <complex>
#include <cstdint>
#include <functional>
#include <vector>

#include "dnet/integrands.hpp"
#include "dnet/net.hpp"

namespace dnet {

inline constexpr double kGroupLimitLog2 = 24.0;

struct GroupFunction {
  int b = 2;
  int s = 1;
  int n = 1;
  std::vector<double> values;
  double quad_error = 0.0;  // estimated cell-average error, 0 when tabulated exactly

  double mean() const;
  double operator()(const DigitMatrix& x) const;
};

struct FourierTable {
  int b = 2;
  int s = 1;
  int n = 1;
  std::vector<std::complex<double>> values;

  std::complex<double> operator()(const DigitMatrix& h) const;
};

std::uint64_t group_index(const DigitMatrix& x);
DigitMatrix group_element(int b, int s, int n, std::uint64_t index);
// Throws when b^(sn) exceeds the table limit.
std::uint64_t group_size_checked(int b, int s, int n);

GroupFunction tabulate(int b, int s, int n, const std::function<double(const DigitMatrix&)>& fn);

// Cell averages f_n(X) by tensor midpoint rule, quad_cells subdivisions per
// axis inside each cell.
GroupFunction discretize(const Integrand& f, int b, int n, int quad_cells);
// Midpoint rule with Romberg extrapolation over doubling subdivisions, until
// successive tables differ by less than tol or the evaluation budget is hit.
GroupFunction discretize_refined(const Integrand& f, int b, int n, double tol = 1e-12,
                                 std::uint64_t max_evaluations = std::uint64_t{1} << 26);

// hat F(h) = |G|^-1 sum_g F(g) (h . g).
FourierTable dft(const GroupFunction& F);          // one axis at a time
FourierTable dft_direct(const GroupFunction& F);   // O(|G|^2)
std::complex<double> character(const DigitMatrix& h, const DigitMatrix& g);

// I_{P+sigma}(F).
double shifted_mean(const GroupFunction& F, const DigitalNet& net, const DigitalShift& sigma);
// Mean of I_{P+sigma}(F) over every sigma in G.
double shift_average(const GroupFunction& F, const DigitalNet& net);

struct PoissonCheck {
  double lhs;        // I_P(F)
  double rhs;        // Re sum_{h in dual} hat F(h)
  double rhs_imag;
};
PoissonCheck poisson_check(const GroupFunction& F, const DigitalNet& net);

struct VarianceCheck {
  double var_by_shifts;  // |G|^-1 sum_sigma (I_{P+sigma}(F) - I(F))^2
  double var_by_dual;    // sum over nonzero h in the dual of |hat F(h)|^2
};
VarianceCheck variance_exact(const GroupFunction& F, const DigitalNet& net);

// max_h |hat F_sigma(h) - (h . sigma)^-1 hat F(h)|, F_sigma(g) = F(g + sigma).
double shifted_fourier_check(const GroupFunction& F, const DigitalShift& sigma);

// Walsh coefficient int f(x) conj(wal_k(x)) dx by midpoint quadrature with
// quad_cells points per axis in every b^-n cell, the Walsh function being
// evaluated from the b-adic digits of x. Requires every k_i < b^n.
std::complex<double> walsh_coefficient(const Integrand& f, int b, int n, const std::vector<std::uint64_t>& k,
                                       int quad_cells);

// b = 2: max over nonzero A of |hat f_n(A)| / (||f^(N(A))|| 2^-(mu(A)+h(A))).
double walsh_bound_check(const Integrand& f, int n, double tol = 1e-12);

struct KhCheck {
  double lhs;  // sqrt of the exact shift variance of f_n
  double rhs;  // max over nonzero N <= n of ||f^(N)|| times W(P; mu+h)
};
KhCheck kh_rmse_check(const Integrand& f, const DigitalNet& net, double tol = 1e-12);

}  // namespace dnet
