#pragma once

// Walsh figure of merit W(P; nu) for root mean square error:
//
//   W(P; nu)^2 = sum over nonzero A in the dual of b^(-2 nu(A)),
//   nu(A)      = sum_{i,j} nu_{i,j} [a_{i,j} != 0].
//
// The inversion route evaluates the same quantity as a mean over the points
// of P, which is what makes it affordable for nets with huge duals.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "dnet/accumulate.hpp"
#include "dnet/net.hpp"

namespace dnet {

class WeightSpec {
 public:
  WeightSpec(int s, int n, std::vector<double> values, std::string name = "custom");

  static WeightSpec dick(int s, int n);               // nu_{i,j} = j
  static WeightSpec hamming(int s, int n);            // nu_{i,j} = 1
  static WeightSpec dick_plus_hamming(int s, int n);  // nu_{i,j} = j + 1

  // "mu", "h" or "mu+h".
  static WeightSpec by_name(const std::string& name, int s, int n);
  // s*n whitespace separated reals, row by row; '#' comments allowed.
  static WeightSpec read(std::istream& in, int s, int n);
  static WeightSpec read_file(const std::string& path, int s, int n);

  int rows() const { return s_; }
  int cols() const { return n_; }
  // 0-based column j is the digit weighted by b^-(j+1).
  double operator()(int i, int j) const { return nu_[static_cast<std::size_t>(i * n_ + j)]; }
  const std::vector<double>& values() const { return nu_; }
  const std::string& name() const { return name_; }

  WeightSpec scaled(double factor) const;

 private:
  int s_;
  int n_;
  std::vector<double> nu_;
  std::string name_;
};

enum class WafomMethod { inversion, dual_bruteforce, highprec };
std::string to_string(WafomMethod method);
WafomMethod wafom_method_from_string(const std::string& name);

struct WafomValue {
  double w = 0.0;
  double lg_w = 0.0;  // -inf when w == 0
  WafomMethod method = WafomMethod::inversion;
  double radicand = 0.0;  // W^2 before the square root
  bool clamped = false;   // radicand was slightly negative and set to 0
  long precision_bits = 106;
};

// Radicands in [-1e-6, 0) clamp to zero (flagged); below that is an error.
inline constexpr double kRadicandTolerance = 1e-6;
WafomValue make_wafom_value(double radicand, WafomMethod method);

double weight_of(const DigitMatrix& a, const WeightSpec& spec);

// Inversion formula
//   W^2 = -1 + |P|^-1 sum_{B in P} prod_{i,j} (1 + eta(b_{i,j}) b^(-2 nu_{i,j}))
// with eta(0) = b-1 and eta(nonzero) = -1. Each product is carried as its
// excess over one through p <- p + x + p x in double-double, and the point
// sum is accumulated in double-double over fixed blocks of points, so the
// leading "-1 +" never cancels at full magnitude and the result does not
// depend on the worker count. For b = 2 the per-row factors are tabulated per
// byte of the packed row.
//
// evaluate() also tracks a bound on the rounding error. When W^2 is too small
// for double-double to resolve it to about 1e-15 (tiny nets whose whole dual
// sits at large weight), the same recurrence is rerun in MPFR at a precision
// derived from a lower bound on any nonzero W^2.
class InversionEvaluator {
 public:
  InversionEvaluator(int b, WeightSpec weight);

  const WeightSpec& weight() const { return weight_; }
  int base() const { return b_; }

  // Double-double W^2 without the precision escalation.
  DoubleDouble squared(const DigitalNet& net, unsigned workers = 1) const;
  WafomValue evaluate(const DigitalNet& net, unsigned workers = 1) const;

  // Same formula in plain double with Neumaier summation: about ten
  // significant bits at lg W = -26, plenty to rank candidate nets. Returns
  // lg W, or -inf for the full space.
  double fast_lg_w(const DigitalNet& net) const;

 private:
  struct ChunkTable {
    int shift = 0;
    std::uint64_t mask = 0;
    std::vector<DoubleDouble> excess;  // indexed by the chunk's bits
    std::vector<double> excess_hi;
  };

  struct Accumulated {
    DoubleDouble mean_excess;
    double mean_mass = 0.0;  // mean of 1 + |excess|, scales the rounding error
  };

  void check(const DigitalNet& net) const;
  Accumulated accumulate(const DigitalNet& net, unsigned workers) const;
  double fast_squared_b2(const DigitalNet& net) const;
  double fast_squared_generic(const DigitalNet& net) const;

  int b_;
  WeightSpec weight_;
  // b = 2: chunks_[i] are the byte tables of row i.
  std::vector<std::vector<ChunkTable>> chunks_;
  // Any b: per digit position, x for a zero digit and for a nonzero digit.
  std::vector<DoubleDouble> x_zero_;
  std::vector<DoubleDouble> x_nonzero_;
};

WafomValue wafom_inversion(const DigitalNet& net, const WeightSpec& spec, unsigned workers = 1);

// Definition side: enumerates the dual. Refuses when b^(sn - rank) > 2^24.
inline constexpr double kDualEnumerationLimitLog2 = 24.0;
WafomValue wafom_dual_bruteforce(const DigitalNet& net, const WeightSpec& spec);

// Inversion formula evaluated directly (mean of products, then minus one) in
// MPFR, doubling the precision from 160 bits until two successive results
// agree to 2^-64 relative. Validation only; requires b^m <= 2^20.
inline constexpr double kHighPrecLimitLog2 = 20.0;
WafomValue wafom_highprec(const DigitalNet& net, const WeightSpec& spec);

WafomValue compute_wafom(const DigitalNet& net, const WeightSpec& spec, WafomMethod method, unsigned workers = 1);

}  // namespace dnet
