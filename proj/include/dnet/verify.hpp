#pragma once

// Identity checks on small random instances. Each returns the worst observed
// deviation next to the tolerance it was held to.

#include <cstdint>
#include <string>
#include <vector>

namespace dnet {

struct CheckResult {
  std::string name;
  bool passed = false;
  double worst = 0.0;
  double tolerance = 0.0;
  long cases = 0;
  std::string detail;
};

// Inversion formula against dual enumeration, relative deviation of W.
// b in {2,3}, s*n <= 12, m cycling through 0..s*n.
CheckResult check_macwilliams(std::uint64_t seed, int nets = 200);
// Average of I_{P+sigma}(f_n) over all sigma against I(f_n), b = 2.
CheckResult check_unbiasedness(std::uint64_t seed, int pairs = 50);
// Variance over all shifts against the dual sum of |hat F|^2.
CheckResult check_variance_identity(std::uint64_t seed, int pairs = 100);
CheckResult check_poisson(std::uint64_t seed, int pairs = 50);
CheckResult check_shifted_fourier(std::uint64_t seed, int cases = 20);
// worst_ratio - 1 for f1 and f3 with s <= 2, n <= 3.
CheckResult check_walsh_bound();
// max of lhs - rhs for f1, s = 1, n = 3.
CheckResult check_rmse_inequality(std::uint64_t seed, int nets = 20);
// Inversion against the MPFR evaluation at s=4, n=32, m=12; half of the
// cases use a weight scaled until lg W <= -24.
CheckResult check_highprec_agreement(std::uint64_t seed, int nets = 20);

std::vector<CheckResult> run_identity_suite(std::uint64_t seed);

}  // namespace dnet
