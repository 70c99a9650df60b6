#pragma once

// Randomized QMC with digital shifts. The estimator for a shift sigma is the
// mean of f over psi(P + sigma), i.e. f at the lower-left corner of each
// shifted cell.

#include <cstdint>
#include <vector>

#include "dnet/integrands.hpp"
#include "dnet/net.hpp"

namespace dnet {

struct QmcEstimate {
  double value = 0.0;
  std::uint64_t n_points = 0;
};

struct RmseReport {
  double mean_of_estimates = 0.0;
  double e_value = 0.0;  // sample standard deviation, divisor n_shifts - 1
  double lg_e = 0.0;     // -inf when e_value == 0
  int n_shifts = 0;
  std::uint64_t seed = 0;
};

QmcEstimate qmc_integrate(const DigitalNet& net, const DigitalShift& sigma, const Integrand& f);
// One pass over the shifted points for several integrands.
std::vector<double> qmc_integrate_many(const DigitalNet& net, const DigitalShift& sigma,
                                       const std::vector<Integrand>& fns);

// Shift number `index` of the stream under `seed`.
DigitalShift sampled_shift(const NetParams& params, std::uint64_t seed, std::uint64_t index);

RmseReport rmse_estimate(const DigitalNet& net, const Integrand& f, int n_shifts, std::uint64_t seed,
                         unsigned workers = 1);
std::vector<RmseReport> rmse_estimate_many(const DigitalNet& net, const std::vector<Integrand>& fns, int n_shifts,
                                           std::uint64_t seed, unsigned workers = 1);

// Mean and sample standard deviation of the given estimates.
RmseReport summarize_estimates(const std::vector<double>& estimates, std::uint64_t seed);

// I_{psi(P)}(f) - I(f), unshifted.
double plain_error(const DigitalNet& net, const Integrand& f);

}  // namespace dnet
