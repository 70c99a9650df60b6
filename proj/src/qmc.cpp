#include "dnet/qmc.hpp"

#include <fmt/format.h>
#include <fmt/ranges.h>

#include <cmath>
#include <limits>

#include "dnet/accumulate.hpp"
#include "dnet/detail/walk.hpp"
#include "dnet/error.hpp"
#include "dnet/parallel.hpp"

namespace dnet {

namespace {

void check_dimension(const DigitalNet& net, const Integrand& f) {
  if (f.s != net.params().s) {
    throw Error(fmt::format("integrand {} has dimension {}, net has s={}", f.id, f.s, net.params().s));
  }
}

double call(const Integrand& f, const std::vector<double>& x) {
  double y = 0.0;
  try {
    y = f.eval(x);
  } catch (const std::exception& e) {
    throw Error(fmt::format("{} failed at ({:.17g}): {}", f.id, fmt::join(x, ", "), e.what()));
  }
  if (!std::isfinite(y)) throw Error(fmt::format("{} is not finite at ({:.17g})", f.id, fmt::join(x, ", ")));
  return y;
}

// Visits psi(X + sigma) for every X in the net.
template <class Visit>
void for_each_shifted_point(const DigitalNet& net, const DigitalShift& sigma, Visit&& visit) {
  const auto& p = net.params();
  if (sigma.sigma.base() != p.b || sigma.sigma.rows() != p.s || sigma.sigma.cols() != p.n) {
    throw Error("shift shape does not match the net");
  }
  net.require_full_rank();
  std::vector<double> x(static_cast<std::size_t>(p.s));
  if (p.b == 2) {
    const auto basis = net.packed_basis();
    std::vector<std::uint64_t> shift_rows(static_cast<std::size_t>(p.s), 0);
    for (int i = 0; i < p.s; ++i) {
      for (int j = 0; j < p.n; ++j) shift_rows[i] |= static_cast<std::uint64_t>(sigma.sigma(i, j)) << (p.n - 1 - j);
    }
    detail::walk_gray(basis, p.s, p.m, 0, net.size(), [&](const std::uint64_t* rows) {
      for (int i = 0; i < p.s; ++i) x[i] = psi_coordinate_b2(rows[i] ^ shift_rows[i], p.n);
      visit(x);
    });
    return;
  }
  std::vector<std::uint8_t> flat;
  for (const auto& g : net.basis()) flat.insert(flat.end(), g.digits().begin(), g.digits().end());
  DigitMatrix shifted(p.b, p.s, p.n);
  const auto sd = sigma.sigma.digits();
  detail::walk_odometer(flat, p.b, p.digits(), p.m, 0, net.size(), [&](const std::uint8_t* digits) {
    auto out = shifted.digits();
    for (std::size_t t = 0; t < out.size(); ++t) out[t] = static_cast<std::uint8_t>((digits[t] + sd[t]) % p.b);
    psi_into(shifted, x);
    visit(x);
  });
}

}  // namespace

QmcEstimate qmc_integrate(const DigitalNet& net, const DigitalShift& sigma, const Integrand& f) {
  return {qmc_integrate_many(net, sigma, {f}).front(), net.size()};
}

std::vector<double> qmc_integrate_many(const DigitalNet& net, const DigitalShift& sigma,
                                       const std::vector<Integrand>& fns) {
  for (const auto& f : fns) check_dimension(net, f);
  std::vector<CompensatedSum> sums(fns.size());
  for_each_shifted_point(net, sigma, [&](const std::vector<double>& x) {
    for (std::size_t k = 0; k < fns.size(); ++k) sums[k].add(call(fns[k], x));
  });
  std::vector<double> out;
  const double count = static_cast<double>(net.size());
  for (const auto& s : sums) out.push_back(s.value() / count);
  return out;
}

DigitalShift sampled_shift(const NetParams& params, std::uint64_t seed, std::uint64_t index) {
  auto gen = make_stream(seed, {index});
  return random_shift(params.b, params.s, params.n, gen);
}

RmseReport summarize_estimates(const std::vector<double>& estimates, std::uint64_t seed) {
  if (estimates.size() < 2) throw Error("need at least two shifts");
  CompensatedSum sum;
  for (double v : estimates) sum.add(v);
  const double n = static_cast<double>(estimates.size());
  const double mean = sum.value() / n;
  CompensatedSum sq;
  for (double v : estimates) sq.add((v - mean) * (v - mean));
  RmseReport r;
  r.mean_of_estimates = mean;
  r.e_value = std::sqrt(sq.value() / (n - 1));
  r.lg_e = r.e_value > 0.0 ? std::log2(r.e_value) : -std::numeric_limits<double>::infinity();
  r.n_shifts = static_cast<int>(estimates.size());
  r.seed = seed;
  return r;
}

std::vector<RmseReport> rmse_estimate_many(const DigitalNet& net, const std::vector<Integrand>& fns, int n_shifts,
                                           std::uint64_t seed, unsigned workers) {
  if (n_shifts < 2) throw Error(fmt::format("n_shifts={} must be >= 2", n_shifts));
  for (const auto& f : fns) check_dimension(net, f);
  net.require_full_rank();
  const auto count = static_cast<std::size_t>(n_shifts);
  std::vector<std::vector<double>> per_shift(count);
  parallel_blocks(count, workers, [&](std::size_t k) {
    per_shift[k] = qmc_integrate_many(net, sampled_shift(net.params(), seed, k), fns);
  });
  std::vector<RmseReport> out;
  for (std::size_t f = 0; f < fns.size(); ++f) {
    std::vector<double> est(count);
    for (std::size_t k = 0; k < count; ++k) est[k] = per_shift[k][f];
    out.push_back(summarize_estimates(est, seed));
  }
  return out;
}

RmseReport rmse_estimate(const DigitalNet& net, const Integrand& f, int n_shifts, std::uint64_t seed,
                         unsigned workers) {
  return rmse_estimate_many(net, {f}, n_shifts, seed, workers).front();
}

double plain_error(const DigitalNet& net, const Integrand& f) {
  const double exact = exact_integral(f);
  const auto& p = net.params();
  return qmc_integrate(net, {DigitMatrix(p.b, p.s, p.n)}, f).value - exact;
}

}  // namespace dnet
