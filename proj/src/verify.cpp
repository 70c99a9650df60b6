#include "dnet/verify.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

#include "dnet/exact_oracle.hpp"
#include "dnet/integrands.hpp"
#include "dnet/rng.hpp"
#include "dnet/wafom.hpp"

namespace dnet {

namespace {

double rel(double a, double b) {
  const double scale = std::max(std::fabs(a), std::fabs(b));
  return scale == 0.0 ? 0.0 : std::fabs(a - b) / scale;
}

CheckResult verdict(std::string name, double worst, double tol, long cases, std::string detail = {}) {
  return {std::move(name), worst <= tol, worst, tol, cases, std::move(detail)};
}

// Full-rank random net, redrawing on dependent generators.
DigitalNet draw_net(const NetParams& p, SplitMix64& gen) {
  for (;;) {
    auto net = random_net(p, gen);
    if (net.full_rank()) return net;
  }
}

GroupFunction random_table(int b, int s, int n, SplitMix64& gen) {
  return tabulate(b, s, n, [&](const DigitMatrix&) { return 2.0 * uniform_unit(gen) - 1.0; });
}

// (s, n) with s*n <= 12 for the given draw.
std::pair<int, int> small_shape(SplitMix64& gen, int max_digits) {
  const int s = 1 + static_cast<int>(uniform_below(gen, 4));
  const int n = std::max(1, max_digits / s - static_cast<int>(uniform_below(gen, 2)));
  return {s, n};
}

}  // namespace

CheckResult check_macwilliams(std::uint64_t seed, int nets) {
  auto gen = make_stream(seed, {0x4d57});
  double worst = 0.0;
  long cases = 0;
  for (int k = 0; k < nets; ++k) {
    const int b = k % 2 == 0 ? 2 : 3;
    auto [s, n] = small_shape(gen, b == 2 ? 12 : 8);
    const int m = k % (s * n + 1);
    const auto net = draw_net({b, s, n, m}, gen);
    for (const auto& nu : {WeightSpec::dick(s, n), WeightSpec::dick_plus_hamming(s, n)}) {
      worst = std::max(worst, rel(wafom_inversion(net, nu).w, wafom_dual_bruteforce(net, nu).w));
      ++cases;
    }
  }
  return verdict("macwilliams", worst, 1e-12, cases, fmt::format("{} nets, weights mu and mu+h", nets));
}

CheckResult check_unbiasedness(std::uint64_t seed, int pairs) {
  auto gen = make_stream(seed, {0x5542});
  static const char* ids[] = {"f0", "f1", "f3", "f5"};
  double worst = 0.0;
  for (int k = 0; k < pairs; ++k) {
    auto [s, n] = small_shape(gen, 12);
    const int m = static_cast<int>(uniform_below(gen, static_cast<std::uint64_t>(std::min(s * n, 8) + 1)));
    const auto net = draw_net({2, s, n, m}, gen);
    const auto F = discretize(make_integrand(ids[k % 4], s), 2, n, 2);
    const double mean = F.mean();
    worst = std::max(worst, std::fabs(shift_average(F, net) - mean) / std::max(1.0, std::fabs(mean)));
  }
  return verdict("unbiasedness", worst, 1e-12, pairs, "b=2, s*n<=12, f0 f1 f3 f5");
}

CheckResult check_variance_identity(std::uint64_t seed, int pairs) {
  auto gen = make_stream(seed, {0x5641});
  double worst = 0.0;
  for (int k = 0; k < pairs; ++k) {
    const int b = k % 2 == 0 ? 2 : 3;
    auto [s, n] = small_shape(gen, b == 2 ? 12 : 7);
    const int m = static_cast<int>(uniform_below(gen, static_cast<std::uint64_t>(s * n + 1)));
    const auto net = draw_net({b, s, n, m}, gen);
    const auto F = random_table(b, s, n, gen);
    const auto v = variance_exact(F, net);
    worst = std::max(worst, std::fabs(v.var_by_shifts - v.var_by_dual) / std::max(1.0, v.var_by_shifts));
  }
  return verdict("variance identity", worst, 1e-12, pairs, "b in {2,3}, |G| <= 2^12");
}

CheckResult check_poisson(std::uint64_t seed, int pairs) {
  auto gen = make_stream(seed, {0x5053});
  double worst = 0.0;
  for (int k = 0; k < pairs; ++k) {
    const int b = k % 2 == 0 ? 2 : 3;
    auto [s, n] = small_shape(gen, b == 2 ? 10 : 6);
    const int m = static_cast<int>(uniform_below(gen, static_cast<std::uint64_t>(s * n + 1)));
    const auto net = draw_net({b, s, n, m}, gen);
    const auto pc = poisson_check(random_table(b, s, n, gen), net);
    worst = std::max({worst, std::fabs(pc.lhs - pc.rhs), std::fabs(pc.rhs_imag)});
  }
  return verdict("poisson summation", worst, 1e-12, pairs);
}

CheckResult check_shifted_fourier(std::uint64_t seed, int cases) {
  auto gen = make_stream(seed, {0x5346});
  double worst = 0.0;
  for (int k = 0; k < cases; ++k) {
    const int b = k % 2 == 0 ? 2 : 3;
    const int n = 2;
    const auto F = random_table(b, 2, n, gen);
    worst = std::max(worst, shifted_fourier_check(F, random_shift(b, 2, n, gen)));
  }
  return verdict("shifted fourier", worst, 1e-12, cases);
}

CheckResult check_walsh_bound() {
  double worst = 0.0;
  long cases = 0;
  for (const char* id : {"f1", "f3"}) {
    for (int s = 1; s <= 2; ++s) {
      for (int n = 1; n <= 3; ++n) {
        worst = std::max(worst, walsh_bound_check(make_integrand(id, s), n));
        ++cases;
      }
    }
  }
  return {"walsh bound", worst <= 1.0 + 1e-3, worst, 1.0 + 1e-3, cases, "worst |coefficient| / bound"};
}

CheckResult check_rmse_inequality(std::uint64_t seed, int nets) {
  auto gen = make_stream(seed, {0x4b48});
  const auto f = make_integrand("f1", 1);
  double worst = -std::numeric_limits<double>::infinity();
  double tightest = 0.0;
  for (int k = 0; k < nets; ++k) {
    const int m = static_cast<int>(uniform_below(gen, 4));
    const auto kh = kh_rmse_check(f, draw_net({2, 1, 3, m}, gen));
    worst = std::max(worst, kh.lhs - kh.rhs);
    if (kh.rhs > 0) tightest = std::max(tightest, kh.lhs / kh.rhs);
  }
  return {"rmse inequality", worst <= 0.0, worst, 0.0, nets,
          fmt::format("max lhs - rhs; largest lhs/rhs {:.4f}", tightest)};
}

CheckResult check_highprec_agreement(std::uint64_t seed, int nets) {
  auto gen = make_stream(seed, {0x4850});
  const auto nu = WeightSpec::dick_plus_hamming(4, 32);
  double worst = 0.0;
  double deepest = 0.0;
  int deep = 0;
  for (int k = 0; k < nets; ++k) {
    const auto net = draw_net({2, 4, 32, 12}, gen);
    WeightSpec w = nu;
    auto v = wafom_inversion(net, w);
    if (k % 2 == 1) {
      for (double factor = 2.0; v.lg_w > -24.0 && factor <= 8.0; factor += 0.5) {
        w = nu.scaled(factor);
        v = wafom_inversion(net, w);
      }
      if (v.lg_w <= -24.0) ++deep;
      deepest = std::min(deepest, v.lg_w);
    }
    worst = std::max(worst, rel(v.w, wafom_highprec(net, w).w));
  }
  const bool enough_deep = deep >= nets / 2;
  return {"highprec agreement", worst <= 1e-10 && enough_deep, worst, 1e-10, nets,
          fmt::format("{} cases at lg W <= -24, lowest {:.2f}", deep, deepest)};
}

std::vector<CheckResult> run_identity_suite(std::uint64_t seed) {
  return {check_macwilliams(seed),       check_unbiasedness(seed),    check_variance_identity(seed),
          check_poisson(seed),           check_shifted_fourier(seed), check_walsh_bound(),
          check_rmse_inequality(seed),   check_highprec_agreement(seed)};
}

}  // namespace dnet
