#include "mpfr_eval.hpp"

#include <mpfr.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "dnet/detail/walk.hpp"

namespace dnet::detail {

namespace {

class Real {
 public:
  explicit Real(long bits) { mpfr_init2(v_, bits); mpfr_set_zero(v_, 1); }
  Real(const Real&) = delete;
  Real& operator=(const Real&) = delete;
  Real(Real&& o) noexcept {
    mpfr_init2(v_, mpfr_get_prec(o.v_));
    mpfr_swap(v_, o.v_);
  }
  ~Real() { mpfr_clear(v_); }

  mpfr_ptr get() { return v_; }
  mpfr_srcptr get() const { return v_; }

 private:
  mpfr_t v_;
};

// factors[t] = { value for a zero digit, value for a nonzero digit }, either
// as excesses x = eta b^(-2 nu) or as full factors 1 + x.
std::vector<Real> digit_terms(const DigitalNet& net, const WeightSpec& spec, long bits, bool with_one) {
  const auto& p = net.params();
  std::vector<Real> out;
  out.reserve(static_cast<std::size_t>(2 * p.digits()));
  Real r(bits);
  Real e(bits);
  for (int t = 0; t < p.digits(); ++t) {
    mpfr_set_d(e.get(), -2.0 * spec(t / p.n, t % p.n), MPFR_RNDN);  // exact
    mpfr_ui_pow(r.get(), static_cast<unsigned long>(p.b), e.get(), MPFR_RNDN);
    Real zero(bits);
    Real nonzero(bits);
    mpfr_mul_ui(zero.get(), r.get(), static_cast<unsigned long>(p.b - 1), MPFR_RNDN);
    mpfr_neg(nonzero.get(), r.get(), MPFR_RNDN);
    if (with_one) {
      mpfr_add_ui(zero.get(), zero.get(), 1, MPFR_RNDN);
      mpfr_add_ui(nonzero.get(), nonzero.get(), 1, MPFR_RNDN);
    }
    out.push_back(std::move(zero));
    out.push_back(std::move(nonzero));
  }
  return out;
}

template <class F>
void for_each_point_digits(const DigitalNet& net, F&& visit) {
  const auto& p = net.params();
  std::vector<std::uint8_t> flat;
  for (const auto& g : net.basis()) flat.insert(flat.end(), g.digits().begin(), g.digits().end());
  walk_odometer(flat, p.b, p.digits(), p.m, 0, net.size(), visit);
}

}  // namespace

long safe_precision_bits(const DigitalNet& net, const WeightSpec& spec) {
  const auto& p = net.params();
  const double lb = std::log2(static_cast<double>(p.b));
  double neg_log2_lower = 0.0;  // -log2 of the smallest dual term
  double log2_upper = 0.0;      // log2 of the largest per-point product
  for (double nu : spec.values()) {
    neg_log2_lower += 2.0 * std::max(nu, 0.0) * lb;
    log2_upper += std::log2(1.0 + (p.b - 1) * std::pow(static_cast<double>(p.b), -2.0 * nu));
  }
  const double bits = neg_log2_lower + log2_upper + p.m * lb + std::log2(p.digits() + 1.0) + 96.0;
  return static_cast<long>(std::ceil(bits));
}

double inversion_radicand_mpfr(const DigitalNet& net, const WeightSpec& spec, long bits) {
  const auto& p = net.params();
  const auto x = digit_terms(net, spec, bits, false);
  Real sum(bits);
  Real e(bits);
  Real px(bits);
  for_each_point_digits(net, [&](const std::uint8_t* digits) {
    mpfr_set_zero(e.get(), 1);
    for (int t = 0; t < p.digits(); ++t) {
      const Real& xt = x[static_cast<std::size_t>(2 * t + (digits[t] ? 1 : 0))];
      mpfr_mul(px.get(), e.get(), xt.get(), MPFR_RNDN);
      mpfr_add(e.get(), e.get(), xt.get(), MPFR_RNDN);
      mpfr_add(e.get(), e.get(), px.get(), MPFR_RNDN);
    }
    mpfr_add(sum.get(), sum.get(), e.get(), MPFR_RNDN);
  });
  mpfr_div_ui(sum.get(), sum.get(), static_cast<unsigned long>(net.size()), MPFR_RNDN);
  return mpfr_get_d(sum.get(), MPFR_RNDN);
}

double direct_radicand_mpfr(const DigitalNet& net, const WeightSpec& spec, long bits) {
  const auto& p = net.params();
  const auto f = digit_terms(net, spec, bits, true);
  Real sum(bits);
  Real prod(bits);
  for_each_point_digits(net, [&](const std::uint8_t* digits) {
    mpfr_set_ui(prod.get(), 1, MPFR_RNDN);
    for (int t = 0; t < p.digits(); ++t) {
      mpfr_mul(prod.get(), prod.get(), f[static_cast<std::size_t>(2 * t + (digits[t] ? 1 : 0))].get(), MPFR_RNDN);
    }
    mpfr_add(sum.get(), sum.get(), prod.get(), MPFR_RNDN);
  });
  mpfr_div_ui(sum.get(), sum.get(), static_cast<unsigned long>(net.size()), MPFR_RNDN);
  mpfr_sub_ui(sum.get(), sum.get(), 1, MPFR_RNDN);
  return mpfr_get_d(sum.get(), MPFR_RNDN);
}

}  // namespace dnet::detail
