#include "dnet/wafom.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <sstream>

#include "dnet/detail/walk.hpp"
#include "dnet/error.hpp"
#include "dnet/parallel.hpp"
#include "mpfr_eval.hpp"

namespace dnet {

WeightSpec::WeightSpec(int s, int n, std::vector<double> values, std::string name)
    : s_(s), n_(n), nu_(std::move(values)), name_(std::move(name)) {
  if (s < 1 || n < 1) throw Error("weight shape must be positive");
  if (nu_.size() != static_cast<std::size_t>(s) * static_cast<std::size_t>(n)) {
    throw Error(fmt::format("weight needs {} values, got {}", s * n, nu_.size()));
  }
  for (double v : nu_) {
    if (!std::isfinite(v)) throw Error("weight values must be finite");
  }
}

namespace {

WeightSpec column_weight(int s, int n, double offset, double slope, std::string name) {
  std::vector<double> v(static_cast<std::size_t>(s) * static_cast<std::size_t>(n));
  for (int i = 0; i < s; ++i) {
    for (int j = 0; j < n; ++j) v[static_cast<std::size_t>(i * n + j)] = offset + slope * (j + 1);
  }
  return WeightSpec(s, n, std::move(v), std::move(name));
}

}  // namespace

WeightSpec WeightSpec::dick(int s, int n) { return column_weight(s, n, 0.0, 1.0, "mu"); }
WeightSpec WeightSpec::hamming(int s, int n) { return column_weight(s, n, 1.0, 0.0, "h"); }
WeightSpec WeightSpec::dick_plus_hamming(int s, int n) { return column_weight(s, n, 1.0, 1.0, "mu+h"); }

WeightSpec WeightSpec::by_name(const std::string& name, int s, int n) {
  if (name == "mu") return dick(s, n);
  if (name == "h") return hamming(s, n);
  if (name == "mu+h") return dick_plus_hamming(s, n);
  throw Error(fmt::format("unknown weight '{}' (expected mu, h or mu+h)", name));
}

WeightSpec WeightSpec::read(std::istream& in, int s, int n) {
  std::vector<double> v;
  std::string line;
  while (std::getline(in, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string tok;
    while (ls >> tok) {
      std::size_t used = 0;
      double x = 0.0;
      try {
        x = std::stod(tok, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != tok.size()) throw Error(fmt::format("bad weight value '{}'", tok));
      v.push_back(x);
    }
  }
  return WeightSpec(s, n, std::move(v), "file");
}

WeightSpec WeightSpec::read_file(const std::string& path, int s, int n) {
  std::ifstream in(path);
  if (!in) throw Error(fmt::format("cannot open weight file '{}'", path));
  return read(in, s, n);
}

WeightSpec WeightSpec::scaled(double factor) const {
  std::vector<double> v = nu_;
  for (auto& x : v) x *= factor;
  return WeightSpec(s_, n_, std::move(v), fmt::format("{}*({})", factor, name_));
}

std::string to_string(WafomMethod method) {
  switch (method) {
    case WafomMethod::inversion:
      return "inversion";
    case WafomMethod::dual_bruteforce:
      return "dual";
    case WafomMethod::highprec:
      return "highprec";
  }
  return "?";
}

WafomMethod wafom_method_from_string(const std::string& name) {
  if (name == "inversion") return WafomMethod::inversion;
  if (name == "dual" || name == "dual_bruteforce") return WafomMethod::dual_bruteforce;
  if (name == "highprec") return WafomMethod::highprec;
  throw Error(fmt::format("unknown method '{}'", name));
}

WafomValue make_wafom_value(double radicand, WafomMethod method) {
  WafomValue v;
  v.method = method;
  v.radicand = radicand;
  if (std::isnan(radicand)) throw NumericalError("accumulation failure: radicand is NaN");
  if (radicand < -kRadicandTolerance) {
    throw NumericalError(fmt::format("accumulation failure: radicand {:.3e}", radicand));
  }
  if (radicand < 0.0) {
    v.clamped = true;
    radicand = 0.0;
  }
  v.w = std::sqrt(radicand);
  v.lg_w = v.w > 0.0 ? std::log2(v.w) : -std::numeric_limits<double>::infinity();
  return v;
}

double weight_of(const DigitMatrix& a, const WeightSpec& spec) {
  if (a.rows() != spec.rows() || a.cols() != spec.cols()) throw Error("shape mismatch between matrix and weight");
  double acc = 0.0;
  for (int i = 0; i < a.rows(); ++i) {
    for (int j = 0; j < a.cols(); ++j) {
      if (a(i, j) != 0) acc += spec(i, j);
    }
  }
  return acc;
}

namespace {

constexpr int kChunkBits = 8;
constexpr std::uint64_t kBlockPoints = 4096;

// b^(-2 nu) as a double-double.
DoubleDouble decay(int b, double nu) {
  if (b == 2) {
    const double hi = std::exp2(-2.0 * nu);
    const long double ref = std::exp2l(-2.0L * static_cast<long double>(nu));
    return {hi, static_cast<double>(ref - static_cast<long double>(hi))};
  }
  const long double ref = std::pow(static_cast<long double>(b), -2.0L * static_cast<long double>(nu));
  const double hi = static_cast<double>(ref);
  return {hi, static_cast<double>(ref - static_cast<long double>(hi))};
}

}  // namespace

InversionEvaluator::InversionEvaluator(int b, WeightSpec weight) : b_(b), weight_(std::move(weight)) {
  if (!is_prime(b)) throw Error(fmt::format("base {} is not prime", b));
  const int s = weight_.rows();
  const int n = weight_.cols();
  x_zero_.resize(static_cast<std::size_t>(s * n));
  x_nonzero_.resize(static_cast<std::size_t>(s * n));
  for (int i = 0; i < s; ++i) {
    for (int j = 0; j < n; ++j) {
      const DoubleDouble r = decay(b, weight_(i, j));
      const auto t = static_cast<std::size_t>(i * n + j);
      x_zero_[t] = DoubleDouble(static_cast<double>(b - 1)) * r;
      x_nonzero_[t] = -r;
    }
  }
  if (b != 2 || n > 64) return;
  chunks_.resize(static_cast<std::size_t>(s));
  for (int i = 0; i < s; ++i) {
    for (int lo = 0; lo < n; lo += kChunkBits) {
      ChunkTable ct;
      ct.shift = lo;
      const int len = std::min(kChunkBits, n - lo);
      ct.mask = (std::uint64_t{1} << len) - 1;
      ct.excess.resize(std::size_t{1} << len);
      ct.excess_hi.resize(std::size_t{1} << len);
      for (std::uint64_t v = 0; v <= ct.mask; ++v) {
        DoubleDouble p(0.0);
        for (int t = 0; t < len; ++t) {
          // bit (lo + t) of the packed row holds digit column n-1-lo-t
          const auto pos = static_cast<std::size_t>(i * n + (n - 1 - lo - t));
          p = excess_product(p, ((v >> t) & 1U) ? x_nonzero_[pos] : x_zero_[pos]);
        }
        ct.excess[v] = p;
        ct.excess_hi[v] = p.value();
      }
      chunks_[i].push_back(std::move(ct));
    }
  }
}

void InversionEvaluator::check(const DigitalNet& net) const {
  const auto& p = net.params();
  if (p.b != b_ || p.s != weight_.rows() || p.n != weight_.cols()) {
    throw Error(fmt::format("net {} does not match weight shape {}x{} / base {}", p.to_string(), weight_.rows(),
                            weight_.cols(), b_));
  }
  net.require_full_rank();
}

InversionEvaluator::Accumulated InversionEvaluator::accumulate(const DigitalNet& net, unsigned workers) const {
  const auto& p = net.params();
  const std::uint64_t total = net.size();
  const std::uint64_t n_blocks = (total + kBlockPoints - 1) / kBlockPoints;
  std::vector<DoubleDouble> partial(n_blocks);
  std::vector<double> mass(n_blocks);

  if (!chunks_.empty()) {
    const auto basis = net.packed_basis();
    parallel_blocks(n_blocks, workers, [&](std::size_t blk) {
      const std::uint64_t begin = blk * kBlockPoints;
      const std::uint64_t end = std::min(total, begin + kBlockPoints);
      DoubleDouble sum(0.0);
      double m = 0.0;
      detail::walk_gray(basis, p.s, p.m, begin, end, [&](const std::uint64_t* rows) {
        DoubleDouble e(0.0);
        for (int i = 0; i < p.s; ++i) {
          for (const auto& ct : chunks_[i]) e = excess_product(e, ct.excess[(rows[i] >> ct.shift) & ct.mask]);
        }
        sum += e;
        m += 1.0 + std::fabs(e.hi);
      });
      partial[blk] = sum;
      mass[blk] = m;
    });
  } else {
    std::vector<std::uint8_t> flat;
    for (const auto& g : net.basis()) flat.insert(flat.end(), g.digits().begin(), g.digits().end());
    const int len = p.digits();
    parallel_blocks(n_blocks, workers, [&](std::size_t blk) {
      const std::uint64_t begin = blk * kBlockPoints;
      const std::uint64_t end = std::min(total, begin + kBlockPoints);
      DoubleDouble sum(0.0);
      double m = 0.0;
      detail::walk_odometer(flat, p.b, len, p.m, begin, end, [&](const std::uint8_t* digits) {
        DoubleDouble e(0.0);
        for (int t = 0; t < len; ++t) e = excess_product(e, digits[t] ? x_nonzero_[t] : x_zero_[t]);
        sum += e;
        m += 1.0 + std::fabs(e.hi);
      });
      partial[blk] = sum;
      mass[blk] = m;
    });
  }

  DoubleDouble sum(0.0);
  double m = 0.0;
  for (std::size_t k = 0; k < partial.size(); ++k) {
    sum += partial[k];
    m += mass[k];
  }
  Accumulated out;
  out.mean_mass = m / static_cast<double>(total);
  // Division by b^m: exact for b = 2, one rounding otherwise.
  if (b_ == 2) {
    const double inv = 1.0 / static_cast<double>(total);
    out.mean_excess = {sum.hi * inv, sum.lo * inv};
    return out;
  }
  const double q = sum.hi / static_cast<double>(total);
  const DoubleDouble back = DoubleDouble(q) * DoubleDouble(static_cast<double>(total));
  const DoubleDouble rem = sum - back;
  out.mean_excess = DoubleDouble(q) + DoubleDouble(rem.value() / static_cast<double>(total));
  return out;
}

DoubleDouble InversionEvaluator::squared(const DigitalNet& net, unsigned workers) const {
  check(net);
  const auto& p = net.params();
  if (p.m == p.digits()) return DoubleDouble(0.0);
  return accumulate(net, workers).mean_excess;
}

WafomValue InversionEvaluator::evaluate(const DigitalNet& net, unsigned workers) const {
  check(net);
  const auto& p = net.params();
  if (p.m == p.digits()) return make_wafom_value(0.0, WafomMethod::inversion);
  const Accumulated acc = accumulate(net, workers);
  const double value = acc.mean_excess.value();
  // Each double-double step loses at most a few units of 2^-104 relative to
  // the magnitudes involved; s*n steps per point plus the block sums.
  const double error_bound = acc.mean_mass * (p.digits() + 64) * 0x1.0p-100;
  if (error_bound <= 0x1.0p-52 * std::fabs(value)) return make_wafom_value(value, WafomMethod::inversion);
  const long bits = detail::safe_precision_bits(net, weight_);
  WafomValue v = make_wafom_value(detail::inversion_radicand_mpfr(net, weight_, bits), WafomMethod::inversion);
  v.precision_bits = bits;
  return v;
}

double InversionEvaluator::fast_squared_b2(const DigitalNet& net) const {
  const auto& p = net.params();
  const auto basis = net.packed_basis();
  CompensatedSum sum;
  detail::walk_gray(basis, p.s, p.m, 0, net.size(), [&](const std::uint64_t* rows) {
    double e = 0.0;
    for (int i = 0; i < p.s; ++i) {
      for (const auto& ct : chunks_[i]) e = excess_product(e, ct.excess_hi[(rows[i] >> ct.shift) & ct.mask]);
    }
    sum += e;
  });
  return sum.value() / static_cast<double>(net.size());
}

double InversionEvaluator::fast_squared_generic(const DigitalNet& net) const {
  const auto& p = net.params();
  std::vector<std::uint8_t> flat;
  for (const auto& g : net.basis()) flat.insert(flat.end(), g.digits().begin(), g.digits().end());
  const int len = p.digits();
  std::vector<double> xz(static_cast<std::size_t>(len));
  std::vector<double> xn(static_cast<std::size_t>(len));
  for (int t = 0; t < len; ++t) {
    xz[t] = x_zero_[t].value();
    xn[t] = x_nonzero_[t].value();
  }
  CompensatedSum sum;
  detail::walk_odometer(flat, p.b, len, p.m, 0, net.size(), [&](const std::uint8_t* digits) {
    double e = 0.0;
    for (int t = 0; t < len; ++t) e = excess_product(e, digits[t] ? xn[t] : xz[t]);
    sum += e;
  });
  return sum.value() / static_cast<double>(net.size());
}

double InversionEvaluator::fast_lg_w(const DigitalNet& net) const {
  check(net);
  const auto& p = net.params();
  if (p.m == p.digits()) return -std::numeric_limits<double>::infinity();
  const double sq = chunks_.empty() ? fast_squared_generic(net) : fast_squared_b2(net);
  if (sq > 0.0) return 0.5 * std::log2(sq);
  // Too close to zero for double; fall back to the accurate path.
  return evaluate(net).lg_w;
}

WafomValue wafom_inversion(const DigitalNet& net, const WeightSpec& spec, unsigned workers) {
  return InversionEvaluator(net.params().b, spec).evaluate(net, workers);
}

WafomValue wafom_dual_bruteforce(const DigitalNet& net, const WeightSpec& spec) {
  const auto& p = net.params();
  if (p.s != spec.rows() || p.n != spec.cols()) throw Error("shape mismatch between net and weight");
  const int dual_dim = p.digits() - net.rank();
  const double log2_size = dual_dim * std::log2(static_cast<double>(p.b));
  if (log2_size > kDualEnumerationLimitLog2) {
    throw Error(fmt::format("dual too large to enumerate: {}^{} = 2^{:.1f} elements (limit 2^{:.0f})", p.b, dual_dim,
                            log2_size, kDualEnumerationLimitLog2));
  }
  const DualNet d = dual(net);
  std::vector<std::uint8_t> flat;
  for (const auto& h : d.basis) flat.insert(flat.end(), h.digits().begin(), h.digits().end());
  const int len = p.digits();
  const std::uint64_t count = checked_pow(static_cast<std::uint64_t>(p.b), dual_dim);
  DoubleDouble sum(0.0);
  detail::walk_odometer(flat, p.b, len, dual_dim, 0, count, [&](const std::uint8_t* digits) {
    double nu = 0.0;
    bool nonzero = false;
    for (int t = 0; t < len; ++t) {
      if (digits[t]) {
        nu += spec(t / p.n, t % p.n);
        nonzero = true;
      }
    }
    if (nonzero) sum += std::pow(static_cast<double>(p.b), -2.0 * nu);
  });
  return make_wafom_value(sum.value(), WafomMethod::dual_bruteforce);
}

WafomValue wafom_highprec(const DigitalNet& net, const WeightSpec& spec) {
  const auto& p = net.params();
  if (p.s != spec.rows() || p.n != spec.cols()) throw Error("shape mismatch between net and weight");
  net.require_full_rank();
  const double log2_size = p.m * std::log2(static_cast<double>(p.b));
  if (log2_size > kHighPrecLimitLog2) {
    throw Error(fmt::format("net too large for the high-precision path: 2^{:.1f} points (limit 2^{:.0f})", log2_size,
                            kHighPrecLimitLog2));
  }
  if (p.m == p.digits()) return make_wafom_value(0.0, WafomMethod::highprec);
  const long cap = std::max(160L, detail::safe_precision_bits(net, spec));
  long bits = std::min(160L, cap);
  double prev = detail::direct_radicand_mpfr(net, spec, bits);
  while (bits < cap) {
    bits = std::min(2 * bits, cap);
    const double next = detail::direct_radicand_mpfr(net, spec, bits);
    const bool settled = std::fabs(next - prev) <= 0x1.0p-64 * std::fabs(next);
    prev = next;
    if (settled) break;
  }
  WafomValue v = make_wafom_value(prev, WafomMethod::highprec);
  v.precision_bits = bits;
  return v;
}

WafomValue compute_wafom(const DigitalNet& net, const WeightSpec& spec, WafomMethod method, unsigned workers) {
  switch (method) {
    case WafomMethod::inversion:
      return wafom_inversion(net, spec, workers);
    case WafomMethod::dual_bruteforce:
      return wafom_dual_bruteforce(net, spec);
    case WafomMethod::highprec:
      return wafom_highprec(net, spec);
  }
  throw Error("unknown method");
}

}  // namespace dnet
