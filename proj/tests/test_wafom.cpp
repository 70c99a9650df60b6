#include <doctest.h>

#include <cmath>
#include <limits>
#include <sstream>

#include "dnet/wafom.hpp"

using namespace dnet;

namespace {

DigitMatrix M(int b, std::vector<std::vector<int>> rows) { return DigitMatrix::from_rows(b, rows); }

double rel(double a, double b) {
  const double scale = std::max(std::fabs(a), std::fabs(b));
  return scale == 0.0 ? 0.0 : std::fabs(a - b) / scale;
}

// Random invertible recombination of the generators: each new generator is
// the old one plus a random combination of the later ones (unit triangular),
// followed by a cyclic rotation.
DigitalNet rebasis(const DigitalNet& net, std::uint64_t seed) {
  SplitMix64 gen(seed);
  const auto& p = net.params();
  std::vector<DigitMatrix> basis = net.basis();
  for (int k = 0; k < p.m; ++k) {
    for (int l = k + 1; l < p.m; ++l) {
      basis[k] += basis[l].scaled(static_cast<int>(uniform_below(gen, static_cast<std::uint64_t>(p.b))));
    }
  }
  if (p.m > 1) std::rotate(basis.begin(), basis.begin() + 1, basis.end());
  return DigitalNet(p, std::move(basis));
}

}  // namespace

TEST_CASE("weight constructors") {
  auto mu = WeightSpec::dick(2, 3);
  auto h = WeightSpec::hamming(2, 3);
  auto muh = WeightSpec::dick_plus_hamming(2, 3);
  CHECK(mu(1, 2) == 3.0);
  CHECK(h(1, 2) == 1.0);
  CHECK(muh(0, 0) == 2.0);
  CHECK(WeightSpec::by_name("mu+h", 2, 3).values() == muh.values());
  CHECK_THROWS_AS(WeightSpec::by_name("nope", 2, 3), Error);
  CHECK_THROWS_AS(WeightSpec(1, 2, {1.0, std::numeric_limits<double>::infinity()}), Error);
  std::istringstream in("# custom\n1 2.5\n0.5 3\n");
  auto w = WeightSpec::read(in, 2, 2);
  CHECK(w(0, 1) == 2.5);
  CHECK(w(1, 0) == 0.5);
  std::istringstream short_in("1 2 3");
  CHECK_THROWS_AS(WeightSpec::read(short_in, 2, 2), Error);
}

TEST_CASE("weight_of") {
  CHECK(weight_of(DigitMatrix(2, 2, 3), WeightSpec::dick(2, 3)) == 0.0);
  auto a = M(2, {{1, 0, 1}});
  CHECK(weight_of(a, WeightSpec::dick(1, 3)) == 4.0);
  CHECK(weight_of(a, WeightSpec::hamming(1, 3)) == 2.0);
  CHECK(weight_of(a, WeightSpec::dick_plus_hamming(1, 3)) == 6.0);
  // delta only sees zero / nonzero
  CHECK(weight_of(M(3, {{2, 0}}), WeightSpec::dick(1, 2)) == 1.0);
  CHECK(weight_of(M(3, {{1, 0}}), WeightSpec::dick(1, 2)) == 1.0);
  CHECK_THROWS_AS(weight_of(a, WeightSpec::dick(1, 2)), Error);
}

TEST_CASE("inversion examples") {
  SUBCASE("whole space") {
    DigitalNet net({2, 1, 2, 2}, {M(2, {{1, 0}}), M(2, {{0, 1}})});
    auto v = wafom_inversion(net, WeightSpec::dick(1, 2));
    CHECK(v.w == 0.0);
    CHECK(std::isinf(v.lg_w));
    CHECK(v.lg_w < 0);
  }
  SUBCASE("trivial net, one digit") {
    DigitalNet net({2, 1, 1, 0}, {});
    auto v = wafom_inversion(net, WeightSpec::dick(1, 1));
    CHECK(v.radicand == 0.25);
    CHECK(v.w == 0.5);
    CHECK(v.lg_w == -1.0);
  }
  SUBCASE("one generator") {
    DigitalNet net({2, 1, 2, 1}, {M(2, {{1, 0}})});
    auto v = wafom_inversion(net, WeightSpec::dick(1, 2));
    CHECK(v.w == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(wafom_dual_bruteforce(net, WeightSpec::dick(1, 2)).w == 0.25);
  }
}

TEST_CASE("dual brute-force examples") {
  DigitalNet full({2, 1, 2, 2}, {M(2, {{1, 0}}), M(2, {{0, 1}})});
  CHECK(wafom_dual_bruteforce(full, WeightSpec::dick(1, 2)).w == 0.0);

  for (int b : {2, 3}) {
    auto nu = WeightSpec::dick_plus_hamming(2, 3).scaled(0.7);
    DigitalNet zero({b, 2, 3, 0}, {});
    double prod = 1.0;
    for (double v : nu.values()) prod *= 1.0 + (b - 1) * std::pow(static_cast<double>(b), -2.0 * v);
    CHECK(rel(wafom_dual_bruteforce(zero, nu).radicand, prod - 1.0) < 1e-14);
    CHECK(rel(wafom_inversion(zero, nu).radicand, prod - 1.0) < 1e-14);
  }
}

TEST_CASE("inversion equals dual enumeration (MacWilliams)") {
  int checked = 0;
  for (int b : {2, 3}) {
    for (std::uint64_t seed = 0; seed < 120; ++seed) {
      const int sn = b == 2 ? 12 : 8;
      const int s = 1 + static_cast<int>(seed % 4);
      const int n = std::max(1, sn / s);
      const int m = static_cast<int>(seed % static_cast<std::uint64_t>(s * n + 1));
      auto net = random_net({b, s, n, m}, seed + 1000 * static_cast<std::uint64_t>(b));
      if (!net.full_rank()) continue;
      for (const auto& nu : {WeightSpec::dick(s, n), WeightSpec::dick_plus_hamming(s, n), WeightSpec::hamming(s, n)}) {
        auto inv = wafom_inversion(net, nu);
        auto brute = wafom_dual_bruteforce(net, nu);
        CHECK(rel(inv.w, brute.w) <= 1e-12);
        ++checked;
      }
    }
  }
  CHECK(checked > 500);
}

TEST_CASE("other prime bases") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto net = random_net({5, 2, 2, static_cast<int>(seed % 5)}, seed);
    if (!net.full_rank()) continue;
    auto nu = WeightSpec::dick(2, 2);
    CHECK(rel(wafom_inversion(net, nu).w, wafom_dual_bruteforce(net, nu).w) <= 1e-12);
    CHECK(rel(wafom_highprec(net, nu).w, wafom_dual_bruteforce(net, nu).w) <= 1e-14);
  }
}

TEST_CASE("squared dominance of mu+h over mu") {
  for (int b : {2, 3}) {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
      auto net = random_net({b, 2, 3, static_cast<int>(seed % 6)}, seed);
      auto w_mu = wafom_dual_bruteforce(net, WeightSpec::dick(2, 3));
      auto w_muh = wafom_dual_bruteforce(net, WeightSpec::dick_plus_hamming(2, 3));
      CHECK(w_muh.radicand <= std::pow(b, -2.0) * w_mu.radicand * (1 + 1e-15));
    }
  }
}

TEST_CASE("refinement decreases W") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    NetParams p{2, 3, 4, 5};
    auto net = random_net(p, seed, RankCheck::strict);
    std::vector<DigitMatrix> bigger = net.basis();
    SplitMix64 gen(seed + 99);
    DigitalNet q = net;
    for (;;) {
      auto extra = bigger;
      extra.push_back(random_digit_matrix(2, 3, 4, gen));
      NetParams pq = p;
      pq.m = 6;
      q = DigitalNet(pq, extra);
      if (q.full_rank()) break;
    }
    auto nu = WeightSpec::dick_plus_hamming(3, 4);
    CHECK(wafom_inversion(q, nu).w <= wafom_inversion(net, nu).w);
  }
}

TEST_CASE("W depends only on the subgroup") {
  for (int b : {2, 3}) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      NetParams p = b == 2 ? NetParams{2, 4, 8, 9} : NetParams{3, 2, 4, 5};
      auto net = random_net(p, seed);
      if (!net.full_rank()) continue;
      auto nu = WeightSpec::dick_plus_hamming(p.s, p.n);
      auto other = rebasis(net, seed + 5);
      CHECK_FALSE(other.basis() == net.basis());
      CHECK(rel(wafom_inversion(net, nu).w, wafom_inversion(other, nu).w) <= 1e-13);
    }
  }
}

TEST_CASE("large-instance values are finite") {
  auto nu = WeightSpec::dick_plus_hamming(4, 32);
  InversionEvaluator eval(2, nu);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto net = random_net({2, 4, 32, 10}, seed);
    auto v = eval.evaluate(net);
    CHECK(std::isfinite(v.lg_w));
    CHECK(v.lg_w < -5.0);
    CHECK(v.lg_w > -25.0);
    CHECK_FALSE(v.clamped);
    CHECK(std::fabs(eval.fast_lg_w(net) - v.lg_w) < 1e-6);
  }
}

TEST_CASE("inversion agrees with high-precision evaluation") {
  auto nu = WeightSpec::dick_plus_hamming(4, 32);
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    auto net = random_net({2, 4, 32, 12}, seed);
    CHECK(rel(wafom_inversion(net, nu).w, wafom_highprec(net, nu).w) <= 1e-10);
    // heavier weights push lg W below -24 for this net
    double factor = 2.0;
    auto deep = nu.scaled(factor);
    auto v = wafom_inversion(net, deep);
    while (v.lg_w >= -24.0 && factor < 8.0) {
      factor += 0.5;
      deep = nu.scaled(factor);
      v = wafom_inversion(net, deep);
    }
    REQUIRE(v.lg_w < -24.0);
    CHECK(rel(v.w, wafom_highprec(net, deep).w) <= 1e-10);
  }
  // tiny nets: all three routes
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto net = random_net({2, 2, 3, static_cast<int>(seed % 7)}, seed);
    if (!net.full_rank()) continue;
    auto mu = WeightSpec::dick(2, 3);
    CHECK(rel(wafom_highprec(net, mu).w, wafom_dual_bruteforce(net, mu).w) <= 2e-16);
  }
  DigitalNet full({2, 1, 2, 2}, {M(2, {{1, 0}}), M(2, {{0, 1}})});
  CHECK(wafom_highprec(full, WeightSpec::dick(1, 2)).w == 0.0);
}

TEST_CASE("worker count does not change the result") {
  auto nu = WeightSpec::dick_plus_hamming(4, 30);
  auto net = random_net({2, 4, 30, 15}, 7);
  InversionEvaluator eval(2, nu);
  const auto one = eval.squared(net, 1);
  const auto three = eval.squared(net, 3);
  CHECK(one.hi == three.hi);
  CHECK(one.lo == three.lo);
}

TEST_CASE("guards and radicand handling") {
  auto big = random_net({2, 4, 32, 4}, 1);
  CHECK_THROWS_WITH_AS(wafom_dual_bruteforce(big, WeightSpec::dick(4, 32)), doctest::Contains("dual too large"), Error);
  auto many = random_net({2, 4, 8, 21}, 1);
  CHECK_THROWS_AS(wafom_highprec(many, WeightSpec::dick(4, 8)), Error);
  CHECK_THROWS_AS(wafom_inversion(big, WeightSpec::dick(4, 31)), Error);

  auto small = make_wafom_value(-1e-9, WafomMethod::inversion);
  CHECK(small.clamped);
  CHECK(small.w == 0.0);
  CHECK_THROWS_AS(make_wafom_value(-1e-3, WafomMethod::inversion), NumericalError);
  CHECK_FALSE(make_wafom_value(1e-9, WafomMethod::inversion).clamped);
}
