#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "dnet/net.hpp"
#include "dnet/net_io.hpp"

using namespace dnet;

namespace {

DigitMatrix M(int b, std::vector<std::vector<int>> rows) { return DigitMatrix::from_rows(b, rows); }

std::set<DigitMatrix> as_set(const std::vector<DigitMatrix>& v) { return {v.begin(), v.end()}; }

// Every element of Z_b^{s x n}, by counting in base b.
std::vector<DigitMatrix> whole_group(int b, int s, int n) {
  std::vector<DigitMatrix> out;
  DigitMatrix x(b, s, n);
  for (;;) {
    out.push_back(x);
    auto d = x.digits();
    std::size_t t = 0;
    while (t < d.size() && d[t] == b - 1) d[t++] = 0;
    if (t == d.size()) break;
    ++d[t];
  }
  return out;
}

}  // namespace

TEST_CASE("params validation") {
  CHECK_NOTHROW(NetParams{2, 4, 32, 10}.validate());
  CHECK_THROWS_AS((NetParams{4, 1, 2, 1}.validate()), Error);
  CHECK_THROWS_AS((NetParams{2, 1, 2, 3}.validate()), Error);
  CHECK_THROWS_AS((NetParams{2, 0, 2, 0}.validate()), Error);
  CHECK_THROWS_AS((NetParams{3, 1, 41, 1}.validate()), Error);
}

TEST_CASE("enumerate_points examples") {
  SUBCASE("m = 0 gives the zero matrix") {
    DigitalNet net({2, 2, 3, 0}, {});
    auto pts = enumerate_points(net);
    REQUIRE(pts.size() == 1);
    CHECK(pts[0].is_zero());
  }
  SUBCASE("one generator") {
    DigitalNet net({2, 1, 2, 1}, {M(2, {{1, 0}})});
    CHECK(as_set(enumerate_points(net)) == std::set<DigitMatrix>{M(2, {{0, 0}}), M(2, {{1, 0}})});
  }
  SUBCASE("two generators span the whole group") {
    DigitalNet net({2, 1, 2, 2}, {M(2, {{1, 0}}), M(2, {{0, 1}})});
    auto pts = enumerate_points(net);
    CHECK(pts.size() == 4);
    CHECK(as_set(pts) == as_set(whole_group(2, 1, 2)));
  }
  SUBCASE("degenerate basis") {
    DigitalNet net({2, 1, 2, 2}, {M(2, {{1, 1}}), M(2, {{1, 1}})});
    CHECK(net.rank() == 1);
    CHECK_THROWS_WITH_AS(enumerate_points(net), doctest::Contains("degenerate basis"), Error);
  }
}

TEST_CASE("span property and order independence") {
  for (int b : {2, 3, 5}) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      NetParams p{b, 2, 2, static_cast<int>(seed % 4)};
      if (b == 5) p.m = std::min(p.m, 2);
      auto net = random_net(p, seed);
      if (!net.full_rank()) continue;
      auto natural = enumerate_points(net, PointOrder::natural);
      auto gray = enumerate_points(net, PointOrder::gray);
      CHECK(natural.size() == net.size());
      CHECK(as_set(natural).size() == net.size());
      CHECK(as_set(natural) == as_set(gray));
      // closed under addition: it is a subgroup
      auto set = as_set(natural);
      for (const auto& x : natural) CHECK(set.count(x + natural.back()) == 1);
    }
  }
}

TEST_CASE("natural order matches coefficient counting") {
  auto net = random_net({2, 3, 4, 3}, 11, RankCheck::strict);
  auto pts = enumerate_points(net, PointOrder::natural);
  for (std::uint64_t k = 0; k < pts.size(); ++k) {
    DigitMatrix x(2, 3, 4);
    for (int t = 0; t < 3; ++t) {
      if ((k >> t) & 1U) x += net.basis()[t];
    }
    CHECK(pts[k] == x);
  }
}

TEST_CASE("psi") {
  CHECK(psi(DigitMatrix(2, 3, 4)) == std::vector<double>{0.0, 0.0, 0.0});
  CHECK(psi(M(2, {{1, 0}, {0, 1}})) == std::vector<double>{0.5, 0.25});
  // 2/3 + 1/9, hand-checked
  CHECK(psi(M(3, {{2, 1}}))[0] == doctest::Approx(7.0 / 9.0).epsilon(1e-15));
  // largest value is 1 - b^-n
  DigitMatrix top(2, 1, 30);
  for (int j = 0; j < 30; ++j) top.set(0, j, 1);
  CHECK(psi(top)[0] == 1.0 - std::ldexp(1.0, -30));
  DigitMatrix top64(2, 1, 64);
  for (int j = 0; j < 64; ++j) top64.set(0, j, 1);
  CHECK(psi(top64)[0] < 1.0);
}

TEST_CASE("phi") {
  CHECK(phi(DigitMatrix(2, 2, 3)) == std::vector<std::uint64_t>{0, 0});
  CHECK(phi(M(2, {{1, 0, 1}})) == std::vector<std::uint64_t>{5});
  CHECK(phi(M(2, {{0, 1}, {1, 1}})) == std::vector<std::uint64_t>{2, 3});
}

TEST_CASE("phi and psi are bijections onto the digit grid") {
  for (int b : {2, 3}) {
    auto all = whole_group(b, 2, 2);
    std::set<std::vector<std::uint64_t>> phis;
    std::set<std::vector<double>> psis;
    for (const auto& x : all) {
      auto v = phi(x);
      for (auto c : v) CHECK(c < static_cast<std::uint64_t>(b * b));
      phis.insert(v);
      psis.insert(psi(x));
    }
    CHECK(phis.size() == all.size());
    CHECK(psis.size() == all.size());
  }
}

TEST_CASE("shift") {
  auto net = random_net({2, 2, 5, 4}, 3, RankCheck::strict);
  auto pts = enumerate_points(net);
  SplitMix64 gen(9);
  auto sigma = random_shift(2, 2, 5, gen);
  CHECK(shift(pts, {DigitMatrix(2, 2, 5)}) == pts);
  CHECK(shift(shift(pts, sigma), sigma) == pts);
  CHECK(shift(pts, sigma).size() == pts.size());

  std::vector<DigitMatrix> z3 = {M(3, {{0}}), M(3, {{1}}), M(3, {{2}})};
  CHECK(as_set(shift(z3, {M(3, {{2}})})) == as_set(z3));

  CHECK_THROWS_AS(shift(pts, {DigitMatrix(2, 1, 5)}), Error);
}

TEST_CASE("psi of a shifted point is digitwise addition") {
  for (int b : {2, 3, 7}) {
    SplitMix64 gen(static_cast<std::uint64_t>(b));
    for (int trial = 0; trial < 50; ++trial) {
      auto x = random_digit_matrix(b, 3, 6, gen);
      auto sigma = random_digit_matrix(b, 3, 6, gen);
      auto y = psi(x + sigma);
      for (int i = 0; i < 3; ++i) {
        double expect = 0.0;
        double scale = 1.0;
        for (int j = 0; j < 6; ++j) {
          scale /= b;
          expect += ((x(i, j) + sigma(i, j)) % b) * scale;
        }
        CHECK(y[i] == doctest::Approx(expect).epsilon(1e-15));
      }
    }
  }
}

TEST_CASE("dual examples") {
  SUBCASE("full space") {
    DigitalNet net({2, 1, 2, 2}, {M(2, {{1, 0}}), M(2, {{0, 1}})});
    CHECK(dual(net).basis.empty());
  }
  SUBCASE("one generator") {
    DigitalNet net({2, 1, 2, 1}, {M(2, {{1, 0}})});
    auto d = dual(net);
    REQUIRE(d.basis.size() == 1);
    CHECK(d.basis[0] == M(2, {{0, 1}}));
  }
  SUBCASE("trivial net") {
    DigitalNet net({3, 2, 2, 0}, {});
    auto d = dual(net);
    CHECK(d.basis.size() == 4);
    CHECK(enumerate_span(3, 2, 2, d.basis).size() == 81);
  }
}

TEST_CASE("dual equals brute-force annihilator") {
  for (int b : {2, 3}) {
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
      const int s = 1 + static_cast<int>(seed % 3);
      const int n = b == 2 ? 2 + static_cast<int>(seed % 2) : 2;
      const int m = static_cast<int>(seed % static_cast<std::uint64_t>(s * n + 1));
      auto net = random_net({b, s, n, m}, seed * 7 + static_cast<std::uint64_t>(b));
      std::set<DigitMatrix> brute;
      for (const auto& h : whole_group(b, s, n)) {
        bool ok = std::all_of(net.basis().begin(), net.basis().end(),
                              [&](const DigitMatrix& g) { return pairing(h, g) == 0; });
        if (ok) brute.insert(h);
      }
      auto d = dual(net);
      CHECK(static_cast<int>(d.basis.size()) == s * n - net.rank());
      for (const auto& h : d.basis) {
        for (const auto& g : net.basis()) CHECK(pairing(h, g) == 0);
      }
      CHECK(as_set(enumerate_span(b, s, n, d.basis)) == brute);
    }
  }
}

TEST_CASE("random_net") {
  NetParams p{2, 4, 32, 10};
  auto a = random_net(p, 42);
  auto b = random_net(p, 42);
  CHECK(a == b);
  CHECK(a.basis().size() == 10);
  for (const auto& g : a.basis()) {
    CHECK(g.rows() == 4);
    CHECK(g.cols() == 32);
  }
  CHECK_FALSE(random_net(p, 43) == a);

  struct Stuck {
    using result_type = std::uint64_t;
    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return ~result_type{0}; }
    result_type operator()() { return 1; }
  } stuck;
  CHECK_THROWS_WITH_AS(random_net(p, stuck, RankCheck::strict), doctest::Contains("degenerate basis"), Error);
  CHECK_NOTHROW(random_net(p, stuck, RankCheck::lenient));
}

TEST_CASE("net file round trip and generator-matrix adapter") {
  auto net = random_net({3, 2, 4, 3}, 5);
  std::stringstream ss;
  write_net(ss, net, "test net");
  CHECK(read_net(ss) == net);

  std::stringstream gm;
  write_generator_matrices(gm, net);
  CHECK(ingest_generator_matrices(gm) == net);

  std::istringstream ext(R"(# two coordinates, n = 3 digits, m = 2 columns
2 2 3 2
1 0
0 1
0 0

1 1
0 1
1 0
)");
  auto in = ingest_generator_matrices(ext);
  CHECK(in.basis()[0] == M(2, {{1, 0, 0}, {1, 0, 1}}));
  CHECK(in.basis()[1] == M(2, {{0, 1, 0}, {1, 1, 0}}));

  std::istringstream bad("2 1 2 1\n1 2\n");
  CHECK_THROWS_AS(read_net(bad), Error);
  std::istringstream short_in("2 1 2 2\n1 0\n");
  CHECK_THROWS_AS(read_net(short_in), Error);
}

TEST_CASE("adapter truncation keeps leading columns and digits") {
  auto net = random_net({2, 2, 6, 4}, 17);
  std::stringstream gm;
  write_generator_matrices(gm, net);
  auto cut = ingest_generator_matrices(gm, 2, 3);
  CHECK(cut.params() == NetParams{2, 2, 3, 2});
  for (int k = 0; k < 2; ++k) {
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 3; ++j) CHECK(cut.basis()[k](i, j) == net.basis()[k](i, j));
    }
  }
}
