#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <sstream>

#include "dnet/error.hpp"
#include "dnet/search.hpp"

using namespace dnet;

namespace {

int differing_generators(const DigitalNet& a, const DigitalNet& b) {
  int d = 0;
  for (std::size_t k = 0; k < a.basis().size(); ++k) d += a.basis()[k] == b.basis()[k] ? 0 : 1;
  return d;
}

AnnealConfig small_config(long steps) {
  AnnealConfig cfg;
  cfg.steps = steps;
  cfg.seed = 17;
  cfg.probes = 20;
  cfg.moves_per_temperature = 10;
  return cfg;
}

}  // namespace

TEST_CASE("neighbor moves") {
  SplitMix64 gen(1);
  for (int b : {2, 3}) {
    for (int t = 0; t < 200; ++t) {
      auto net = random_net({b, 3, 5, 1 + t % 6}, static_cast<std::uint64_t>(t), RankCheck::strict);
      auto next = neighbor(net, gen);
      CHECK(differing_generators(net, next) == 1);
      CHECK(next.full_rank());
    }
  }
  // m = 1: only digit flips, which change exactly one digit
  auto one = random_net({2, 2, 4, 1}, 3, RankCheck::strict);
  for (int t = 0; t < 50; ++t) {
    auto next = neighbor(one, gen);
    int changed = 0;
    for (std::size_t d = 0; d < 8; ++d) changed += one.basis()[0].digits()[d] != next.basis()[0].digits()[d];
    CHECK(changed == 1);
  }
  // b = 2: the same flip twice is the identity
  auto net = random_net({2, 3, 5, 1}, 8, RankCheck::strict);
  auto g1 = make_stream(4, {0});
  auto g2 = make_stream(4, {0});
  auto once = neighbor(net, g1);
  DigitMatrix delta = once.basis()[0] - net.basis()[0];
  DigitMatrix twice = once.basis()[0] + delta;
  CHECK(twice == net.basis()[0]);
  CHECK(neighbor(net, g2) == once);
}

TEST_CASE("anneal basics") {
  NetParams p{2, 3, 8, 4};
  auto zero = anneal(p, small_config(0));
  CHECK(zero.trace.size() == 1);
  CHECK(zero.trace[0].step == 0);
  auto nu = WeightSpec::dick_plus_hamming(3, 8);
  CHECK(zero.best_lg_w == wafom_inversion(zero.best_net, nu).lg_w);

  auto r = anneal(p, small_config(2000));
  for (std::size_t k = 1; k < r.trace.size(); ++k) {
    CHECK(r.trace[k].lg_w < r.trace[k - 1].lg_w);
    CHECK(r.trace[k].step > r.trace[k - 1].step);
  }
  CHECK(r.best_lg_w <= zero.best_lg_w);
  CHECK(std::fabs(r.best_lg_w - wafom_inversion(r.best_net, nu).lg_w) <= 1e-12);
  CHECK(std::fabs(r.trace.back().lg_w - r.best_lg_w) < 1e-6);

  auto again = anneal(p, small_config(2000));
  CHECK(again.best_net == r.best_net);
  CHECK(again.trace == r.trace);

  CHECK_THROWS_AS(anneal({2, 3, 8, 0}, small_config(10)), Error);
  auto bad = small_config(10);
  bad.cooling_rate = 1.0;
  CHECK_THROWS_AS(anneal(p, bad), Error);
}

TEST_CASE("zero temperature is hill climbing") {
  // With only improvements accepted the current net is always the best one.
  NetParams p{2, 2, 6, 4};
  const auto path = (std::filesystem::temp_directory_path() / "dnet_test_hill.txt").string();
  for (long steps : {37L, 120L, 400L}) {
    auto cfg = small_config(steps);
    cfg.initial_temperature = 0.0;
    cfg.checkpoint_every = steps;
    cfg.checkpoint_path = path;
    auto r = anneal(p, cfg);
    auto cp = load_checkpoint_file(path);
    CHECK(cp.state.current == cp.state.best);
    CHECK(cp.state.best == r.best_net);
  }
  std::filesystem::remove(path);
}

TEST_CASE("restarts pick the best chain deterministically") {
  NetParams p{2, 3, 8, 5};
  auto cfg = small_config(300);
  cfg.restarts = 3;
  auto a = anneal(p, cfg, std::nullopt, 1);
  auto b = anneal(p, cfg, std::nullopt, 3);
  CHECK(a.best_net == b.best_net);
  CHECK(a.best_restart == b.best_restart);
  // restart 0 alone is one of the candidates
  cfg.restarts = 1;
  CHECK(a.best_lg_w <= anneal(p, cfg).best_lg_w);
}

TEST_CASE("checkpoint round trip and resume") {
  NetParams p{2, 3, 8, 5};
  auto full = anneal(p, small_config(600));

  const auto path = (std::filesystem::temp_directory_path() / "dnet_test_checkpoint.txt").string();
  auto cfg = small_config(300);
  cfg.checkpoint_every = 100;
  cfg.checkpoint_path = path;
  auto half = anneal(p, cfg);
  auto cp = load_checkpoint_file(path);
  CHECK(cp.state.step == 300);
  CHECK(cp.params == p);
  CHECK(cp.cfg.seed == cfg.seed);
  CHECK(cp.state.best == half.best_net);

  auto resumed = resume(cp, 600);
  CHECK(resumed.best_net == full.best_net);
  CHECK(resumed.trace == full.trace);
  CHECK(resumed.best_lg_w == full.best_lg_w);

  std::stringstream ss;
  save_checkpoint(ss, cp.params, cp.cfg, cp.weight, cp.state);
  auto again = load_checkpoint(ss);
  CHECK(again.state.current == cp.state.current);
  CHECK(again.state.trace == cp.state.trace);
  CHECK(again.state.temperature0 == cp.state.temperature0);
  CHECK(again.weight.values() == cp.weight.values());
  std::filesystem::remove(path);

  std::istringstream broken("version 1\nparams 2 3 8 5\n");
  CHECK_THROWS_AS(load_checkpoint(broken), Error);
}

TEST_CASE("random search") {
  NetParams p{2, 4, 32, 10};
  auto one = random_search(p, 1, 5);
  CHECK(one.best_net == indexed_random_net(p, 5, 0));
  CHECK(one.best_lg_w == wafom_inversion(one.best_net, WeightSpec::dick_plus_hamming(4, 32)).lg_w);
  double prev = one.best_lg_w;
  for (long count : {2, 10, 40}) {
    auto r = random_search(p, count, 5);
    CHECK(r.best_lg_w <= prev);
    prev = r.best_lg_w;
  }
  // spread of lg W over many random nets
  InversionEvaluator eval(2, WeightSpec::dick_plus_hamming(4, 32));
  double lo = 1e9, hi = -1e9;
  for (std::uint64_t i = 0; i < 1000; ++i) {
    const double v = eval.fast_lg_w(indexed_random_net(p, 9, i));
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  CHECK(hi - lo >= 1.0);
}
