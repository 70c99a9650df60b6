#include <doctest.h>
#include <fmt/format.h>

#include <cmath>
#include <filesystem>
#include <sstream>

#include "dnet/error.hpp"
#include "dnet/experiments.hpp"
#include "dnet/net_io.hpp"

using namespace dnet;

TEST_CASE("correlation examples") {
  std::vector<double> xs{0.0, 1.0, 2.0, 5.0};
  std::vector<double> ys;
  for (double x : xs) ys.push_back(2 * x + 3);
  CHECK(correlation(xs, ys) == doctest::Approx(1.0).epsilon(1e-15));
  std::vector<double> neg;
  for (double x : xs) neg.push_back(-x);
  CHECK(correlation(xs, neg) == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(correlation({0, 1, 2}, {0, 1, 0}) == doctest::Approx(0.0));
  CHECK_THROWS_AS(correlation({1, 1, 1}, {0, 1, 2}), Error);
  CHECK_THROWS_AS(correlation({1}, {1}), Error);
  CHECK_THROWS_AS(correlation({1, 2}, {1}), Error);
}

TEST_CASE("scatter records and CSV") {
  ScatterConfig cfg;
  cfg.params = {2, 2, 10, 4};
  cfg.n_nets = 2;
  cfg.n_shifts = 8;
  cfg.fns = {"f1", "f7"};
  cfg.seed = 3;
  auto recs = scatter_experiment(cfg);
  REQUIRE(recs.size() == 2);
  for (const auto& r : recs) {
    CHECK(std::isfinite(r.lg_w));
    CHECK(r.lg_e.size() == 2);
    CHECK(std::isfinite(r.lg_e.at("f1")));
  }
  std::ostringstream a, b;
  write_scatter_csv(a, recs);
  write_scatter_csv(b, scatter_experiment(cfg, 2));
  CHECK(a.str() == b.str());
  std::istringstream lines(a.str());
  std::string header, row;
  std::getline(lines, header);
  CHECK(header == "net_id,lg_w,lg_e_f0,lg_e_f1,lg_e_f2,lg_e_f3,lg_e_f4,lg_e_f5,lg_e_f6,lg_e_f7");
  std::getline(lines, row);
  CHECK(std::count(row.begin(), row.end(), ',') == 9);
  CHECK(row.rfind("0,", 0) == 0);
  CHECK(row.find(",,") != std::string::npos);

  ScatterRecord zero{7, -3.0, {{"f1", -std::numeric_limits<double>::infinity()}}};
  std::ostringstream z;
  write_scatter_csv(z, {zero});
  CHECK(z.str().find("7,-3,,-inf,") != std::string::npos);
  CHECK(format_real(0.1) == "0.10000000000000001");
}

TEST_CASE("scatter correlation behaves at small scale") {
  ScatterConfig cfg;
  cfg.params = {2, 4, 32, 8};
  cfg.n_nets = 60;
  cfg.n_shifts = 32;
  cfg.fns = {"f1", "f7"};
  cfg.seed = 11;
  auto recs = scatter_experiment(cfg);
  CHECK(scatter_correlation(recs, "f1") > 0.8);
  CHECK(decile_gap(recs, "f1") > 1.0);
  CHECK(std::fabs(scatter_correlation(recs, "f7")) < 0.5);
  // records with -inf lg E are excluded from the correlation
  recs[0].lg_e["f1"] = -std::numeric_limits<double>::infinity();
  CHECK(std::isfinite(scatter_correlation(recs, "f1")));
  CHECK_THROWS_AS(scatter_correlation(recs, "f3"), Error);
}

TEST_CASE("comparison with absent and self-supplied external nets") {
  ComparisonConfig cfg;
  cfg.s = 2;
  cfg.n = 8;
  cfg.m_begin = 3;
  cfg.m_end = 5;
  cfg.fns = {"f1", "f7"};
  cfg.n_shifts = 8;
  cfg.search.steps = 200;
  cfg.search.probes = 10;
  cfg.seed = 5;

  auto rows = comparison_experiment(cfg);
  REQUIRE(rows.size() == 4);
  CHECK_FALSE(rows[0].present);
  CHECK(rows[1].present);
  CHECK(rows[1].label == "searched");

  // Feed the searched nets back in as the external ones.
  const auto dir = std::filesystem::temp_directory_path();
  for (int m : {3, 4}) {
    NetParams p{2, 2, 8, m};
    AnnealConfig sc = cfg.search;
    sc.seed = derive_seed(cfg.seed, {0x53, static_cast<std::uint64_t>(m)});
    write_net_file((dir / fmt::format("dnet_cmp_{}.net", m)).string(), anneal(p, sc).best_net);
  }
  cfg.external_pattern = (dir / "dnet_cmp_{m}.net").string();
  cfg.external_is_net_file = true;
  auto self = comparison_experiment(cfg);
  for (std::size_t k = 0; k < self.size(); k += 2) {
    CHECK(self[k].present);
    CHECK(self[k].lg_w == self[k + 1].lg_w);
    CHECK(self[k].lg_e == self[k + 1].lg_e);
  }

  std::ostringstream csv, table;
  write_comparison_csv(csv, rows);
  write_comparison_table(table, rows, cfg.fns);
  CHECK(csv.str().rfind("label,s,m,present,lg_w,lg_e_f0", 0) == 0);
  CHECK(table.str().find("absent") != std::string::npos);
  for (int m : {3, 4}) std::filesystem::remove(dir / fmt::format("dnet_cmp_{}.net", m));
}
