// Command line front end. Exit status: 0 success, 1 user error, 2 internal
// or numerical failure.

#include <fmt/format.h>
#include <fmt/ostream.h>

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "dnet/error.hpp"
#include "dnet/experiments.hpp"
#include "dnet/net_io.hpp"
#include "dnet/parallel.hpp"
#include "dnet/qmc.hpp"
#include "dnet/search.hpp"
#include "dnet/verify.hpp"
#include "dnet/wafom.hpp"
#include "json_out.hpp"

using namespace dnet;
using dnet::cli::dump_json;
using dnet::cli::json;

namespace {

// Thrown when the verify suite finds a violated identity.
struct CheckFailed : std::runtime_error {
  using std::runtime_error::runtime_error;
};

NetParams parse_params(const std::string& text) {
  NetParams p;
  char c1 = 0, c2 = 0, c3 = 0;
  std::istringstream in(text);
  if (!(in >> p.b >> c1 >> p.s >> c2 >> p.n >> c3 >> p.m) || c1 != ',' || c2 != ',' || c3 != ',' || !in.eof()) {
    throw Error(fmt::format("--params expects b,s,n,m; got '{}'", text));
  }
  p.validate();
  return p;
}

// "1024" or "2^10".
int parse_count(const std::string& text, const char* what) {
  try {
    std::size_t used = 0;
    if (auto caret = text.find('^'); caret != std::string::npos) {
      const int base = std::stoi(text.substr(0, caret), &used);
      if (used != caret) throw std::invalid_argument(text);
      const int e = std::stoi(text.substr(caret + 1), &used);
      if (used != text.size() - caret - 1 || base < 1 || e < 0 || e > 30) throw std::invalid_argument(text);
      const double v = std::pow(base, e);
      if (v > 1 << 30) throw std::invalid_argument(text);
      return static_cast<int>(v);
    }
    const int v = std::stoi(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::logic_error&) {
    throw Error(fmt::format("{} expects an integer or b^k, got '{}'", what, text));
  }
}

std::vector<std::string> split_ids(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (!tok.empty()) out.push_back(tok);
  }
  for (const auto& id : out) {
    const auto& all = integrand_ids();
    if (std::find(all.begin(), all.end(), id) == all.end()) throw Error(fmt::format("unknown integrand '{}'", id));
  }
  if (out.empty()) throw Error("no integrands given");
  return out;
}

json params_json(const NetParams& p) { return json{{"b", p.b}, {"s", p.s}, {"n", p.n}, {"m", p.m}}; }

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw Error(fmt::format("cannot write '{}'", path));
  out << text;
}

WeightSpec pick_weight(const std::string& name, const std::string& file, int s, int n) {
  return file.empty() ? WeightSpec::by_name(name, s, n) : WeightSpec::read_file(file, s, n);
}

json trace_json(const std::vector<TracePoint>& trace) {
  json t = json::array();
  for (const auto& tp : trace) t.push_back(json::array({tp.step, tp.lg_w}));
  return t;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Walsh figure of merit for digital nets: evaluation, randomized QMC, search and experiments"};
  app.set_config("--config", "", "read options from a TOML/INI file (same names as the flags)");
  app.require_subcommand(1);
  unsigned workers = 0;
  app.add_option("--workers", workers, "worker threads, 0 = one per hardware thread")->capture_default_str();

  // wafom
  auto* wafom_cmd = app.add_subcommand("wafom", "W(P; nu) of a net");
  std::string net_path, weight_name = "mu+h", weight_file, method_name = "inversion";
  wafom_cmd->add_option("--net", net_path, "net file")->required();
  wafom_cmd->add_option("--weight", weight_name, "mu, h or mu+h")->capture_default_str();
  wafom_cmd->add_option("--weight-file", weight_file, "s*n custom weights, overrides --weight");
  wafom_cmd->add_option("--method", method_name, "inversion, dual or highprec")->capture_default_str();

  // integrate
  auto* integrate_cmd = app.add_subcommand("integrate", "randomized QMC with digital shifts");
  std::string fn_id = "f1", shifts_text = "2^10";
  std::uint64_t seed = 0;
  bool with_exact = false;
  integrate_cmd->add_option("--net", net_path, "net file")->required();
  integrate_cmd->add_option("--fn", fn_id, "integrand f0..f7")->capture_default_str();
  integrate_cmd->add_option("--shifts", shifts_text, "number of shifts, e.g. 1024 or 2^10")->capture_default_str();
  integrate_cmd->add_option("--seed", seed, "shift seed")->capture_default_str();
  integrate_cmd->add_flag("--exact", with_exact, "also report the true integral and lg |bias|");

  // scatter
  auto* scatter_cmd = app.add_subcommand("scatter", "lg W against lg E over random nets");
  std::string params_text = "2,4,32,10", fns_text = "f0,f1,f2,f3,f4,f5,f6,f7", out_path, json_path;
  long n_nets = 200;
  std::string scatter_shifts = "2^8";
  scatter_cmd->add_option("--params", params_text, "b,s,n,m")->capture_default_str();
  scatter_cmd->add_option("--nets", n_nets, "number of random nets")->capture_default_str();
  scatter_cmd->add_option("--shifts", scatter_shifts, "shifts per net")->capture_default_str();
  scatter_cmd->add_option("--fns", fns_text, "comma separated integrands")->capture_default_str();
  scatter_cmd->add_option("--seed", seed)->capture_default_str();
  scatter_cmd->add_option("--out", out_path, "CSV output (default stdout)");
  scatter_cmd->add_option("--json", json_path, "also write records and correlations as JSON");

  // compare
  auto* compare_cmd = app.add_subcommand("compare", "searched nets against external nets");
  ComparisonConfig cmp;
  std::string external, m_range = "8:16", compare_shifts = "2^10", csv_path, table_path;
  bool external_net_format = false;
  compare_cmd->add_option("--external", external, "external generator-matrix file; {m} is replaced by m");
  compare_cmd->add_flag("--external-net-format", external_net_format, "external files are in the net format");
  compare_cmd->add_option("--s", cmp.s)->capture_default_str();
  compare_cmd->add_option("--n", cmp.n)->capture_default_str();
  compare_cmd->add_option("--m-range", m_range, "first:last+1")->capture_default_str();
  compare_cmd->add_option("--steps", cmp.search.steps, "annealing steps per m")->capture_default_str();
  compare_cmd->add_option("--restarts", cmp.search.restarts)->capture_default_str();
  compare_cmd->add_option("--shifts", compare_shifts)->capture_default_str();
  compare_cmd->add_option("--fns", fns_text)->capture_default_str();
  compare_cmd->add_option("--seed", seed)->capture_default_str();
  compare_cmd->add_option("--csv", csv_path, "CSV output");
  compare_cmd->add_option("--table", table_path, "text table output (default stdout)");
  compare_cmd->add_option("--json", json_path, "JSON output");

  // search
  auto* search_cmd = app.add_subcommand("search", "simulated annealing for small W");
  AnnealConfig acfg;
  std::string search_params = "2,4,30,8", resume_path, search_weight = "mu+h";
  long random_count = 0;
  search_cmd->add_option("--params", search_params, "b,s,n,m")->capture_default_str();
  search_cmd->add_option("--steps", acfg.steps)->capture_default_str();
  search_cmd->add_option("--restarts", acfg.restarts)->capture_default_str();
  search_cmd->add_option("--seed", acfg.seed)->capture_default_str();
  search_cmd->add_option("--temperature", acfg.initial_temperature, "initial temperature, negative = automatic")
      ->capture_default_str();
  search_cmd->add_option("--cooling", acfg.cooling_rate)->capture_default_str();
  search_cmd->add_option("--moves-per-temperature", acfg.moves_per_temperature)->capture_default_str();
  search_cmd->add_option("--weight", search_weight, "mu, h or mu+h")->capture_default_str();
  search_cmd->add_option("--out", out_path, "write the best net here");
  search_cmd->add_option("--checkpoint", acfg.checkpoint_path, "checkpoint file");
  search_cmd->add_option("--checkpoint-every", acfg.checkpoint_every, "steps between checkpoints")
      ->capture_default_str();
  search_cmd->add_option("--resume", resume_path, "continue from a checkpoint up to --steps");
  search_cmd->add_option("--random", random_count, "plain random search over this many nets instead");

  // verify
  auto* verify_cmd = app.add_subcommand("verify", "run the identity checks on small random cases");
  verify_cmd->add_option("--seed", seed)->capture_default_str();
  verify_cmd->add_option("--json", json_path, "also write the results as JSON");

  // gen-points
  auto* points_cmd = app.add_subcommand("gen-points", "psi coordinates of the (shifted) net as CSV");
  std::optional<std::uint64_t> shift_seed;
  std::string order_name = "natural";
  points_cmd->add_option("--net", net_path)->required();
  points_cmd->add_option("--shift-seed", shift_seed, "apply shift number 0 of this seed");
  points_cmd->add_option("--order", order_name, "natural or gray")->capture_default_str();
  points_cmd->add_option("--out", out_path, "CSV output (default stdout)");

  // ingest
  auto* ingest_cmd = app.add_subcommand("ingest", "convert generator matrices to the net format");
  std::string in_path;
  std::optional<int> keep_m, keep_n;
  ingest_cmd->add_option("--in", in_path, "generator-matrix file")->required();
  ingest_cmd->add_option("--out", out_path, "net file (default stdout)");
  ingest_cmd->add_option("--m", keep_m, "keep the first m columns");
  ingest_cmd->add_option("--n", keep_n, "keep the first n digit rows");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return 1;
  }

  {
    // Only the global options and the chosen subcommand.
    const std::string prefix = app.get_subcommands().front()->get_name() + ".";
    std::istringstream all(app.config_to_str(true, false));
    std::cerr << "# resolved configuration\n";
    for (std::string line; std::getline(all, line);) {
      if (line.find('.') == std::string::npos || line.rfind(prefix, 0) == 0) std::cerr << line << '\n';
    }
  }

  try {
    workers = resolve_workers(workers);

    if (*wafom_cmd) {
      const DigitalNet net = read_net_file(net_path);
      const auto& p = net.params();
      const WeightSpec nu = pick_weight(weight_name, weight_file, p.s, p.n);
      const auto v = compute_wafom(net, nu, wafom_method_from_string(method_name), workers);
      json j{{"params", params_json(p)}, {"weight", nu.name()},       {"method", to_string(v.method)},
             {"w", v.w},                 {"lg_w", v.lg_w},            {"radicand", v.radicand},
             {"clamped", v.clamped},     {"precision_bits", v.precision_bits}};
      std::cout << dump_json(j) << '\n';
    } else if (*integrate_cmd) {
      const DigitalNet net = read_net_file(net_path);
      const auto f = make_integrand(fn_id, net.params().s);
      const auto r = rmse_estimate(net, f, parse_count(shifts_text, "--shifts"), seed, workers);
      json j{{"fn", f.id},          {"params", params_json(net.params())}, {"mean_of_estimates", r.mean_of_estimates},
             {"e_value", r.e_value}, {"lg_e", r.lg_e},                      {"n_shifts", r.n_shifts},
             {"seed", r.seed}};
      if (with_exact) {
        const double exact = exact_integral(f);
        const double bias = r.mean_of_estimates - exact;
        j["exact"] = exact;
        j["exact_source"] = f.exact_source;
        j["bias"] = bias;
        j["lg_abs_bias"] = bias == 0.0 ? -std::numeric_limits<double>::infinity() : std::log2(std::fabs(bias));
      }
      std::cout << dump_json(j) << '\n';
    } else if (*scatter_cmd) {
      ScatterConfig cfg;
      cfg.params = parse_params(params_text);
      cfg.n_nets = n_nets;
      cfg.n_shifts = parse_count(scatter_shifts, "--shifts");
      cfg.fns = split_ids(fns_text);
      cfg.seed = seed;
      const auto recs = scatter_experiment(cfg, workers);
      std::ostringstream csv;
      write_scatter_csv(csv, recs);
      write_text(out_path, csv.str());
      json corr = json::object();
      for (const auto& f : cfg.fns) {
        try {
          corr[f] = scatter_correlation(recs, f);
        } catch (const Error&) {
          corr[f] = nullptr;
        }
      }
      json summary{{"params", params_json(cfg.params)}, {"nets", cfg.n_nets}, {"shifts", cfg.n_shifts},
                   {"seed", cfg.seed}, {"correlations", corr}};
      (out_path.empty() ? std::cerr : std::cout) << dump_json(summary) << '\n';
      if (!json_path.empty()) {
        json rows = json::array();
        for (const auto& r : recs) {
          json e = json::object();
          for (const auto& [k, v] : r.lg_e) e[k] = v;
          rows.push_back(json{{"net_id", r.net_id}, {"lg_w", r.lg_w}, {"lg_e", e}});
        }
        summary["records"] = rows;
        write_text(json_path, dump_json(summary) + "\n");
      }
    } else if (*compare_cmd) {
      cmp.external_pattern = external;
      cmp.external_is_net_file = external_net_format;
      if (auto colon = m_range.find(':'); colon != std::string::npos) {
        cmp.m_begin = std::stoi(m_range.substr(0, colon));
        cmp.m_end = std::stoi(m_range.substr(colon + 1));
      } else {
        cmp.m_begin = std::stoi(m_range);
        cmp.m_end = cmp.m_begin + 1;
      }
      cmp.n_shifts = parse_count(compare_shifts, "--shifts");
      cmp.fns = split_ids(fns_text);
      cmp.seed = seed;
      const auto rows = comparison_experiment(cmp, workers);
      std::ostringstream table;
      write_comparison_table(table, rows, cmp.fns);
      write_text(table_path, table.str());
      if (!csv_path.empty()) {
        std::ostringstream csv;
        write_comparison_csv(csv, rows);
        write_text(csv_path, csv.str());
      }
      if (!json_path.empty()) {
        json out = json::array();
        for (const auto& r : rows) {
          json e = json::object();
          for (const auto& [k, v] : r.lg_e) e[k] = v;
          json row{{"label", r.label}, {"s", r.s}, {"m", r.m}, {"present", r.present}};
          if (r.present) {
            row["lg_w"] = r.lg_w;
            row["lg_e"] = e;
          } else {
            row["note"] = r.note;
          }
          out.push_back(row);
        }
        write_text(json_path, dump_json(out) + "\n");
      }
    } else if (*search_cmd) {
      SearchResult r;
      NetParams p;
      if (!resume_path.empty()) {
        auto cp = load_checkpoint_file(resume_path);
        if (!acfg.checkpoint_path.empty()) cp.cfg.checkpoint_path = acfg.checkpoint_path;
        p = cp.params;
        r = resume(cp, search_cmd->count("--steps") ? std::optional<long>(acfg.steps) : std::nullopt);
      } else {
        p = parse_params(search_params);
        const auto nu = WeightSpec::by_name(search_weight, p.s, p.n);
        r = random_count > 0 ? random_search(p, random_count, acfg.seed, nu) : anneal(p, acfg, nu, workers);
      }
      if (!out_path.empty()) {
        write_net_file(out_path, r.best_net, fmt::format("best lg W = {:.17g}", r.best_lg_w));
      }
      json j{{"params", params_json(p)},       {"best_lg_w", r.best_lg_w}, {"evaluations", r.evaluations},
             {"wall_seconds", r.wall_seconds}, {"best_restart", r.best_restart},
             {"trace", trace_json(r.trace)}};
      std::cout << dump_json(j) << '\n';
    } else if (*verify_cmd) {
      const auto results = run_identity_suite(seed);
      bool ok = true;
      json out = json::array();
      for (const auto& r : results) {
        ok = ok && r.passed;
        std::cout << fmt::format("{} {:<20} max deviation {:.3e} (tolerance {:.3e}, {} cases) {}\n",
                                 r.passed ? "PASS" : "FAIL", r.name, r.worst, r.tolerance, r.cases, r.detail);
        out.push_back(json{{"name", r.name},
                           {"passed", r.passed},
                           {"worst", r.worst},
                           {"tolerance", r.tolerance},
                           {"cases", r.cases},
                           {"detail", r.detail}});
      }
      if (!json_path.empty()) write_text(json_path, dump_json(out) + "\n");
      if (!ok) throw CheckFailed("identity check failed");
    } else if (*points_cmd) {
      const DigitalNet net = read_net_file(net_path);
      const auto& p = net.params();
      PointOrder order = PointOrder::natural;
      if (order_name == "gray") {
        order = PointOrder::gray;
      } else if (order_name != "natural") {
        throw Error(fmt::format("--order expects natural or gray, got '{}'", order_name));
      }
      auto pts = enumerate_points(net, order);
      if (shift_seed) pts = shift(pts, sampled_shift(p, *shift_seed, 0));
      std::string text;
      for (const auto& x : pts) {
        const auto y = psi(x);
        for (std::size_t i = 0; i < y.size(); ++i) text += fmt::format("{}{:.17g}", i ? "," : "", y[i]);
        text += '\n';
      }
      write_text(out_path, text);
    } else if (*ingest_cmd) {
      const DigitalNet net = ingest_generator_file(in_path, keep_m, keep_n);
      std::ostringstream text;
      write_net(text, net, fmt::format("ingested from {}", in_path));
      write_text(out_path, text.str());
      std::cerr << dump_json(json{{"params", params_json(net.params())}, {"rank", net.rank()}}) << '\n';
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const CheckFailed& e) {
    std::cerr << "failure: " << e.what() << '\n';
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
