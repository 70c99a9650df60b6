#include "dnet/experiments.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <ostream>

#include "dnet/error.hpp"
#include "dnet/net_io.hpp"
#include "dnet/parallel.hpp"
#include "dnet/qmc.hpp"

namespace dnet {

namespace {

constexpr std::uint64_t kShiftStream = 0x45;

std::vector<Integrand> build_integrands(const std::vector<std::string>& ids, int s) {
  std::vector<Integrand> fns;
  for (const auto& id : ids) fns.push_back(make_integrand(id, s));
  return fns;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

std::map<std::string, double> lg_errors(const DigitalNet& net, const std::vector<Integrand>& fns, int n_shifts,
                                        std::uint64_t seed, unsigned workers) {
  std::map<std::string, double> out;
  const auto reports = rmse_estimate_many(net, fns, n_shifts, seed, workers);
  for (std::size_t k = 0; k < fns.size(); ++k) out[fns[k].id] = reports[k].lg_e;
  return out;
}

}  // namespace

std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v < 0 ? "-inf" : "inf";
  return fmt::format("{:.17g}", v);
}

std::vector<ScatterRecord> scatter_experiment(const ScatterConfig& cfg, unsigned workers) {
  cfg.params.validate();
  if (cfg.n_nets < 2) throw Error("scatter needs at least two nets");
  if (cfg.n_shifts < 2) throw Error("scatter needs at least two shifts");
  const auto fns = build_integrands(cfg.fns, cfg.params.s);
  const InversionEvaluator eval(cfg.params.b, WeightSpec::dick_plus_hamming(cfg.params.s, cfg.params.n));
  std::vector<ScatterRecord> records(static_cast<std::size_t>(cfg.n_nets));
  parallel_blocks(records.size(), workers, [&](std::size_t i) {
    const auto net = indexed_random_net(cfg.params, cfg.seed, i);
    auto& r = records[i];
    r.net_id = i;
    r.lg_w = eval.evaluate(net).lg_w;
    r.lg_e = lg_errors(net, fns, cfg.n_shifts, derive_seed(cfg.seed, {kShiftStream, i}), 1);
  });
  return records;
}

void write_scatter_csv(std::ostream& out, const std::vector<ScatterRecord>& records) {
  out << "net_id,lg_w";
  for (const auto& id : integrand_ids()) out << ",lg_e_" << id;
  out << '\n';
  for (const auto& r : records) {
    out << r.net_id << ',' << format_real(r.lg_w);
    for (const auto& id : integrand_ids()) {
      out << ',';
      if (auto it = r.lg_e.find(id); it != r.lg_e.end()) out << format_real(it->second);
    }
    out << '\n';
  }
}

double correlation(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size()) throw Error("correlation needs equal-length samples");
  if (xs.size() < 2) throw Error("correlation needs at least two pairs");
  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    mx += xs[k];
    my += ys[k];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    sxx += (xs[k] - mx) * (xs[k] - mx);
    syy += (ys[k] - my) * (ys[k] - my);
    sxy += (xs[k] - mx) * (ys[k] - my);
  }
  if (sxx == 0.0 || syy == 0.0) throw Error("correlation undefined: zero variance");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

namespace {

std::vector<std::pair<double, double>> finite_pairs(const std::vector<ScatterRecord>& records, const std::string& fn) {
  std::vector<std::pair<double, double>> out;
  for (const auto& r : records) {
    auto it = r.lg_e.find(fn);
    if (it == r.lg_e.end()) throw Error(fmt::format("integrand {} was not part of the run", fn));
    if (std::isfinite(r.lg_w) && std::isfinite(it->second)) out.emplace_back(r.lg_w, it->second);
  }
  return out;
}

}  // namespace

double scatter_correlation(const std::vector<ScatterRecord>& records, const std::string& fn) {
  std::vector<double> xs, ys;
  for (const auto& [x, y] : finite_pairs(records, fn)) {
    xs.push_back(x);
    ys.push_back(y);
  }
  return correlation(xs, ys);
}

double decile_gap(const std::vector<ScatterRecord>& records, const std::string& fn) {
  auto pairs = finite_pairs(records, fn);
  if (pairs.size() < 10) throw Error("decile gap needs at least ten records");
  std::sort(pairs.begin(), pairs.end());
  const std::size_t tenth = pairs.size() / 10;
  std::vector<double> best, worst;
  for (std::size_t k = 0; k < tenth; ++k) {
    best.push_back(pairs[k].second);
    worst.push_back(pairs[pairs.size() - 1 - k].second);
  }
  return median(worst) - median(best);
}

std::vector<ComparisonRow> comparison_experiment(const ComparisonConfig& cfg, unsigned workers) {
  if (cfg.m_begin < 1 || cfg.m_end <= cfg.m_begin) throw Error("comparison needs 1 <= m_begin < m_end");
  const auto fns = build_integrands(cfg.fns, cfg.s);
  const WeightSpec weight = WeightSpec::dick_plus_hamming(cfg.s, cfg.n);
  const InversionEvaluator eval(cfg.b, weight);
  std::vector<ComparisonRow> rows;
  for (int m = cfg.m_begin; m < cfg.m_end; ++m) {
    const NetParams params{cfg.b, cfg.s, cfg.n, m};
    params.validate();
    const auto um = static_cast<std::uint64_t>(m);
    const std::uint64_t shift_seed = derive_seed(cfg.seed, {kShiftStream, um});

    ComparisonRow ext{"external", cfg.s, m, false, "", 0.0, {}};
    if (cfg.external_pattern.empty()) {
      ext.note = "no external nets given";
    } else {
      std::string path = cfg.external_pattern;
      if (auto pos = path.find("{m}"); pos != std::string::npos) path.replace(pos, 3, std::to_string(m));
      try {
        DigitalNet net = cfg.external_is_net_file ? read_net_file(path) : ingest_generator_file(path, m, cfg.n);
        if (net.params() != params) {
          throw Error(fmt::format("external net has {}, expected {}", net.params().to_string(), params.to_string()));
        }
        ext.lg_w = eval.evaluate(net).lg_w;
        ext.lg_e = lg_errors(net, fns, cfg.n_shifts, shift_seed, workers);
        ext.present = true;
      } catch (const Error& e) {
        ext.note = e.what();
      }
    }
    rows.push_back(std::move(ext));

    AnnealConfig search = cfg.search;
    search.seed = derive_seed(cfg.seed, {0x53, um});
    const auto found = anneal(params, search, weight, workers);
    ComparisonRow own{"searched", cfg.s, m, true, "", found.best_lg_w, {}};
    own.lg_e = lg_errors(found.best_net, fns, cfg.n_shifts, shift_seed, workers);
    rows.push_back(std::move(own));
  }
  return rows;
}

void write_comparison_csv(std::ostream& out, const std::vector<ComparisonRow>& rows) {
  out << "label,s,m,present,lg_w";
  for (const auto& id : integrand_ids()) out << ",lg_e_" << id;
  out << '\n';
  for (const auto& r : rows) {
    out << r.label << ',' << r.s << ',' << r.m << ',' << (r.present ? 1 : 0) << ',';
    if (r.present) out << format_real(r.lg_w);
    for (const auto& id : integrand_ids()) {
      out << ',';
      if (auto it = r.lg_e.find(id); r.present && it != r.lg_e.end()) out << format_real(it->second);
    }
    out << '\n';
  }
}

void write_comparison_table(std::ostream& out, const std::vector<ComparisonRow>& rows,
                            const std::vector<std::string>& fns) {
  std::vector<std::string> head{"m", "net", "lg W"};
  for (const auto& f : fns) head.push_back(fmt::format("lg E({})", f));
  std::vector<std::vector<std::string>> cells{head};
  for (const auto& r : rows) {
    std::vector<std::string> line{std::to_string(r.m), r.label};
    if (!r.present) {
      line.push_back("absent");
      for (std::size_t k = 0; k < fns.size(); ++k) line.push_back("-");
    } else {
      line.push_back(fmt::format("{:.2f}", r.lg_w));
      for (const auto& f : fns) {
        auto it = r.lg_e.find(f);
        line.push_back(it == r.lg_e.end() ? "-" : fmt::format("{:.2f}", it->second));
      }
    }
    cells.push_back(std::move(line));
  }
  std::vector<std::size_t> width(head.size(), 0);
  for (const auto& line : cells) {
    for (std::size_t c = 0; c < line.size(); ++c) width[c] = std::max(width[c], line[c].size());
  }
  for (const auto& line : cells) {
    for (std::size_t c = 0; c < line.size(); ++c) {
      if (c > 0) out << "  ";
      out << (c == 1 ? fmt::format("{:<{}}", line[c], width[c]) : fmt::format("{:>{}}", line[c], width[c]));
    }
    out << '\n';
  }
}

}  // namespace dnet
