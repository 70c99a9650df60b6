#include "dnet/search.hpp"

#include <fmt/format.h>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "dnet/error.hpp"
#include "dnet/net_io.hpp"
#include "dnet/parallel.hpp"

namespace dnet {

namespace {

// Stream tags.
constexpr std::uint64_t kProbe = 1;
constexpr std::uint64_t kInit = 2;
constexpr std::uint64_t kStep = 3;

constexpr int kMaxRetries = 100;

WeightSpec default_weight(const NetParams& p, const std::optional<WeightSpec>& w) {
  if (w) {
    if (w->rows() != p.s || w->cols() != p.n) throw Error("weight shape does not match the net");
    return *w;
  }
  return WeightSpec::dick_plus_hamming(p.s, p.n);
}

DigitalNet initial_net(const NetParams& params, std::uint64_t seed, int restart) {
  for (std::uint64_t attempt = 0; attempt < kMaxRetries; ++attempt) {
    auto gen = make_stream(seed, {static_cast<std::uint64_t>(restart), kInit, attempt});
    auto net = random_net(params, gen);
    if (net.full_rank()) return net;
  }
  throw Error(fmt::format("no full-rank starting net for {} after {} draws", params.to_string(), kMaxRetries));
}

double temperature_at(const AnnealConfig& cfg, double t0, long step) {
  return t0 * std::pow(cfg.cooling_rate, static_cast<double>(step / cfg.moves_per_temperature));
}

struct Chain {
  const NetParams& params;
  const AnnealConfig& cfg;
  const InversionEvaluator& eval;
  const WeightSpec& weight;
  AnnealState state;
  double current_lg = 0.0;
  double best_lg = 0.0;

  void run(long target) {
    while (state.step < target) {
      const long step = state.step;
      auto gen = make_stream(cfg.seed, {static_cast<std::uint64_t>(state.restart), kStep,
                                        static_cast<std::uint64_t>(step)});
      DigitalNet cand = neighbor(state.current, gen);
      const double lg = eval.fast_lg_w(cand);
      ++state.evaluations;
      const double t = temperature_at(cfg, state.temperature0, step);
      const double delta = lg - current_lg;
      bool accept = false;
      if (t > 0.0) {
        accept = delta <= 0.0 || uniform_unit(gen) < std::exp(-delta / t);
      } else {
        accept = delta < 0.0;
      }
      if (accept) {
        state.current = std::move(cand);
        current_lg = lg;
      }
      if (current_lg < best_lg) {
        state.best = state.current;
        best_lg = current_lg;
        state.trace.push_back({step + 1, best_lg});
      }
      state.step = step + 1;
      if (cfg.checkpoint_every > 0 && !cfg.checkpoint_path.empty() && state.step % cfg.checkpoint_every == 0) {
        save_checkpoint_file(checkpoint_name(), params, cfg, weight, state);
      }
    }
  }

  std::string checkpoint_name() const {
    if (cfg.restarts <= 1) return cfg.checkpoint_path;
    return fmt::format("{}.{}", cfg.checkpoint_path, state.restart);
  }
};

Chain start_chain(const NetParams& params, const AnnealConfig& cfg, const InversionEvaluator& eval,
                  const WeightSpec& weight, int restart) {
  Chain c{params, cfg, eval, weight, {}, 0.0, 0.0};
  c.state.restart = restart;
  if (cfg.initial_temperature >= 0.0) {
    c.state.temperature0 = cfg.initial_temperature;
  } else {
    std::vector<double> probes;
    for (int k = 0; k < cfg.probes; ++k) {
      auto gen = make_stream(cfg.seed, {static_cast<std::uint64_t>(restart), kProbe, static_cast<std::uint64_t>(k)});
      auto net = random_net(params, gen);
      if (!net.full_rank()) continue;
      probes.push_back(eval.fast_lg_w(net));
      ++c.state.evaluations;
    }
    double mean = 0.0;
    for (double v : probes) mean += v;
    mean /= static_cast<double>(std::max<std::size_t>(probes.size(), 1));
    double var = 0.0;
    for (double v : probes) var += (v - mean) * (v - mean);
    c.state.temperature0 = probes.size() > 1 ? std::sqrt(var / static_cast<double>(probes.size() - 1)) : 0.0;
    if (!std::isfinite(c.state.temperature0)) c.state.temperature0 = 0.0;
  }
  c.state.current = initial_net(params, cfg.seed, restart);
  c.state.best = c.state.current;
  c.current_lg = eval.fast_lg_w(c.state.current);
  ++c.state.evaluations;
  c.best_lg = c.current_lg;
  c.state.trace.push_back({0, c.best_lg});
  return c;
}

SearchResult finish(const InversionEvaluator& eval, const AnnealState& st) {
  SearchResult r;
  r.best_net = st.best;
  r.best_lg_w = eval.evaluate(st.best).lg_w;
  r.trace = st.trace;
  r.evaluations = st.evaluations;
  r.best_restart = st.restart;
  return r;
}

std::string hex(double v) { return fmt::format("{:a}", v); }

double parse_real(const std::string& tok) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(tok, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != tok.size()) throw Error(fmt::format("bad number '{}' in checkpoint", tok));
  return v;
}

}  // namespace

void AnnealConfig::validate() const {
  if (steps < 0) throw Error("steps must be >= 0");
  if (!(cooling_rate > 0.0 && cooling_rate < 1.0)) throw Error("cooling rate must lie in (0, 1)");
  if (moves_per_temperature < 1) throw Error("moves per temperature must be >= 1");
  if (restarts < 1) throw Error("restarts must be >= 1");
  if (probes < 2 && initial_temperature < 0.0) throw Error("automatic temperature needs at least 2 probes");
  if (checkpoint_every < 0) throw Error("checkpoint interval must be >= 0");
}

DigitalNet neighbor(const DigitalNet& net, SplitMix64& gen) {
  const auto& p = net.params();
  if (p.m < 1) throw Error("neighbor needs at least one generator");
  for (int attempt = 0; attempt < kMaxRetries; ++attempt) {
    std::vector<DigitMatrix> basis = net.basis();
    const auto k = static_cast<int>(uniform_below(gen, static_cast<std::uint64_t>(p.m)));
    const bool flip = p.m == 1 || uniform_below(gen, 2) == 0;
    if (flip) {
      const auto t = uniform_below(gen, static_cast<std::uint64_t>(p.digits()));
      auto d = basis[k].digits();
      const auto step = 1 + uniform_below(gen, static_cast<std::uint64_t>(p.b - 1));
      d[t] = static_cast<std::uint8_t>((d[t] + step) % static_cast<std::uint64_t>(p.b));
    } else {
      auto l = static_cast<int>(uniform_below(gen, static_cast<std::uint64_t>(p.m - 1)));
      if (l >= k) ++l;
      basis[k] += basis[l];
    }
    DigitalNet out(p, std::move(basis));
    if (out.rank() >= net.rank()) return out;
  }
  throw Error(fmt::format("no rank-preserving move found in {} draws", kMaxRetries));
}

void save_checkpoint(std::ostream& out, const NetParams& params, const AnnealConfig& cfg, const WeightSpec& weight,
                     const AnnealState& st) {
  out << "# annealing checkpoint; reals are C hex floats\n";
  out << "version 1\n";
  out << fmt::format("params {} {} {} {}\n", params.b, params.s, params.n, params.m);
  out << fmt::format("steps {}\n", cfg.steps);
  out << fmt::format("initial_temperature {}\n", hex(cfg.initial_temperature));
  out << fmt::format("cooling_rate {}\n", hex(cfg.cooling_rate));
  out << fmt::format("moves_per_temperature {}\n", cfg.moves_per_temperature);
  out << fmt::format("probes {}\n", cfg.probes);
  out << fmt::format("seed {}\n", cfg.seed);
  out << fmt::format("restarts {}\n", cfg.restarts);
  out << fmt::format("checkpoint_every {}\n", cfg.checkpoint_every);
  out << fmt::format("weight {}", weight.name());
  for (double v : weight.values()) out << ' ' << hex(v);
  out << '\n';
  out << fmt::format("restart {}\n", st.restart);
  out << fmt::format("step {}\n", st.step);
  out << fmt::format("temperature0 {}\n", hex(st.temperature0));
  out << fmt::format("evaluations {}\n", st.evaluations);
  out << fmt::format("trace {}", st.trace.size());
  for (const auto& tp : st.trace) out << fmt::format(" {} {}", tp.step, hex(tp.lg_w));
  out << '\n';
  for (const auto& [label, net] : {std::pair{"current", &st.current}, std::pair{"best", &st.best}}) {
    out << "net " << label << '\n';
    write_net(out, *net);
    out << "end\n";
  }
}

void save_checkpoint_file(const std::string& path, const NetParams& params, const AnnealConfig& cfg,
                          const WeightSpec& weight, const AnnealState& state) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw Error(fmt::format("cannot write checkpoint '{}'", tmp));
    save_checkpoint(out, params, cfg, weight, state);
    if (!out) throw Error(fmt::format("failed writing checkpoint '{}'", tmp));
  }
  std::filesystem::rename(tmp, path);
}

Checkpoint load_checkpoint(std::istream& in) {
  std::string line;
  NetParams params;
  AnnealConfig cfg;
  AnnealState st;
  std::optional<WeightSpec> weight;
  std::string weight_name;
  std::vector<double> weight_values;
  bool have_params = false;
  bool have_current = false;
  bool have_best = false;
  while (std::getline(in, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string key;
    if (!(ls >> key)) continue;
    auto next = [&]() {
      std::string tok;
      if (!(ls >> tok)) throw Error(fmt::format("checkpoint field '{}' is incomplete", key));
      return tok;
    };
    auto next_long = [&]() { return std::stol(next()); };
    if (key == "version") {
      if (next() != "1") throw Error("unsupported checkpoint version");
    } else if (key == "params") {
      params.b = static_cast<int>(next_long());
      params.s = static_cast<int>(next_long());
      params.n = static_cast<int>(next_long());
      params.m = static_cast<int>(next_long());
      params.validate();
      have_params = true;
    } else if (key == "steps") {
      cfg.steps = next_long();
    } else if (key == "initial_temperature") {
      cfg.initial_temperature = parse_real(next());
    } else if (key == "cooling_rate") {
      cfg.cooling_rate = parse_real(next());
    } else if (key == "moves_per_temperature") {
      cfg.moves_per_temperature = static_cast<int>(next_long());
    } else if (key == "probes") {
      cfg.probes = static_cast<int>(next_long());
    } else if (key == "seed") {
      cfg.seed = std::stoull(next());
    } else if (key == "restarts") {
      cfg.restarts = static_cast<int>(next_long());
    } else if (key == "checkpoint_every") {
      cfg.checkpoint_every = next_long();
    } else if (key == "weight") {
      weight_name = next();
      std::string tok;
      while (ls >> tok) weight_values.push_back(parse_real(tok));
    } else if (key == "restart") {
      st.restart = static_cast<int>(next_long());
    } else if (key == "step") {
      st.step = next_long();
    } else if (key == "temperature0") {
      st.temperature0 = parse_real(next());
    } else if (key == "evaluations") {
      st.evaluations = next_long();
    } else if (key == "trace") {
      const long count = next_long();
      for (long k = 0; k < count; ++k) {
        const long step = next_long();
        st.trace.push_back({step, parse_real(next())});
      }
    } else if (key == "net") {
      const std::string label = next();
      std::stringstream body;
      bool closed = false;
      while (std::getline(in, line)) {
        if (line == "end") {
          closed = true;
          break;
        }
        body << line << '\n';
      }
      if (!closed) throw Error("checkpoint net section is not terminated");
      DigitalNet net = read_net(body);
      if (label == "current") {
        st.current = std::move(net);
        have_current = true;
      } else if (label == "best") {
        st.best = std::move(net);
        have_best = true;
      } else {
        throw Error(fmt::format("unknown net section '{}'", label));
      }
    } else {
      throw Error(fmt::format("unknown checkpoint field '{}'", key));
    }
  }
  if (!have_params || !have_current || !have_best) throw Error("checkpoint is incomplete");
  if (st.current.params() != params || st.best.params() != params) throw Error("checkpoint nets do not match params");
  cfg.validate();
  return {params, cfg, WeightSpec(params.s, params.n, weight_values, weight_name), std::move(st)};
}

Checkpoint load_checkpoint_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(fmt::format("cannot open checkpoint '{}'", path));
  auto cp = load_checkpoint(in);
  cp.cfg.checkpoint_path = path;
  return cp;
}

SearchResult anneal(const NetParams& params, const AnnealConfig& cfg, std::optional<WeightSpec> weight_opt,
                    unsigned workers) {
  params.validate();
  cfg.validate();
  if (params.m < 1) throw Error("annealing needs m >= 1");
  const auto start = std::chrono::steady_clock::now();
  const WeightSpec weight = default_weight(params, weight_opt);
  const InversionEvaluator eval(params.b, weight);
  std::vector<std::optional<Chain>> chains(static_cast<std::size_t>(cfg.restarts));
  parallel_blocks(chains.size(), workers, [&](std::size_t r) {
    chains[r].emplace(start_chain(params, cfg, eval, weight, static_cast<int>(r)));
    chains[r]->run(cfg.steps);
  });
  std::size_t best = 0;
  long evaluations = 0;
  for (std::size_t r = 0; r < chains.size(); ++r) {
    evaluations += chains[r]->state.evaluations;
    if (chains[r]->best_lg < chains[best]->best_lg) best = r;
  }
  SearchResult out = finish(eval, chains[best]->state);
  out.evaluations = evaluations;
  out.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

SearchResult resume(const Checkpoint& cp, std::optional<long> steps) {
  const auto start = std::chrono::steady_clock::now();
  AnnealConfig cfg = cp.cfg;
  if (steps) cfg.steps = *steps;
  cfg.validate();
  const InversionEvaluator eval(cp.params.b, cp.weight);
  Chain c{cp.params, cfg, eval, cp.weight, cp.state, 0.0, 0.0};
  c.current_lg = eval.fast_lg_w(c.state.current);
  c.best_lg = eval.fast_lg_w(c.state.best);
  c.run(cfg.steps);
  SearchResult out = finish(eval, c.state);
  out.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

DigitalNet indexed_random_net(const NetParams& params, std::uint64_t seed, std::uint64_t index) {
  DigitalNet net = random_net(params, derive_seed(seed, {index}));
  for (std::uint64_t attempt = 1; !net.full_rank(); ++attempt) {
    if (attempt > kMaxRetries) throw Error(fmt::format("no full-rank net for {}", params.to_string()));
    net = random_net(params, derive_seed(seed, {index, attempt}));
  }
  return net;
}

SearchResult random_search(const NetParams& params, long count, std::uint64_t seed,
                           std::optional<WeightSpec> weight_opt) {
  if (count < 1) throw Error("count must be >= 1");
  const auto start = std::chrono::steady_clock::now();
  const WeightSpec weight = default_weight(params, weight_opt);
  const InversionEvaluator eval(params.b, weight);
  SearchResult out;
  double best = std::numeric_limits<double>::infinity();
  for (long i = 0; i < count; ++i) {
    auto net = indexed_random_net(params, seed, static_cast<std::uint64_t>(i));
    ++out.evaluations;
    const double lg = eval.evaluate(net).lg_w;
    if (lg < best) {
      best = lg;
      out.best_net = net;
      out.trace.push_back({i, lg});
    }
  }
  out.best_lg_w = best;
  out.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

}  // namespace dnet
