#pragma once

// Search for nets with small lg W by simulated annealing and by plain random
// sampling. Every random draw comes from a stream keyed by (seed, restart,
// step), so a run is reproducible from its seed and resumable from a
// checkpoint at any step.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "dnet/net.hpp"
#include "dnet/rng.hpp"
#include "dnet/wafom.hpp"

namespace dnet {

struct AnnealConfig {
  long steps = 100000;
  // Negative: standard deviation of lg W over `probes` random nets.
  // Zero: strict hill climbing.
  double initial_temperature = -1.0;
  double cooling_rate = 0.98;
  int moves_per_temperature = 50;
  int probes = 100;
  std::uint64_t seed = 0;
  int restarts = 1;
  long checkpoint_every = 0;  // 0 disables
  std::string checkpoint_path;

  void validate() const;
};

struct TracePoint {
  long step;
  double lg_w;
  bool operator==(const TracePoint&) const = default;
};

struct SearchResult {
  DigitalNet best_net;
  double best_lg_w = 0.0;  // recomputed with the accurate evaluator
  std::vector<TracePoint> trace;  // best-so-far improvements
  double wall_seconds = 0.0;
  long evaluations = 0;
  int best_restart = 0;
};

// One random move: flip a digit of one generator to another value, or add
// another generator to it. Draws leaving the rank below that of `net` are
// retried, at most 100 times.
DigitalNet neighbor(const DigitalNet& net, SplitMix64& gen);

// State of one annealing chain after `step` moves.
struct AnnealState {
  int restart = 0;
  long step = 0;
  double temperature0 = 0.0;
  long evaluations = 0;
  DigitalNet current;
  DigitalNet best;
  std::vector<TracePoint> trace;
};

void save_checkpoint(std::ostream& out, const NetParams& params, const AnnealConfig& cfg, const WeightSpec& weight,
                     const AnnealState& state);
void save_checkpoint_file(const std::string& path, const NetParams& params, const AnnealConfig& cfg,
                          const WeightSpec& weight, const AnnealState& state);

struct Checkpoint {
  NetParams params;
  AnnealConfig cfg;
  WeightSpec weight;
  AnnealState state;
};
Checkpoint load_checkpoint(std::istream& in);
Checkpoint load_checkpoint_file(const std::string& path);

// Weight defaults to mu+h.
SearchResult anneal(const NetParams& params, const AnnealConfig& cfg, std::optional<WeightSpec> weight = std::nullopt,
                    unsigned workers = 1);
// Continues a single chain from a checkpoint up to cfg.steps (the checkpoint's
// configuration unless overridden).
SearchResult resume(const Checkpoint& cp, std::optional<long> steps = std::nullopt);

// Net number `index` of the random stream under `seed`: i.i.d. uniform
// generators, redrawn in the rare case they are dependent.
DigitalNet indexed_random_net(const NetParams& params, std::uint64_t seed, std::uint64_t index);

// Best of `count` nets from indexed_random_net(params, seed, 0..count-1).
SearchResult random_search(const NetParams& params, long count, std::uint64_t seed,
                           std::optional<WeightSpec> weight = std::nullopt);

}  // namespace dnet
