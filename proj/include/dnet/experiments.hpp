#pragma once

// The two experiments: lg W against lg E over random nets (scatter and
// correlation), and searched nets against externally supplied nets.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dnet/net.hpp"
#include "dnet/search.hpp"

namespace dnet {

struct ScatterRecord {
  std::uint64_t net_id = 0;
  double lg_w = 0.0;
  std::map<std::string, double> lg_e;  // integrand id -> lg E(f; P)
};

struct ScatterConfig {
  NetParams params{2, 4, 32, 10};
  long n_nets = 200;
  int n_shifts = 256;
  std::vector<std::string> fns{"f0", "f1", "f2", "f3", "f4", "f5", "f6", "f7"};
  std::uint64_t seed = 0;
};

// Net i is indexed_random_net(params, seed, i); its shifts come from the
// stream keyed by (seed, i).
std::vector<ScatterRecord> scatter_experiment(const ScatterConfig& cfg, unsigned workers = 1);

// Columns net_id,lg_w,lg_e_f0,...,lg_e_f7; integrands that were not run are
// left empty, lg E = 0 is written as -inf.
void write_scatter_csv(std::ostream& out, const std::vector<ScatterRecord>& records);

// Pearson correlation; throws when either side has zero variance.
double correlation(const std::vector<double>& xs, const std::vector<double>& ys);

// corr(lg W, lg E(f)) over the records with finite lg E.
double scatter_correlation(const std::vector<ScatterRecord>& records, const std::string& fn);

// Median lg E(f) of the worst tenth of nets by W minus that of the best tenth.
double decile_gap(const std::vector<ScatterRecord>& records, const std::string& fn);

struct ComparisonRow {
  std::string label;  // "external" or "searched"
  int s = 0;
  int m = 0;
  bool present = true;
  std::string note;
  double lg_w = 0.0;
  std::map<std::string, double> lg_e;
};

struct ComparisonConfig {
  int b = 2;
  int s = 4;
  int n = 30;
  int m_begin = 8;
  int m_end = 16;  // exclusive
  // Path of the external generator-matrix file; "{m}" is replaced by m. A
  // file with more columns or digit rows is truncated to the leading ones.
  std::string external_pattern;
  bool external_is_net_file = false;  // native net format instead
  AnnealConfig search;
  std::vector<std::string> fns{"f0", "f1", "f2", "f3", "f4", "f5", "f6", "f7"};
  int n_shifts = 1024;
  std::uint64_t seed = 0;
};

std::vector<ComparisonRow> comparison_experiment(const ComparisonConfig& cfg, unsigned workers = 1);

void write_comparison_csv(std::ostream& out, const std::vector<ComparisonRow>& rows);
// Aligned plain-text table, two decimals.
void write_comparison_table(std::ostream& out, const std::vector<ComparisonRow>& rows,
                            const std::vector<std::string>& fns);

// Shared number format: 17 significant digits, "-inf"/"inf"/"nan" spelled out.
std::string format_real(double v);

}  // namespace dnet
