#pragma once

#include <optional>
#include <string>
#include <vector>

#include "calr/hazard.hpp"
#include "calr/types.hpp"

namespace calr {

struct AnalyzeOptions {
  std::optional<double> pi;  // design allocation probability
  double alpha = 0.05;       // two-sided level; CIs use 1 - alpha
  bool subgroups = false;    // re-run unstratified analyses per stratum
};

// One report cell: either a value or the error that prevented it, so a
// degenerate piece never aborts the remaining cells.
template <class T>
struct Cell {
  std::optional<T> value;
  std::string error;  // empty on success
  bool ok() const { return value.has_value(); }
};

// Per-stratum re-analysis treated as an independent dataset; p-values carry
// a Bonferroni factor equal to the number of subgroups.
struct SubgroupReport {
  int stratum = 0;
  int n = 0;
  Cell<TestResult> t_l;
  Cell<TestResult> t_cl;
  Cell<HazardEstimate> theta_l;
  Cell<HazardEstimate> theta_cl;
  double p_adj_l = 1.0;
  double p_adj_cl = 1.0;
};

struct AnalysisReport {
  int n = 0;
  int n_arm1 = 0;
  int p = 0;
  std::vector<std::pair<int, int>> strata_counts;  // (label, n_z)
  double pi_used = 0.5;
  double alpha = 0.05;

  Cell<TestResult> t_l, t_cl, t_sl, t_csl;
  Cell<HazardEstimate> theta_l, theta_cl, theta_sl, theta_csl;
  std::vector<SubgroupReport> subgroups;
};

// Runs the four tests and four estimators, catching typed errors per cell.
// Covariate-adjusted cells are marked unavailable when p == 0. The
// unstratified adjusted test expands stratum labels into indicator columns
// when more than one stratum is present.
AnalysisReport analyze(const TrialData& data, const AnalyzeOptions& opts = {});

// Versioned JSON document, numbers at full round-trip precision.
std::string report_json(const AnalysisReport& report);

// Human-readable fixed-width table.
std::string report_text(const AnalysisReport& report);

}  // namespace calr
