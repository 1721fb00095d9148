#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "calr/random.hpp"
#include "calr/types.hpp"

namespace calr {

// Data-generating scenarios. In I and II the event time is exponential with
// rate log(2) * exp(-theta * arm + 0.5 * (w1 + w2 + w3)); in III and IV it is
// exp(-theta * arm + 0.5 * (w1 + w2 + w3)) plus a unit exponential, so the
// two arms' hazards cross. Censoring is Uniform(10, 40) in I and III,
// (3 - 3 * arm) plus a unit exponential in II and IV. CRViolation uses the
// case-III event times with exponential censoring of rate
// log(1.1) * exp(-psi * arm + 0.2 * (w1 + w2 + w3)); psi != 0 makes the
// censoring distributions of the two arms differ beyond an arm shift.
enum class ScenarioCase { case_i, case_ii, case_iii, case_iv, cr_violation };

const char* scenario_name(ScenarioCase c);          // "I".."IV", "CRViolation"
ScenarioCase scenario_from_name(const std::string& name);

// Cut points discretizing w1 and w2 into stratification levels; a value's
// level is the number of cut points at or below it. Defaults give 2 x 3
// joint levels with equal cell probabilities.
struct ZCuts {
  std::vector<double> w1{0.0};
  std::vector<double> w2{-0.4307, 0.4307};
};

struct ScenarioConfig {
  ScenarioCase scase = ScenarioCase::case_i;
  double theta = 0.0;
  double psi = 0.0;  // CRViolation only
  int n = 500;
  long replications = 10000;
  std::uint64_t seed = 20240501;
  double alpha = 0.05;
  double pi = 0.5;
  SchemeConfig scheme{SchemeKind::permuted_block, 0.5, 4, 0.8, {}};
  ZCuts z_cuts;
  int threads = 0;  // 0 = hardware concurrency

  void validate() const;
};

// One simulated trial. The covariate matrix holds the third baseline
// variable (p = 1); stratum is the joint discretized level of the first two.
// Draw order per subject is (w1, w2, w3, u_event, u_censor) from the data
// stream; arms come from a separate assignment stream, so each replication
// is reproducible in isolation.
TrialData generate_trial(const ScenarioConfig& config, long replication);

// One CSV-ready line of a Monte Carlo report. reps counts all replications;
// rate = rejections / (reps - degenerate).
struct MonteCarloRow {
  std::string scase;
  std::string scheme;
  std::string test;
  double theta = 0.0;
  long reps = 0;
  long rejections = 0;
  double rate = 0.0;
  double mc_se = 0.0;
  long degenerate = 0;
};

struct MonteCarloReport {
  ScenarioConfig config;
  std::vector<MonteCarloRow> rows;  // T_L, T_CL, T_SL, T_CSL
  double seconds = 0.0;
};

// Null rejection rates of the four tests (config.theta must be 0).
MonteCarloReport run_type1(const ScenarioConfig& config);

// Rejection rates at arbitrary config.theta (power when theta != 0).
MonteCarloReport run_rates(const ScenarioConfig& config);

// Rates along a grid of theta values, same seed per point (common random
// numbers), concatenated rows.
std::vector<MonteCarloRow> run_power_curve(const ScenarioConfig& config,
                                           const std::vector<double>& thetas);

// Serializes rows under the standard header
// case,scheme,test,theta,reps,rejections,rate,mc_se,degenerate.
std::string report_csv(const std::vector<MonteCarloRow>& rows);

}  // namespace calr
