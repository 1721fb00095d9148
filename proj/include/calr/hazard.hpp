#pragma once

#include <optional>
#include <string>

#include "calr/types.hpp"

namespace calr {

struct SolveOptions {
  std::optional<double> pi;      // design allocation probability for variances
  double conf_level = 0.95;
  double score_tol = 1e-10;      // convergence: |score - target| below this
  int max_iter = 200;
  bool stratum_dummies = false;  // covariate expansion for the adjusted fits
};

struct HazardEstimate {
  std::string method;
  double theta = 0.0;
  double se = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double conf_level = 0.95;
  int iterations = 0;
  double score_residual = 0.0;
};

// Score function of the one-parameter relative-risk model and its negated
// derivative g(theta) >= 0; both carry the 1/n factor. score_unadjusted(0)
// equals the plain numerator and g(0) the plain variance estimate.
double score_unadjusted(const TrialData& data, double theta);
double score_derivative(const TrialData& data, double theta);
double stratified_score(const TrialData& data, double theta);
double stratified_score_derivative(const TrialData& data, double theta);

// Root solves for the log hazard ratio. Bracket search starts at [-2, 2] and
// expands geometrically to at most [-50, 50]; inside the bracket a Newton
// step is taken when it stays within the current bracket and bisection
// otherwise. Throws NoRoot when no sign change exists in [-50, 50].
HazardEstimate solve_theta_unadjusted(const TrialData& data,
                                      const SolveOptions& opts = {});
HazardEstimate solve_theta_adjusted(const TrialData& data,
                                    const SolveOptions& opts = {});
HazardEstimate solve_theta_stratified(const TrialData& data,
                                      const SolveOptions& opts = {});
HazardEstimate solve_theta_adjusted_stratified(const TrialData& data,
                                               const SolveOptions& opts = {});

}  // namespace calr
