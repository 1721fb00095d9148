#pragma once

#include <map>
#include <optional>

#include "calr/survival.hpp"
#include "calr/types.hpp"

namespace calr {

// Least-squares working-model fit of the per-subject outcomes on centered
// covariates, one slope vector per arm. In stratified mode the regression
// centers covariates at stratum-by-arm means and sigma is the within-stratum
// covariance pooled with weights n_z / n; otherwise centering is at per-arm
// means and sigma is the overall sample covariance (divisor n - 1).
struct AdjustmentFit {
  bool stratified = false;
  int p = 0;
  std::vector<double> beta1;
  std::vector<double> beta0;
  std::vector<double> xbar;                      // overall covariate mean
  std::map<int, std::vector<double>> stratum_mean;  // stratified mode only
  std::vector<double> sigma;                     // p x p, row-major
};

struct AdjustOptions {
  std::optional<double> pi;    // design allocation probability; n1/n if absent
  bool stratum_dummies = false;  // expand stratum labels into covariate columns
};

// Copy of the data whose covariate matrix gains reference-coded indicator
// columns for the stratum labels (smallest label is the reference) ahead of
// the existing covariates. With a single stratum the data are unchanged.
TrialData with_stratum_dummies(const TrialData& data);

// Throws RankDeficient when an arm is empty, when p == 0, or when the
// centered Gram matrix of an arm is numerically singular (relative threshold
// 1e-10 in a rank-revealing QR). fit_gamma additionally requires every
// stratum to contain subjects from both arms.
AdjustmentFit fit_beta(const TrialData& data, const DerivedOutcomes& outcomes);
AdjustmentFit fit_gamma(const TrialData& data, const DerivedOutcomes& outcomes);

// (1/n) sum_i { arm_i * (x_i - c_i)' beta1 - (1 - arm_i) * (x_i - c_i)' beta0 }
// with c_i the overall mean (unstratified fit) or the subject's stratum mean.
double contrast_shift(const TrialData& data, const AdjustmentFit& fit);

// pi * (1 - pi) * (beta1 + beta0)' sigma (beta1 + beta0).
double variance_reduction(const AdjustmentFit& fit, double pi);

// Covariate-adjusted tests. Throw NonpositiveVariance when the deflated
// variance estimate falls below 1e-14.
TestResult adjusted_logrank(const TrialData& data,
                            const AdjustOptions& opts = {});
TestResult adjusted_stratified_logrank(const TrialData& data,
                                       const AdjustOptions& opts = {});

}  // namespace calr
