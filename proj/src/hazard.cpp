#include "calr/hazard.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "calr/adjust.hpp"
#include "calr/error.hpp"
#include "calr/kernels.hpp"
#include "calr/stats.hpp"
#include "calr/survival.hpp"

namespace calr {

namespace {

// Risk-set tables fixed per solve; only the relative-risk point changes
// between score evaluations.
struct ScoreEval {
  std::vector<RiskSetSeries> tables;
  int n = 0;
  long events = 0;

  static ScoreEval build(const TrialData& data, bool stratified) {
    ScoreEval ev;
    ev.n = data.n();
    if (stratified) {
      for (int z : data.strata()) ev.tables.push_back(build_risk_sets(data, z));
    } else {
      ev.tables.push_back(build_risk_sets(data));
    }
    for (const RiskSetSeries& s : ev.tables) {
      for (std::size_t k = 0; k < s.size(); ++k) {
        ev.events += static_cast<long>(s.events1[k] + s.events0[k]);
      }
    }
    if (ev.events == 0) fail(ErrorCode::NoEvents, "no observed events");
    return ev;
  }

  double score(double theta) const {
    const double r = std::exp(theta);
    double u = 0.0;
    for (const RiskSetSeries& s : tables) {
      u += kernels::score_sums(s.atrisk1.data(), s.atrisk0.data(),
                               s.events1.data(), s.events0.data(), s.size(), r)
               .u;
    }
    return u / n;
  }

  double derivative(double theta) const {
    const double r = std::exp(theta);
    double v = 0.0;
    for (const RiskSetSeries& s : tables) {
      v += kernels::score_sums(s.atrisk1.data(), s.atrisk0.data(),
                               s.events1.data(), s.events0.data(), s.size(), r)
               .v;
    }
    return v / n;
  }
};

// Finds score(theta) == target for the decreasing score. Bracket [-2, 2]
// expands geometrically (factor 2, cap 50); inside it a Newton step (the
// score derivative is -g) is used when it lands strictly inside the current
// bracket, bisection otherwise.
HazardEstimate solve_root(const ScoreEval& ev, double target,
                          const SolveOptions& opts, const char* method) {
  double lo = -2.0, hi = 2.0;
  double flo = ev.score(lo) - target;
  double fhi = ev.score(hi) - target;
  while (flo < 0.0 && lo > -50.0) {
    lo = std::max(lo * 2.0, -50.0);
    flo = ev.score(lo) - target;
  }
  while (fhi > 0.0 && hi < 50.0) {
    hi = std::min(hi * 2.0, 50.0);
    fhi = ev.score(hi) - target;
  }
  // Strict signs: a score that merely plateaus at the target (for example
  // underflowing to it when every event sits in one arm) is separation, not
  // a crossing.
  if (!(flo > 0.0) || !(fhi < 0.0)) {
    fail(ErrorCode::NoRoot, std::string(method) +
                                ": score has no sign change on [-50, 50]");
  }

  HazardEstimate est;
  est.method = method;
  est.conf_level = opts.conf_level;
  double x = (lo < 0.0 && hi > 0.0) ? 0.0 : 0.5 * (lo + hi);
  double fx = ev.score(x) - target;
  int iter = 0;
  while (std::fabs(fx) >= opts.score_tol && iter < opts.max_iter) {
    ++iter;
    if (fx > 0.0) lo = x; else hi = x;
    const double gx = ev.derivative(x);
    double next = x + fx / gx;
    if (!(gx > 0.0) || !(next > lo && next < hi)) next = 0.5 * (lo + hi);
    x = next;
    fx = ev.score(x) - target;
  }
  if (std::fabs(fx) >= opts.score_tol) {
    fail(ErrorCode::NoRoot,
         std::string(method) + ": no convergence within iteration limit");
  }
  est.theta = x;
  est.iterations = iter;
  est.score_residual = std::fabs(fx);
  return est;
}

void attach_ci(HazardEstimate& est, double se, double conf_level) {
  est.se = se;
  const double z = normal_quantile(1.0 - (1.0 - conf_level) / 2.0);
  est.ci_low = est.theta - z * se;
  est.ci_high = est.theta + z * se;
}

double resolve_pi(const TrialData& data, const SolveOptions& opts) {
  if (opts.pi) {
    if (!(*opts.pi > 0.0 && *opts.pi < 1.0)) {
      fail(ErrorCode::InvalidConfig, "pi must lie in (0, 1)");
    }
    return *opts.pi;
  }
  long n1 = 0;
  for (auto a : data.arm) n1 += a;
  return static_cast<double>(n1) / data.n();
}

HazardEstimate solve_plain(const TrialData& data, const SolveOptions& opts,
                           bool stratified) {
  data.validate();
  const ScoreEval ev = ScoreEval::build(data, stratified);
  HazardEstimate est =
      solve_root(ev, 0.0, opts, stratified ? "theta_SL" : "theta_L");
  const double g = ev.derivative(est.theta);
  if (!(g > 0.0)) {
    fail(ErrorCode::NonpositiveVariance,
         est.method + ": curvature vanishes at the estimate");
  }
  attach_ci(est, 1.0 / std::sqrt(ev.n * g), opts.conf_level);
  return est;
}

HazardEstimate solve_adjusted_impl(const TrialData& data,
                                   const SolveOptions& opts, bool stratified) {
  data.validate();
  const HazardEstimate base = solve_plain(data, opts, stratified);

  const TrialData* use = &data;
  TrialData augmented;
  if (!stratified && opts.stratum_dummies) {
    augmented = with_stratum_dummies(data);
    use = &augmented;
  }
  // Slopes are fitted once, at the unadjusted estimate; the adjustment term
  // is then a constant shift of the score.
  const DerivedOutcomes out =
      stratified ? stratified_derived_outcomes_at(*use, base.theta)
                 : derived_outcomes_at(*use, base.theta);
  const AdjustmentFit fit =
      stratified ? fit_gamma(*use, out) : fit_beta(*use, out);
  const double shift = contrast_shift(*use, fit);

  const ScoreEval ev = ScoreEval::build(data, stratified);
  HazardEstimate est =
      solve_root(ev, shift, opts, stratified ? "theta_CSL" : "theta_CL");
  const double g = ev.derivative(est.theta);
  if (!(g > 0.0)) {
    fail(ErrorCode::NonpositiveVariance,
         est.method + ": curvature vanishes at the estimate");
  }
  const double pi = resolve_pi(data, opts);
  const double sigma2 = g - variance_reduction(fit, pi);
  if (sigma2 < 1e-14) {
    fail(ErrorCode::NonpositiveVariance,
         est.method + ": adjusted variance estimate is not positive");
  }
  attach_ci(est, std::sqrt(sigma2 / (ev.n * g * g)), opts.conf_level);
  return est;
}

}  // namespace

double score_unadjusted(const TrialData& data, double theta) {
  data.validate();
  return ScoreEval::build(data, false).score(theta);
}

double score_derivative(const TrialData& data, double theta) {
  data.validate();
  return ScoreEval::build(data, false).derivative(theta);
}

double stratified_score(const TrialData& data, double theta) {
  data.validate();
  return ScoreEval::build(data, true).score(theta);
}

double stratified_score_derivative(const TrialData& data, double theta) {
  data.validate();
  return ScoreEval::build(data, true).derivative(theta);
}

HazardEstimate solve_theta_unadjusted(const TrialData& data,
                                      const SolveOptions& opts) {
  return solve_plain(data, opts, false);
}

HazardEstimate solve_theta_stratified(const TrialData& data,
                                      const SolveOptions& opts) {
  return solve_plain(data, opts, true);
}

HazardEstimate solve_theta_adjusted(const TrialData& data,
                                    const SolveOptions& opts) {
  return solve_adjusted_impl(data, opts, false);
}

HazardEstimate solve_theta_adjusted_stratified(const TrialData& data,
                                               const SolveOptions& opts) {
  return solve_adjusted_impl(data, opts, true);
}

}  // namespace calr
