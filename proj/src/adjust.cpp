#include "calr/adjust.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>

#include "calr/error.hpp"

namespace calr {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

std::vector<int> rows_where(const TrialData& data, int arm) {
  std::vector<int> rows;
  for (int i : data.canonical_order()) {
    if (data.arm[i] == arm) rows.push_back(i);
  }
  return rows;
}

VectorXd mean_rows(const TrialData& data, const std::vector<int>& rows) {
  VectorXd m = VectorXd::Zero(data.p);
  for (int i : rows) {
    for (int j = 0; j < data.p; ++j) m[j] += data.xat(i, j);
  }
  return m / static_cast<double>(rows.size());
}

// Solves G * beta = rhs through a rank-revealing QR; relative threshold
// 1e-10, no rank repair.
VectorXd solve_gram(const MatrixXd& gram, const VectorXd& rhs,
                    const std::string& what) {
  Eigen::ColPivHouseholderQR<MatrixXd> qr(gram);
  qr.setThreshold(1e-10);
  if (qr.rank() < gram.cols()) {
    fail(ErrorCode::RankDeficient,
         what + ": centered Gram matrix has rank " +
             std::to_string(qr.rank()) + " < " + std::to_string(gram.cols()));
  }
  return qr.solve(rhs);
}

std::vector<double> to_std(const VectorXd& v) {
  return {v.data(), v.data() + v.size()};
}

std::vector<double> to_std(const MatrixXd& m) {
  std::vector<double> out(static_cast<std::size_t>(m.rows()) * m.cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      out[static_cast<std::size_t>(i) * m.cols() + j] = m(i, j);
    }
  }
  return out;
}

void check_fit_inputs(const TrialData& data, const DerivedOutcomes& outcomes) {
  data.validate();
  if (data.p <= 0) {
    fail(ErrorCode::RankDeficient, "covariate matrix has no columns");
  }
  if (static_cast<int>(outcomes.value.size()) != data.n()) {
    fail(ErrorCode::InvalidConfig, "outcome length does not match data");
  }
}

}  // namespace

TrialData with_stratum_dummies(const TrialData& data) {
  const std::vector<int> labels = data.strata();
  const int extra = static_cast<int>(labels.size()) - 1;
  TrialData out;
  out.time = data.time;
  out.event = data.event;
  out.arm = data.arm;
  out.stratum = data.stratum;
  out.p = data.p + (extra > 0 ? extra : 0);
  if (extra <= 0) {
    out.x = data.x;
    return out;
  }
  const int n = data.n();
  out.x.assign(static_cast<std::size_t>(n) * out.p, 0.0);
  for (int i = 0; i < n; ++i) {
    double* row = out.x.data() + static_cast<std::size_t>(i) * out.p;
    for (int l = 1; l <= extra; ++l) {
      if (data.stratum[i] == labels[l]) row[l - 1] = 1.0;
    }
    for (int j = 0; j < data.p; ++j) row[extra + j] = data.xat(i, j);
  }
  return out;
}

AdjustmentFit fit_beta(const TrialData& data, const DerivedOutcomes& outcomes) {
  check_fit_inputs(data, outcomes);
  const int p = data.p;
  AdjustmentFit fit;
  fit.stratified = false;
  fit.p = p;

  for (int arm = 0; arm <= 1; ++arm) {
    const std::vector<int> rows = rows_where(data, arm);
    if (rows.empty()) {
      fail(ErrorCode::RankDeficient,
           "arm " + std::to_string(arm) + " has no subjects");
    }
    const VectorXd center = mean_rows(data, rows);
    MatrixXd gram = MatrixXd::Zero(p, p);
    VectorXd rhs = VectorXd::Zero(p);
    VectorXd c(p);
    for (int i : rows) {
      for (int j = 0; j < p; ++j) c[j] = data.xat(i, j) - center[j];
      gram.selfadjointView<Eigen::Lower>().rankUpdate(c);
      rhs += outcomes.value[i] * c;
    }
    gram = gram.selfadjointView<Eigen::Lower>();
    const VectorXd beta =
        solve_gram(gram, rhs, "arm " + std::to_string(arm));
    (arm == 1 ? fit.beta1 : fit.beta0) = to_std(beta);
  }

  // Overall mean and sample covariance (divisor n - 1), two-pass.
  const int n = data.n();
  VectorXd xbar = VectorXd::Zero(p);
  for (int i : data.canonical_order()) {
    for (int j = 0; j < p; ++j) xbar[j] += data.xat(i, j);
  }
  xbar /= static_cast<double>(n);
  MatrixXd cov = MatrixXd::Zero(p, p);
  VectorXd c(p);
  for (int i : data.canonical_order()) {
    for (int j = 0; j < p; ++j) c[j] = data.xat(i, j) - xbar[j];
    cov.selfadjointView<Eigen::Lower>().rankUpdate(c);
  }
  cov = cov.selfadjointView<Eigen::Lower>();
  cov /= static_cast<double>(n - 1);
  fit.xbar = to_std(xbar);
  fit.sigma = to_std(cov);
  return fit;
}

AdjustmentFit fit_gamma(const TrialData& data,
                        const DerivedOutcomes& outcomes) {
  check_fit_inputs(data, outcomes);
  const int p = data.p;
  const int n = data.n();
  const std::vector<int> labels = data.strata();
  AdjustmentFit fit;
  fit.stratified = true;
  fit.p = p;

  // Subject indices per stratum and arm, in canonical order.
  std::vector<std::vector<int>> by_stratum(labels.size());
  for (int i : data.canonical_order()) {
    const auto it =
        std::lower_bound(labels.begin(), labels.end(), data.stratum[i]);
    by_stratum[it - labels.begin()].push_back(i);
  }

  MatrixXd gram1 = MatrixXd::Zero(p, p), gram0 = MatrixXd::Zero(p, p);
  VectorXd rhs1 = VectorXd::Zero(p), rhs0 = VectorXd::Zero(p);
  MatrixXd pooled = MatrixXd::Zero(p, p);
  VectorXd c(p);
  for (std::size_t zi = 0; zi < labels.size(); ++zi) {
    const std::vector<int>& zrows = by_stratum[zi];
    std::vector<int> rows1, rows0;
    for (int i : zrows) (data.arm[i] ? rows1 : rows0).push_back(i);
    if (rows1.empty() || rows0.empty()) {
      fail(ErrorCode::RankDeficient,
           "stratum " + std::to_string(labels[zi]) + " has no arm-" +
               (rows1.empty() ? std::string("1") : std::string("0")) +
               " subjects");
    }
    for (int arm = 0; arm <= 1; ++arm) {
      const std::vector<int>& rows = arm ? rows1 : rows0;
      const VectorXd center = mean_rows(data, rows);
      MatrixXd& gram = arm ? gram1 : gram0;
      VectorXd& rhs = arm ? rhs1 : rhs0;
      for (int i : rows) {
        for (int j = 0; j < p; ++j) c[j] = data.xat(i, j) - center[j];
        gram.selfadjointView<Eigen::Lower>().rankUpdate(c);
        rhs += outcomes.value[i] * c;
      }
    }
    // Stratum mean for the contrast shift; within-stratum covariance pooled
    // with weight n_z / n (singleton strata contribute nothing).
    const VectorXd zmean = mean_rows(data, zrows);
    fit.stratum_mean[labels[zi]] = to_std(zmean);
    const std::size_t nz = zrows.size();
    if (nz >= 2) {
      MatrixXd cov = MatrixXd::Zero(p, p);
      for (int i : zrows) {
        for (int j = 0; j < p; ++j) c[j] = data.xat(i, j) - zmean[j];
        cov.selfadjointView<Eigen::Lower>().rankUpdate(c);
      }
      cov = cov.selfadjointView<Eigen::Lower>();
      pooled += cov / static_cast<double>(nz - 1) *
                (static_cast<double>(nz) / static_cast<double>(n));
    }
  }
  gram1 = gram1.selfadjointView<Eigen::Lower>();
  gram0 = gram0.selfadjointView<Eigen::Lower>();
  fit.beta1 = to_std(solve_gram(gram1, rhs1, "arm 1 (pooled strata)"));
  fit.beta0 = to_std(solve_gram(gram0, rhs0, "arm 0 (pooled strata)"));

  VectorXd xbar = VectorXd::Zero(p);
  for (int i : data.canonical_order()) {
    for (int j = 0; j < p; ++j) xbar[j] += data.xat(i, j);
  }
  fit.xbar = to_std(VectorXd(xbar / static_cast<double>(n)));
  fit.sigma = to_std(pooled);
  return fit;
}

double contrast_shift(const TrialData& data, const AdjustmentFit& fit) {
  const int p = fit.p;
  double acc = 0.0;
  for (int i : data.canonical_order()) {
    const std::vector<double>& center =
        fit.stratified ? fit.stratum_mean.at(data.stratum[i]) : fit.xbar;
    const std::vector<double>& beta = data.arm[i] ? fit.beta1 : fit.beta0;
    double dot = 0.0;
    for (int j = 0; j < p; ++j) dot += (data.xat(i, j) - center[j]) * beta[j];
    acc += data.arm[i] ? dot : -dot;
  }
  return acc / data.n();
}

double variance_reduction(const AdjustmentFit& fit, double pi) {
  const int p = fit.p;
  double quad = 0.0;
  for (int j = 0; j < p; ++j) {
    const double sj = fit.beta1[j] + fit.beta0[j];
    for (int k = 0; k < p; ++k) {
      const double sk = fit.beta1[k] + fit.beta0[k];
      quad += sj * fit.sigma[static_cast<std::size_t>(j) * p + k] * sk;
    }
  }
  return pi * (1.0 - pi) * quad;
}

namespace {

double resolve_pi(const TrialData& data, const AdjustOptions& opts) {
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

TestResult adjusted_impl(const TrialData& data, const AdjustOptions& opts,
                         bool stratified) {
  const TrialData* use = &data;
  TrialData augmented;
  if (!stratified && opts.stratum_dummies) {
    augmented = with_stratum_dummies(data);
    use = &augmented;
  }
  const LogrankComponents comp = stratified
                                     ? stratified_logrank_components(*use)
                                     : logrank_components(*use);
  const DerivedOutcomes out =
      stratified ? stratified_derived_outcomes(*use) : derived_outcomes(*use);
  const AdjustmentFit fit =
      stratified ? fit_gamma(*use, out) : fit_beta(*use, out);
  const double pi = resolve_pi(*use, opts);
  const double u = comp.u - contrast_shift(*use, fit);
  const double sigma2 = comp.sigma2 - variance_reduction(fit, pi);
  if (sigma2 < 1e-14) {
    fail(ErrorCode::NonpositiveVariance,
         std::string(stratified ? "T_CSL" : "T_CL") +
             " variance estimate is not positive");
  }
  return make_test_result(stratified ? "T_CSL" : "T_CL", u, sigma2, comp.n);
}

}  // namespace

TestResult adjusted_logrank(const TrialData& data, const AdjustOptions& opts) {
  return adjusted_impl(data, opts, false);
}

TestResult adjusted_stratified_logrank(const TrialData& data,
                                       const AdjustOptions& opts) {
  return adjusted_impl(data, opts, true);
}

}  // namespace calr
