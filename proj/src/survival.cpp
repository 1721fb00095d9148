#include "calr/survival.hpp"

#include <cmath>
#include <string>

#include "calr/error.hpp"
#include "calr/kernels.hpp"
#include "calr/stats.hpp"

namespace calr {

namespace {

// Risk-set series of one stratum plus the per-subject hooks needed by the
// outcome transform: for each covered subject, the series index of its event
// (if any) and the last series index whose time does not exceed its
// follow-up time.
struct StratumTable {
  RiskSetSeries series;
  std::vector<int> rows;  // subject indices, time-ascending
  std::vector<int> event_k;
  std::vector<int> last_k;
  long events = 0;
};

StratumTable build_table(const TrialData& data, std::optional<int> stratum) {
  StratumTable t;
  const auto& order = data.canonical_order();
  long remaining1 = 0, remaining0 = 0;
  t.rows.reserve(order.size());
  for (int i : order) {
    if (stratum && data.stratum[i] != *stratum) continue;
    t.rows.push_back(i);
    (data.arm[i] ? remaining1 : remaining0) += 1;
  }
  if (t.rows.empty()) {
    fail(ErrorCode::EmptyData,
         stratum ? "stratum " + std::to_string(*stratum) + " has no subjects"
                 : "no subjects");
  }
  const std::size_t m = t.rows.size();
  t.event_k.assign(m, -1);
  t.last_k.assign(m, -1);
  std::size_t a = 0;
  while (a < m) {
    const double tt = data.time[t.rows[a]];
    std::size_t b = a;
    long d1 = 0, d0 = 0;
    while (b < m && data.time[t.rows[b]] == tt) {
      const int i = t.rows[b];
      if (data.event[i]) (data.arm[i] ? d1 : d0) += 1;
      ++b;
    }
    if (d1 + d0 > 0) {
      t.series.time.push_back(tt);
      t.series.atrisk1.push_back(static_cast<double>(remaining1));
      t.series.atrisk0.push_back(static_cast<double>(remaining0));
      t.series.events1.push_back(static_cast<double>(d1));
      t.series.events0.push_back(static_cast<double>(d0));
      t.events += d1 + d0;
      const int k = static_cast<int>(t.series.time.size()) - 1;
      for (std::size_t c = a; c < b; ++c) {
        if (data.event[t.rows[c]]) t.event_k[c] = k;
      }
    }
    const int lk = static_cast<int>(t.series.time.size()) - 1;
    for (std::size_t c = a; c < b; ++c) {
      t.last_k[c] = lk;
      (data.arm[t.rows[c]] ? remaining1 : remaining0) -= 1;
    }
    a = b;
  }
  return t;
}

kernels::ScoreSums table_sums(const RiskSetSeries& s, double r) {
  return kernels::score_sums(s.atrisk1.data(), s.atrisk0.data(),
                             s.events1.data(), s.events0.data(), s.size(), r);
}

// Per-subject outcomes for one stratum at relative risk r, written into the
// full-length value vector. Each subject's value is its event weight (when
// its event time is in the series) minus the accumulated compensator
// increments over series times it was at risk for.
void accumulate_outcomes(const TrialData& data, const StratumTable& t,
                         double r, std::vector<double>& value) {
  const RiskSetSeries& s = t.series;
  const std::size_t K = s.size();
  if (K == 0) return;  // no events in this stratum: values stay zero
  std::vector<double> w1(K), w0(K), c1(K), c0(K);
  kernels::outcome_tables(s.atrisk1.data(), s.atrisk0.data(),
                          s.events1.data(), s.events0.data(), K, r, w1.data(),
                          w0.data(), c1.data(), c0.data());
  for (std::size_t k = 1; k < K; ++k) {
    c1[k] += c1[k - 1];
    c0[k] += c0[k - 1];
  }
  for (std::size_t idx = 0; idx < t.rows.size(); ++idx) {
    const int i = t.rows[idx];
    const std::vector<double>& w = data.arm[i] ? w1 : w0;
    const std::vector<double>& pc = data.arm[i] ? c1 : c0;
    double v = 0.0;
    if (t.event_k[idx] >= 0) v = w[t.event_k[idx]];
    if (t.last_k[idx] >= 0) v -= pc[t.last_k[idx]];
    value[i] = v;
  }
}

double signed_mean(const TrialData& data, const std::vector<double>& value) {
  double acc = 0.0;
  for (int i : data.canonical_order()) {
    acc += data.arm[i] ? value[i] : -value[i];
  }
  return acc / data.n();
}

DerivedOutcomes outcomes_impl(const TrialData& data, double theta,
                              bool stratified) {
  data.validate();
  DerivedOutcomes out;
  out.value.assign(data.n(), 0.0);
  const double r = std::exp(theta);
  long events = 0;
  if (stratified) {
    for (int z : data.strata()) {
      StratumTable t = build_table(data, z);
      events += t.events;
      accumulate_outcomes(data, t, r, out.value);
    }
  } else {
    StratumTable t = build_table(data, {});
    events = t.events;
    accumulate_outcomes(data, t, r, out.value);
  }
  if (events == 0) fail(ErrorCode::NoEvents, "no observed events");
  out.mean_contrast = signed_mean(data, out.value);
  return out;
}

LogrankComponents components_impl(const TrialData& data, bool stratified) {
  data.validate();
  LogrankComponents c;
  c.n = data.n();
  double u = 0.0, v = 0.0;
  if (stratified) {
    for (int z : data.strata()) {
      StratumTable t = build_table(data, z);
      c.events += t.events;
      const auto s = table_sums(t.series, 1.0);
      u += s.u;
      v += s.v;
    }
  } else {
    StratumTable t = build_table(data, {});
    c.events = t.events;
    const auto s = table_sums(t.series, 1.0);
    u = s.u;
    v = s.v;
  }
  if (c.events == 0) fail(ErrorCode::NoEvents, "no observed events");
  c.u = u / c.n;
  c.sigma2 = v / c.n;
  return c;
}

}  // namespace

RiskSetSeries build_risk_sets(const TrialData& data,
                              std::optional<int> stratum) {
  data.validate();
  return build_table(data, stratum).series;
}

LogrankComponents logrank_components(const TrialData& data) {
  return components_impl(data, false);
}

LogrankComponents stratified_logrank_components(const TrialData& data) {
  return components_impl(data, true);
}

DerivedOutcomes derived_outcomes(const TrialData& data) {
  return outcomes_impl(data, 0.0, false);
}

DerivedOutcomes derived_outcomes_at(const TrialData& data, double theta) {
  return outcomes_impl(data, theta, false);
}

DerivedOutcomes stratified_derived_outcomes(const TrialData& data) {
  return outcomes_impl(data, 0.0, true);
}

DerivedOutcomes stratified_derived_outcomes_at(const TrialData& data,
                                               double theta) {
  return outcomes_impl(data, theta, true);
}

TestResult make_test_result(const std::string& method, double u, double sigma2,
                            int n) {
  if (!(sigma2 > 0.0)) {
    fail(ErrorCode::ZeroVariance, method + " variance estimate is zero");
  }
  TestResult r;
  r.method = method;
  r.n = n;
  r.numerator = std::sqrt(static_cast<double>(n)) * u;
  r.se = std::sqrt(sigma2);
  r.statistic = r.numerator / r.se;
  r.p_value = two_sided_p(r.statistic);
  return r;
}

TestResult logrank_test(const TrialData& data) {
  const auto c = logrank_components(data);
  return make_test_result("T_L", c.u, c.sigma2, c.n);
}

TestResult stratified_logrank_test(const TrialData& data) {
  const auto c = stratified_logrank_components(data);
  return make_test_result("T_SL", c.u, c.sigma2, c.n);
}

}  // namespace calr
