#pragma once

#include <optional>
#include <string>

#include "calr/types.hpp"

namespace calr {

// Risk-set table over the distinct event times of one stratum (or of the
// whole sample). One entry per distinct time with at least one event; counts
// are integer-valued doubles. atrisk covers subjects with follow-up time
// greater than or equal to the entry time, so subjects censored at an event
// time are still at risk there, and tied events share one entry.
struct RiskSetSeries {
  std::vector<double> time;
  std::vector<double> atrisk1;
  std::vector<double> atrisk0;
  std::vector<double> events1;
  std::vector<double> events0;
  std::size_t size() const { return time.size(); }
};

// Scaled numerator u and variance estimate sigma2 of the two-sample
// comparison; both carry the 1/n factor.
struct LogrankComponents {
  double u = 0.0;
  double sigma2 = 0.0;
  int n = 0;
  long events = 0;
};

// Per-subject outcome transform values aligned with the subject order of the
// input data; value[i] is the outcome for subject i's own arm.
// mean_contrast = (1/n) * sum_i { arm_i * value_i - (1 - arm_i) * value_i }.
struct DerivedOutcomes {
  std::vector<double> value;
  double mean_contrast = 0.0;
};

// Builds the risk-set series for the whole sample or one stratum.
// Throws EmptyData when the filter selects no subjects.
RiskSetSeries build_risk_sets(const TrialData& data,
                              std::optional<int> stratum = {});

// Throws NoEvents when the data contain no events at all.
LogrankComponents logrank_components(const TrialData& data);
LogrankComponents stratified_logrank_components(const TrialData& data);

// Outcome transform at the null (relative risk 1) and at an arbitrary log
// relative risk theta. Throws NoEvents when the data contain no events at
// all; in the stratified variants a stratum without events contributes
// zeros for its subjects.
DerivedOutcomes derived_outcomes(const TrialData& data);
DerivedOutcomes derived_outcomes_at(const TrialData& data, double theta);
DerivedOutcomes stratified_derived_outcomes(const TrialData& data);
DerivedOutcomes stratified_derived_outcomes_at(const TrialData& data,
                                               double theta);

// Assembles a TestResult from the scaled numerator and variance estimate;
// throws ZeroVariance unless sigma2 > 0.
TestResult make_test_result(const std::string& method, double u, double sigma2,
                            int n);

// Two-sided tests. Throw NoEvents / ZeroVariance on degenerate input.
TestResult logrank_test(const TrialData& data);
TestResult stratified_logrank_test(const TrialData& data);

}  // namespace calr
