#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace calr {

// One trial dataset, column oriented. arm is 1 for treatment and 0 for
// control, event is 1 when the follow-up time is an observed event and 0 when
// it is right-censored. stratum holds small nonnegative labels (all zero for
// an unstratified trial). Covariates are stored row-major, n by p.
struct TrialData {
  std::vector<double> time;
  std::vector<std::uint8_t> event;
  std::vector<std::uint8_t> arm;
  std::vector<int> stratum;
  std::vector<double> x;
  int p = 0;

  int n() const { return static_cast<int>(time.size()); }
  double xat(int i, int j) const {
    return x[static_cast<std::size_t>(i) * p + j];
  }

  // Sorted distinct stratum labels.
  std::vector<int> strata() const;

  // Throws Error on malformed contents (size mismatches, arm or event values
  // outside {0,1}, negative or non-finite times, negative stratum labels).
  void validate() const;

  // Subject indices sorted by the full record (time, event, arm, stratum,
  // covariate row, original index). Every reduction over subjects walks this
  // order so that outputs do not depend on input row order. Built on first
  // use and cached; instances are not meant to be shared across threads.
  const std::vector<int>& canonical_order() const;

 private:
  mutable std::vector<int> order_;
};

// Result of one two-sided normal test. numerator is sqrt(n) times the scaled
// statistic numerator, se the corresponding standard error estimate, so
// statistic == numerator / se and p_value == 2 * (1 - Phi(|statistic|)).
struct TestResult {
  std::string method;
  double numerator = 0.0;
  double se = 0.0;
  double statistic = 0.0;
  double p_value = 1.0;
  int n = 0;
};

}  // namespace calr
