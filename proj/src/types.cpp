#include "calr/types.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <string>

#include "calr/error.hpp"

namespace calr {

std::vector<int> TrialData::strata() const {
  std::set<int> labels(stratum.begin(), stratum.end());
  return {labels.begin(), labels.end()};
}

void TrialData::validate() const {
  const std::size_t m = time.size();
  if (m < 2) fail(ErrorCode::EmptyData, "need at least 2 subjects");
  if (event.size() != m || arm.size() != m || stratum.size() != m) {
    fail(ErrorCode::InvalidConfig, "column lengths differ");
  }
  if (p < 0 || x.size() != m * static_cast<std::size_t>(p)) {
    fail(ErrorCode::InvalidConfig, "covariate matrix is not n by p");
  }
  for (std::size_t i = 0; i < m; ++i) {
    if (!std::isfinite(time[i]) || time[i] < 0.0) {
      fail(ErrorCode::NegativeTime,
           "subject " + std::to_string(i) + " has invalid time");
    }
    if (arm[i] > 1) {
      fail(ErrorCode::BadArmValue,
           "subject " + std::to_string(i) + " has arm outside {0,1}");
    }
    if (event[i] > 1) {
      fail(ErrorCode::BadEventValue,
           "subject " + std::to_string(i) + " has event outside {0,1}");
    }
    if (stratum[i] < 0) {
      fail(ErrorCode::BadStratumValue,
           "subject " + std::to_string(i) + " has negative stratum");
    }
  }
  for (double v : x) {
    if (!std::isfinite(v)) {
      fail(ErrorCode::NonNumeric, "covariate matrix has non-finite entries");
    }
  }
}

const std::vector<int>& TrialData::canonical_order() const {
  if (order_.size() == time.size()) return order_;
  order_.resize(time.size());
  std::iota(order_.begin(), order_.end(), 0);
  std::sort(order_.begin(), order_.end(), [this](int a, int b) {
    if (time[a] != time[b]) return time[a] < time[b];
    if (event[a] != event[b]) return event[a] > event[b];
    if (arm[a] != arm[b]) return arm[a] < arm[b];
    if (stratum[a] != stratum[b]) return stratum[a] < stratum[b];
    for (int j = 0; j < p; ++j) {
      const double xa = xat(a, j), xb = xat(b, j);
      if (xa != xb) return xa < xb;
    }
    return a < b;
  });
  return order_;
}

}  // namespace calr
