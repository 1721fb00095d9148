#pragma once

namespace calr {

// Standard normal CDF, computed through erfc for accurate tails.
double normal_cdf(double z);

// Standard normal quantile, AS 241 rational approximation (double precision
// branch). Requires 0 < p < 1.
double normal_quantile(double p);

// Two-sided p-value for a standard normal statistic.
double two_sided_p(double z);

}  // namespace calr
