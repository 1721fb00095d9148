#include "calr/kernels.hpp"

// Reference implementations. The arithmetic sequence per element is kept
// identical to the vector variants (and contraction is disabled on both
// translation units) so the elementwise kernel is bit-comparable across
// paths; the reductions differ only in summation order.
namespace calr::kernels::detail {

ScoreSums score_sums_scalar(const double* y1, const double* y0,
                            const double* d1, const double* d0, std::size_t k,
                            double r) {
  double u = 0.0, v = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const double ry1 = r * y1[i];
    const double s = ry1 + y0[i];
    const double d = d1[i] + d0[i];
    const double q = ry1 / s;
    u += d1[i] - d * q;
    v += d * q * (y0[i] / s);
  }
  return {u, v};
}

void outcome_tables_scalar(const double* y1, const double* y0,
                           const double* d1, const double* d0, std::size_t k,
                           double r, double* w1, double* w0, double* c1,
                           double* c0) {
  for (std::size_t i = 0; i < k; ++i) {
    const double ry1 = r * y1[i];
    const double s = ry1 + y0[i];
    const double d = d1[i] + d0[i];
    const double ds = d / s;
    w1[i] = y0[i] / s;
    w0[i] = ry1 / s;
    c1[i] = w1[i] * (r * ds);
    c0[i] = w0[i] * ds;
  }
}

}  // namespace calr::kernels::detail
