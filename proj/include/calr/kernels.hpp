#pragma once

#include <cstddef>
#include <optional>

// Hot inner loops over the event-time table, provided as a scalar reference
// implementation and an AVX2 variant selected at runtime. Both variants
// evaluate the same arithmetic per element; only the order of summation in
// the reductions differs between them.
namespace calr::kernels {

enum class Isa { scalar, avx2 };

const char* isa_name(Isa isa);

// Instruction set used by the dispatch wrappers. Auto-detected once; tests
// may pin a specific path with force_isa (nullopt restores detection).
Isa active_isa();
void force_isa(std::optional<Isa> isa);
bool avx2_available();

// Sums over event times k with relative risk r = exp(theta),
// s_k = r * y1_k + y0_k, d_k = d1_k + d0_k:
//   u = sum_k [ d1_k - d_k * r * y1_k / s_k ]
//   v = sum_k [ d_k * (r * y1_k / s_k) * (y0_k / s_k) ]
// At r = 1 these are the raw two-sample numerator and variance sums.
struct ScoreSums {
  double u = 0.0;
  double v = 0.0;
};

ScoreSums score_sums(const double* y1, const double* y0, const double* d1,
                     const double* d0, std::size_t k, double r);

// Per-event-time weight and compensator-increment tables for the per-subject
// outcome transform:
//   w1 = y0 / s,      c1 = w1 * r * d / s,
//   w0 = r * y1 / s,  c0 = w0 * d / s.
void outcome_tables(const double* y1, const double* y0, const double* d1,
                    const double* d0, std::size_t k, double r, double* w1,
                    double* w0, double* c1, double* c0);

namespace detail {
ScoreSums score_sums_scalar(const double* y1, const double* y0,
                            const double* d1, const double* d0, std::size_t k,
                            double r);
void outcome_tables_scalar(const double* y1, const double* y0,
                           const double* d1, const double* d0, std::size_t k,
                           double r, double* w1, double* w0, double* c1,
                           double* c0);
#if defined(CALR_HAVE_AVX2)
ScoreSums score_sums_avx2(const double* y1, const double* y0, const double* d1,
                          const double* d0, std::size_t k, double r);
void outcome_tables_avx2(const double* y1, const double* y0, const double* d1,
                         const double* d0, std::size_t k, double r, double* w1,
                         double* w0, double* c1, double* c0);
#endif
}  // namespace detail

}  // namespace calr::kernels
