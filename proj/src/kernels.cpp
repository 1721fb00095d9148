#include "calr/kernels.hpp"

#include <atomic>

namespace calr::kernels {

namespace {

std::atomic<int> forced{-1};  // -1 auto, else Isa value

Isa detect() {
#if defined(CALR_HAVE_AVX2)
  if (__builtin_cpu_supports("avx2")) return Isa::avx2;
#endif
  return Isa::scalar;
}

}  // namespace

const char* isa_name(Isa isa) {
  return isa == Isa::avx2 ? "avx2" : "scalar";
}

bool avx2_available() {
#if defined(CALR_HAVE_AVX2)
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

Isa active_isa() {
  const int f = forced.load(std::memory_order_relaxed);
  if (f >= 0) return static_cast<Isa>(f);
  static const Isa detected = detect();
  return detected;
}

void force_isa(std::optional<Isa> isa) {
  forced.store(isa ? static_cast<int>(*isa) : -1, std::memory_order_relaxed);
}

ScoreSums score_sums(const double* y1, const double* y0, const double* d1,
                     const double* d0, std::size_t k, double r) {
#if defined(CALR_HAVE_AVX2)
  if (active_isa() == Isa::avx2) {
    return detail::score_sums_avx2(y1, y0, d1, d0, k, r);
  }
#endif
  return detail::score_sums_scalar(y1, y0, d1, d0, k, r);
}

void outcome_tables(const double* y1, const double* y0, const double* d1,
                    const double* d0, std::size_t k, double r, double* w1,
                    double* w0, double* c1, double* c0) {
#if defined(CALR_HAVE_AVX2)
  if (active_isa() == Isa::avx2) {
    detail::outcome_tables_avx2(y1, y0, d1, d0, k, r, w1, w0, c1, c0);
    return;
  }
#endif
  detail::outcome_tables_scalar(y1, y0, d1, d0, k, r, w1, w0, c1, c0);
}

}  // namespace calr::kernels
