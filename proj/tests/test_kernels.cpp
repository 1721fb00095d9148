#include <cmath>
#include <random>
#include <vector>

#include <doctest.h>

#include "calr/kernels.hpp"

using namespace calr;

namespace {

struct Table {
  std::vector<double> y1, y0, d1, d0;
  std::size_t size() const { return y1.size(); }
};

Table random_table(std::mt19937& gen, std::size_t k) {
  std::uniform_int_distribution<int> risk(1, 400);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Table t;
  for (std::size_t i = 0; i < k; ++i) {
    const int a1 = risk(gen);
    const int a0 = risk(gen);
    t.y1.push_back(a1);
    t.y0.push_back(a0);
    t.d1.push_back(static_cast<int>(unit(gen) * a1));
    t.d0.push_back(static_cast<int>(unit(gen) * a0));
  }
  return t;
}

}  // namespace

TEST_SUITE("kernels") {

TEST_CASE("scalar sums match a direct evaluation") {
  Table t;
  t.y1 = {1.0};
  t.y0 = {1.0};
  t.d1 = {1.0};
  t.d0 = {0.0};
  const auto s = kernels::detail::score_sums_scalar(
      t.y1.data(), t.y0.data(), t.d1.data(), t.d0.data(), 1, 1.0);
  CHECK(s.u == 0.5);
  CHECK(s.v == 0.25);

  const auto s2 = kernels::detail::score_sums_scalar(
      t.y1.data(), t.y0.data(), t.d1.data(), t.d0.data(), 1, 2.0);
  CHECK(s2.u == doctest::Approx(1.0 - 2.0 / 3.0).epsilon(1e-15));
  CHECK(s2.v == doctest::Approx((2.0 / 3.0) * (1.0 / 3.0)).epsilon(1e-15));
}

TEST_CASE("dispatch honours force_isa and reports a valid choice") {
  const kernels::Isa detected = kernels::active_isa();
  CHECK((detected == kernels::Isa::scalar || detected == kernels::Isa::avx2));
  if (detected == kernels::Isa::avx2) CHECK(kernels::avx2_available());

  kernels::force_isa(kernels::Isa::scalar);
  CHECK(kernels::active_isa() == kernels::Isa::scalar);
  kernels::force_isa(std::nullopt);
  CHECK(kernels::active_isa() == detected);

  CHECK(std::string(kernels::isa_name(kernels::Isa::scalar)) == "scalar");
  CHECK(std::string(kernels::isa_name(kernels::Isa::avx2)) == "avx2");
}

TEST_CASE("simd and scalar agree" *
          doctest::skip(!kernels::avx2_available())) {
  std::mt19937 gen(20240815);
  for (std::size_t k : {std::size_t{1}, std::size_t{3}, std::size_t{4},
                        std::size_t{5}, std::size_t{8}, std::size_t{13},
                        std::size_t{64}, std::size_t{257}}) {
    const Table t = random_table(gen, k);
    for (double r : {1.0, 0.25, std::exp(0.7), std::exp(-2.0)}) {
      const auto a = kernels::detail::score_sums_scalar(
          t.y1.data(), t.y0.data(), t.d1.data(), t.d0.data(), k, r);
#if defined(CALR_HAVE_AVX2)
      const auto b = kernels::detail::score_sums_avx2(
          t.y1.data(), t.y0.data(), t.d1.data(), t.d0.data(), k, r);
#else
      const auto b = a;
#endif
      // Reductions may reassociate across lanes: tolerance, not identity.
      CHECK(b.u == doctest::Approx(a.u).epsilon(1e-13));
      CHECK(b.v == doctest::Approx(a.v).epsilon(1e-13));

      std::vector<double> w1a(k), w0a(k), c1a(k), c0a(k);
      std::vector<double> w1b(k), w0b(k), c1b(k), c0b(k);
      kernels::detail::outcome_tables_scalar(t.y1.data(), t.y0.data(),
                                             t.d1.data(), t.d0.data(), k, r,
                                             w1a.data(), w0a.data(),
                                             c1a.data(), c0a.data());
#if defined(CALR_HAVE_AVX2)
      kernels::detail::outcome_tables_avx2(t.y1.data(), t.y0.data(),
                                           t.d1.data(), t.d0.data(), k, r,
                                           w1b.data(), w0b.data(), c1b.data(),
                                           c0b.data());
#else
      w1b = w1a; w0b = w0a; c1b = c1a; c0b = c0a;
#endif
      // Elementwise tables carry no reduction, so the paths must agree
      // bit for bit; downstream per-subject outcomes stay ISA-independent.
      for (std::size_t i = 0; i < k; ++i) {
        CHECK(w1a[i] == w1b[i]);
        CHECK(w0a[i] == w0b[i]);
        CHECK(c1a[i] == c1b[i]);
        CHECK(c0a[i] == c0b[i]);
      }
    }
  }
}

TEST_CASE("wrappers follow the forced path") {
  std::mt19937 gen(7);
  const Table t = random_table(gen, 37);
  kernels::force_isa(kernels::Isa::scalar);
  const auto s = kernels::score_sums(t.y1.data(), t.y0.data(), t.d1.data(),
                                     t.d0.data(), t.size(), 1.0);
  const auto ref = kernels::detail::score_sums_scalar(
      t.y1.data(), t.y0.data(), t.d1.data(), t.d0.data(), t.size(), 1.0);
  CHECK(s.u == ref.u);
  CHECK(s.v == ref.v);
  kernels::force_isa(std::nullopt);
}

}  // TEST_SUITE
