#include <cmath>
#include <random>

#include <doctest.h>

#include "calr/stats.hpp"

using namespace calr;

TEST_SUITE("stats") {

TEST_CASE("normal cdf matches reference values") {
  CHECK(normal_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(normal_cdf(1.0) == doctest::Approx(0.8413447460685429).epsilon(1e-14));
  CHECK(normal_cdf(-1.0) == doctest::Approx(0.15865525393145705).epsilon(1e-14));
  CHECK(normal_cdf(1.959963984540054) == doctest::Approx(0.975).epsilon(1e-14));
  CHECK(normal_cdf(-8.0) == doctest::Approx(6.22096057427178e-16).epsilon(1e-10));
  CHECK(normal_cdf(38.0) == 1.0);
}

TEST_CASE("cdf is symmetric") {
  for (double z : {0.1, 0.7, 1.3, 2.9, 5.5}) {
    CHECK(normal_cdf(z) + normal_cdf(-z) == doctest::Approx(1.0).epsilon(1e-14));
  }
}

TEST_CASE("two sided p values") {
  CHECK(two_sided_p(0.0) == doctest::Approx(1.0));
  CHECK(two_sided_p(1.0) == doctest::Approx(0.31731050786291415).epsilon(1e-13));
  CHECK(two_sided_p(-1.0) == two_sided_p(1.0));
  CHECK(two_sided_p(1.959963984540054) == doctest::Approx(0.05).epsilon(1e-12));
  CHECK(two_sided_p(4.614821) == doctest::Approx(3.9382e-6).epsilon(1e-4));
  CHECK(two_sided_p(38.0) > 0.0);   // erfc reaches into the subnormals
  CHECK(two_sided_p(40.0) == 0.0);  // below the smallest subnormal
}

TEST_CASE("quantile matches reference values") {
  CHECK(normal_quantile(0.5) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(normal_quantile(0.975) ==
        doctest::Approx(1.959963984540054).epsilon(1e-14));
  CHECK(normal_quantile(0.025) ==
        doctest::Approx(-1.959963984540054).epsilon(1e-14));
  CHECK(normal_quantile(0.9995) ==
        doctest::Approx(3.2905267314918945).epsilon(1e-13));
  CHECK(normal_quantile(1e-12) == doctest::Approx(-7.034483825301131).epsilon(1e-12));
}

TEST_CASE("quantile inverts the cdf") {
  std::mt19937 gen(77);
  std::uniform_real_distribution<double> unit(1e-8, 1.0 - 1e-8);
  for (int k = 0; k < 2000; ++k) {
    const double p = unit(gen);
    CHECK(normal_cdf(normal_quantile(p)) == doctest::Approx(p).epsilon(1e-12));
  }
}

}  // TEST_SUITE
