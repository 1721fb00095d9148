#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include <doctest.h>

#include "calr/error.hpp"
#include "calr/survival.hpp"
#include "oracles.hpp"

using namespace calr;

namespace {

TrialData two_subject() {
  TrialData d;
  d.time = {1.0, 2.0};
  d.event = {1, 0};
  d.arm = {1, 0};
  d.stratum = {0, 0};
  d.p = 0;
  return d;
}

// Two tied events at t = 1, one per arm, two later censorings.
TrialData tied_four() {
  TrialData d;
  d.time = {1.0, 1.0, 2.0, 2.0};
  d.event = {1, 1, 0, 0};
  d.arm = {1, 0, 1, 0};
  d.stratum = {0, 0, 0, 0};
  d.p = 0;
  return d;
}

TrialData swap_arms(const TrialData& d) {
  TrialData out = d;
  for (auto& a : out.arm) a = static_cast<std::uint8_t>(1 - a);
  return out;
}

TrialData permute(const TrialData& d, std::mt19937& gen,
                  std::vector<int>* perm_out) {
  std::vector<int> perm(d.n());
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), gen);
  TrialData out;
  out.p = d.p;
  for (int i : perm) {
    out.time.push_back(d.time[i]);
    out.event.push_back(d.event[i]);
    out.arm.push_back(d.arm[i]);
    out.stratum.push_back(d.stratum[i]);
    for (int j = 0; j < d.p; ++j) out.x.push_back(d.xat(i, j));
  }
  if (perm_out) *perm_out = perm;
  return out;
}

double signed_mean(const TrialData& d, const DerivedOutcomes& o) {
  double total = 0.0;
  for (int i = 0; i < d.n(); ++i) {
    total += d.arm[i] ? o.value[i] : -o.value[i];
  }
  return total / d.n();
}

}  // namespace

TEST_SUITE("survival") {

TEST_CASE("risk sets of the two subject fixture") {
  const RiskSetSeries s = build_risk_sets(two_subject());
  REQUIRE(s.size() == 1);
  CHECK(s.time[0] == 1.0);
  CHECK(s.atrisk1[0] == 1.0);
  CHECK(s.atrisk0[0] == 1.0);
  CHECK(s.events1[0] == 1.0);
  CHECK(s.events0[0] == 0.0);
}

TEST_CASE("risk sets keep a subject censored exactly at an event time") {
  TrialData d = two_subject();
  d.time = {1.0, 1.0};  // censored at the event time, still at risk there
  const RiskSetSeries s = build_risk_sets(d);
  REQUIRE(s.size() == 1);
  CHECK(s.atrisk0[0] == 1.0);
}

TEST_CASE("all censored data produce an empty series and NoEvents") {
  TrialData d = two_subject();
  d.event = {0, 0};
  CHECK(build_risk_sets(d).size() == 0);
  CHECK_THROWS_AS(logrank_components(d), Error);
  CHECK_THROWS_AS(derived_outcomes(d), Error);
  try {
    stratified_logrank_components(d);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NoEvents);
  }
}

TEST_CASE("risk set filter on an absent stratum reports EmptyData") {
  try {
    build_risk_sets(two_subject(), 5);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::EmptyData);
  }
}

TEST_CASE("tied events share one risk-set entry") {
  const RiskSetSeries s = build_risk_sets(tied_four());
  REQUIRE(s.size() == 1);
  CHECK(s.time[0] == 1.0);
  CHECK(s.atrisk1[0] == 2.0);
  CHECK(s.atrisk0[0] == 2.0);
  CHECK(s.events1[0] == 1.0);
  CHECK(s.events0[0] == 1.0);

  const LogrankComponents c = logrank_components(tied_four());
  CHECK(c.u == 0.0);          // 1 - 2*2/4 exactly
  CHECK(c.sigma2 == 0.125);   // (1/4) * 2*2*2/16

  // Hand evaluation with r = 1: event weight 0.5, compensator 0.25 per arm.
  const DerivedOutcomes o = derived_outcomes(tied_four());
  CHECK(o.value[0] == 0.25);
  CHECK(o.value[1] == 0.25);
  CHECK(o.value[2] == -0.25);
  CHECK(o.value[3] == -0.25);
  CHECK(o.mean_contrast == 0.0);
}

TEST_CASE("two subject fixture components and test") {
  const LogrankComponents c = logrank_components(two_subject());
  CHECK(c.u == 0.25);
  CHECK(c.sigma2 == 0.125);
  CHECK(c.n == 2);
  CHECK(c.events == 1);

  const TestResult t = logrank_test(two_subject());
  CHECK(t.statistic == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(t.numerator == doctest::Approx(std::sqrt(2.0) * 0.25).epsilon(1e-15));
  CHECK(t.se == doctest::Approx(std::sqrt(0.125)).epsilon(1e-15));
  CHECK(t.p_value == doctest::Approx(0.31731050786291415).epsilon(1e-12));
  CHECK(t.method == "T_L");
  CHECK(t.n == 2);
}

TEST_CASE("two subject fixture outcome transform") {
  const DerivedOutcomes o = derived_outcomes(two_subject());
  REQUIRE(o.value.size() == 2);
  CHECK(o.value[0] == 0.25);
  CHECK(o.value[1] == -0.25);
  CHECK(o.mean_contrast == 0.25);
}

TEST_CASE("single arm dataset degenerates to a typed error") {
  TrialData d = two_subject();
  d.arm = {1, 1};
  try {
    logrank_test(d);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ZeroVariance);
  }
}

TEST_CASE("matches the classical two-by-two table computation") {
  std::mt19937 gen(123);
  oracle::TrialKnobs knobs;
  knobs.n_min = 15;
  knobs.n_max = 30;
  knobs.max_strata = 1;
  knobs.tie_free = true;
  for (int rep = 0; rep < 50; ++rep) {
    const TrialData d = oracle::make_trial(gen, knobs);
    const auto ref = oracle::classical_logrank(d);
    const LogrankComponents c = logrank_components(d);
    CHECK(c.u * d.n() == doctest::Approx(ref.o_minus_e).epsilon(1e-10));
    CHECK(c.sigma2 * d.n() == doctest::Approx(ref.variance).epsilon(1e-10));
  }
}

TEST_CASE("signed outcome average reproduces the numerator") {
  std::mt19937 gen(456);
  oracle::TrialKnobs knobs;
  for (bool ties : {false, true}) {
    knobs.tie_free = !ties;
    for (int rep = 0; rep < 50; ++rep) {
      const TrialData d = oracle::make_trial(gen, knobs);
      const LogrankComponents c = logrank_components(d);
      const DerivedOutcomes o = derived_outcomes(d);
      CHECK(std::fabs(signed_mean(d, o) - c.u) < 1e-12);
      CHECK(std::fabs(o.mean_contrast - c.u) < 1e-12);

      const LogrankComponents cs = stratified_logrank_components(d);
      const DerivedOutcomes os = stratified_derived_outcomes(d);
      CHECK(std::fabs(signed_mean(d, os) - cs.u) < 1e-12);
      CHECK(std::fabs(os.mean_contrast - cs.u) < 1e-12);
    }
  }
}

TEST_CASE("two identical strata average to the single stratum values") {
  TrialData d;
  d.time = {1.0, 2.0, 1.0, 2.0};
  d.event = {1, 0, 1, 0};
  d.arm = {1, 0, 1, 0};
  d.stratum = {0, 0, 1, 1};
  d.p = 0;
  const LogrankComponents c = stratified_logrank_components(d);
  CHECK(c.u == 0.25);
  CHECK(c.sigma2 == 0.125);
}

TEST_CASE("one stratum collapses to the unstratified computation") {
  std::mt19937 gen(789);
  oracle::TrialKnobs knobs;
  knobs.max_strata = 1;
  knobs.tie_free = false;
  for (int rep = 0; rep < 25; ++rep) {
    const TrialData d = oracle::make_trial(gen, knobs);
    const LogrankComponents a = logrank_components(d);
    const LogrankComponents b = stratified_logrank_components(d);
    CHECK(a.u == b.u);
    CHECK(a.sigma2 == b.sigma2);
    const DerivedOutcomes oa = derived_outcomes(d);
    const DerivedOutcomes ob = stratified_derived_outcomes(d);
    for (int i = 0; i < d.n(); ++i) CHECK(oa.value[i] == ob.value[i]);
  }
}

TEST_CASE("a stratum without events contributes zero outcomes") {
  TrialData d;
  d.time = {1.0, 2.0, 3.0, 4.0};
  d.event = {1, 0, 0, 0};
  d.arm = {1, 0, 1, 0};
  d.stratum = {0, 0, 1, 1};
  d.p = 0;
  const DerivedOutcomes o = stratified_derived_outcomes(d);
  CHECK(o.value[2] == 0.0);
  CHECK(o.value[3] == 0.0);
  CHECK(o.value[0] != 0.0);
}

TEST_CASE("arm swap negates the numerator and keeps the variance") {
  std::mt19937 gen(321);
  oracle::TrialKnobs knobs;
  knobs.tie_free = false;
  for (int rep = 0; rep < 25; ++rep) {
    const TrialData d = oracle::make_trial(gen, knobs);
    const TrialData m = swap_arms(d);
    const LogrankComponents a = logrank_components(d);
    const LogrankComponents b = logrank_components(m);
    CHECK(b.u == doctest::Approx(-a.u).epsilon(1e-13));
    CHECK(b.sigma2 == doctest::Approx(a.sigma2).epsilon(1e-13));
    const LogrankComponents as = stratified_logrank_components(d);
    const LogrankComponents bs = stratified_logrank_components(m);
    CHECK(bs.u == doctest::Approx(-as.u).epsilon(1e-13));
    CHECK(bs.sigma2 == doctest::Approx(as.sigma2).epsilon(1e-13));

    if (a.sigma2 > 0.0) {
      const TestResult ta = logrank_test(d);
      const TestResult tb = logrank_test(m);
      CHECK(tb.statistic == doctest::Approx(-ta.statistic).epsilon(1e-12));
      CHECK(tb.p_value == doctest::Approx(ta.p_value).epsilon(1e-12));
    }
  }
}

TEST_CASE("subject order never changes any output bit") {
  std::mt19937 gen(555);
  oracle::TrialKnobs knobs;
  knobs.tie_free = false;  // ties plus identical records stress the ordering
  for (int rep = 0; rep < 25; ++rep) {
    const TrialData d = oracle::make_trial(gen, knobs);
    std::vector<int> perm;
    const TrialData shuffled = permute(d, gen, &perm);

    const LogrankComponents a = logrank_components(d);
    const LogrankComponents b = logrank_components(shuffled);
    CHECK(a.u == b.u);
    CHECK(a.sigma2 == b.sigma2);

    const LogrankComponents as = stratified_logrank_components(d);
    const LogrankComponents bs = stratified_logrank_components(shuffled);
    CHECK(as.u == bs.u);
    CHECK(as.sigma2 == bs.sigma2);

    const DerivedOutcomes oa = derived_outcomes(d);
    const DerivedOutcomes ob = derived_outcomes(shuffled);
    CHECK(oa.mean_contrast == ob.mean_contrast);
    for (std::size_t k = 0; k < perm.size(); ++k) {
      CHECK(ob.value[k] == oa.value[perm[k]]);
    }
  }
}

TEST_CASE("moving a censoring past the last event changes nothing") {
  std::mt19937 gen(808);
  oracle::TrialKnobs knobs;
  for (int rep = 0; rep < 25; ++rep) {
    TrialData d = oracle::make_trial(gen, knobs);
    double last_event = 0.0;
    for (int i = 0; i < d.n(); ++i) {
      if (d.event[i]) last_event = std::max(last_event, d.time[i]);
    }
    // Append a censored subject beyond the last event, then push it out
    // further; every event-time quantity must stay bit-identical.
    d.time.push_back(last_event + 1.0);
    d.event.push_back(0);
    d.arm.push_back(1);
    d.stratum.push_back(d.stratum[0]);
    for (int j = 0; j < d.p; ++j) d.x.push_back(0.25 * j);

    TrialData moved = d;
    moved.time.back() = last_event + 9.0;

    const LogrankComponents a = logrank_components(d);
    const LogrankComponents b = logrank_components(moved);
    CHECK(a.u == b.u);
    CHECK(a.sigma2 == b.sigma2);
    const DerivedOutcomes oa = derived_outcomes(d);
    const DerivedOutcomes ob = derived_outcomes(moved);
    for (int i = 0; i < d.n(); ++i) CHECK(oa.value[i] == ob.value[i]);
  }
}

TEST_CASE("test assembly rejects nonpositive variance") {
  CHECK_THROWS_AS(make_test_result("T_L", 0.1, 0.0, 10), Error);
  const TestResult t = make_test_result("T_L", -0.2, 0.04, 25);
  CHECK(t.numerator == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(t.se == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(t.statistic == doctest::Approx(-5.0).epsilon(1e-14));
}

TEST_CASE("validation rejects malformed columns") {
  TrialData d = two_subject();
  d.arm = {2, 0};
  CHECK_THROWS_AS(d.validate(), Error);
  d = two_subject();
  d.time = {-1.0, 2.0};
  CHECK_THROWS_AS(d.validate(), Error);
  d = two_subject();
  d.event = {1, 7};
  CHECK_THROWS_AS(d.validate(), Error);
  d = two_subject();
  d.stratum = {0, -1};
  CHECK_THROWS_AS(d.validate(), Error);
  d = TrialData{};
  CHECK_THROWS_AS(d.validate(), Error);
}

}  // TEST_SUITE
