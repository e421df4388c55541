#include <cmath>
#include <numbers>

#include "doctest.h"
#include "support.hpp"
#include "ttsa/error.hpp"
#include "ttsa/schedule.hpp"

using namespace ttsa;

namespace {

// Direct evaluation of the two transient conditions, no shared code.
bool transient_ok(double a0, std::int64_t tau, std::int64_t k) {
  auto alpha = [&](std::int64_t t) {
    return a0 / std::pow(double(std::max<std::int64_t>(t, 0) + 1), 2.0 / 3.0);
  };
  double w = 0.0;
  for (std::int64_t t = k - tau; t <= k; ++t) w += alpha(t);
  return w <= std::log(2.0) && tau * alpha(k - tau) <= std::log(2.0);
}

std::uint64_t linear_scan(double a0, std::int64_t tau) {
  for (std::int64_t k = 0;; ++k) {
    bool all = true;
    for (std::int64_t j = k; j <= 4 * k + 200 && all; ++j) all = transient_ok(a0, tau, j);
    if (all) return static_cast<std::uint64_t>(k);
  }
}

SpectralSummary p1_spec() {
  return spectral_summary(test::p1(), SampleTable::noiseless(test::p1()));
}

}  // namespace

TEST_SUITE("schedule") {

TEST_CASE("step values") {
  const auto f = StepFamily::polynomial(0.5, 2.0 / 3.0);
  CHECK(f.at(0) == 0.5);
  CHECK(f.at(7) == doctest::Approx(0.125).epsilon(1e-15));
  CHECK(f.at(-3) == f.at(0));
  CHECK(StepFamily::constant(0.3).at(1000) == 0.3);
  const auto s = test::p1_schedule();
  CHECK(s.at(9).second == doctest::Approx(0.35));
}

TEST_CASE("steps and their ratio are nonincreasing") {
  const auto s = test::p1_schedule();
  for (std::int64_t k = 0; k < 10000; ++k) {
    const auto [a, b] = s.at(k);
    const auto [a1, b1] = s.at(k + 1);
    CHECK(a1 <= a);
    CHECK(b1 <= b);
    CHECK(b1 / a1 <= b / a * (1 + 1e-15));
  }
  for (std::int64_t k = 1; k < 1'000'000'000; k *= 3) {
    CHECK(s.alpha.at(k + 1) <= s.alpha.at(k));
    CHECK(s.beta.at(k + 1) <= s.beta.at(k));
  }
}

TEST_CASE("certification") {
  const auto spec = p1_spec();
  const auto ok = validate_schedule(test::p1_schedule(), spec);
  CHECK(ok.status == Certification::Certified);
  CHECK(ok.reasons.empty());
  CHECK(test::p1_schedule().is_rate_optimal());

  StepSchedule half{StepFamily::polynomial(1.0, 0.5), StepFamily::polynomial(1.0, 0.5)};
  const auto r = validate_schedule(half, spec);
  CHECK(r.status == Certification::Invalid);
  bool names_ratio_series = false;
  for (const auto& m : r.reasons) names_ratio_series |= m.find("beta_k^2/alpha_k") != std::string::npos;
  CHECK(names_ratio_series);

  StepSchedule cb{StepFamily::polynomial(8.2, 2.0 / 3.0), StepFamily::constant(0.01)};
  CHECK(validate_schedule(cb, spec).status == Certification::Invalid);

  // Summable exponents, but beta0 < 1/rho.
  StepSchedule h{StepFamily::polynomial(8.2, 0.6), StepFamily::polynomial(1.0, 0.9)};
  const auto hr = validate_schedule(h, spec);
  CHECK(hr.status == Certification::Heuristic);
  CHECK_FALSE(hr.reasons.empty());

  // Ratio cap gamma/(2 rho) = 0.431: alpha0 = 8.0 gives 0.4375.
  CHECK(validate_schedule(StepSchedule::rate_optimal(8.0, 3.5), spec).status ==
        Certification::Heuristic);

  // Deterministic.
  CHECK(validate_schedule(h, spec).reasons == hr.reasons);
}

TEST_CASE("transient index") {
  SUBCASE("tau = 0 gives K* = 0") {
    const TransientIndex t = k_star(StepSchedule::rate_optimal(0.1, 0.1),
                                    [](double) -> std::uint64_t { return 0; });
    CHECK(t.k_star == 0);
  }
  SUBCASE("tau = 12, alpha0 = 0.1 matches the linear scan") {
    const auto s = StepSchedule::rate_optimal(0.1, 0.1);
    const TransientIndex t = k_star(s, [](double) -> std::uint64_t { return 12; });
    CHECK(t.k_star == linear_scan(0.1, 12));
    CHECK(t.k_star == 14);
    CHECK(t.lagged_product <= std::log(2.0));
    CHECK(t.prev_lagged_product > std::log(2.0));
  }
  SUBCASE("other constant tau values agree with the scan") {
    for (double a0 : {0.05, 0.1, 0.3, 1.0})
      for (std::int64_t tau : {1, 3, 7, 20}) {
        const auto s = StepSchedule::rate_optimal(a0, a0);
        const auto t = k_star(s, [tau](double) { return std::uint64_t(tau); });
        CHECK(t.k_star == linear_scan(a0, tau));
      }
  }
  SUBCASE("P1 schedule on the 0.7 chain") {
    const auto chain = test::two_state();
    const MixingProfile mix(chain, make_spread_table(test::p1(), chain, 0.1));
    const auto s = test::p1_schedule();
    const TransientIndex t = k_star(s, mix);
    const double cap = std::log(2.0);
    CHECK(t.k_star > 0);
    CHECK(t.window_sum <= cap);
    CHECK(t.lagged_product <= cap);
    CHECK((t.prev_window_sum > cap || t.prev_lagged_product > cap));
    const auto [w10, l10] = transient_quantities(s, mix, t.k_star + 10);
    CHECK(w10 <= cap);
    CHECK(l10 <= cap);
  }
  SUBCASE("constant steps that never qualify") {
    StepSchedule c{StepFamily::constant(1.0), StepFamily::constant(1.0)};
    CHECK_THROWS_AS(k_star(c, [](double) -> std::uint64_t { return 5; }), Error);
  }
}

TEST_CASE("series constant") {
  SUBCASE("beta^2 component against the Basel sum") {
    const auto s = StepSchedule::rate_optimal(1.0, 1.0);
    const std::uint64_t h = 1'000'000;
    const C0Estimate e = c0_estimate(s, [](double) -> std::uint64_t { return 0; }, h);
    const double gap = std::numbers::pi * std::numbers::pi / 6.0 - e.components[1];
    CHECK(gap >= 1.0 / double(h + 2) * (1 - 1e-9));
    CHECK(gap <= 1.0 / double(h + 1) * (1 + 1e-9));
    CHECK(e.total >= e.partial);
  }
  SUBCASE("degenerate and divergent schedules") {
    auto zero_tau = [](double) -> std::uint64_t { return 0; };
    try {
      c0_estimate(StepSchedule::rate_optimal(0.0, 0.0), zero_tau, 1000);
      FAIL("expected InvalidArgument");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::InvalidArgument);
    }
    StepSchedule half{StepFamily::polynomial(1.0, 0.5), StepFamily::polynomial(1.0, 0.5)};
    try {
      c0_estimate(half, zero_tau, 1000);
      FAIL("expected Diverges");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::Diverges);
    }
  }
  SUBCASE("P1 estimate is stable in the horizon") {
    const auto chain = test::two_state();
    const MixingProfile mix(chain, make_spread_table(test::p1(), chain, 0.1));
    const double a = c0_estimate(test::p1_schedule(), mix, 1'000'000).total;
    const double b = c0_estimate(test::p1_schedule(), mix, 10'000'000).total;
    CHECK(std::isfinite(a));
    CHECK(std::abs(a - b) / b <= 5e-4);
  }
}

}  // TEST_SUITE
