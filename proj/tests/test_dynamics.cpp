#include <doctest.h>

#include <cmath>

#include "core/dynamics.hpp"
#include "core/errors.hpp"
#include "core/rng.hpp"
#include "oracles.hpp"

using namespace snspd;

namespace {

// step recovery with a pulse whose 1/e fall matches the blind interval, so
// the metric ordering holds with equality
RecoveryCurve step_curve(double dead_time_ns) {
  return RecoveryCurve(PulseShape{0.0, dead_time_ns},
                       EfficiencyRecovery{dead_time_ns, 0.0, dead_time_ns});
}

}  // namespace

TEST_CASE("tau2: pure exponential pulse decays to 1/e in its fall time") {
  RecoveryCurve curve(PulseShape{0.0, 33.0}, EfficiencyRecovery{25.0, 37.51, 97.0});
  const auto metrics = dead_time_metrics(curve);
  CHECK(std::abs(metrics.tau2_one_over_e_ns - 33.0) <= 0.01);
}

TEST_CASE("tau3: closed-form inversion of the saturating exponential") {
  RecoveryCurve curve(PulseShape{0.0, 33.0}, EfficiencyRecovery{25.0, 37.51, 97.0});
  const auto metrics = dead_time_metrics(curve);
  const double expected = 25.0 + 37.51 * std::log(2.0);
  CHECK(std::abs(metrics.tau3_minus3db_ns - expected) <= 0.02);
  CHECK(metrics.tau3_minus3db_ns == doctest::Approx(51.0).epsilon(2e-3));
}

TEST_CASE("tau1 is the blind interval by definition") {
  RecoveryCurve curve(PulseShape{0.0, 33.0}, EfficiencyRecovery{25.0, 37.51, 97.0});
  CHECK(dead_time_metrics(curve).tau1_min_separation_ns == 25.0);
}

TEST_CASE("canonical preset reproduces the 25/33/51/97 ns metrics") {
  const auto curve = RecoveryCurve::preset(kPresetDetectorFig3a);
  const auto metrics = dead_time_metrics(curve);
  CHECK(std::abs(metrics.tau1_min_separation_ns - 25.0) <= 0.05);
  CHECK(std::abs(metrics.tau2_one_over_e_ns - 33.0) <= 0.05);
  CHECK(std::abs(metrics.tau3_minus3db_ns - 51.0) <= 0.1);
  CHECK(std::abs(metrics.tau4_full_recovery_ns - 97.0) <= 1.0);
}

TEST_CASE("unknown preset rejected") {
  CHECK_THROWS_AS(RecoveryCurve::preset("detector-unknown"), ValidationError);
}

TEST_CASE("pulse constants from the electrical model") {
  const auto pulse = PulseShape::from_electrical(1650.0, 50.0, 500.0);
  CHECK(pulse.tau_fall_ns == doctest::Approx(33.0).epsilon(1e-12));
  CHECK(pulse.tau_rise_ns == doctest::Approx(3.0).epsilon(1e-12));
  CHECK_THROWS_AS(PulseShape::from_electrical(0.0, 50.0, 500.0), ValidationError);
}

TEST_CASE("metric extraction rejects out-of-order taxonomies") {
  // pulse decays much slower than the efficiency recovers: tau2 > tau3
  RecoveryCurve slow_pulse(PulseShape{0.0, 500.0}, EfficiencyRecovery{5.0, 2.0, 20.0});
  CHECK_THROWS_AS(dead_time_metrics(slow_pulse), ValidationError);
  // blind interval longer than the pulse decay: tau1 > tau2
  RecoveryCurve slow_blind(PulseShape{0.0, 5.0}, EfficiencyRecovery{50.0, 37.0, 200.0});
  CHECK_THROWS_AS(dead_time_metrics(slow_blind), ValidationError);
}

TEST_CASE("extracted metrics are ordered for every random curve that has them") {
  Rng rng(20250810u);
  int accepted = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const double t_blind = 50.0 * rng.uniform();
    const double tau_rise = rng.uniform() < 0.3 ? 0.0 : 2.0 * rng.uniform();
    const double tau_fall = tau_rise + 1.0 + 80.0 * rng.uniform();
    const double tau_eff = 0.5 + 60.0 * rng.uniform();
    const double t_full = t_blind + 200.0 * rng.uniform();
    RecoveryCurve curve(PulseShape{tau_rise, tau_fall},
                        EfficiencyRecovery{t_blind, tau_eff, t_full});
    try {
      const auto m = dead_time_metrics(curve);
      CHECK(m.tau1_min_separation_ns <= m.tau2_one_over_e_ns + 0.02);
      CHECK(m.tau2_one_over_e_ns <= m.tau3_minus3db_ns + 0.02);
      CHECK(m.tau3_minus3db_ns <= m.tau4_full_recovery_ns + 0.02);
      ++accepted;
    } catch (const ValidationError&) {
      // degenerate taxonomy, correctly refused
    }
  }
  CHECK(accepted > 50);
}

TEST_CASE("efficiency recovery shape: blind, saturating, capped") {
  const auto curve = RecoveryCurve::preset(kPresetDetectorFig3a);
  CHECK(curve.efficiency_relative(0.0) == 0.0);
  CHECK(curve.efficiency_relative(24.999) == 0.0);
  CHECK(curve.efficiency_relative(51.0) == doctest::Approx(0.5).epsilon(1e-4));
  CHECK(curve.efficiency_relative(97.0) == 1.0);
  CHECK(curve.efficiency_relative(1e6) == 1.0);
  // non-decreasing
  double prev = -1.0;
  for (double t = 0.0; t < 200.0; t += 0.25) {
    const double value = curve.efficiency_relative(t);
    CHECK(value >= prev);
    prev = value;
  }
}

TEST_CASE("rate efficiency: zero flux returns eta_max") {
  const auto curve = RecoveryCurve::preset(kPresetDetectorFig3a);
  CHECK(rate_dependent_efficiency_analytic(curve, 0.0, 0.995) == 0.995);
  CHECK(std::abs(rate_dependent_efficiency_analytic(curve, 1e-6, 0.995) - 0.995) < 1e-9);
}

TEST_CASE("rate efficiency: step recovery matches the non-paralyzable formula") {
  for (double dead : {10.0, 25.0, 60.0}) {
    const auto curve = step_curve(dead);
    for (double eta : {0.3, 0.9, 0.995}) {
      for (double flux : {1e4, 1e5, 1e6, 1e7, 1e8}) {
        const double got = rate_dependent_efficiency_analytic(curve, flux, eta);
        const double want = oracles::nonparalyzable_efficiency(eta, flux, dead);
        CHECK(std::abs(got - want) <= 1e-8 * want);
      }
    }
  }
}

TEST_CASE("rate efficiency: droop direction matches the measured flux pair") {
  const auto curve = RecoveryCurve::preset(kPresetDetectorFig3a);
  const double high = rate_dependent_efficiency_analytic(curve, 6.79e5, 0.995);
  const double low = rate_dependent_efficiency_analytic(curve, 2.716e5, 0.995);
  CHECK(high < low);
  // order of magnitude of the droop: a few percent at the high flux,
  // percent-level at the low one, and negligible once the flux is tiny
  CHECK(high > 0.94);
  CHECK(high < 0.97);
  CHECK(low > 0.97);
  CHECK(std::abs(rate_dependent_efficiency_analytic(curve, 1e4, 0.995) - 0.995) < 0.005);
}

TEST_CASE("rate efficiency: non-increasing in flux") {
  const auto curve = RecoveryCurve::preset(kPresetDetectorFig3a);
  double prev = 1.0;
  for (double exponent = 2.0; exponent <= 8.0; exponent += 0.25) {
    const double eff = rate_dependent_efficiency_analytic(curve, std::pow(10.0, exponent),
                                                          0.995);
    CHECK(eff <= prev + 1e-12);
    prev = eff;
  }
}

TEST_CASE("pulsed efficiency: period beyond full recovery returns eta_max") {
  const auto curve = RecoveryCurve::preset(kPresetDetectorFig3a);
  CHECK(pulsed_source_efficiency(curve, 97.0, 0.995) == doctest::Approx(0.995));
  CHECK(pulsed_source_efficiency(curve, 500.0, 0.995) == doctest::Approx(0.995));
}

TEST_CASE("pulsed efficiency: period at tau3 halves the efficiency") {
  const auto curve = RecoveryCurve::preset(kPresetDetectorFig3a);
  const auto metrics = dead_time_metrics(curve);
  const double eff = pulsed_source_efficiency(curve, metrics.tau3_minus3db_ns, 0.995);
  CHECK(eff == doctest::Approx(0.5 * 0.995).epsilon(1e-3));
}

TEST_CASE("pulsed efficiency: period inside the blind interval is zero") {
  const auto curve = RecoveryCurve::preset(kPresetDetectorFig3a);
  CHECK(pulsed_source_efficiency(curve, 10.0, 0.995) == 0.0);
  CHECK(pulsed_source_efficiency(curve, 24.9, 0.995) == 0.0);
}

TEST_CASE("rate efficiency input validation") {
  const auto curve = RecoveryCurve::preset(kPresetDetectorFig3a);
  CHECK_THROWS_AS(rate_dependent_efficiency_analytic(curve, -1.0, 0.9), ValidationError);
  CHECK_THROWS_AS(rate_dependent_efficiency_analytic(curve, 1e5, 1.5), ValidationError);
  CHECK_THROWS_AS(pulsed_source_efficiency(curve, 0.0, 0.9), ValidationError);
}
