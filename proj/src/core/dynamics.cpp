#include "core/dynamics.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "core/errors.hpp"

namespace snspd {

namespace {

constexpr double kBisectionTolNs = 0.01;
// slack for the ordering check: extracted metrics carry bisection error
constexpr double kOrderingSlackNs = 2.0 * kBisectionTolNs;

// First t with fn(t) >= threshold for a non-decreasing fn; bisection to
// kBisectionTolNs. Throws when the threshold is never reached.
template <typename Fn>
double first_crossing(Fn&& fn, double threshold, double search_hint_ns,
                      const char* what) {
  if (fn(0.0) >= threshold) return 0.0;
  double hi = std::max(search_hint_ns, 1.0);
  int expansions = 0;
  while (fn(hi) < threshold) {
    hi *= 2.0;
    if (++expansions > 200) {
      std::ostringstream msg;
      msg << what << ": threshold " << threshold << " never reached";
      throw NumericError(msg.str());
    }
  }
  double lo = 0.0;
  while (hi - lo > kBisectionTolNs) {
    const double mid = 0.5 * (lo + hi);
    if (fn(mid) >= threshold) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

DeadTimeMetrics extract_metrics(const PulseShape& pulse, const EfficiencyRecovery& eff,
                                double fraction) {
  DeadTimeMetrics m;
  m.tau1_min_separation_ns = eff.t_blind_ns;

  const double t_peak = pulse.peak_time_ns();
  const double target = pulse.amplitude(t_peak) / std::exp(1.0);
  // amplitude decreases monotonically past the peak
  const double cross = first_crossing(
      [&](double t) { return -pulse.amplitude(t_peak + t); }, -target,
      pulse.tau_fall_ns, "pulse 1/e decay");
  m.tau2_one_over_e_ns = cross;

  const double hint = std::isfinite(eff.t_full_ns)
                          ? eff.t_full_ns + 1.0
                          : eff.t_blind_ns + 10.0 * std::max(eff.tau_eff_ns, 1.0);
  m.tau3_minus3db_ns =
      first_crossing([&](double t) { return eff.relative(t); }, 0.5, hint,
                     "efficiency recovery (50%)");
  m.tau4_full_recovery_ns =
      first_crossing([&](double t) { return eff.relative(t); }, fraction, hint,
                     "efficiency recovery (full)");
  return m;
}

// Adaptive Simpson on [a, b]; panel budget guards against non-convergence.
struct SimpsonState {
  int panels_left;
};

template <typename Fn>
double adaptive_simpson(Fn&& fn, double a, double fa, double b, double fb, double fm,
                        double whole, double tol, SimpsonState& state, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = fn(lm);
  const double frm = fn(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth > 0 && std::abs(delta) <= 15.0 * tol) {
    return left + right + delta / 15.0;
  }
  if (--state.panels_left <= 0) {
    throw NumericError("rate efficiency: quadrature did not converge within 10000 panels");
  }
  if (depth > 48) return left + right;  // interval exhausted at double precision
  return adaptive_simpson(fn, a, fa, m, fm, flm, left, 0.5 * tol, state, depth + 1) +
         adaptive_simpson(fn, m, fm, b, fb, frm, right, 0.5 * tol, state, depth + 1);
}

template <typename Fn>
double integrate(Fn&& fn, double a, double b, double rel_tol, SimpsonState& state) {
  if (!(b > a)) return 0.0;
  // integrand is a survival function in [0, 1]; scale tolerance to the span
  const double tol = rel_tol * (b - a);
  // pre-split into uniform panels so narrow features cannot hide from the
  // first Simpson estimate
  const int panels = 64;
  const double h = (b - a) / panels;
  double total = 0.0;
  for (int i = 0; i < panels; ++i) {
    const double lo = a + i * h;
    const double hi = lo + h;
    const double mid = 0.5 * (lo + hi);
    const double flo = fn(lo);
    const double fhi = fn(hi);
    const double fmid = fn(mid);
    const double whole = (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi);
    total += adaptive_simpson(fn, lo, flo, hi, fhi, fmid, whole, tol / panels, state, 0);
  }
  return total;
}

}  // namespace

PulseShape PulseShape::from_electrical(double kinetic_inductance_nh,
                                       double load_resistance_ohm,
                                       double hotspot_resistance_ohm) {
  if (!(kinetic_inductance_nh > 0.0) || !(load_resistance_ohm > 0.0) ||
      !(hotspot_resistance_ohm > 0.0)) {
    throw ValidationError("pulse: electrical parameters must be > 0");
  }
  PulseShape pulse;
  pulse.tau_rise_ns =
      kinetic_inductance_nh / (load_resistance_ohm + hotspot_resistance_ohm);
  pulse.tau_fall_ns = kinetic_inductance_nh / load_resistance_ohm;
  pulse.validate();
  return pulse;
}

void PulseShape::validate() const {
  if (!(tau_fall_ns > 0.0)) throw ValidationError("pulse: fall time must be > 0");
  if (tau_rise_ns < 0.0) throw ValidationError("pulse: rise time must be >= 0");
  if (tau_rise_ns > 0.0 && !(tau_rise_ns < tau_fall_ns)) {
    throw ValidationError("pulse: rise time must be smaller than fall time");
  }
}

double PulseShape::peak_time_ns() const {
  if (tau_rise_ns == 0.0) return 0.0;
  return tau_rise_ns * tau_fall_ns / (tau_fall_ns - tau_rise_ns) *
         std::log(tau_fall_ns / tau_rise_ns);
}

double PulseShape::amplitude(double t_ns) const {
  if (t_ns < 0.0) return 0.0;
  if (tau_rise_ns == 0.0) return std::exp(-t_ns / tau_fall_ns);
  const double raw = std::exp(-t_ns / tau_fall_ns) - std::exp(-t_ns / tau_rise_ns);
  const double t_peak = peak_time_ns();
  const double norm = std::exp(-t_peak / tau_fall_ns) - std::exp(-t_peak / tau_rise_ns);
  return raw / norm;
}

void EfficiencyRecovery::validate() const {
  if (t_blind_ns < 0.0) throw ValidationError("recovery: blind interval must be >= 0");
  if (tau_eff_ns < 0.0) throw ValidationError("recovery: tau_eff must be >= 0");
  if (!(t_full_ns >= t_blind_ns)) {
    throw ValidationError("recovery: full-recovery time must be >= blind interval");
  }
  if (tau_eff_ns == 0.0 && !std::isfinite(t_full_ns)) {
    throw ValidationError("recovery: step recovery requires a finite full-recovery time");
  }
}

double EfficiencyRecovery::relative(double t_ns) const {
  if (t_ns < t_blind_ns) return 0.0;
  if (t_ns >= t_full_ns) return 1.0;
  if (tau_eff_ns == 0.0) return 1.0;
  return 1.0 - std::exp(-(t_ns - t_blind_ns) / tau_eff_ns);
}

double EfficiencyRecovery::cumulative(double t_ns) const {
  if (t_ns <= t_blind_ns) return 0.0;
  auto ramp = [this](double u) {
    // integral of (1 - exp(-u/tau)) from 0 to u
    if (tau_eff_ns == 0.0) return u;
    return u - tau_eff_ns * (1.0 - std::exp(-u / tau_eff_ns));
  };
  if (t_ns <= t_full_ns || !std::isfinite(t_full_ns)) return ramp(t_ns - t_blind_ns);
  return ramp(t_full_ns - t_blind_ns) + (t_ns - t_full_ns);
}

double EfficiencyRecovery::lost_time_ns() const {
  if (!std::isfinite(t_full_ns)) return t_blind_ns + tau_eff_ns;
  return t_full_ns - cumulative(t_full_ns);
}

RecoveryCurve::RecoveryCurve(PulseShape pulse, EfficiencyRecovery efficiency,
                             double full_recovery_fraction)
    : pulse_(pulse), efficiency_(efficiency),
      full_recovery_fraction_(full_recovery_fraction) {
  pulse_.validate();
  efficiency_.validate();
  if (!(full_recovery_fraction_ > 0.0 && full_recovery_fraction_ <= 1.0)) {
    throw ValidationError("recovery curve: full-recovery fraction must be in (0, 1]");
  }
}

RecoveryCurve RecoveryCurve::preset(const std::string& name) {
  if (name == kPresetDetectorFig3a) {
    // Calibrated so the extractors return 25 / 33 / 51 / 97 ns:
    // tau_fall solves peak-to-1/e = 33.000 with a 0.5 ns rise;
    // tau_eff = 26/ln 2 puts the 50% crossing 26 ns past the blind interval.
    PulseShape pulse{0.5, 32.496113467979};
    EfficiencyRecovery eff{25.0, 37.51007106311305, 97.0};
    return RecoveryCurve(pulse, eff, 0.99);
  }
  throw ValidationError("unknown recovery preset: '" + name + "'");
}

DeadTimeMetrics dead_time_metrics(const RecoveryCurve& curve,
                                  double full_recovery_fraction) {
  double fraction = full_recovery_fraction;
  if (fraction < 0.0) {
    fraction = curve.full_recovery_fraction();
  } else if (!(fraction > 0.0 && fraction <= 1.0)) {
    throw ValidationError("dead-time metrics: full-recovery fraction must be in (0, 1]");
  }
  const DeadTimeMetrics m = extract_metrics(curve.pulse(), curve.efficiency(), fraction);
  // the taxonomy only makes sense when the four times are ordered; degenerate
  // curves (instant recovery under a slow pulse) have no meaningful tau2
  if (m.tau1_min_separation_ns > m.tau2_one_over_e_ns + kOrderingSlackNs ||
      m.tau2_one_over_e_ns > m.tau3_minus3db_ns + kOrderingSlackNs ||
      m.tau3_minus3db_ns > m.tau4_full_recovery_ns + kOrderingSlackNs) {
    std::ostringstream msg;
    msg << "dead-time metrics out of order (tau1=" << m.tau1_min_separation_ns
        << ", tau2=" << m.tau2_one_over_e_ns << ", tau3=" << m.tau3_minus3db_ns
        << ", tau4=" << m.tau4_full_recovery_ns << " ns)";
    throw ValidationError(msg.str());
  }
  return m;
}

double rate_dependent_efficiency_analytic(const RecoveryCurve& curve, double flux_per_s,
                                          double eta_max) {
  if (flux_per_s < 0.0) throw ValidationError("rate efficiency: flux must be >= 0");
  if (!(eta_max >= 0.0 && eta_max <= 1.0)) {
    throw ValidationError("rate efficiency: eta_max must be in [0, 1]");
  }
  if (eta_max == 0.0) return 0.0;
  const double flux_per_ns = flux_per_s * 1e-9;
  if (flux_per_ns == 0.0) return eta_max;

  const EfficiencyRecovery& eff = curve.efficiency();
  const double a = flux_per_ns * eta_max;  // per ns
  auto survival = [&](double t) { return std::exp(-a * eff.cumulative(t)); };

  // mean inter-registration interval = integral of the survival function
  double mean_interval = eff.t_blind_ns;
  SimpsonState state{10000};
  double transient_end;
  if (std::isfinite(eff.t_full_ns)) {
    transient_end = eff.t_full_ns;
  } else {
    // past ~60 tau the exponential tail of the recovery is below 1e-26
    transient_end = eff.t_blind_ns + 60.0 * eff.tau_eff_ns;
  }
  mean_interval += integrate(survival, eff.t_blind_ns, transient_end, 1e-12, state);
  // analytic exponential tail beyond the transient
  const double c_end = eff.cumulative(transient_end);
  mean_interval += std::exp(-a * c_end) / a;

  const double registered_rate = 1.0 / mean_interval;  // per ns
  return registered_rate / flux_per_ns;
}

double pulsed_source_efficiency(const RecoveryCurve& curve, double repetition_period_ns,
                                double eta_max) {
  if (!(repetition_period_ns > 0.0)) {
    throw ValidationError("pulsed efficiency: period must be > 0");
  }
  if (!(eta_max >= 0.0 && eta_max <= 1.0)) {
    throw ValidationError("pulsed efficiency: eta_max must be in [0, 1]");
  }
  return eta_max * curve.efficiency_relative(repetition_period_ns);
}

}  // namespace snspd
