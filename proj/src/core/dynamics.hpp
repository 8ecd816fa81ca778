#pragma once

#include <string>

namespace snspd {

// Normalized output pulse, peak amplitude 1.0. tau_rise = 0 degenerates to a
// pure exponential decay starting at t = 0.
struct PulseShape {
  double tau_rise_ns = 0.0;
  double tau_fall_ns = 0.0;

  // Lumped electrical model: tau_rise = L_k/(R_load + R_hotspot),
  // tau_fall = L_k/R_load (nH over ohm gives ns).
  static PulseShape from_electrical(double kinetic_inductance_nh,
                                    double load_resistance_ohm,
                                    double hotspot_resistance_ohm);

  void validate() const;
  double amplitude(double t_ns) const;  // 0 for t < 0
  double peak_time_ns() const;
};

// Relative efficiency after a registered detection: blind on [0, t_blind),
// saturating exponential with scale tau_eff afterwards, and exactly 1 from
// t_full on (the full-recovery cap). tau_eff = 0 degenerates to a step at
// t_blind; t_full may be +infinity to disable the cap.
struct EfficiencyRecovery {
  double t_blind_ns = 0.0;
  double tau_eff_ns = 0.0;
  double t_full_ns = 0.0;

  void validate() const;
  double relative(double t_ns) const;    // in [0, 1]
  double cumulative(double t_ns) const;  // integral of relative() from 0 to t
  // time lost to the recovery transient: lim (t - cumulative(t))
  double lost_time_ns() const;
};

// Detection-recovery model of one detector.
class RecoveryCurve {
public:
  RecoveryCurve(PulseShape pulse, EfficiencyRecovery efficiency,
                double full_recovery_fraction = 0.99);

  // Named presets; "detector-fig3a" reproduces the reference device metrics
  // (25 / 33 / 51 / 97 ns).
  static RecoveryCurve preset(const std::string& name);

  const PulseShape& pulse() const noexcept { return pulse_; }
  const EfficiencyRecovery& efficiency() const noexcept { return efficiency_; }
  double full_recovery_fraction() const noexcept { return full_recovery_fraction_; }

  double pulse_amplitude(double t_ns) const { return pulse_.amplitude(t_ns); }
  double efficiency_relative(double t_ns) const { return efficiency_.relative(t_ns); }

private:
  PulseShape pulse_;
  EfficiencyRecovery efficiency_;
  double full_recovery_fraction_;
};

inline constexpr const char* kPresetDetectorFig3a = "detector-fig3a";

struct DeadTimeMetrics {
  double tau1_min_separation_ns = 0.0;  // blind interval
  double tau2_one_over_e_ns = 0.0;      // pulse peak -> 1/e of peak
  double tau3_minus3db_ns = 0.0;        // 50% efficiency recovery
  double tau4_full_recovery_ns = 0.0;   // full_recovery_fraction crossing
};

// Threshold crossings found by bisection to 0.01 ns. The returned metrics
// always satisfy tau1 <= tau2 <= tau3 <= tau4 (a ValidationError otherwise);
// a negative fraction uses the curve's configured one.
DeadTimeMetrics dead_time_metrics(const RecoveryCurve& curve,
                                  double full_recovery_fraction = -1.0);

// Expected efficiency under CW Poisson illumination with non-paralyzable
// recovery. Exact renewal result: the registered rate is
//   r = 1 / integral_0^inf exp(-flux * eta_max * cumulative(t)) dt
// and the returned value is r / flux (eta_max at zero flux).
double rate_dependent_efficiency_analytic(const RecoveryCurve& curve, double flux_per_s,
                                          double eta_max);

// Worst-case pulsed-source efficiency: every pulse detected, so the next
// photon arrives exactly one period into the recovery.
double pulsed_source_efficiency(const RecoveryCurve& curve, double repetition_period_ns,
                                double eta_max);

}  // namespace snspd
