#pragma once

#include <optional>
#include <string>
#include <vector>

namespace snspd {

// Exact SI constants.
inline constexpr double kPlanck = 6.62607015e-34;       // J*s
inline constexpr double kSpeedOfLight = 2.99792458e8;   // m/s

// Tunable-laser window the flux arithmetic is calibrated for.
inline constexpr double kLaserWindowLoNm = 1260.0;
inline constexpr double kLaserWindowHiNm = 1650.0;

struct PowerReading {
  double p1_w;  // monitor (high-power) arm
  double p2_w;  // signal (attenuated) arm
};

struct CalibrationResult {
  double ratio_db;         // mean of 10*log10(P1/P2)
  double relative_spread;  // (max-min)/mean of the linear ratios
};

// ratio_db = mean over readings of 10*log10(P1/P2); all powers must be > 0.
CalibrationResult calibrate_attenuation(const std::vector<PowerReading>& readings);

// Monitor-to-detector attenuation chain. The effective ratio comes from the
// calibration readings when present, otherwise from the nominal splitter +
// ND-filter budget. The calibrated ratio must sit inside the configured band.
struct AttenuationChain {
  double splitter_ratio_db = 0.0;
  std::vector<double> nd_stages_db;
  std::vector<PowerReading> calibration_readings;
  double band_lo_db = 50.0;
  double band_hi_db = 60.0;

  double nominal_ratio_db() const;
  double effective_ratio_db() const;  // validates band, throws ValidationError
};

struct PhotonFlux {
  double power_at_detector_w = 0.0;
  double wavelength_nm = 0.0;
  double flux_per_s = 0.0;  // = P * lambda / (h * c)
};

double photon_energy_j(double wavelength_nm);

// power_at_detector = P_monitor * 10^(-ratio_db/10), flux = P*lambda/(h c).
// Wavelength must be inside the laser window.
PhotonFlux photon_flux(double p_monitor_w, const AttenuationChain& chain,
                       double wavelength_nm);

struct UncertaintyComponent {
  std::string label;
  double relative;  // fraction, e.g. 0.02 for 2%
};

struct UncertaintyBudget {
  std::vector<UncertaintyComponent> components;
  double total = 0.0;  // root-sum-square of the components
};

UncertaintyBudget combine_uncertainty(std::vector<UncertaintyComponent> components);

struct SdeResult {
  double counts_registered_per_s = 0.0;
  double dark_counts_per_s = 0.0;
  PhotonFlux flux;
  double r_rfl = 0.0;
  double sde = 0.0;
  double relative_uncertainty = 0.0;  // 1-sigma-equivalent RMS, relative
  bool over_unity = false;            // flagged, never clamped
};

// sde = (1 - r_rfl) * (counts - dark) / flux. Over-unity results are flagged
// so calibration errors surface instead of being hidden.
SdeResult compute_sde(double counts_per_s, double dark_per_s, const PhotonFlux& flux,
                      double r_rfl, const std::optional<UncertaintyBudget>& budget = {});

// Normal-incidence Fresnel power reflection at the fiber end face.
double fresnel_end_face_reflection(double n_core, double n_outside);

// Power-meter metadata; readings renormalize to a reference meter through the
// calibration factor.
struct PowerMeter {
  std::string label;
  double accuracy_percent = 0.0;
  double linearity_percent = 0.0;
  double calibration_factor = 1.0;  // multiplier onto raw readings

  double to_reference(double reading_w) const { return reading_w * calibration_factor; }
  std::vector<UncertaintyComponent> uncertainty_components() const;
};

}  // namespace snspd
