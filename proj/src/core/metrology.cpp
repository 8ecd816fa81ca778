#include "core/metrology.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "core/errors.hpp"

namespace snspd {

CalibrationResult calibrate_attenuation(const std::vector<PowerReading>& readings) {
  if (readings.empty()) {
    throw ValidationError("attenuation calibration: needs at least one reading");
  }
  double db_sum = 0.0;
  double ratio_min = std::numeric_limits<double>::infinity();
  double ratio_max = 0.0;
  double ratio_sum = 0.0;
  for (const auto& r : readings) {
    if (!(r.p1_w > 0.0) || !(r.p2_w > 0.0)) {
      throw ValidationError("attenuation calibration: powers must be > 0");
    }
    const double ratio = r.p1_w / r.p2_w;
    db_sum += 10.0 * std::log10(ratio);
    ratio_min = std::min(ratio_min, ratio);
    ratio_max = std::max(ratio_max, ratio);
    ratio_sum += ratio;
  }
  const double ratio_mean = ratio_sum / static_cast<double>(readings.size());
  return {db_sum / static_cast<double>(readings.size()),
          (ratio_max - ratio_min) / ratio_mean};
}

double AttenuationChain::nominal_ratio_db() const {
  return splitter_ratio_db +
         std::accumulate(nd_stages_db.begin(), nd_stages_db.end(), 0.0);
}

double AttenuationChain::effective_ratio_db() const {
  const double ratio_db = calibration_readings.empty()
                              ? nominal_ratio_db()
                              : calibrate_attenuation(calibration_readings).ratio_db;
  if (!(band_lo_db <= band_hi_db)) {
    throw ValidationError("attenuation chain: invalid ratio band");
  }
  if (ratio_db < band_lo_db || ratio_db > band_hi_db) {
    std::ostringstream msg;
    msg << "attenuation chain: ratio " << ratio_db << " dB outside configured band ["
        << band_lo_db << ", " << band_hi_db << "] dB";
    throw ValidationError(msg.str());
  }
  return ratio_db;
}

double photon_energy_j(double wavelength_nm) {
  return kPlanck * kSpeedOfLight / (wavelength_nm * 1e-9);
}

PhotonFlux photon_flux(double p_monitor_w, const AttenuationChain& chain,
                       double wavelength_nm) {
  if (!(p_monitor_w > 0.0)) {
    throw ValidationError("photon flux: monitor power must be > 0");
  }
  if (wavelength_nm < kLaserWindowLoNm || wavelength_nm > kLaserWindowHiNm) {
    std::ostringstream msg;
    msg << "photon flux: wavelength " << wavelength_nm << " nm outside laser window ["
        << kLaserWindowLoNm << ", " << kLaserWindowHiNm << "] nm";
    throw RangeError(msg.str());
  }
  const double ratio_db = chain.effective_ratio_db();
  PhotonFlux flux;
  flux.power_at_detector_w = p_monitor_w * std::pow(10.0, -ratio_db / 10.0);
  flux.wavelength_nm = wavelength_nm;
  flux.flux_per_s = flux.power_at_detector_w / photon_energy_j(wavelength_nm);
  return flux;
}

UncertaintyBudget combine_uncertainty(std::vector<UncertaintyComponent> components) {
  double sum_sq = 0.0;
  for (const auto& c : components) {
    if (c.relative < 0.0) {
      throw ValidationError("uncertainty budget: component '" + c.label +
                            "' must be >= 0");
    }
    sum_sq += c.relative * c.relative;
  }
  UncertaintyBudget budget;
  budget.components = std::move(components);
  budget.total = std::sqrt(sum_sq);
  return budget;
}

SdeResult compute_sde(double counts_per_s, double dark_per_s, const PhotonFlux& flux,
                      double r_rfl, const std::optional<UncertaintyBudget>& budget) {
  if (counts_per_s < 0.0 || dark_per_s < 0.0) {
    throw ValidationError("sde: count rates must be >= 0");
  }
  if (counts_per_s < dark_per_s) {
    throw ValidationError("sde: registered counts below dark counts");
  }
  if (!(flux.flux_per_s > 0.0)) {
    throw ValidationError("sde: photon flux must be > 0");
  }
  if (!(r_rfl >= 0.0 && r_rfl < 1.0)) {
    throw ValidationError("sde: end-face reflection must be in [0, 1)");
  }
  SdeResult result;
  result.counts_registered_per_s = counts_per_s;
  result.dark_counts_per_s = dark_per_s;
  result.flux = flux;
  result.r_rfl = r_rfl;
  result.sde = (1.0 - r_rfl) * (counts_per_s - dark_per_s) / flux.flux_per_s;
  result.relative_uncertainty = budget ? budget->total : 0.0;
  result.over_unity = result.sde > 1.0;
  return result;
}

double fresnel_end_face_reflection(double n_core, double n_outside) {
  if (!(n_core > 0.0) || !(n_outside > 0.0)) {
    throw ValidationError("fresnel reflection: indices must be > 0");
  }
  const double r = (n_core - n_outside) / (n_core + n_outside);
  return r * r;
}

std::vector<UncertaintyComponent> PowerMeter::uncertainty_components() const {
  return {{label + " accuracy", accuracy_percent / 100.0},
          {label + " linearity", linearity_percent / 100.0}};
}

}  // namespace snspd
