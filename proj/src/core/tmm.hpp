#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "core/materials.hpp"

namespace snspd {

// One interior layer of a stratified stack: either a homogeneous film or the
// meander collapsed to an anisotropic effective-medium film.
class Layer {
public:
  static Layer homogeneous(MaterialRef material, double thickness_nm);
  static Layer meander(MeanderGeometry geometry, MaterialRef wire, MaterialRef gap);

  bool is_meander() const noexcept { return wire_ != nullptr; }
  double thickness_nm() const noexcept { return thickness_nm_; }
  const MeanderGeometry& geometry() const { return geometry_; }

  // Effective complex index at this wavelength/polarization.
  std::complex<double> refractive_index(double wavelength_nm, Polarization pol) const;

  std::string describe() const;

  Layer with_thickness(double thickness_nm) const;

private:
  Layer() = default;

  MaterialRef material_;        // homogeneous
  MaterialRef wire_, gap_;      // meander
  MeanderGeometry geometry_{};  // meander
  double thickness_nm_ = 0.0;
};

// Ordered stratified stack between two semi-infinite media. One layer may be
// designated the airgap so sweeps/optimizers can retarget its thickness.
class LayerStack {
public:
  LayerStack(MaterialRef entry_medium, std::vector<Layer> layers, MaterialRef exit_medium,
             std::optional<std::size_t> airgap_index = std::nullopt);

  const std::vector<Layer>& layers() const noexcept { return layers_; }
  const MaterialRef& entry_medium() const noexcept { return entry_; }
  const MaterialRef& exit_medium() const noexcept { return exit_; }
  std::optional<std::size_t> airgap_index() const noexcept { return airgap_index_; }
  std::optional<std::size_t> meander_index() const noexcept { return meander_index_; }

  // Copy with the designated airgap layer set to the given thickness.
  LayerStack with_airgap(double gap_nm) const;

private:
  MaterialRef entry_, exit_;
  std::vector<Layer> layers_;
  std::optional<std::size_t> airgap_index_;
  std::optional<std::size_t> meander_index_;
};

struct StackResponse {
  double wavelength_nm = 0.0;
  Polarization polarization = Polarization::TE;
  double reflectance = 0.0;
  double transmittance = 0.0;
  std::vector<double> layer_absorptance;  // one entry per interior layer
  int clamped_components = 0;             // round-off values clamped into [0,1]

  double total_absorptance() const;
  double conservation_residual() const;  // R + T + sum(A) - 1
};

// Characteristic-matrix solution at normal incidence. Per-layer absorptance
// comes from the Poynting-flux drop across each layer; interface fluxes carry
// a base-2 exponent so opaque stacks cannot overflow.
StackResponse solve_stack(const LayerStack& stack, double wavelength_nm, Polarization pol);

// Absorptance of the meander layer, the quantity compared against measured
// efficiency. Requires exactly one meander layer.
double detector_absorption(const LayerStack& stack, double wavelength_nm, Polarization pol);

// Canonical membrane cavity: entry fiber glass / airgap / meander /
// spacer / mirror / exit. Exposed by name "membrane-cavity-v1".
struct MembraneCavityParams {
  MaterialRef fiber;   // semi-infinite entry
  MaterialRef gap;     // airgap medium, also the meander gap fill
  MaterialRef wire;    // superconductor film
  MaterialRef spacer;  // quarter-wave-class dielectric under the meander
  MaterialRef mirror;  // metal reflector
  MaterialRef exit;    // semi-infinite exit
  MeanderGeometry meander;
  double airgap_nm = 0.0;
  double spacer_thickness_nm = 230.0;
  double mirror_thickness_nm = 200.0;
};

LayerStack membrane_cavity_v1(const MembraneCavityParams& params);

inline constexpr const char* kMembraneCavityV1 = "membrane-cavity-v1";

}  // namespace snspd
