#include "core/tmm.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "core/errors.hpp"
#include "core/log.hpp"

namespace snspd {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kClampBand = 1e-12;

// Rescale threshold for interface fields; keeps |E|^2 products finite for
// stacks with very large total optical depth.
constexpr double kRescaleLimit = 0x1.0p128;
constexpr int kRescaleShift = 128;

struct InterfaceFlux {
  double value;  // 0.5 * Re(E * conj(H)) at the stored scale
  int exponent;  // true flux = value * 2^(2*exponent)
};

double clamp_fraction(double v, const char* label, double wavelength_nm,
                      int* clamp_count) {
  if (v >= 0.0 && v <= 1.0) return v;
  if (v >= -kClampBand && v < 0.0) {
    std::ostringstream msg;
    msg << label << " = " << v << " at " << wavelength_nm
        << " nm clamped to 0 (round-off)";
    log_warning(msg.str());
    ++*clamp_count;
    return 0.0;
  }
  if (v > 1.0 && v <= 1.0 + kClampBand) {
    std::ostringstream msg;
    msg << label << " = " << v << " at " << wavelength_nm
        << " nm clamped to 1 (round-off)";
    log_warning(msg.str());
    ++*clamp_count;
    return 1.0;
  }
  std::ostringstream msg;
  msg << label << " = " << v << " at " << wavelength_nm
      << " nm outside [0,1] beyond round-off";
  throw NumericError(msg.str());
}

}  // namespace

Layer Layer::homogeneous(MaterialRef material, double thickness_nm) {
  if (!material) throw ValidationError("layer: null material");
  if (!(thickness_nm >= 0.0)) {
    throw ValidationError("layer '" + material->name() + "': thickness must be >= 0, got " +
                          std::to_string(thickness_nm));
  }
  Layer layer;
  layer.material_ = std::move(material);
  layer.thickness_nm_ = thickness_nm;
  return layer;
}

Layer Layer::meander(MeanderGeometry geometry, MaterialRef wire, MaterialRef gap) {
  geometry.validate();
  if (!wire || !gap) throw ValidationError("meander layer: null material");
  Layer layer;
  layer.wire_ = std::move(wire);
  layer.gap_ = std::move(gap);
  layer.geometry_ = geometry;
  layer.thickness_nm_ = geometry.film_thickness_nm;
  return layer;
}

std::complex<double> Layer::refractive_index(double wavelength_nm, Polarization pol) const {
  if (!is_meander()) return material_->complex_index(wavelength_nm);
  const std::complex<double> n_wire = wire_->complex_index(wavelength_nm);
  const std::complex<double> n_gap = gap_->complex_index(wavelength_nm);
  const std::complex<double> eps =
      effective_permittivity(geometry_, n_wire * n_wire, n_gap * n_gap, pol);
  return index_from_permittivity(eps);
}

std::string Layer::describe() const {
  std::ostringstream out;
  if (is_meander()) {
    out << "meander(" << wire_->name() << "/" << gap_->name() << ", "
        << geometry_.linewidth_nm << "/" << geometry_.pitch_nm << " nm, t="
        << thickness_nm_ << " nm)";
  } else {
    out << material_->name() << "(t=" << thickness_nm_ << " nm)";
  }
  return out.str();
}

Layer Layer::with_thickness(double thickness_nm) const {
  if (!(thickness_nm >= 0.0)) {
    throw ValidationError("layer thickness must be >= 0, got " +
                          std::to_string(thickness_nm));
  }
  Layer copy = *this;
  copy.thickness_nm_ = thickness_nm;
  if (copy.is_meander()) copy.geometry_.film_thickness_nm = thickness_nm;
  return copy;
}

LayerStack::LayerStack(MaterialRef entry_medium, std::vector<Layer> layers,
                       MaterialRef exit_medium, std::optional<std::size_t> airgap_index)
    : entry_(std::move(entry_medium)),
      exit_(std::move(exit_medium)),
      layers_(std::move(layers)),
      airgap_index_(airgap_index) {
  if (!entry_ || !exit_) throw ValidationError("stack: null entry/exit medium");
  if (layers_.empty()) throw ValidationError("stack: needs at least one interior layer");
  if (airgap_index_ && *airgap_index_ >= layers_.size()) {
    throw ValidationError("stack: airgap index out of range");
  }
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    // interior layers are strictly positive; only the airgap may close to 0
    const bool is_airgap = airgap_index_ && *airgap_index_ == i;
    if (!is_airgap && !(layers_[i].thickness_nm() > 0.0)) {
      throw ValidationError("stack: interior layer " + std::to_string(i) +
                            " must have thickness > 0");
    }
    if (layers_[i].is_meander()) {
      if (meander_index_) throw ValidationError("stack: at most one meander layer allowed");
      meander_index_ = i;
    }
  }
}

LayerStack LayerStack::with_airgap(double gap_nm) const {
  if (!airgap_index_) {
    throw ValidationError("stack: no layer is designated as the airgap");
  }
  std::vector<Layer> layers = layers_;
  layers[*airgap_index_] = layers[*airgap_index_].with_thickness(gap_nm);
  return LayerStack(entry_, std::move(layers), exit_, airgap_index_);
}

double StackResponse::total_absorptance() const {
  return std::accumulate(layer_absorptance.begin(), layer_absorptance.end(), 0.0);
}

double StackResponse::conservation_residual() const {
  return reflectance + transmittance + total_absorptance() - 1.0;
}

StackResponse solve_stack(const LayerStack& stack, double wavelength_nm, Polarization pol) {
  using cd = std::complex<double>;

  const cd eta_entry = stack.entry_medium()->complex_index(wavelength_nm);
  const cd eta_exit = stack.exit_medium()->complex_index(wavelength_nm);
  if (std::abs(eta_entry.imag()) > 0.0) {
    throw ValidationError("stack: entry medium '" + stack.entry_medium()->name() +
                          "' must be lossless (k=0) for a well-defined R/T split");
  }
  const double eta0 = eta_entry.real();

  const auto& layers = stack.layers();
  const std::size_t count = layers.size();

  // Back-propagate tangential fields from the exit interface, recording the
  // normal Poynting flux at every interface. flux[j] is the flux entering
  // layer j (flux[count] is the flux into the exit medium).
  std::vector<InterfaceFlux> flux(count + 1);
  cd e_field = 1.0;
  cd h_field = eta_exit;
  int exponent = 0;
  flux[count] = {0.5 * std::real(e_field * std::conj(h_field)), 0};

  for (std::size_t j = count; j-- > 0;) {
    const cd index = layers[j].refractive_index(wavelength_nm, pol);
    if (std::abs(index) < 1e-12) {
      throw NumericError("stack layer " + std::to_string(j) + " (" +
                         layers[j].describe() + "): near-zero permittivity, matrix singular");
    }
    const cd delta = 2.0 * kPi * index * layers[j].thickness_nm() / wavelength_nm;
    const cd cos_d = std::cos(delta);
    const cd sin_d = std::sin(delta);
    const cd i_unit(0.0, 1.0);
    const cd e_next = cos_d * e_field + i_unit * sin_d / index * h_field;
    const cd h_next = i_unit * index * sin_d * e_field + cos_d * h_field;
    e_field = e_next;
    h_field = h_next;
    if (!std::isfinite(e_field.real()) || !std::isfinite(e_field.imag()) ||
        !std::isfinite(h_field.real()) || !std::isfinite(h_field.imag())) {
      throw NumericError("stack layer " + std::to_string(j) + " (" + layers[j].describe() +
                         "): non-finite field propagation (layer too opaque?)");
    }
    while (std::max(std::abs(e_field), std::abs(h_field)) > kRescaleLimit) {
      e_field = std::ldexp(e_field.real(), -kRescaleShift) +
                cd(0.0, std::ldexp(e_field.imag(), -kRescaleShift));
      h_field = std::ldexp(h_field.real(), -kRescaleShift) +
                cd(0.0, std::ldexp(h_field.imag(), -kRescaleShift));
      exponent += kRescaleShift;
    }
    flux[j] = {0.5 * std::real(e_field * std::conj(h_field)), exponent};
  }

  // Entry-side decomposition into incident/reflected waves.
  const cd b = e_field;  // at scale 2^exponent
  const cd c = h_field;
  const cd denom = eta0 * b + c;
  if (std::abs(denom) == 0.0) {
    throw NumericError("stack: degenerate entry admittance combination");
  }
  const cd r_amplitude = (eta0 * b - c) / denom;
  const cd e_incident = 0.5 * (b + c / eta0);
  const double flux_incident = 0.5 * eta0 * std::norm(e_incident);  // scale = entry exponent
  if (!(flux_incident > 0.0)) {
    throw NumericError("stack: vanishing incident flux");
  }
  const int entry_exponent = flux[0].exponent;

  auto to_fraction = [&](const InterfaceFlux& f) {
    // exponents are non-decreasing toward the entry, so this only shrinks
    return std::ldexp(f.value / flux_incident, 2 * (f.exponent - entry_exponent));
  };

  StackResponse response;
  response.wavelength_nm = wavelength_nm;
  response.polarization = pol;
  int clamp_count = 0;

  const double raw_r = std::norm(r_amplitude);
  response.reflectance = clamp_fraction(raw_r, "reflectance", wavelength_nm, &clamp_count);
  response.transmittance =
      clamp_fraction(to_fraction(flux[count]), "transmittance", wavelength_nm, &clamp_count);
  response.layer_absorptance.resize(count);
  for (std::size_t j = 0; j < count; ++j) {
    const double a = to_fraction(flux[j]) - to_fraction(flux[j + 1]);
    response.layer_absorptance[j] =
        clamp_fraction(a, "layer absorptance", wavelength_nm, &clamp_count);
  }
  response.clamped_components = clamp_count;

  if (std::abs(response.conservation_residual()) > 1e-9) {
    std::ostringstream msg;
    msg << "stack: energy conservation violated by " << response.conservation_residual()
        << " at " << wavelength_nm << " nm";
    throw NumericError(msg.str());
  }
  return response;
}

double detector_absorption(const LayerStack& stack, double wavelength_nm, Polarization pol) {
  if (!stack.meander_index()) {
    throw ValidationError("detector absorption: stack has no meander layer");
  }
  const StackResponse response = solve_stack(stack, wavelength_nm, pol);
  return response.layer_absorptance[*stack.meander_index()];
}

LayerStack membrane_cavity_v1(const MembraneCavityParams& params) {
  if (!params.fiber || !params.gap || !params.wire || !params.spacer || !params.mirror ||
      !params.exit) {
    throw ValidationError(std::string(kMembraneCavityV1) + ": all materials must be set");
  }
  if (!(params.airgap_nm >= 0.0)) {
    throw ValidationError(std::string(kMembraneCavityV1) + ": airgap must be >= 0 nm");
  }
  std::vector<Layer> layers;
  layers.push_back(Layer::homogeneous(params.gap, params.airgap_nm));
  layers.push_back(Layer::meander(params.meander, params.wire, params.gap));
  layers.push_back(Layer::homogeneous(params.spacer, params.spacer_thickness_nm));
  layers.push_back(Layer::homogeneous(params.mirror, params.mirror_thickness_nm));
  return LayerStack(params.fiber, std::move(layers), params.exit, 0);
}

}  // namespace snspd
