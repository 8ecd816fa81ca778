#pragma once

#include <complex>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace snspd {

// Sign convention, fixed repo-wide: complex refractive index N = n - i*k with
// exp(+i*omega*t) time dependence, so a forward wave goes like
// exp(-i*2*pi*N*z/lambda) and k >= 0 means absorption.
inline std::complex<double> make_index(double n, double k) {
  return {n, -k};
}

struct DispersionSample {
  double wavelength_nm;
  double n;
  double k;
};

// Wavelength-indexed complex refractive index of one material. Immutable
// after construction; queries outside the tabulated range are errors.
class DispersionTable {
public:
  DispersionTable(std::string material_name, std::vector<DispersionSample> samples);

  // Constant-index material spanning [200 nm, 100 um].
  static DispersionTable constant(std::string material_name, double n, double k);

  // CSV with a mandatory "wavelength_nm,n,k" header row; '#' lines are comments.
  static DispersionTable from_csv_file(std::string material_name, const std::string& path);
  static DispersionTable from_csv_text(std::string material_name, const std::string& text,
                                       const std::string& origin = "<string>");

  // Linear interpolation; exact at sample points. Throws RangeError outside
  // [min_wavelength, max_wavelength].
  std::complex<double> complex_index(double wavelength_nm) const;

  const std::string& name() const noexcept { return name_; }
  const std::vector<DispersionSample>& samples() const noexcept { return samples_; }
  double min_wavelength_nm() const noexcept { return samples_.front().wavelength_nm; }
  double max_wavelength_nm() const noexcept { return samples_.back().wavelength_nm; }

private:
  std::string name_;
  std::vector<DispersionSample> samples_;
};

using MaterialRef = std::shared_ptr<const DispersionTable>;

// Named registry of dispersion tables; stacks keep shared ownership of the
// tables they reference, so a library may be dropped once stacks are built.
class MaterialLibrary {
public:
  MaterialRef add(DispersionTable table);
  MaterialRef get(const std::string& name) const;  // throws ValidationError if absent
  bool contains(const std::string& name) const noexcept;
  std::vector<std::string> names() const;

private:
  std::map<std::string, MaterialRef> tables_;
};

// E-field orientation relative to the meander wires.
enum class Polarization {
  TE,  // E parallel to the wires
  TM,  // E perpendicular to the wires
};

const char* to_string(Polarization pol) noexcept;
Polarization polarization_from_string(const std::string& s);

struct MeanderGeometry {
  double linewidth_nm = 0.0;
  double pitch_nm = 0.0;
  double film_thickness_nm = 0.0;
  double active_radius_um = 0.0;

  double fill_factor() const noexcept { return linewidth_nm / pitch_nm; }
  void validate() const;  // 0 < linewidth < pitch, thickness > 0, radius > 0
};

// Zeroth-order anisotropic grating EMA, valid for pitch << wavelength:
// E parallel to wires -> volume-weighted permittivity, E perpendicular ->
// harmonic mean. Collapses the meander into one homogeneous layer.
std::complex<double> effective_permittivity(const MeanderGeometry& geom,
                                            std::complex<double> eps_wire,
                                            std::complex<double> eps_gap,
                                            Polarization pol);

// Branch of sqrt(eps) with Im <= 0, i.e. the passive n - i*k root.
std::complex<double> index_from_permittivity(std::complex<double> eps);

}  // namespace snspd
