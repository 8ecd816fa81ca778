#include "core/materials.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include "core/errors.hpp"

namespace snspd {

namespace {

std::string trim(const std::string& s) {
  auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return {};
  auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_csv_row(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) fields.push_back(trim(field));
  return fields;
}

double parse_double(const std::string& token, const std::string& origin, std::size_t line_no) {
  try {
    std::size_t pos = 0;
    double value = std::stod(token, &pos);
    if (pos != token.size()) throw std::invalid_argument(token);
    return value;
  } catch (const std::exception&) {
    throw ValidationError(origin + ":" + std::to_string(line_no) +
                          ": not a number: '" + token + "'");
  }
}

}  // namespace

DispersionTable::DispersionTable(std::string material_name,
                                 std::vector<DispersionSample> samples)
    : name_(std::move(material_name)), samples_(std::move(samples)) {
  if (samples_.size() < 2) {
    throw ValidationError("material '" + name_ + "': needs at least 2 samples, got " +
                          std::to_string(samples_.size()));
  }
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    const auto& s = samples_[i];
    if (!(s.wavelength_nm > 0.0)) {
      throw ValidationError("material '" + name_ + "': wavelength must be > 0");
    }
    if (!(s.n > 0.0)) {
      throw ValidationError("material '" + name_ + "': n must be > 0 (sample at " +
                            std::to_string(s.wavelength_nm) + " nm)");
    }
    if (s.k < 0.0) {
      throw ValidationError("material '" + name_ + "': k must be >= 0 (sample at " +
                            std::to_string(s.wavelength_nm) + " nm)");
    }
    if (i > 0 && !(samples_[i - 1].wavelength_nm < s.wavelength_nm)) {
      throw ValidationError("material '" + name_ +
                            "': wavelengths must be strictly increasing near " +
                            std::to_string(s.wavelength_nm) + " nm");
    }
  }
}

DispersionTable DispersionTable::constant(std::string material_name, double n, double k) {
  std::vector<DispersionSample> samples{{200.0, n, k}, {100000.0, n, k}};
  return DispersionTable(std::move(material_name), std::move(samples));
}

DispersionTable DispersionTable::from_csv_file(std::string material_name,
                                               const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open dispersion CSV: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return from_csv_text(std::move(material_name), buffer.str(), path);
}

DispersionTable DispersionTable::from_csv_text(std::string material_name,
                                               const std::string& text,
                                               const std::string& origin) {
  std::stringstream ss(text);
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  std::vector<DispersionSample> samples;
  while (std::getline(ss, line)) {
    ++line_no;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    auto fields = split_csv_row(t);
    if (!header_seen) {
      if (fields.size() != 3 || fields[0] != "wavelength_nm" || fields[1] != "n" ||
          fields[2] != "k") {
        throw ValidationError(origin + ":" + std::to_string(line_no) +
                              ": expected header 'wavelength_nm,n,k'");
      }
      header_seen = true;
      continue;
    }
    if (fields.size() != 3) {
      throw ValidationError(origin + ":" + std::to_string(line_no) +
                            ": expected 3 columns, got " + std::to_string(fields.size()));
    }
    samples.push_back({parse_double(fields[0], origin, line_no),
                       parse_double(fields[1], origin, line_no),
                       parse_double(fields[2], origin, line_no)});
  }
  if (!header_seen) throw ValidationError(origin + ": missing 'wavelength_nm,n,k' header");
  return DispersionTable(std::move(material_name), std::move(samples));
}

std::complex<double> DispersionTable::complex_index(double wavelength_nm) const {
  const double lo = min_wavelength_nm();
  const double hi = max_wavelength_nm();
  if (!(wavelength_nm >= lo && wavelength_nm <= hi)) {
    std::ostringstream msg;
    msg << "material '" << name_ << "': wavelength " << wavelength_nm
        << " nm outside tabulated range [" << lo << ", " << hi << "] nm";
    throw RangeError(msg.str());
  }
  auto it = std::lower_bound(samples_.begin(), samples_.end(), wavelength_nm,
                             [](const DispersionSample& s, double wl) {
                               return s.wavelength_nm < wl;
                             });
  if (it->wavelength_nm == wavelength_nm) return make_index(it->n, it->k);
  const auto& hi_s = *it;
  const auto& lo_s = *(it - 1);
  const double f =
      (wavelength_nm - lo_s.wavelength_nm) / (hi_s.wavelength_nm - lo_s.wavelength_nm);
  return make_index(lo_s.n + f * (hi_s.n - lo_s.n), lo_s.k + f * (hi_s.k - lo_s.k));
}

MaterialRef MaterialLibrary::add(DispersionTable table) {
  auto ref = std::make_shared<const DispersionTable>(std::move(table));
  tables_[ref->name()] = ref;
  return ref;
}

MaterialRef MaterialLibrary::get(const std::string& name) const {
  auto it = tables_.find(name);
  if (it == tables_.end()) throw ValidationError("unknown material: '" + name + "'");
  return it->second;
}

bool MaterialLibrary::contains(const std::string& name) const noexcept {
  return tables_.count(name) != 0;
}

std::vector<std::string> MaterialLibrary::names() const {
  std::vector<std::string> out;
  out.reserve(tables_.size());
  for (const auto& [name, ref] : tables_) out.push_back(name);
  return out;
}

const char* to_string(Polarization pol) noexcept {
  return pol == Polarization::TE ? "TE" : "TM";
}

Polarization polarization_from_string(const std::string& s) {
  if (s == "TE" || s == "te") return Polarization::TE;
  if (s == "TM" || s == "tm") return Polarization::TM;
  throw ValidationError("polarization must be TE or TM, got '" + s + "'");
}

void MeanderGeometry::validate() const {
  if (!(linewidth_nm > 0.0) || !(pitch_nm > 0.0) || !(linewidth_nm < pitch_nm)) {
    throw ValidationError("meander: require 0 < linewidth < pitch, got linewidth=" +
                          std::to_string(linewidth_nm) + " pitch=" +
                          std::to_string(pitch_nm));
  }
  if (!(film_thickness_nm > 0.0)) {
    throw ValidationError("meander: film thickness must be > 0");
  }
  if (!(active_radius_um > 0.0)) {
    throw ValidationError("meander: active radius must be > 0");
  }
}

std::complex<double> effective_permittivity(const MeanderGeometry& geom,
                                            std::complex<double> eps_wire,
                                            std::complex<double> eps_gap,
                                            Polarization pol) {
  const double f = geom.fill_factor();
  if (!(f > 0.0 && f < 1.0)) {
    throw ValidationError("effective permittivity: fill factor must be in (0,1), got " +
                          std::to_string(f));
  }
  if (pol == Polarization::TE) {
    return f * eps_wire + (1.0 - f) * eps_gap;
  }
  return 1.0 / (f / eps_wire + (1.0 - f) / eps_gap);
}

std::complex<double> index_from_permittivity(std::complex<double> eps) {
  std::complex<double> root = std::sqrt(eps);
  if (root.imag() > 0.0) root = -root;
  return root;
}

}  // namespace snspd
