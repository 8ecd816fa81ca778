#include "core/design.hpp"

#include <algorithm>
#include <cmath>

#include "core/errors.hpp"

namespace snspd {

namespace {

void require_sorted_nonempty(const std::vector<double>& axis, const char* label) {
  if (axis.empty()) throw ValidationError(std::string("sweep grid: empty ") + label);
  for (std::size_t i = 1; i < axis.size(); ++i) {
    if (!(axis[i - 1] < axis[i])) {
      throw ValidationError(std::string("sweep grid: ") + label +
                            " must be strictly increasing");
    }
  }
}

}  // namespace

void SweepGrid::validate() const {
  require_sorted_nonempty(wavelengths_nm, "wavelength axis");
  require_sorted_nonempty(airgaps_nm, "airgap axis");
}

std::vector<double> SweepGrid::linspace_step(double start, double stop, double step) {
  if (!(step > 0.0) || !(stop >= start)) {
    throw ValidationError("grid axis: require stop >= start and step > 0");
  }
  std::vector<double> out;
  const auto count = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(start + static_cast<double>(i) * step);
  return out;
}

AbsorptionMap sweep(const LayerStack& stack_template, const SweepGrid& grid) {
  grid.validate();
  AbsorptionMap map;
  map.grid = grid;
  map.values.resize(grid.airgaps_nm.size() * grid.wavelengths_nm.size());
  for (std::size_t gi = 0; gi < grid.airgaps_nm.size(); ++gi) {
    const LayerStack stack = stack_template.with_airgap(grid.airgaps_nm[gi]);
    for (std::size_t wi = 0; wi < grid.wavelengths_nm.size(); ++wi) {
      try {
        map.values[gi * grid.wavelengths_nm.size() + wi] =
            detector_absorption(stack, grid.wavelengths_nm[wi], grid.polarization);
      } catch (const Error& e) {
        throw Error(e.kind(), "sweep at gap=" + std::to_string(grid.airgaps_nm[gi]) +
                                  " nm, wavelength=" +
                                  std::to_string(grid.wavelengths_nm[wi]) + " nm: " +
                                  e.what());
      }
    }
  }
  return map;
}

std::vector<Peak> find_peaks(std::span<const double> x, std::span<const double> y,
                             double prominence_threshold) {
  if (x.size() != y.size()) throw ValidationError("find_peaks: axis length mismatch");
  if (x.size() < 3) throw ValidationError("find_peaks: need at least 3 points");

  std::vector<Peak> peaks;
  const std::size_t n = y.size();
  std::size_t i = 1;
  while (i + 1 < n) {
    if (!(y[i] > y[i - 1])) {
      ++i;
      continue;
    }
    // plateau handling: ties resolve to the leftmost point
    std::size_t j = i;
    while (j + 1 < n && y[j + 1] == y[i]) ++j;
    if (j + 1 >= n || !(y[j + 1] < y[i])) {
      i = j + 1;
      continue;
    }

    // topographic prominence: drop to the lowest point before a strictly
    // higher sample (or the boundary) on each side, take the higher base
    double left_base = y[i];
    for (std::size_t k = i; k-- > 0;) {
      left_base = std::min(left_base, y[k]);
      if (y[k] > y[i]) break;
    }
    double right_base = y[i];
    for (std::size_t k = j + 1; k < n; ++k) {
      right_base = std::min(right_base, y[k]);
      if (y[k] > y[i]) break;
    }
    const double prominence = y[i] - std::max(left_base, right_base);
    if (prominence >= prominence_threshold && prominence > 0.0) {
      peaks.push_back({x[i], y[i], prominence});
    }
    i = j + 1;
  }
  return peaks;
}

GapOptimum maximize_scalar(const std::function<double(double)>& objective, double lo,
                           double hi, double scan_step, double tol) {
  if (!(hi >= lo)) throw ValidationError("maximize: bounds must satisfy hi >= lo");
  if (!(scan_step > 0.0) || !(tol > 0.0)) {
    throw ValidationError("maximize: scan step and tolerance must be > 0");
  }
  if (hi == lo) return {lo, objective(lo)};

  GapOptimum best{lo, objective(lo)};
  for (double g = lo; g < hi + scan_step * 0.5; g += scan_step) {
    const double gg = std::min(g, hi);
    const double v = objective(gg);
    if (v > best.score) best = {gg, v};
    if (gg == hi) break;
  }

  // golden-section refinement of the bracket around the best scan point
  double a = std::max(lo, best.gap_nm - scan_step);
  double b = std::min(hi, best.gap_nm + scan_step);
  constexpr double kInvPhi = 0.6180339887498949;
  double x1 = b - kInvPhi * (b - a);
  double x2 = a + kInvPhi * (b - a);
  double f1 = objective(x1);
  double f2 = objective(x2);
  while (b - a > tol) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kInvPhi * (b - a);
      f2 = objective(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kInvPhi * (b - a);
      f1 = objective(x1);
    }
  }
  const double mid = 0.5 * (a + b);
  const double fmid = objective(mid);
  GapOptimum refined = f1 > f2 ? GapOptimum{x1, f1} : GapOptimum{x2, f2};
  if (fmid > refined.score) refined = {mid, fmid};

  // never return worse than the global scan
  return refined.score >= best.score ? refined : best;
}

GapOptimum optimize_gap(const LayerStack& stack_template, std::span<const GapTarget> targets,
                        double gap_lo_nm, double gap_hi_nm, const OptimizeOptions& options) {
  if (targets.empty()) throw ValidationError("optimize gap: no targets given");
  for (const auto& t : targets) {
    if (!(t.weight > 0.0)) throw ValidationError("optimize gap: weights must be > 0");
  }
  auto objective = [&](double gap) {
    const LayerStack stack = stack_template.with_airgap(gap);
    double score = 0.0;
    for (const auto& t : targets) {
      score += t.weight * detector_absorption(stack, t.wavelength_nm, options.polarization);
    }
    return score;
  };
  return maximize_scalar(objective, gap_lo_nm, gap_hi_nm, options.scan_step_nm,
                         options.refine_tol_nm);
}

double polarization_contrast(const LayerStack& stack_template, double wavelength_nm,
                             double gap_nm) {
  const LayerStack stack = stack_template.with_airgap(gap_nm);
  const double a_te = detector_absorption(stack, wavelength_nm, Polarization::TE);
  const double a_tm = detector_absorption(stack, wavelength_nm, Polarization::TM);
  if (!(a_tm > 0.0)) {
    throw NumericError("polarization contrast: TM absorption vanishes at " +
                       std::to_string(wavelength_nm) + " nm");
  }
  return a_te / a_tm;
}

}  // namespace snspd
