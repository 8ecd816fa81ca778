#pragma once

#include <functional>
#include <span>
#include <vector>

#include "core/tmm.hpp"

namespace snspd {

struct SweepGrid {
  std::vector<double> wavelengths_nm;  // strictly increasing
  std::vector<double> airgaps_nm;      // strictly increasing
  Polarization polarization = Polarization::TE;

  void validate() const;
  static std::vector<double> linspace_step(double start, double stop, double step);
};

// Meander absorptance over a (airgap x wavelength) grid, row-major by gap.
struct AbsorptionMap {
  SweepGrid grid;
  std::vector<double> values;  // size = airgaps * wavelengths

  double at(std::size_t gap_index, std::size_t wavelength_index) const {
    return values[gap_index * grid.wavelengths_nm.size() + wavelength_index];
  }
};

struct Peak {
  double wavelength_nm;
  double absorption;
  double prominence;
};

inline constexpr double kDefaultPeakProminence = 0.02;

AbsorptionMap sweep(const LayerStack& stack_template, const SweepGrid& grid);

// Local maxima of y(x) with topographic prominence >= threshold. Plateaus
// report their leftmost point; output sorted by x.
std::vector<Peak> find_peaks(std::span<const double> x, std::span<const double> y,
                             double prominence_threshold);

struct GapTarget {
  double wavelength_nm;
  double weight;
};

struct OptimizeOptions {
  double scan_step_nm = 5.0;       // dense global scan resolution
  double refine_tol_nm = 0.1;      // golden-section bracket width at exit
  Polarization polarization = Polarization::TE;
};

struct GapOptimum {
  double gap_nm;
  double score;  // weighted sum of meander absorptances
};

// Maximize sum_i w_i * A(lambda_i, gap) over [lo, hi]: dense scan picks the
// best bracket, golden-section refines it. Deterministic for fixed options.
GapOptimum optimize_gap(const LayerStack& stack_template, std::span<const GapTarget> targets,
                        double gap_lo_nm, double gap_hi_nm,
                        const OptimizeOptions& options = {});

// Scan + golden-section maximizer for a scalar function; optimize_gap wraps
// this. Exposed so synthetic objectives can exercise the search directly.
GapOptimum maximize_scalar(const std::function<double(double)>& objective, double lo,
                           double hi, double scan_step, double tol);

// A_TE / A_TM of the meander at the given gap. Errors when A_TM vanishes.
double polarization_contrast(const LayerStack& stack_template, double wavelength_nm,
                             double gap_nm);

}  // namespace snspd
