#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "core/dynamics.hpp"

namespace snspd {

struct SourceModel {
  enum class Kind { CW, Pulsed };

  Kind kind = Kind::CW;
  double rate_per_s = 0.0;              // CW
  double period_ns = 0.0;               // Pulsed
  double mean_photons_per_pulse = 0.0;  // Pulsed

  static SourceModel cw(double rate_per_s);
  static SourceModel pulsed(double period_ns, double mean_photons_per_pulse);
  void validate() const;
  std::string describe() const;
};

struct StreamMeta {
  std::uint64_t seed = 0;
  SourceModel source;
  double eta_max = 0.0;
  double jitter_fwhm_ps = 0.0;
  double dark_rate_per_s = 0.0;
  double duration_ns = 0.0;
  // recovery parameters recorded for provenance
  double t_blind_ns = 0.0;
  double tau_eff_ns = 0.0;
  double t_full_ns = 0.0;
  // bookkeeping
  std::uint64_t emitted_photons = 0;
  std::uint64_t source_detections = 0;
  std::uint64_t dark_counts = 0;
  std::uint64_t dropped_out_of_window = 0;
  std::uint64_t dropped_duplicate = 0;
};

// Strictly increasing detection timestamps with generation metadata.
class TimeTagStream {
public:
  TimeTagStream(std::vector<double> tags_ns, StreamMeta meta);

  const std::vector<double>& tags_ns() const noexcept { return tags_; }
  const StreamMeta& meta() const noexcept { return meta_; }
  std::size_t size() const noexcept { return tags_.size(); }

private:
  std::vector<double> tags_;
  StreamMeta meta_;
};

// Monte Carlo detection run: photons from the source process, thinned by
// eta_max * eta_rel(time since last registration); Gaussian timestamp jitter;
// independent uniform dark counts merged afterwards. Reproducible for a
// fixed (config, seed) pair.
TimeTagStream simulate_stream(const SourceModel& source, const RecoveryCurve& curve,
                              double eta_max, double jitter_fwhm_ps,
                              double dark_rate_per_s, double duration_ns,
                              std::uint64_t seed);

// Uniform-bin histogram. Bin j covers [lo + j*w, lo + (j+1)*w).
struct Histogram {
  double lo = 0.0;
  double bin_width = 0.0;
  std::vector<std::int64_t> counts;
  std::string unit = "ns";
  std::uint64_t discarded = 0;  // samples outside [lo, lo + n*w)

  std::size_t size() const noexcept { return counts.size(); }
  double edge(std::size_t i) const { return lo + static_cast<double>(i) * bin_width; }
  double center(std::size_t i) const { return lo + (static_cast<double>(i) + 0.5) * bin_width; }
  std::int64_t total() const;
};

Histogram histogram_from_samples(const std::vector<double>& samples, double lo,
                                 double bin_width, std::size_t bins,
                                 const std::string& unit);

// Histogram of consecutive inter-event delays ("subsequent detection events");
// delays beyond max_delay are discarded but counted.
Histogram autocorrelation_histogram(const TimeTagStream& stream, double bin_width_ns,
                                    double max_delay_ns);

// Fold a pulsed-source stream onto one period: residuals (tag - nearest pulse
// time) in ps, histogrammed over [-half_range, +half_range).
Histogram fold_pulsed_stream(const TimeTagStream& stream, double period_ns,
                             double bin_width_ps, double half_range_ps);

struct GaussianFit {
  double center = 0.0;     // histogram unit
  double sigma = 0.0;
  double fwhm = 0.0;       // 2*sqrt(2 ln 2) * sigma
  double amplitude = 0.0;
  double fwhm_std_error = 0.0;
  double goodness = 0.0;   // reduced residual norm
  int iterations = 0;
};

inline constexpr double kFwhmPerSigma = 2.3548200450309493;  // 2*sqrt(2 ln 2)

// Damped Gauss-Newton least-squares fit of a*exp(-(t-c)^2/(2 s^2)) to the bin
// centers; initial guess from histogram moments. Needs >= 5 nonzero bins.
GaussianFit fit_gaussian_irf(const Histogram& hist);

}  // namespace snspd
