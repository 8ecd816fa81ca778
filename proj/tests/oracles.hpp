#pragma once

// Independent reference implementations used to cross-check the library.
// Everything here is deliberately written from closed forms, not by calling
// the code under test.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

namespace oracles {

struct FilmResponse {
  double reflectance;
  double transmittance;
};

// Airy (single-film) closed form at normal incidence for a slab of index n1
// between semi-infinite media n0 and n2. Index convention n - i*k, forward
// propagation factor exp(-i*2*pi*N*d/lambda).
inline FilmResponse airy_single_film(std::complex<double> n0, std::complex<double> n1,
                                     std::complex<double> n2, double thickness_nm,
                                     double wavelength_nm) {
  using cd = std::complex<double>;
  const cd i(0.0, 1.0);
  const cd r01 = (n0 - n1) / (n0 + n1);
  const cd r12 = (n1 - n2) / (n1 + n2);
  const cd t01 = 2.0 * n0 / (n0 + n1);
  const cd t12 = 2.0 * n1 / (n1 + n2);
  const cd phase = 2.0 * 3.14159265358979323846 * n1 * thickness_nm / wavelength_nm;
  const cd one_way = std::exp(-i * phase);
  const cd round_trip = one_way * one_way;
  const cd denom = 1.0 + r01 * r12 * round_trip;
  const cd r = (r01 + r12 * round_trip) / denom;
  const cd t = t01 * t12 * one_way / denom;
  FilmResponse out;
  out.reflectance = std::norm(r);
  out.transmittance = n2.real() / n0.real() * std::norm(t);
  return out;
}

// Classic non-paralyzable dead-time correction: step recovery of length
// dead_time with detection probability eta for recovered arrivals.
inline double nonparalyzable_efficiency(double eta, double flux_per_s, double dead_time_ns) {
  const double flux_per_ns = flux_per_s * 1e-9;
  return eta / (1.0 + eta * flux_per_ns * dead_time_ns);
}

// One-sample Kolmogorov-Smirnov statistic against an exponential CDF with the
// given rate (per ns).
inline double ks_statistic_exponential(std::vector<double> samples, double rate_per_ns) {
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double cdf = 1.0 - std::exp(-rate_per_ns * samples[i]);
    const double hi = (static_cast<double>(i) + 1.0) / n;
    const double lo = static_cast<double>(i) / n;
    d = std::max(d, std::max(std::abs(cdf - hi), std::abs(cdf - lo)));
  }
  return d;
}

// Large-n critical value of the KS statistic at significance alpha.
inline double ks_critical(double n, double alpha) {
  return std::sqrt(-0.5 * std::log(alpha / 2.0)) / std::sqrt(n);
}

// Half-plateau crossing time of a recovery-shaped histogram: plateau level
// averaged over [plateau_lo, plateau_hi], counts box-smoothed (5 bins), and
// the crossing refined by a linear fit over +-10 bins around the first
// smoothed exceedance. Bin i is assumed to start at i * bin_width.
inline double half_plateau_crossing(const std::vector<std::int64_t>& counts,
                                    double bin_width, double plateau_lo,
                                    double plateau_hi) {
  const auto lo_bin = static_cast<std::size_t>(plateau_lo / bin_width);
  const auto hi_bin =
      std::min(static_cast<std::size_t>(plateau_hi / bin_width), counts.size());
  double plateau = 0.0;
  for (std::size_t i = lo_bin; i < hi_bin; ++i) plateau += static_cast<double>(counts[i]);
  plateau /= static_cast<double>(hi_bin - lo_bin);
  const double half = 0.5 * plateau;

  std::vector<double> smooth(counts.size(), 0.0);
  for (std::size_t i = 0; i < counts.size(); ++i) {
    double acc = 0.0;
    int k = 0;
    for (int d = -2; d <= 2; ++d) {
      const auto j = static_cast<long long>(i) + d;
      if (j < 0 || j >= static_cast<long long>(counts.size())) continue;
      acc += static_cast<double>(counts[static_cast<std::size_t>(j)]);
      ++k;
    }
    smooth[i] = acc / k;
  }
  std::size_t first = 0;
  while (first < smooth.size() && smooth[first] < half) ++first;
  if (first == smooth.size()) return -1.0;

  // least-squares line through the raw counts around the crossing
  const std::size_t fit_lo = first > 10 ? first - 10 : 0;
  const std::size_t fit_hi = std::min(first + 10, counts.size() - 1);
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0, n = 0.0;
  for (std::size_t i = fit_lo; i <= fit_hi; ++i) {
    const double x = (static_cast<double>(i) + 0.5) * bin_width;
    const double y = static_cast<double>(counts[i]);
    sx += x; sy += y; sxx += x * x; sxy += x * y; n += 1.0;
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const double intercept = (sy - slope * sx) / n;
  if (slope <= 0.0) return (static_cast<double>(first) + 0.5) * bin_width;
  return (half - intercept) / slope;
}

// Maximizer of w1*cos(2*pi*(g-a)/p) + w2*cos(2*pi*(g-b)/p): the sum is a
// single cosine with phase atan2-combined from the two terms.
inline double cosine_sum_maximizer(double w1, double a, double w2, double b, double period,
                                   double lo, double hi) {
  const double two_pi = 2.0 * 3.14159265358979323846;
  const double cx = w1 * std::cos(two_pi * a / period) + w2 * std::cos(two_pi * b / period);
  const double cy = w1 * std::sin(two_pi * a / period) + w2 * std::sin(two_pi * b / period);
  const double phase = std::atan2(cy, cx);  // maximum where 2*pi*g/p == phase (mod 2*pi)
  double g = phase / two_pi * period;
  while (g < lo) g += period;
  while (g > hi) g -= period;
  return g;
}

}  // namespace oracles
