#include "core/timetag.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "core/errors.hpp"
#include "core/rng.hpp"

namespace snspd {

SourceModel SourceModel::cw(double rate_per_s) {
  SourceModel m;
  m.kind = Kind::CW;
  m.rate_per_s = rate_per_s;
  m.validate();
  return m;
}

SourceModel SourceModel::pulsed(double period_ns, double mean_photons_per_pulse) {
  SourceModel m;
  m.kind = Kind::Pulsed;
  m.period_ns = period_ns;
  m.mean_photons_per_pulse = mean_photons_per_pulse;
  m.validate();
  return m;
}

void SourceModel::validate() const {
  if (kind == Kind::CW) {
    if (rate_per_s < 0.0) throw ValidationError("cw source: rate must be >= 0");
  } else {
    if (!(period_ns > 0.0)) throw ValidationError("pulsed source: period must be > 0");
    if (mean_photons_per_pulse < 0.0) {
      throw ValidationError("pulsed source: mean photons per pulse must be >= 0");
    }
  }
}

std::string SourceModel::describe() const {
  std::ostringstream out;
  if (kind == Kind::CW) {
    out << "cw(rate=" << rate_per_s << "/s)";
  } else {
    out << "pulsed(period=" << period_ns << " ns, mean=" << mean_photons_per_pulse << ")";
  }
  return out.str();
}

TimeTagStream::TimeTagStream(std::vector<double> tags_ns, StreamMeta meta)
    : tags_(std::move(tags_ns)), meta_(meta) {
  for (std::size_t i = 0; i < tags_.size(); ++i) {
    if (tags_[i] < 0.0 || tags_[i] > meta_.duration_ns) {
      throw ValidationError("time-tag stream: tag outside [0, duration]");
    }
    if (i > 0 && !(tags_[i - 1] < tags_[i])) {
      throw ValidationError("time-tag stream: tags must be strictly increasing (index " +
                            std::to_string(i) + ")");
    }
  }
}

TimeTagStream simulate_stream(const SourceModel& source, const RecoveryCurve& curve,
                              double eta_max, double jitter_fwhm_ps,
                              double dark_rate_per_s, double duration_ns,
                              std::uint64_t seed) {
  source.validate();
  if (!(duration_ns > 0.0)) throw ValidationError("simulate: duration must be > 0");
  if (!(eta_max >= 0.0 && eta_max <= 1.0)) {
    throw ValidationError("simulate: eta_max must be in [0, 1]");
  }
  if (jitter_fwhm_ps < 0.0) throw ValidationError("simulate: jitter must be >= 0");
  if (dark_rate_per_s < 0.0) throw ValidationError("simulate: dark rate must be >= 0");

  StreamMeta meta;
  meta.seed = seed;
  meta.source = source;
  meta.eta_max = eta_max;
  meta.jitter_fwhm_ps = jitter_fwhm_ps;
  meta.dark_rate_per_s = dark_rate_per_s;
  meta.duration_ns = duration_ns;
  meta.t_blind_ns = curve.efficiency().t_blind_ns;
  meta.tau_eff_ns = curve.efficiency().tau_eff_ns;
  meta.t_full_ns = curve.efficiency().t_full_ns;

  Rng rng(seed);
  const double jitter_sigma_ns = jitter_fwhm_ps / 1000.0 / kFwhmPerSigma;

  std::vector<double> tags;
  double last_registration = -std::numeric_limits<double>::infinity();

  auto process_photon = [&](double t_ns) {
    ++meta.emitted_photons;
    const double p = eta_max * curve.efficiency_relative(t_ns - last_registration);
    if (p > 0.0 && rng.uniform() < p) {
      last_registration = t_ns;
      ++meta.source_detections;
      double stamp = t_ns;
      if (jitter_sigma_ns > 0.0) stamp += rng.gaussian(0.0, jitter_sigma_ns);
      if (stamp >= 0.0 && stamp <= duration_ns) {
        tags.push_back(stamp);
      } else {
        ++meta.dropped_out_of_window;
      }
    }
  };

  if (source.kind == SourceModel::Kind::CW) {
    const double rate_per_ns = source.rate_per_s * 1e-9;
    if (rate_per_ns > 0.0) {
      double t = rng.exponential(rate_per_ns);
      while (t <= duration_ns) {
        process_photon(t);
        t += rng.exponential(rate_per_ns);
      }
    }
  } else {
    const auto whole = static_cast<std::uint64_t>(source.mean_photons_per_pulse);
    const double fraction = source.mean_photons_per_pulse - static_cast<double>(whole);
    for (std::uint64_t pulse = 1;; ++pulse) {
      const double t = static_cast<double>(pulse) * source.period_ns;
      if (t > duration_ns) break;
      std::uint64_t photons = whole;
      if (fraction > 0.0 && rng.bernoulli(fraction)) ++photons;
      for (std::uint64_t i = 0; i < photons; ++i) process_photon(t);
    }
  }

  // darks: uniform over the window, merged after jitter
  if (dark_rate_per_s > 0.0) {
    const double mean_darks = dark_rate_per_s * 1e-9 * duration_ns;
    const std::uint64_t darks = rng.poisson(mean_darks);
    meta.dark_counts = darks;
    for (std::uint64_t i = 0; i < darks; ++i) {
      tags.push_back(rng.uniform() * duration_ns);
    }
  }

  std::sort(tags.begin(), tags.end());
  std::vector<double> unique_tags;
  unique_tags.reserve(tags.size());
  for (double t : tags) {
    if (!unique_tags.empty() && !(unique_tags.back() < t)) {
      ++meta.dropped_duplicate;
      continue;
    }
    unique_tags.push_back(t);
  }
  return TimeTagStream(std::move(unique_tags), meta);
}

std::int64_t Histogram::total() const {
  std::int64_t sum = 0;
  for (auto c : counts) sum += c;
  return sum;
}

Histogram histogram_from_samples(const std::vector<double>& samples, double lo,
                                 double bin_width, std::size_t bins,
                                 const std::string& unit) {
  if (!(bin_width > 0.0) || bins == 0) {
    throw ValidationError("histogram: bin width and count must be > 0");
  }
  Histogram hist;
  hist.lo = lo;
  hist.bin_width = bin_width;
  hist.unit = unit;
  hist.counts.assign(bins, 0);
  for (double s : samples) {
    const double offset = (s - lo) / bin_width;
    if (offset < 0.0 || offset >= static_cast<double>(bins)) {
      ++hist.discarded;
      continue;
    }
    ++hist.counts[static_cast<std::size_t>(offset)];
  }
  return hist;
}

Histogram autocorrelation_histogram(const TimeTagStream& stream, double bin_width_ns,
                                    double max_delay_ns) {
  if (stream.size() < 2) {
    throw InsufficientDataError("autocorrelation: need at least 2 tags, got " +
                                std::to_string(stream.size()));
  }
  if (!(bin_width_ns > 0.0) || !(max_delay_ns > bin_width_ns)) {
    throw ValidationError("autocorrelation: require bin width > 0 and max delay > bin width");
  }
  const auto bins = static_cast<std::size_t>(std::ceil(max_delay_ns / bin_width_ns));
  std::vector<double> delays;
  delays.reserve(stream.size() - 1);
  const auto& tags = stream.tags_ns();
  for (std::size_t i = 1; i < tags.size(); ++i) delays.push_back(tags[i] - tags[i - 1]);
  return histogram_from_samples(delays, 0.0, bin_width_ns, bins, "ns");
}

Histogram fold_pulsed_stream(const TimeTagStream& stream, double period_ns,
                             double bin_width_ps, double half_range_ps) {
  if (!(period_ns > 0.0)) throw ValidationError("fold: period must be > 0");
  if (!(bin_width_ps > 0.0) || !(half_range_ps > bin_width_ps)) {
    throw ValidationError("fold: require bin width > 0 and range > bin width");
  }
  std::vector<double> residuals_ps;
  residuals_ps.reserve(stream.size());
  for (double t : stream.tags_ns()) {
    const double nearest = std::round(t / period_ns) * period_ns;
    residuals_ps.push_back((t - nearest) * 1000.0);
  }
  const auto bins = static_cast<std::size_t>(std::ceil(2.0 * half_range_ps / bin_width_ps));
  return histogram_from_samples(residuals_ps, -half_range_ps, bin_width_ps, bins, "ps");
}

GaussianFit fit_gaussian_irf(const Histogram& hist) {
  std::vector<double> x;
  std::vector<double> y;
  std::size_t nonzero = 0;
  for (std::size_t i = 0; i < hist.size(); ++i) {
    x.push_back(hist.center(i));
    y.push_back(static_cast<double>(hist.counts[i]));
    if (hist.counts[i] != 0) ++nonzero;
  }
  if (nonzero < 5) {
    throw InsufficientDataError("gaussian fit: need at least 5 nonzero bins, got " +
                                std::to_string(nonzero));
  }

  // moment-based initial guess
  double total = 0.0, mean = 0.0;
  double amp0 = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    total += y[i];
    mean += y[i] * x[i];
    amp0 = std::max(amp0, y[i]);
  }
  mean /= total;
  double var = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) var += y[i] * (x[i] - mean) * (x[i] - mean);
  var /= total;
  double sigma0 = std::sqrt(std::max(var, hist.bin_width * hist.bin_width / 4.0));

  double a = amp0, c = mean, s = sigma0;
  const std::size_t n = x.size();

  auto cost_of = [&](double pa, double pc, double ps) {
    double cost = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double z = (x[i] - pc) / ps;
      const double r = pa * std::exp(-0.5 * z * z) - y[i];
      cost += r * r;
    }
    return cost;
  };

  double lambda = 1e-3;
  double cost = cost_of(a, c, s);
  int iterations = 0;
  bool converged = false;
  double jtj[3][3];
  double jtr[3];

  for (; iterations < 200; ++iterations) {
    for (auto& row : jtj) row[0] = row[1] = row[2] = 0.0;
    jtr[0] = jtr[1] = jtr[2] = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double z = (x[i] - c) / s;
      const double g = std::exp(-0.5 * z * z);
      const double r = a * g - y[i];
      const double j0 = g;
      const double j1 = a * g * z / s;
      const double j2 = a * g * z * z / s;
      jtj[0][0] += j0 * j0; jtj[0][1] += j0 * j1; jtj[0][2] += j0 * j2;
      jtj[1][1] += j1 * j1; jtj[1][2] += j1 * j2; jtj[2][2] += j2 * j2;
      jtr[0] += j0 * r; jtr[1] += j1 * r; jtr[2] += j2 * r;
    }
    jtj[1][0] = jtj[0][1]; jtj[2][0] = jtj[0][2]; jtj[2][1] = jtj[1][2];

    // damped normal equations (Levenberg), 3x3 Gaussian elimination
    double m[3][4];
    for (int row = 0; row < 3; ++row) {
      for (int col = 0; col < 3; ++col) m[row][col] = jtj[row][col];
      m[row][row] *= 1.0 + lambda;
      m[row][3] = -jtr[row];
    }
    bool singular = false;
    for (int col = 0; col < 3 && !singular; ++col) {
      int pivot = col;
      for (int row = col + 1; row < 3; ++row) {
        if (std::abs(m[row][col]) > std::abs(m[pivot][col])) pivot = row;
      }
      if (std::abs(m[pivot][col]) < 1e-300) {
        singular = true;
        break;
      }
      std::swap(m[col], m[pivot]);
      for (int row = col + 1; row < 3; ++row) {
        const double f = m[row][col] / m[col][col];
        for (int k = col; k < 4; ++k) m[row][k] -= f * m[col][k];
      }
    }
    if (singular) {
      lambda *= 10.0;
      continue;
    }
    double step[3];
    for (int row = 2; row >= 0; --row) {
      double acc = m[row][3];
      for (int col = row + 1; col < 3; ++col) acc -= m[row][col] * step[col];
      step[row] = acc / m[row][row];
    }

    const double na = a + step[0];
    const double nc = c + step[1];
    const double ns = s + step[2];
    if (!(ns > 0.0) || !std::isfinite(na) || !std::isfinite(nc) || !std::isfinite(ns)) {
      lambda *= 10.0;
      continue;
    }
    const double new_cost = cost_of(na, nc, ns);
    if (new_cost <= cost) {
      const double improvement = cost - new_cost;
      a = na; c = nc; s = ns;
      cost = new_cost;
      lambda = std::max(lambda / 3.0, 1e-12);
      if (improvement <= 1e-12 * std::max(cost, 1e-300)) {
        converged = true;
        break;
      }
    } else {
      lambda *= 10.0;
      if (lambda > 1e12) break;
    }
  }
  if (!converged && iterations >= 200) {
    std::ostringstream msg;
    msg << "gaussian fit: no convergence after 200 damped iterations (residual norm "
        << std::sqrt(cost) << ")";
    throw NumericError(msg.str());
  }

  // covariance from the undamped normal matrix at the solution
  for (auto& row : jtj) row[0] = row[1] = row[2] = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double z = (x[i] - c) / s;
    const double g = std::exp(-0.5 * z * z);
    const double j0 = g;
    const double j1 = a * g * z / s;
    const double j2 = a * g * z * z / s;
    jtj[0][0] += j0 * j0; jtj[0][1] += j0 * j1; jtj[0][2] += j0 * j2;
    jtj[1][1] += j1 * j1; jtj[1][2] += j1 * j2; jtj[2][2] += j2 * j2;
  }
  jtj[1][0] = jtj[0][1]; jtj[2][0] = jtj[0][2]; jtj[2][1] = jtj[1][2];

  // invert 3x3 via adjugate
  const double det = jtj[0][0] * (jtj[1][1] * jtj[2][2] - jtj[1][2] * jtj[2][1]) -
                     jtj[0][1] * (jtj[1][0] * jtj[2][2] - jtj[1][2] * jtj[2][0]) +
                     jtj[0][2] * (jtj[1][0] * jtj[2][1] - jtj[1][1] * jtj[2][0]);
  double sigma_s_sq = 0.0;
  if (std::abs(det) > 1e-300 && n > 3) {
    const double inv_ss = (jtj[0][0] * jtj[1][1] - jtj[0][1] * jtj[1][0]) / det;
    const double residual_var = cost / static_cast<double>(n - 3);
    sigma_s_sq = std::max(0.0, inv_ss * residual_var);
  }

  GaussianFit fit;
  fit.center = c;
  fit.sigma = s;
  fit.fwhm = kFwhmPerSigma * s;
  fit.amplitude = a;
  fit.fwhm_std_error = kFwhmPerSigma * std::sqrt(sigma_s_sq);
  fit.goodness = n > 3 ? std::sqrt(cost / static_cast<double>(n - 3)) : std::sqrt(cost);
  fit.iterations = iterations;
  return fit;
}

}  // namespace snspd
