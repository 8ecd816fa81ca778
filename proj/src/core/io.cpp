#include "core/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "core/errors.hpp"

namespace snspd {

namespace {

std::string format_fixed(double value, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, value);
  return buf;
}

double parse_number(const std::string& token, const std::string& origin,
                    std::size_t line_no) {
  try {
    std::size_t pos = 0;
    double v = std::stod(token, &pos);
    if (pos != token.size()) throw std::invalid_argument(token);
    return v;
  } catch (const std::exception&) {
    throw ValidationError(origin + ":" + std::to_string(line_no) + ": not a number: '" +
                          token + "'");
  }
}

}  // namespace

void save_timetags(const TimeTagStream& stream, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write time-tag file: " + path);
  const StreamMeta& m = stream.meta();
  out << "# snspd time-tag stream (ns, fixed-point 3 decimals)\n";
  out << "# seed: " << m.seed << "\n";
  out << "# source_kind: " << (m.source.kind == SourceModel::Kind::CW ? "cw" : "pulsed")
      << "\n";
  out << "# rate_per_s: " << m.source.rate_per_s << "\n";
  out << "# period_ns: " << m.source.period_ns << "\n";
  out << "# mean_photons_per_pulse: " << m.source.mean_photons_per_pulse << "\n";
  out << "# eta_max: " << m.eta_max << "\n";
  out << "# jitter_fwhm_ps: " << m.jitter_fwhm_ps << "\n";
  out << "# dark_rate_per_s: " << m.dark_rate_per_s << "\n";
  out << "# duration_ns: " << format_fixed(m.duration_ns, 3) << "\n";
  out << "# t_blind_ns: " << m.t_blind_ns << "\n";
  out << "# tau_eff_ns: " << m.tau_eff_ns << "\n";
  out << "# t_full_ns: " << m.t_full_ns << "\n";
  out << "# emitted_photons: " << m.emitted_photons << "\n";
  out << "# source_detections: " << m.source_detections << "\n";
  out << "# dark_counts: " << m.dark_counts << "\n";
  out << "# dropped_out_of_window: " << m.dropped_out_of_window << "\n";
  out << "# dropped_duplicate: " << m.dropped_duplicate << "\n";
  out << "# tags: " << stream.size() << "\n";
  for (double t : stream.tags_ns()) out << format_fixed(t, 3) << "\n";
  if (!out) throw ValidationError("write failed: " + path);
}

TimeTagStream load_timetags(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open time-tag file: " + path);
  std::map<std::string, std::string> header;
  std::vector<double> tags;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto colon = line.find(':');
      if (colon != std::string::npos) {
        std::string key = line.substr(1, colon - 1);
        std::string value = line.substr(colon + 1);
        auto strip = [](std::string& s) {
          while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.erase(s.begin());
          while (!s.empty() && (s.back() == ' ' || s.back() == '\r')) s.pop_back();
        };
        strip(key);
        strip(value);
        header[key] = value;
      }
      continue;
    }
    std::string token = line;
    if (!token.empty() && token.back() == '\r') token.pop_back();
    tags.push_back(parse_number(token, path, line_no));
  }

  auto fetch = [&](const char* key, double fallback) {
    auto it = header.find(key);
    return it == header.end() ? fallback : parse_number(it->second, path, 0);
  };

  StreamMeta meta;
  meta.seed = static_cast<std::uint64_t>(fetch("seed", 0));
  const auto kind_it = header.find("source_kind");
  if (kind_it != header.end() && kind_it->second == "pulsed") {
    meta.source.kind = SourceModel::Kind::Pulsed;
  }
  meta.source.rate_per_s = fetch("rate_per_s", 0.0);
  meta.source.period_ns = fetch("period_ns", 0.0);
  meta.source.mean_photons_per_pulse = fetch("mean_photons_per_pulse", 0.0);
  meta.eta_max = fetch("eta_max", 0.0);
  meta.jitter_fwhm_ps = fetch("jitter_fwhm_ps", 0.0);
  meta.dark_rate_per_s = fetch("dark_rate_per_s", 0.0);
  meta.duration_ns = fetch("duration_ns", tags.empty() ? 0.0 : tags.back());
  // fixed-point rounding may nudge the last tag past the stored duration
  if (!tags.empty()) meta.duration_ns = std::max(meta.duration_ns, tags.back());
  meta.t_blind_ns = fetch("t_blind_ns", 0.0);
  meta.tau_eff_ns = fetch("tau_eff_ns", 0.0);
  meta.t_full_ns = fetch("t_full_ns", 0.0);
  meta.emitted_photons = static_cast<std::uint64_t>(fetch("emitted_photons", 0));
  meta.source_detections = static_cast<std::uint64_t>(fetch("source_detections", 0));
  meta.dark_counts = static_cast<std::uint64_t>(fetch("dark_counts", 0));
  meta.dropped_out_of_window =
      static_cast<std::uint64_t>(fetch("dropped_out_of_window", 0));
  meta.dropped_duplicate = static_cast<std::uint64_t>(fetch("dropped_duplicate", 0));
  return TimeTagStream(std::move(tags), meta);
}

void save_histogram_csv(const Histogram& hist, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write histogram CSV: " + path);
  out << "# snspd histogram\n";
  out << "# discarded: " << hist.discarded << "\n";
  out << "bin_lo_" << hist.unit << ",bin_hi_" << hist.unit << ",count\n";
  for (std::size_t i = 0; i < hist.size(); ++i) {
    out << format_fixed(hist.edge(i), 6) << "," << format_fixed(hist.edge(i + 1), 6) << ","
        << hist.counts[i] << "\n";
  }
  if (!out) throw ValidationError("write failed: " + path);
}

Histogram load_histogram_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open histogram CSV: " + path);
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  std::string unit = "ns";
  std::uint64_t discarded = 0;
  std::vector<double> lows, highs;
  std::vector<std::int64_t> counts;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto pos = line.find("discarded:");
      if (pos != std::string::npos) {
        discarded = static_cast<std::uint64_t>(
            parse_number(line.substr(pos + 10), path, line_no));
      }
      continue;
    }
    std::stringstream ss(line);
    std::string f0, f1, f2;
    if (!std::getline(ss, f0, ',') || !std::getline(ss, f1, ',') || !std::getline(ss, f2)) {
      throw ValidationError(path + ":" + std::to_string(line_no) + ": expected 3 columns");
    }
    if (!header_seen) {
      if (f0.rfind("bin_lo_", 0) != 0 || f1.rfind("bin_hi_", 0) != 0 || f2 != "count") {
        throw ValidationError(path + ": expected header 'bin_lo_<unit>,bin_hi_<unit>,count'");
      }
      unit = f0.substr(7);
      header_seen = true;
      continue;
    }
    lows.push_back(parse_number(f0, path, line_no));
    highs.push_back(parse_number(f1, path, line_no));
    counts.push_back(static_cast<std::int64_t>(parse_number(f2, path, line_no)));
  }
  if (!header_seen || counts.empty()) {
    throw ValidationError(path + ": empty or headerless histogram");
  }
  Histogram hist;
  hist.unit = unit;
  hist.lo = lows.front();
  hist.bin_width = highs.front() - lows.front();
  hist.discarded = discarded;
  hist.counts = std::move(counts);
  if (!(hist.bin_width > 0.0)) throw ValidationError(path + ": non-positive bin width");
  for (std::size_t i = 0; i < hist.counts.size(); ++i) {
    const double expected_lo = hist.lo + static_cast<double>(i) * hist.bin_width;
    if (std::abs(lows[i] - expected_lo) > 1e-6 * std::max(1.0, std::abs(expected_lo)) ||
        std::abs(highs[i] - (expected_lo + hist.bin_width)) >
            1e-6 * std::max(1.0, std::abs(expected_lo))) {
      throw ValidationError(path + ": bins must be uniform and contiguous (row " +
                            std::to_string(i + 1) + ")");
    }
    if (hist.counts[i] < 0) throw ValidationError(path + ": negative count");
  }
  return hist;
}

}  // namespace snspd
