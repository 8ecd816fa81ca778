#pragma once

#include <string>

#include "core/timetag.hpp"

namespace snspd {

// Time-tag text format: '#'-prefixed metadata header, then one timestamp per
// line in ns with fixed-point 3 decimals.
void save_timetags(const TimeTagStream& stream, const std::string& path);
TimeTagStream load_timetags(const std::string& path);

// Histogram CSV: comment header, then "bin_lo_<unit>,bin_hi_<unit>,count".
void save_histogram_csv(const Histogram& hist, const std::string& path);
Histogram load_histogram_csv(const std::string& path);

}  // namespace snspd
