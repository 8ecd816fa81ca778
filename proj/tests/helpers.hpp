#pragma once

// Shared fixtures: the illustrative membrane cavity built from the data/
// dispersion tables.

#include <string>

#include "core/log.hpp"
#include "core/materials.hpp"
#include "core/tmm.hpp"

#ifndef SNSPD_DATA_DIR
#define SNSPD_DATA_DIR "data"
#endif

namespace fixtures {

// keep round-off clamp warnings out of test output; responses still carry
// their clamp counters
struct QuietLogs {
  QuietLogs() {
    snspd::set_log_handler([](const char*, void*) {}, nullptr);
  }
};
inline const QuietLogs quiet_logs{};

inline std::string data_path(const std::string& relative) {
  return std::string(SNSPD_DATA_DIR) + "/" + relative;
}

inline snspd::MaterialLibrary standard_materials() {
  snspd::MaterialLibrary lib;
  lib.add(snspd::DispersionTable::from_csv_file("SiO2", data_path("materials/sio2.csv")));
  lib.add(snspd::DispersionTable::from_csv_file(
      "NbTiN", data_path("materials/nbtin_illustrative.csv")));
  lib.add(snspd::DispersionTable::from_csv_file("Au",
                                                data_path("materials/au_illustrative.csv")));
  lib.add(snspd::DispersionTable::from_csv_file("Air", data_path("materials/air.csv")));
  return lib;
}

// 70/140 nm line/pitch meander, 8 nm film, 8 um radius.
inline snspd::MeanderGeometry standard_meander() {
  return {70.0, 140.0, 8.0, 8.0};
}

inline snspd::LayerStack membrane_stack(const snspd::MaterialLibrary& lib,
                                        double airgap_nm) {
  snspd::MembraneCavityParams params;
  params.fiber = lib.get("SiO2");
  params.gap = lib.get("Air");
  params.wire = lib.get("NbTiN");
  params.spacer = lib.get("SiO2");
  params.mirror = lib.get("Au");
  params.exit = lib.get("Air");
  params.meander = standard_meander();
  params.airgap_nm = airgap_nm;
  return snspd::membrane_cavity_v1(params);
}

}  // namespace fixtures
