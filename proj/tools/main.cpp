// snspd command-line front end. Functionality comes exclusively through the
// shared library's C API (snspd.h); this translation unit only parses flags
// and config files, moves buffers around and writes output files.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "snspd.h"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CliError {
  int exit_code;
  std::string message;
};

[[noreturn]] void fail(int code, const std::string& message) {
  throw CliError{code, message};
}

[[noreturn]] void fail_api(snspd_status status, const std::string& context) {
  throw CliError{static_cast<int>(status), context + ": " + snspd_last_error()};
}

void check(snspd_status status, const std::string& context) {
  if (status != SNSPD_OK) fail_api(status, context);
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) fail(2, "cannot open file: " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

json load_json(const fs::path& path) {
  try {
    return json::parse(read_file(path));
  } catch (const json::exception& e) {
    fail(2, path.string() + ": invalid JSON: " + e.what());
  }
}

fs::path resolve(const fs::path& base_dir, const std::string& maybe_relative) {
  fs::path p(maybe_relative);
  return p.is_absolute() ? p : base_dir / p;
}

// ---------------------------------------------------------------- handles

struct Materials {
  snspd_materials* ptr = snspd_materials_new();
  ~Materials() { snspd_materials_free(ptr); }
  Materials() = default;
  Materials(const Materials&) = delete;
  Materials& operator=(const Materials&) = delete;
};

struct Stack {
  snspd_stack* ptr = nullptr;
  ~Stack() { snspd_stack_free(ptr); }
};

struct Chain {
  snspd_chain* ptr = nullptr;
  ~Chain() { snspd_chain_free(ptr); }
};

struct Recovery {
  snspd_recovery* ptr = nullptr;
  ~Recovery() { snspd_recovery_free(ptr); }
};

struct Stream {
  snspd_stream* ptr = nullptr;
  ~Stream() { snspd_stream_free(ptr); }
};

struct Hist {
  snspd_histogram* ptr = nullptr;
  ~Hist() { snspd_histogram_free(ptr); }
};

// ---------------------------------------------------------------- config

// Shared context: config content, its directory (for relative paths), the
// output directory and the resolved-config echo that goes into every output.
struct Run {
  json config;
  fs::path config_dir;
  fs::path out_dir;
  std::string format = "json-text";  // or "csv"
  std::optional<std::uint64_t> seed_flag;
  json resolved = json::object();

  fs::path out(const std::string& name) const { return out_dir / name; }
};

void load_materials(Run& run, Materials& materials) {
  if (!run.config.contains("materials") || !run.config.at("materials").is_object()) {
    fail(2, "config needs a 'materials' object (name -> {csv: path} or {n, k})");
  }
  for (const auto& [name, spec] : run.config.at("materials").items()) {
    if (spec.is_object() && spec.contains("csv")) {
      const fs::path path = resolve(run.config_dir, spec.at("csv").get<std::string>());
      // echo absolute paths so the embedded config re-runs from anywhere
      run.resolved["materials"][name]["csv"] = fs::absolute(path).string();
      check(snspd_materials_load_csv(materials.ptr, name.c_str(), path.string().c_str()),
            "loading material '" + name + "'");
    } else if (spec.is_object() && spec.contains("n")) {
      check(snspd_materials_add_constant(materials.ptr, name.c_str(),
                                         spec.at("n").get<double>(),
                                         spec.value("k", 0.0)),
            "adding material '" + name + "'");
    } else {
      fail(2, "material '" + name + "': expected {\"csv\": path} or {\"n\":..,\"k\":..}");
    }
  }
}

void load_stack(Run& run, const Materials& materials, Stack& stack) {
  if (!run.config.contains("stack")) fail(2, "config needs a 'stack' entry");
  const json& spec = run.config.at("stack");
  std::string text;
  if (spec.is_object() && spec.contains("file")) {
    const fs::path path = resolve(run.config_dir, spec.at("file").get<std::string>());
    run.resolved["stack"]["file"] = fs::absolute(path).string();
    text = read_file(path);
  } else if (spec.is_object()) {
    text = spec.dump();
  } else {
    fail(2, "'stack' must be an object (inline description or {\"file\": path})");
  }
  check(snspd_stack_from_json(materials.ptr, text.c_str(), &stack.ptr), "building stack");
  if (run.config.contains("airgap_nm")) {
    check(snspd_stack_set_airgap(stack.ptr, run.config.at("airgap_nm").get<double>()),
          "setting airgap");
  }
}

snspd_polarization polarization_of(const Run& run) {
  const std::string pol = run.config.value("polarization", "TE");
  if (pol == "TE" || pol == "te") return SNSPD_POL_TE;
  if (pol == "TM" || pol == "tm") return SNSPD_POL_TM;
  fail(2, "polarization must be TE or TM, got '" + pol + "'");
}

void load_chain(const json& spec, Chain& chain) {
  if (spec.contains("ratio_db")) {
    // plain pre-calibrated chain; widen the band to exactly this ratio
    const double ratio = spec.at("ratio_db").get<double>();
    check(snspd_chain_new(ratio, nullptr, 0, spec.value("band_lo_db", ratio),
                          spec.value("band_hi_db", ratio), &chain.ptr),
          "building attenuation chain");
    return;
  }
  std::vector<double> nd;
  if (spec.contains("nd_stages_db")) {
    for (const auto& v : spec.at("nd_stages_db")) nd.push_back(v.get<double>());
  }
  check(snspd_chain_new(spec.value("splitter_ratio_db", 0.0), nd.data(), nd.size(),
                        spec.value("band_lo_db", 50.0), spec.value("band_hi_db", 60.0),
                        &chain.ptr),
        "building attenuation chain");
  if (spec.contains("calibration")) {
    std::vector<double> p1, p2;
    for (const auto& reading : spec.at("calibration")) {
      p1.push_back(reading.at("p1_w").get<double>());
      p2.push_back(reading.at("p2_w").get<double>());
    }
    check(snspd_chain_calibrate(chain.ptr, p1.data(), p2.data(), p1.size()),
          "calibrating attenuation chain");
  }
}

void load_recovery(const json& spec, Recovery& recovery) {
  if (spec.is_string()) {
    check(snspd_recovery_preset(spec.get<std::string>().c_str(), &recovery.ptr),
          "loading recovery preset");
    return;
  }
  if (!spec.is_object()) fail(2, "'recovery' must be a preset name or parameter object");
  snspd_recovery_params params{};
  if (spec.contains("electrical")) {
    const json& e = spec.at("electrical");
    check(snspd_pulse_from_electrical(e.at("kinetic_inductance_nh").get<double>(),
                                      e.at("load_resistance_ohm").get<double>(),
                                      e.at("hotspot_resistance_ohm").get<double>(),
                                      &params.tau_rise_ns, &params.tau_fall_ns),
          "deriving pulse constants");
  } else {
    params.tau_rise_ns = spec.value("tau_rise_ns", 0.0);
    params.tau_fall_ns = spec.at("tau_fall_ns").get<double>();
  }
  params.t_blind_ns = spec.at("t_blind_ns").get<double>();
  params.tau_eff_ns = spec.at("tau_eff_ns").get<double>();
  params.t_full_ns = spec.value("t_full_ns", std::numeric_limits<double>::infinity());
  params.full_recovery_fraction = spec.value("full_recovery_fraction", 0.99);
  check(snspd_recovery_new(&params, &recovery.ptr), "building recovery curve");
}

std::uint64_t required_seed(const Run& run) {
  if (run.seed_flag) return *run.seed_flag;
  if (run.config.contains("seed")) return run.config.at("seed").get<std::uint64_t>();
  fail(2, "stochastic command needs a seed (config \"seed\" or --seed)");
}

// ---------------------------------------------------------------- output

std::string config_comment(const Run& run) {
  return "# config: " + run.resolved.dump() + "\n";
}

void write_text_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) fail(2, "cannot write: " + path.string());
  out << content;
  if (!out) fail(2, "write failed: " + path.string());
}

void write_report(const Run& run, const std::string& stem, const json& body,
                  const std::string& csv_table) {
  json report = body;
  report["config"] = run.resolved;
  if (run.format == "csv") {
    write_text_file(run.out(stem + ".csv"), config_comment(run) + csv_table);
  } else {
    write_text_file(run.out(stem + ".json"), report.dump(2) + "\n");
  }
}

void append_run_log(const Run& run, const std::string& command) {
  std::ofstream log(run.out("run.log"), std::ios::app);
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char stamp[64];
  std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%S", std::gmtime(&now));
  log << stamp << "Z " << command << " seed="
      << (run.seed_flag ? std::to_string(*run.seed_flag) : std::string("-")) << "\n";
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

// ---------------------------------------------------------------- commands

int cmd_solve(Run& run) {
  Materials materials;
  load_materials(run, materials);
  Stack stack;
  load_stack(run, materials, stack);
  const double wavelength = run.config.at("wavelength_nm").get<double>();
  const snspd_polarization pol = polarization_of(run);

  const size_t layers = snspd_stack_layer_count(stack.ptr);
  std::vector<double> absorptance(layers, 0.0);
  double reflectance = 0.0, transmittance = 0.0;
  check(snspd_stack_solve(stack.ptr, wavelength, pol, &reflectance, &transmittance,
                          absorptance.data()),
        "solving stack");

  double total_absorption = 0.0;
  for (double a : absorptance) total_absorption += a;
  const double conservation = reflectance + transmittance + total_absorption;

  json body;
  body["wavelength_nm"] = wavelength;
  body["polarization"] = pol == SNSPD_POL_TE ? "TE" : "TM";
  body["reflectance"] = reflectance;
  body["transmittance"] = transmittance;
  body["layer_absorptance"] = absorptance;
  body["total_absorptance"] = total_absorption;
  body["conservation_sum"] = conservation;
  const int meander = snspd_stack_meander_index(stack.ptr);
  if (meander >= 0) body["detector_absorption"] = absorptance[static_cast<size_t>(meander)];

  std::ostringstream csv;
  csv << "quantity,value\n";
  csv << "reflectance," << format_double(reflectance) << "\n";
  csv << "transmittance," << format_double(transmittance) << "\n";
  for (size_t i = 0; i < layers; ++i) {
    csv << "absorptance_layer_" << i << "," << format_double(absorptance[i]) << "\n";
  }
  csv << "conservation_sum," << format_double(conservation) << "\n";
  write_report(run, "solve_report", body, csv.str());

  std::printf("R=%.6f T=%.6g A_total=%.6f (R+T+A=%.12f)\n", reflectance, transmittance,
              total_absorption, conservation);
  if (meander >= 0) {
    std::printf("detector_absorption=%.6f\n", absorptance[static_cast<size_t>(meander)]);
  }
  return 0;
}

int cmd_sweep(Run& run) {
  Materials materials;
  load_materials(run, materials);
  Stack stack;
  load_stack(run, materials, stack);
  const snspd_polarization pol = polarization_of(run);

  auto axis_from = [&](const json& spec) {
    std::vector<double> axis;
    if (spec.is_array()) {
      for (const auto& v : spec) axis.push_back(v.get<double>());
    } else {
      const double start = spec.at("start").get<double>();
      const double stop = spec.at("stop").get<double>();
      const double step = spec.at("step").get<double>();
      if (!(step > 0.0) || !(stop >= start)) fail(2, "grid axis: bad start/stop/step");
      for (double v = start; v <= stop + 1e-9 * step; v += step) axis.push_back(v);
    }
    return axis;
  };
  const json& grid = run.config.at("grid");
  // paper-style defaults: 1260-1650 nm, 0-10 um
  const std::vector<double> wavelengths = grid.contains("wavelengths_nm")
      ? axis_from(grid.at("wavelengths_nm"))
      : axis_from(json{{"start", 1260.0}, {"stop", 1650.0}, {"step", 1.0}});
  const std::vector<double> gaps = grid.contains("airgaps_nm")
      ? axis_from(grid.at("airgaps_nm"))
      : axis_from(json{{"start", 0.0}, {"stop", 10000.0}, {"step", 50.0}});

  std::vector<double> values(wavelengths.size() * gaps.size(), 0.0);
  check(snspd_stack_sweep(stack.ptr, gaps.data(), gaps.size(), wavelengths.data(),
                          wavelengths.size(), pol, values.data()),
        "sweeping");

  std::ostringstream map_csv;
  map_csv << config_comment(run);
  map_csv << "gap_nm,wavelength_nm,absorption\n";
  for (size_t gi = 0; gi < gaps.size(); ++gi) {
    for (size_t wi = 0; wi < wavelengths.size(); ++wi) {
      map_csv << format_double(gaps[gi]) << "," << format_double(wavelengths[wi]) << ","
              << format_double(values[gi * wavelengths.size() + wi]) << "\n";
    }
  }
  write_text_file(run.out("map.csv"), map_csv.str());

  if (run.config.contains("peaks")) {
    const json& peaks_spec = run.config.at("peaks");
    const double gap = peaks_spec.at("gap_nm").get<double>();
    const double prominence = peaks_spec.value("prominence", 0.02);
    check(snspd_stack_set_airgap(stack.ptr, gap), "setting cutline gap");
    std::vector<double> cutline(wavelengths.size(), 0.0);
    check(snspd_stack_sweep(stack.ptr, &gap, 1, wavelengths.data(), wavelengths.size(),
                            pol, cutline.data()),
          "evaluating cutline");
    size_t found = 0;
    check(snspd_find_peaks(wavelengths.data(), cutline.data(), wavelengths.size(),
                           prominence, nullptr, 0, &found),
          "finding peaks");
    std::vector<snspd_peak> peaks(found);
    if (found > 0) {
      check(snspd_find_peaks(wavelengths.data(), cutline.data(), wavelengths.size(),
                             prominence, peaks.data(), peaks.size(), &found),
            "finding peaks");
    }
    std::ostringstream peaks_csv;
    peaks_csv << config_comment(run);
    peaks_csv << "wavelength_nm,absorption,prominence\n";
    for (const auto& p : peaks) {
      peaks_csv << format_double(p.wavelength_nm) << "," << format_double(p.absorption)
                << "," << format_double(p.prominence) << "\n";
    }
    write_text_file(run.out("peaks.csv"), peaks_csv.str());
    std::printf("sweep: %zu x %zu map written, %zu peak(s) at gap %.1f nm\n", gaps.size(),
                wavelengths.size(), found, gap);
  } else {
    std::printf("sweep: %zu x %zu map written\n", gaps.size(), wavelengths.size());
  }
  return 0;
}

int cmd_optimize(Run& run) {
  Materials materials;
  load_materials(run, materials);
  Stack stack;
  load_stack(run, materials, stack);
  const snspd_polarization pol = polarization_of(run);

  std::vector<double> target_wl, weights;
  for (const auto& t : run.config.at("targets")) {
    target_wl.push_back(t.at("wavelength_nm").get<double>());
    weights.push_back(t.value("weight", 1.0));
  }
  const auto& bounds = run.config.at("gap_bounds_nm");
  const double lo = bounds.at(0).get<double>();
  const double hi = bounds.at(1).get<double>();
  const double scan_step = run.config.value("scan_step_nm", 5.0);
  const double tol = run.config.value("refine_tol_nm", 0.1);

  double best_gap = 0.0, best_score = 0.0;
  check(snspd_stack_optimize_gap(stack.ptr, target_wl.data(), weights.data(),
                                 target_wl.size(), pol, lo, hi, scan_step, tol, &best_gap,
                                 &best_score),
        "optimizing gap");

  check(snspd_stack_set_airgap(stack.ptr, best_gap), "setting optimal gap");
  json per_target = json::array();
  std::ostringstream csv;
  csv << "wavelength_nm,weight,absorption\n";
  for (size_t i = 0; i < target_wl.size(); ++i) {
    double absorption = 0.0;
    check(snspd_stack_detector_absorption(stack.ptr, target_wl[i], pol, &absorption),
          "evaluating optimum");
    per_target.push_back({{"wavelength_nm", target_wl[i]},
                          {"weight", weights[i]},
                          {"absorption", absorption}});
    csv << format_double(target_wl[i]) << "," << format_double(weights[i]) << ","
        << format_double(absorption) << "\n";
  }
  json body;
  body["best_gap_nm"] = best_gap;
  body["score"] = best_score;
  body["targets"] = per_target;
  write_report(run, "optimize_report", body,
               "best_gap_nm," + format_double(best_gap) + "\nscore," +
                   format_double(best_score) + "\n" + csv.str());
  std::printf("optimize: best gap %.2f nm, score %.6f\n", best_gap, best_score);
  return 0;
}

int cmd_flux(Run& run) {
  Chain chain;
  load_chain(run.config.at("chain"), chain);
  const double p_monitor = run.config.at("p_monitor_w").get<double>();
  const double wavelength = run.config.at("wavelength_nm").get<double>();

  double ratio_db = 0.0;
  check(snspd_chain_ratio_db(chain.ptr, &ratio_db), "resolving chain ratio");
  double power = 0.0, flux = 0.0;
  check(snspd_photon_flux(p_monitor, chain.ptr, wavelength, &power, &flux),
        "computing photon flux");

  json body;
  body["p_monitor_w"] = p_monitor;
  body["wavelength_nm"] = wavelength;
  body["ratio_db"] = ratio_db;
  body["power_at_detector_w"] = power;
  body["flux_per_s"] = flux;
  std::ostringstream csv;
  csv << "quantity,value\n";
  csv << "p_monitor_w," << format_double(p_monitor) << "\n";
  csv << "wavelength_nm," << format_double(wavelength) << "\n";
  csv << "ratio_db," << format_double(ratio_db) << "\n";
  csv << "power_at_detector_w," << format_double(power) << "\n";
  csv << "flux_per_s," << format_double(flux) << "\n";
  write_report(run, "flux_report", body, csv.str());
  std::printf("flux: %.4g photons/s at the detector (%.4g W)\n", flux, power);
  return 0;
}

double resolve_r_rfl(const json& spec) {
  if (spec.is_number()) return spec.get<double>();
  if (spec.is_object() && spec.contains("fresnel")) {
    const json& f = spec.at("fresnel");
    double reflection = 0.0;
    check(snspd_fresnel_reflection(f.at("n_core").get<double>(),
                                   f.at("n_outside").get<double>(), &reflection),
          "computing end-face reflection");
    return reflection;
  }
  fail(2, "'r_rfl' must be a number or {\"fresnel\": {\"n_core\":..,\"n_outside\":..}}");
}

int cmd_sde(Run& run) {
  const fs::path session_path =
      resolve(run.config_dir, run.config.at("session").get<std::string>());
  const json session = load_json(session_path);
  run.resolved["session"] = fs::absolute(session_path).string();
  run.resolved["session_content"] = session;

  Chain chain;
  if (session.contains("chain")) {
    load_chain(session.at("chain"), chain);
  } else {
    json chain_spec = json::object();
    if (session.contains("ratio_band_db")) {
      chain_spec["band_lo_db"] = session.at("ratio_band_db").at(0);
      chain_spec["band_hi_db"] = session.at("ratio_band_db").at(1);
    }
    if (session.contains("calibration")) chain_spec["calibration"] = session.at("calibration");
    load_chain(chain_spec, chain);
  }
  double ratio_db = 0.0;
  check(snspd_chain_ratio_db(chain.ptr, &ratio_db), "resolving chain ratio");

  const double r_rfl = resolve_r_rfl(run.config.at("r_rfl"));

  double total_uncertainty = 0.0;
  json budget = json::array();
  if (run.config.contains("uncertainty_components")) {
    std::vector<double> components;
    for (const auto& c : run.config.at("uncertainty_components")) {
      components.push_back(c.at("percent").get<double>() / 100.0);
      budget.push_back(c);
    }
    check(snspd_combine_uncertainty(components.data(), components.size(),
                                    &total_uncertainty),
          "combining uncertainty");
  }

  // readings renormalize onto the reference meter if the session names one
  double meter_factor = 1.0;
  std::string meter_label = "reference";
  if (session.contains("power_meter")) {
    const json& meter = session.at("power_meter");
    meter_factor = meter.value("calibration_factor", 1.0);
    meter_label = meter.value("label", meter_label);
    if (!(meter_factor > 0.0)) fail(2, "power_meter.calibration_factor must be > 0");
  }

  const double default_wavelength = session.value("wavelength_nm", 0.0);
  std::ostringstream csv;
  csv << config_comment(run);
  csv << "timestamp,p1_w,wavelength_nm,counts_per_s,dark_per_s,power_at_detector_w,"
         "flux_per_s,sde,relative_uncertainty,over_unity\n";
  json rows = json::array();
  for (const auto& record : session.at("records")) {
    const double p1 = record.at("p1_w").get<double>() * meter_factor;
    const double wavelength = record.value("wavelength_nm", default_wavelength);
    const double counts = record.at("counts_per_s").get<double>();
    const double dark = record.value("dark_per_s", 0.0);
    double power = 0.0, flux = 0.0;
    check(snspd_photon_flux(p1, chain.ptr, wavelength, &power, &flux),
          "photon flux for record");
    double sde = 0.0;
    int over_unity = 0;
    check(snspd_compute_sde(counts, dark, flux, r_rfl, &sde, &over_unity),
          "sde for record");
    const std::string timestamp = record.value("timestamp", "");
    csv << timestamp << "," << format_double(p1) << "," << format_double(wavelength) << ","
        << format_double(counts) << "," << format_double(dark) << ","
        << format_double(power) << "," << format_double(flux) << "," << format_double(sde)
        << "," << format_double(total_uncertainty) << "," << over_unity << "\n";
    rows.push_back({{"timestamp", timestamp},
                    {"p1_w", p1},
                    {"wavelength_nm", wavelength},
                    {"counts_per_s", counts},
                    {"dark_per_s", dark},
                    {"power_at_detector_w", power},
                    {"flux_per_s", flux},
                    {"sde", sde},
                    {"relative_uncertainty", total_uncertainty},
                    {"over_unity", over_unity != 0}});
    if (over_unity != 0) {
      std::fprintf(stderr,
                   "warning: record '%s' yields SDE %.4f > 1 - check the calibration\n",
                   timestamp.c_str(), sde);
    }
  }
  write_text_file(run.out("sde_results.csv"), csv.str());

  json body;
  body["ratio_db"] = ratio_db;
  body["r_rfl"] = r_rfl;
  body["power_meter"] = meter_label;
  body["meter_calibration_factor"] = meter_factor;
  body["relative_uncertainty"] = total_uncertainty;
  body["uncertainty_components"] = budget;
  body["records"] = rows;
  json report = body;
  report["config"] = run.resolved;
  write_text_file(run.out("sde_summary.json"), report.dump(2) + "\n");
  std::printf("sde: %zu record(s), ratio %.3f dB, r_rfl %.4f, uncertainty %.4g%%\n",
              rows.size(), ratio_db, r_rfl, total_uncertainty * 100.0);
  for (const auto& row : rows) {
    std::printf("  %s: SDE = %.4f +- %.4f\n", row.at("timestamp").get<std::string>().c_str(),
                row.at("sde").get<double>(),
                row.at("sde").get<double>() * total_uncertainty);
  }
  return 0;
}

int cmd_uncertainty(Run& run) {
  std::vector<double> components;
  json budget = json::array();
  for (const auto& c : run.config.at("components")) {
    components.push_back(c.at("percent").get<double>() / 100.0);
    budget.push_back(c);
  }
  double total = 0.0;
  check(snspd_combine_uncertainty(components.data(), components.size(), &total),
        "combining uncertainty");
  json body;
  body["components"] = budget;
  body["total_percent"] = total * 100.0;
  std::ostringstream csv;
  csv << "label,percent\n";
  for (const auto& c : run.config.at("components")) {
    csv << c.value("label", "component") << "," << format_double(c.at("percent").get<double>())
        << "\n";
  }
  csv << "total," << format_double(total * 100.0) << "\n";
  write_report(run, "uncertainty_report", body, csv.str());
  std::printf("total uncertainty: %.2f%% (RMS)\n", total * 100.0);
  return 0;
}

int cmd_dead_times(Run& run) {
  Recovery recovery;
  load_recovery(run.config.at("recovery"), recovery);
  const double fraction = run.config.value("full_recovery_fraction", -1.0);
  snspd_dead_times metrics;
  check(snspd_dead_time_metrics(recovery.ptr, fraction, &metrics), "extracting dead times");
  json body;
  body["tau1_min_separation_ns"] = metrics.tau1_min_separation_ns;
  body["tau2_one_over_e_ns"] = metrics.tau2_one_over_e_ns;
  body["tau3_minus3db_ns"] = metrics.tau3_minus3db_ns;
  body["tau4_full_recovery_ns"] = metrics.tau4_full_recovery_ns;
  std::ostringstream csv;
  csv << "metric,ns\n";
  csv << "tau1_min_separation," << format_double(metrics.tau1_min_separation_ns) << "\n";
  csv << "tau2_one_over_e," << format_double(metrics.tau2_one_over_e_ns) << "\n";
  csv << "tau3_minus3db," << format_double(metrics.tau3_minus3db_ns) << "\n";
  csv << "tau4_full_recovery," << format_double(metrics.tau4_full_recovery_ns) << "\n";
  write_report(run, "dead_times", body, csv.str());
  std::printf("dead times: tau1=%.2f tau2=%.2f tau3=%.2f tau4=%.2f ns\n",
              metrics.tau1_min_separation_ns, metrics.tau2_one_over_e_ns,
              metrics.tau3_minus3db_ns, metrics.tau4_full_recovery_ns);
  return 0;
}

int cmd_rate_efficiency(Run& run) {
  Recovery recovery;
  load_recovery(run.config.at("recovery"), recovery);
  const double eta_max = run.config.value("eta_max", 1.0);
  std::vector<double> fluxes;
  const json& spec = run.config.at("fluxes_per_s");
  if (spec.is_array()) {
    for (const auto& v : spec) fluxes.push_back(v.get<double>());
  } else {
    const double lo = spec.at("log10_start").get<double>();
    const double hi = spec.at("log10_stop").get<double>();
    const int count = spec.value("count", 25);
    for (int i = 0; i < count; ++i) {
      fluxes.push_back(std::pow(10.0, lo + (hi - lo) * i / (count - 1)));
    }
  }
  std::ostringstream csv;
  csv << config_comment(run);
  csv << "flux_per_s,efficiency\n";
  json rows = json::array();
  for (double flux : fluxes) {
    double efficiency = 0.0;
    check(snspd_rate_dependent_efficiency(recovery.ptr, flux, eta_max, &efficiency),
          "rate efficiency");
    csv << format_double(flux) << "," << format_double(efficiency) << "\n";
    rows.push_back({{"flux_per_s", flux}, {"efficiency", efficiency}});
  }
  write_text_file(run.out("rate_efficiency.csv"), csv.str());
  json body;
  body["eta_max"] = eta_max;
  body["points"] = rows;
  json report = body;
  report["config"] = run.resolved;
  write_text_file(run.out("rate_efficiency.json"), report.dump(2) + "\n");
  std::printf("rate efficiency: %zu flux point(s) written\n", fluxes.size());
  return 0;
}

void fill_sim_params(const Run& run, const json& spec, snspd_sim_params& params) {
  const json& source = spec.at("source");
  if (source.contains("cw")) {
    params.source = SNSPD_SOURCE_CW;
    params.rate_per_s = source.at("cw").at("rate_per_s").get<double>();
  } else if (source.contains("pulsed")) {
    params.source = SNSPD_SOURCE_PULSED;
    params.period_ns = source.at("pulsed").at("period_ns").get<double>();
    params.mean_photons_per_pulse =
        source.at("pulsed").at("mean_photons_per_pulse").get<double>();
  } else {
    fail(2, "simulate source must contain 'cw' or 'pulsed'");
  }
  params.eta_max = spec.at("eta_max").get<double>();
  params.jitter_fwhm_ps = spec.value("jitter_fwhm_ps", 0.0);
  params.dark_rate_per_s = spec.value("dark_rate_per_s", 0.0);
  params.duration_ns = spec.at("duration_ns").get<double>();
  params.seed = required_seed(run);
}

json stream_stats_json(const snspd_stream* stream) {
  snspd_stream_stats stats;
  check(snspd_stream_stats_get(stream, &stats), "reading stream stats");
  json j;
  j["seed"] = stats.seed;
  j["duration_ns"] = stats.duration_ns;
  j["emitted_photons"] = stats.emitted_photons;
  j["source_detections"] = stats.source_detections;
  j["dark_counts"] = stats.dark_counts;
  j["dropped_out_of_window"] = stats.dropped_out_of_window;
  j["dropped_duplicate"] = stats.dropped_duplicate;
  j["registered"] = snspd_stream_count(stream);
  return j;
}

void obtain_stream(Run& run, const json& spec, Recovery& recovery, Stream& stream,
                   const char* key) {
  if (spec.is_string()) {
    const fs::path path = resolve(run.config_dir, spec.get<std::string>());
    run.resolved[key] = fs::absolute(path).string();
    check(snspd_stream_load(path.string().c_str(), &stream.ptr), "loading stream");
    return;
  }
  load_recovery(spec.at("recovery"), recovery);
  snspd_sim_params params{};
  fill_sim_params(run, spec, params);
  run.resolved["seed"] = params.seed;
  check(snspd_simulate_stream(&params, recovery.ptr, &stream.ptr), "simulating stream");
}

int cmd_simulate(Run& run) {
  Recovery recovery;
  Stream stream;
  obtain_stream(run, run.config.at("simulate"), recovery, stream, "simulate");
  const fs::path tags_path = run.out(run.config.value("tags_file", "tags.txt"));
  check(snspd_stream_save(stream.ptr, tags_path.string().c_str()), "writing tags");
  json body;
  body["tags_file"] = tags_path.filename().string();
  body["stats"] = stream_stats_json(stream.ptr);
  json report = body;
  report["config"] = run.resolved;
  write_text_file(run.out("simulate_report.json"), report.dump(2) + "\n");
  std::printf("simulate: %zu tag(s) -> %s\n", snspd_stream_count(stream.ptr),
              tags_path.string().c_str());
  return 0;
}

int cmd_autocorr(Run& run) {
  Recovery recovery;
  Stream stream;
  obtain_stream(run, run.config.at("stream"), recovery, stream, "stream");
  const double bin_width = run.config.value("bin_width_ns", 1.0);
  const double max_delay = run.config.value("max_delay_ns", 300.0);
  Hist hist;
  check(snspd_autocorrelation(stream.ptr, bin_width, max_delay, &hist.ptr),
        "computing autocorrelation");

  const fs::path csv_path = run.out("autocorr.csv");
  check(snspd_histogram_save_csv(hist.ptr, csv_path.string().c_str()), "writing histogram");
  json body;
  body["bin_width_ns"] = bin_width;
  body["max_delay_ns"] = max_delay;
  body["bins"] = snspd_histogram_size(hist.ptr);
  body["discarded_delays"] = snspd_histogram_discarded(hist.ptr);
  body["stats"] = stream_stats_json(stream.ptr);
  json report = body;
  report["config"] = run.resolved;
  write_text_file(run.out("autocorr_report.json"), report.dump(2) + "\n");
  std::printf("autocorr: %zu bins -> %s (%" PRIu64 " delays beyond window)\n",
              snspd_histogram_size(hist.ptr), csv_path.string().c_str(),
              snspd_histogram_discarded(hist.ptr));
  return 0;
}

int cmd_fit_irf(Run& run) {
  Hist hist;
  if (run.config.contains("histogram")) {
    const fs::path path =
        resolve(run.config_dir, run.config.at("histogram").get<std::string>());
    run.resolved["histogram"] = fs::absolute(path).string();
    check(snspd_histogram_load_csv(path.string().c_str(), &hist.ptr), "loading histogram");
  } else {
    Recovery recovery;
    Stream stream;
    obtain_stream(run, run.config.at("stream"), recovery, stream, "stream");
    const json& fold = run.config.at("fold");
    check(snspd_fold_pulsed(stream.ptr, fold.at("period_ns").get<double>(),
                            fold.value("bin_width_ps", 1.0),
                            fold.value("half_range_ps", 50.0), &hist.ptr),
          "folding stream");
    check(snspd_histogram_save_csv(hist.ptr, run.out("irf_histogram.csv").string().c_str()),
          "writing folded histogram");
  }

  snspd_gaussian_fit fit;
  check(snspd_fit_gaussian_irf(hist.ptr, &fit), "fitting gaussian");
  json body;
  body["center"] = fit.center;
  body["sigma"] = fit.sigma;
  body["fwhm"] = fit.fwhm;
  body["amplitude"] = fit.amplitude;
  body["fwhm_std_error"] = fit.fwhm_std_error;
  body["goodness"] = fit.goodness;
  body["iterations"] = fit.iterations;
  std::ostringstream csv;
  csv << "quantity,value\n";
  csv << "center," << format_double(fit.center) << "\n";
  csv << "sigma," << format_double(fit.sigma) << "\n";
  csv << "fwhm," << format_double(fit.fwhm) << "\n";
  csv << "amplitude," << format_double(fit.amplitude) << "\n";
  csv << "fwhm_std_error," << format_double(fit.fwhm_std_error) << "\n";
  csv << "goodness," << format_double(fit.goodness) << "\n";
  write_report(run, "irf_fit", body, csv.str());
  std::printf("irf fit: FWHM = %.4f +- %.4f (center %.4f, %d iterations)\n", fit.fwhm,
              fit.fwhm_std_error, fit.center, fit.iterations);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"snspd design & metrology toolkit"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = ".";
  std::string format = "json-text";
  std::optional<std::uint64_t> seed;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "JSON config file")->required();
    cmd->add_option("--out", out_dir, "output directory (created if missing)");
    cmd->add_option("--format", format, "report format: csv or json-text")
        ->check(CLI::IsMember({"csv", "json-text"}));
    cmd->add_option("--seed", seed, "64-bit seed for stochastic commands");
  };

  struct Entry {
    const char* name;
    const char* help;
    int (*fn)(Run&);
  };
  const Entry entries[] = {
      {"solve", "solve one stack at one wavelength", cmd_solve},
      {"sweep", "absorption map over airgap x wavelength", cmd_sweep},
      {"optimize", "find the airgap maximizing weighted absorption", cmd_optimize},
      {"flux", "photon flux from monitor power and attenuation chain", cmd_flux},
      {"sde", "efficiency analysis of a measurement session", cmd_sde},
      {"uncertainty", "root-sum-square uncertainty budget", cmd_uncertainty},
      {"simulate", "Monte Carlo time-tag stream", cmd_simulate},
      {"autocorr", "consecutive-delay histogram of a stream", cmd_autocorr},
      {"fit-irf", "gaussian IRF fit of a histogram or folded stream", cmd_fit_irf},
      {"dead-times", "dead-time metrics of a recovery curve", cmd_dead_times},
      {"rate-efficiency", "expected efficiency vs photon flux", cmd_rate_efficiency},
  };
  for (const auto& entry : entries) {
    add_common(app.add_subcommand(entry.name, entry.help));
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  const Entry* selected = nullptr;
  for (const auto& entry : entries) {
    if (app.get_subcommand(entry.name)->parsed()) {
      selected = &entry;
      break;
    }
  }
  if (!selected) {
    std::fprintf(stderr, "error: no subcommand selected\n");
    return 2;
  }

  FILE* warn_sink = nullptr;
  try {
    Run run;
    const fs::path config_file(config_path);
    run.config = load_json(config_file);
    run.config_dir = config_file.has_parent_path() ? config_file.parent_path() : ".";
    run.out_dir = out_dir;
    run.format = format;
    run.seed_flag = seed;
    std::error_code ec;
    fs::create_directories(run.out_dir, ec);
    if (ec) fail(2, "cannot create output directory: " + run.out_dir.string());
    run.resolved = run.config;
    run.resolved["command"] = selected->name;
    run.resolved["format"] = run.format;
    if (seed) run.resolved["seed"] = *seed;

    // library warnings (round-off clamps etc.) go to the sidecar log
    warn_sink = std::fopen(run.out("run.log").string().c_str(), "a");
    if (warn_sink) {
      snspd_set_log_handler(
          [](const char* message, void* user) {
            std::fprintf(static_cast<FILE*>(user), "warning: %s\n", message);
          },
          warn_sink);
    }

    const int rc = selected->fn(run);
    append_run_log(run, selected->name);
    snspd_set_log_handler(nullptr, nullptr);
    std::fclose(warn_sink);
    return rc;
  } catch (const CliError& e) {
    snspd_set_log_handler(nullptr, nullptr);
    if (warn_sink) std::fclose(warn_sink);
    std::fprintf(stderr, "error: %s\n", e.message.c_str());
    return e.exit_code;
  } catch (const json::exception& e) {
    snspd_set_log_handler(nullptr, nullptr);
    if (warn_sink) std::fclose(warn_sink);
    std::fprintf(stderr, "error: config: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    snspd_set_log_handler(nullptr, nullptr);
    if (warn_sink) std::fclose(warn_sink);
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
}
