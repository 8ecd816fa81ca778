#include "snspd.h"

#include <cmath>
#include <complex>
#include <cstring>
#include <exception>
#include <string>
#include <vector>

#include "core/design.hpp"
#include "core/dynamics.hpp"
#include "core/errors.hpp"
#include "core/io.hpp"
#include "core/log.hpp"
#include "core/materials.hpp"
#include "core/metrology.hpp"
#include "core/stack_config.hpp"
#include "core/timetag.hpp"
#include "core/tmm.hpp"

struct snspd_materials {
  snspd::MaterialLibrary library;
};

struct snspd_stack {
  snspd::LayerStack value;
};

struct snspd_chain {
  snspd::AttenuationChain value;
};

struct snspd_recovery {
  snspd::RecoveryCurve value;
};

struct snspd_stream {
  snspd::TimeTagStream value;
};

struct snspd_histogram {
  snspd::Histogram value;
};

namespace {

thread_local std::string t_last_error;

snspd_status status_from_kind(snspd::ErrorKind kind) {
  switch (kind) {
    case snspd::ErrorKind::validation:
      return SNSPD_ERROR_VALIDATION;
    case snspd::ErrorKind::numeric:
      return SNSPD_ERROR_NUMERIC;
    case snspd::ErrorKind::insufficient_data:
      return SNSPD_ERROR_INSUFFICIENT_DATA;
  }
  return SNSPD_ERROR_NUMERIC;
}

template <typename Fn>
snspd_status guarded(Fn&& fn) {
  try {
    fn();
    return SNSPD_OK;
  } catch (const snspd::Error& e) {
    t_last_error = e.what();
    return status_from_kind(e.kind());
  } catch (const std::exception& e) {
    t_last_error = e.what();
    return SNSPD_ERROR_NUMERIC;
  } catch (...) {
    t_last_error = "unknown error";
    return SNSPD_ERROR_NUMERIC;
  }
}

snspd_status invalid_argument(const char* message) {
  t_last_error = message;
  return SNSPD_ERROR_VALIDATION;
}

snspd::Polarization to_pol(snspd_polarization pol) {
  return pol == SNSPD_POL_TM ? snspd::Polarization::TM : snspd::Polarization::TE;
}

}  // namespace

extern "C" {

const char* snspd_version(void) { return "1.0.0"; }

const char* snspd_last_error(void) { return t_last_error.c_str(); }

void snspd_set_log_handler(snspd_log_handler handler, void* user_data) {
  snspd::set_log_handler(handler, user_data);
}

/* ------------------------------------------------------------------ */

snspd_materials* snspd_materials_new(void) { return new snspd_materials(); }

void snspd_materials_free(snspd_materials* materials) { delete materials; }

snspd_status snspd_materials_load_csv(snspd_materials* materials, const char* name,
                                      const char* path) {
  if (!materials || !name || !path) return invalid_argument("null argument");
  return guarded([&] {
    materials->library.add(snspd::DispersionTable::from_csv_file(name, path));
  });
}

snspd_status snspd_materials_add_constant(snspd_materials* materials, const char* name,
                                          double n, double k) {
  if (!materials || !name) return invalid_argument("null argument");
  return guarded([&] {
    materials->library.add(snspd::DispersionTable::constant(name, n, k));
  });
}

snspd_status snspd_materials_add_table(snspd_materials* materials, const char* name,
                                       const double* wavelengths_nm, const double* n,
                                       const double* k, size_t count) {
  if (!materials || !name || !wavelengths_nm || !n || !k) {
    return invalid_argument("null argument");
  }
  return guarded([&] {
    std::vector<snspd::DispersionSample> samples;
    samples.reserve(count);
    for (size_t i = 0; i < count; ++i) samples.push_back({wavelengths_nm[i], n[i], k[i]});
    materials->library.add(snspd::DispersionTable(name, std::move(samples)));
  });
}

snspd_status snspd_materials_index(const snspd_materials* materials, const char* name,
                                   double wavelength_nm, double* n_out, double* k_out) {
  if (!materials || !name || !n_out || !k_out) return invalid_argument("null argument");
  return guarded([&] {
    const auto index = materials->library.get(name)->complex_index(wavelength_nm);
    *n_out = index.real();
    *k_out = -index.imag();
  });
}

snspd_status snspd_effective_permittivity(double fill_factor, double eps_wire_re,
                                          double eps_wire_im, double eps_gap_re,
                                          double eps_gap_im, snspd_polarization pol,
                                          double* eps_re_out, double* eps_im_out) {
  if (!eps_re_out || !eps_im_out) return invalid_argument("null argument");
  return guarded([&] {
    // geometry carrying the requested fill factor; the other fields are
    // immaterial for the mixing formula
    snspd::MeanderGeometry geom{fill_factor * 100.0, 100.0, 1.0, 1.0};
    const std::complex<double> eps = snspd::effective_permittivity(
        geom, {eps_wire_re, eps_wire_im}, {eps_gap_re, eps_gap_im}, to_pol(pol));
    *eps_re_out = eps.real();
    *eps_im_out = eps.imag();
  });
}

/* ------------------------------------------------------------------ */

void snspd_membrane_params_defaults(snspd_membrane_params* params) {
  if (!params) return;
  std::memset(params, 0, sizeof(*params));
  params->spacer_thickness_nm = 230.0;
  params->mirror_thickness_nm = 200.0;
}

snspd_status snspd_stack_membrane_cavity_v1(const snspd_materials* materials,
                                            const snspd_membrane_params* params,
                                            snspd_stack** stack_out) {
  if (!materials || !params || !stack_out) return invalid_argument("null argument");
  return guarded([&] {
    const auto& lib = materials->library;
    auto pick = [&](const char* name, const char* fallback) {
      return lib.get(name ? name : fallback);
    };
    snspd::MembraneCavityParams p;
    p.fiber = pick(params->fiber_material, "SiO2");
    p.gap = pick(params->gap_material, "Air");
    p.wire = pick(params->wire_material, "NbTiN");
    p.spacer = pick(params->spacer_material, "SiO2");
    p.mirror = pick(params->mirror_material, "Au");
    p.exit = pick(params->exit_material, "Air");
    p.meander = {params->meander.linewidth_nm, params->meander.pitch_nm,
                 params->meander.film_thickness_nm, params->meander.active_radius_um};
    p.airgap_nm = params->airgap_nm;
    p.spacer_thickness_nm = params->spacer_thickness_nm;
    p.mirror_thickness_nm = params->mirror_thickness_nm;
    *stack_out = new snspd_stack{snspd::membrane_cavity_v1(p)};
  });
}

snspd_status snspd_stack_from_json(const snspd_materials* materials, const char* json_text,
                                   snspd_stack** stack_out) {
  if (!materials || !json_text || !stack_out) return invalid_argument("null argument");
  return guarded([&] {
    *stack_out =
        new snspd_stack{snspd::stack_from_json_text(materials->library, json_text)};
  });
}

void snspd_stack_free(snspd_stack* stack) { delete stack; }

size_t snspd_stack_layer_count(const snspd_stack* stack) {
  return stack ? stack->value.layers().size() : 0;
}

int snspd_stack_meander_index(const snspd_stack* stack) {
  if (!stack || !stack->value.meander_index()) return -1;
  return static_cast<int>(*stack->value.meander_index());
}

snspd_status snspd_stack_set_airgap(snspd_stack* stack, double gap_nm) {
  if (!stack) return invalid_argument("null argument");
  return guarded([&] { stack->value = stack->value.with_airgap(gap_nm); });
}

snspd_status snspd_stack_solve(const snspd_stack* stack, double wavelength_nm,
                               snspd_polarization pol, double* reflectance_out,
                               double* transmittance_out, double* layer_absorptance_out) {
  if (!stack) return invalid_argument("null argument");
  return guarded([&] {
    const snspd::StackResponse response =
        snspd::solve_stack(stack->value, wavelength_nm, to_pol(pol));
    if (reflectance_out) *reflectance_out = response.reflectance;
    if (transmittance_out) *transmittance_out = response.transmittance;
    if (layer_absorptance_out) {
      for (size_t i = 0; i < response.layer_absorptance.size(); ++i) {
        layer_absorptance_out[i] = response.layer_absorptance[i];
      }
    }
  });
}

snspd_status snspd_stack_detector_absorption(const snspd_stack* stack, double wavelength_nm,
                                             snspd_polarization pol, double* absorption_out) {
  if (!stack || !absorption_out) return invalid_argument("null argument");
  return guarded([&] {
    *absorption_out = snspd::detector_absorption(stack->value, wavelength_nm, to_pol(pol));
  });
}

snspd_status snspd_stack_sweep(const snspd_stack* stack, const double* airgaps_nm,
                               size_t gap_count, const double* wavelengths_nm,
                               size_t wavelength_count, snspd_polarization pol,
                               double* values_out) {
  if (!stack || !airgaps_nm || !wavelengths_nm || !values_out) {
    return invalid_argument("null argument");
  }
  return guarded([&] {
    snspd::SweepGrid grid;
    grid.airgaps_nm.assign(airgaps_nm, airgaps_nm + gap_count);
    grid.wavelengths_nm.assign(wavelengths_nm, wavelengths_nm + wavelength_count);
    grid.polarization = to_pol(pol);
    const snspd::AbsorptionMap map = snspd::sweep(stack->value, grid);
    std::memcpy(values_out, map.values.data(), map.values.size() * sizeof(double));
  });
}

snspd_status snspd_stack_optimize_gap(const snspd_stack* stack,
                                      const double* target_wavelengths_nm,
                                      const double* weights, size_t target_count,
                                      snspd_polarization pol, double gap_lo_nm,
                                      double gap_hi_nm, double scan_step_nm,
                                      double refine_tol_nm, double* best_gap_out,
                                      double* best_score_out) {
  if (!stack || !target_wavelengths_nm || !weights || !best_gap_out || !best_score_out) {
    return invalid_argument("null argument");
  }
  return guarded([&] {
    std::vector<snspd::GapTarget> targets;
    targets.reserve(target_count);
    for (size_t i = 0; i < target_count; ++i) {
      targets.push_back({target_wavelengths_nm[i], weights[i]});
    }
    snspd::OptimizeOptions options;
    if (scan_step_nm > 0.0) options.scan_step_nm = scan_step_nm;
    if (refine_tol_nm > 0.0) options.refine_tol_nm = refine_tol_nm;
    options.polarization = to_pol(pol);
    const snspd::GapOptimum best =
        snspd::optimize_gap(stack->value, targets, gap_lo_nm, gap_hi_nm, options);
    *best_gap_out = best.gap_nm;
    *best_score_out = best.score;
  });
}

snspd_status snspd_stack_polarization_contrast(const snspd_stack* stack,
                                               double wavelength_nm, double gap_nm,
                                               double* ratio_out) {
  if (!stack || !ratio_out) return invalid_argument("null argument");
  return guarded([&] {
    *ratio_out = snspd::polarization_contrast(stack->value, wavelength_nm, gap_nm);
  });
}

snspd_status snspd_find_peaks(const double* x, const double* y, size_t count,
                              double prominence_threshold, snspd_peak* peaks_out,
                              size_t capacity, size_t* found_out) {
  if (!x || !y || !found_out) return invalid_argument("null argument");
  return guarded([&] {
    const auto peaks = snspd::find_peaks({x, count}, {y, count}, prominence_threshold);
    *found_out = peaks.size();
    if (peaks_out) {
      const size_t n = std::min(capacity, peaks.size());
      for (size_t i = 0; i < n; ++i) {
        peaks_out[i] = {peaks[i].wavelength_nm, peaks[i].absorption, peaks[i].prominence};
      }
    }
  });
}

/* ------------------------------------------------------------------ */

snspd_status snspd_calibrate_attenuation(const double* p1_w, const double* p2_w,
                                         size_t count, double* ratio_db_out,
                                         double* spread_out) {
  if (!p1_w || !p2_w || !ratio_db_out) return invalid_argument("null argument");
  return guarded([&] {
    std::vector<snspd::PowerReading> readings;
    readings.reserve(count);
    for (size_t i = 0; i < count; ++i) readings.push_back({p1_w[i], p2_w[i]});
    const auto result = snspd::calibrate_attenuation(readings);
    *ratio_db_out = result.ratio_db;
    if (spread_out) *spread_out = result.relative_spread;
  });
}

snspd_status snspd_chain_new(double splitter_ratio_db, const double* nd_stages_db,
                             size_t nd_count, double band_lo_db, double band_hi_db,
                             snspd_chain** chain_out) {
  if (!chain_out || (nd_count > 0 && !nd_stages_db)) {
    return invalid_argument("null argument");
  }
  return guarded([&] {
    snspd::AttenuationChain chain;
    chain.splitter_ratio_db = splitter_ratio_db;
    chain.nd_stages_db.assign(nd_stages_db, nd_stages_db + nd_count);
    chain.band_lo_db = band_lo_db;
    chain.band_hi_db = band_hi_db;
    *chain_out = new snspd_chain{std::move(chain)};
  });
}

snspd_status snspd_chain_calibrate(snspd_chain* chain, const double* p1_w,
                                   const double* p2_w, size_t count) {
  if (!chain || !p1_w || !p2_w) return invalid_argument("null argument");
  return guarded([&] {
    std::vector<snspd::PowerReading> readings;
    readings.reserve(count);
    for (size_t i = 0; i < count; ++i) readings.push_back({p1_w[i], p2_w[i]});
    snspd::calibrate_attenuation(readings);  // validates
    chain->value.calibration_readings = std::move(readings);
  });
}

snspd_status snspd_chain_ratio_db(const snspd_chain* chain, double* ratio_db_out) {
  if (!chain || !ratio_db_out) return invalid_argument("null argument");
  return guarded([&] { *ratio_db_out = chain->value.effective_ratio_db(); });
}

void snspd_chain_free(snspd_chain* chain) { delete chain; }

snspd_status snspd_photon_flux(double p_monitor_w, const snspd_chain* chain,
                               double wavelength_nm, double* power_at_detector_w_out,
                               double* flux_per_s_out) {
  if (!chain || !flux_per_s_out) return invalid_argument("null argument");
  return guarded([&] {
    const snspd::PhotonFlux flux =
        snspd::photon_flux(p_monitor_w, chain->value, wavelength_nm);
    if (power_at_detector_w_out) *power_at_detector_w_out = flux.power_at_detector_w;
    *flux_per_s_out = flux.flux_per_s;
  });
}

snspd_status snspd_compute_sde(double counts_per_s, double dark_per_s, double flux_per_s,
                               double r_rfl, double* sde_out, int* over_unity_out) {
  if (!sde_out) return invalid_argument("null argument");
  return guarded([&] {
    snspd::PhotonFlux flux;
    flux.flux_per_s = flux_per_s;
    const snspd::SdeResult result =
        snspd::compute_sde(counts_per_s, dark_per_s, flux, r_rfl);
    *sde_out = result.sde;
    if (over_unity_out) *over_unity_out = result.over_unity ? 1 : 0;
  });
}

snspd_status snspd_fresnel_reflection(double n_core, double n_outside,
                                      double* reflection_out) {
  if (!reflection_out) return invalid_argument("null argument");
  return guarded([&] {
    *reflection_out = snspd::fresnel_end_face_reflection(n_core, n_outside);
  });
}

snspd_status snspd_combine_uncertainty(const double* components, size_t count,
                                       double* total_out) {
  if (!components || !total_out) return invalid_argument("null argument");
  return guarded([&] {
    std::vector<snspd::UncertaintyComponent> list;
    list.reserve(count);
    for (size_t i = 0; i < count; ++i) {
      list.push_back({"component " + std::to_string(i), components[i]});
    }
    *total_out = snspd::combine_uncertainty(std::move(list)).total;
  });
}

/* ------------------------------------------------------------------ */

snspd_status snspd_recovery_new(const snspd_recovery_params* params,
                                snspd_recovery** recovery_out) {
  if (!params || !recovery_out) return invalid_argument("null argument");
  return guarded([&] {
    snspd::PulseShape pulse{params->tau_rise_ns, params->tau_fall_ns};
    snspd::EfficiencyRecovery eff{params->t_blind_ns, params->tau_eff_ns,
                                  params->t_full_ns};
    *recovery_out = new snspd_recovery{
        snspd::RecoveryCurve(pulse, eff, params->full_recovery_fraction)};
  });
}

snspd_status snspd_pulse_from_electrical(double kinetic_inductance_nh,
                                         double load_resistance_ohm,
                                         double hotspot_resistance_ohm,
                                         double* tau_rise_ns_out,
                                         double* tau_fall_ns_out) {
  if (!tau_rise_ns_out || !tau_fall_ns_out) return invalid_argument("null argument");
  return guarded([&] {
    const snspd::PulseShape pulse = snspd::PulseShape::from_electrical(
        kinetic_inductance_nh, load_resistance_ohm, hotspot_resistance_ohm);
    *tau_rise_ns_out = pulse.tau_rise_ns;
    *tau_fall_ns_out = pulse.tau_fall_ns;
  });
}

snspd_status snspd_recovery_preset(const char* name, snspd_recovery** recovery_out) {
  if (!name || !recovery_out) return invalid_argument("null argument");
  return guarded([&] {
    *recovery_out = new snspd_recovery{snspd::RecoveryCurve::preset(name)};
  });
}

void snspd_recovery_free(snspd_recovery* recovery) { delete recovery; }

snspd_status snspd_recovery_pulse_amplitude(const snspd_recovery* recovery, double t_ns,
                                            double* amplitude_out) {
  if (!recovery || !amplitude_out) return invalid_argument("null argument");
  return guarded([&] { *amplitude_out = recovery->value.pulse_amplitude(t_ns); });
}

snspd_status snspd_recovery_efficiency(const snspd_recovery* recovery, double t_ns,
                                       double* relative_out) {
  if (!recovery || !relative_out) return invalid_argument("null argument");
  return guarded([&] { *relative_out = recovery->value.efficiency_relative(t_ns); });
}

snspd_status snspd_dead_time_metrics(const snspd_recovery* recovery,
                                     double full_recovery_fraction,
                                     snspd_dead_times* metrics_out) {
  if (!recovery || !metrics_out) return invalid_argument("null argument");
  return guarded([&] {
    const snspd::DeadTimeMetrics m =
        snspd::dead_time_metrics(recovery->value, full_recovery_fraction);
    metrics_out->tau1_min_separation_ns = m.tau1_min_separation_ns;
    metrics_out->tau2_one_over_e_ns = m.tau2_one_over_e_ns;
    metrics_out->tau3_minus3db_ns = m.tau3_minus3db_ns;
    metrics_out->tau4_full_recovery_ns = m.tau4_full_recovery_ns;
  });
}

snspd_status snspd_rate_dependent_efficiency(const snspd_recovery* recovery,
                                             double flux_per_s, double eta_max,
                                             double* efficiency_out) {
  if (!recovery || !efficiency_out) return invalid_argument("null argument");
  return guarded([&] {
    *efficiency_out =
        snspd::rate_dependent_efficiency_analytic(recovery->value, flux_per_s, eta_max);
  });
}

snspd_status snspd_pulsed_efficiency(const snspd_recovery* recovery, double period_ns,
                                     double eta_max, double* efficiency_out) {
  if (!recovery || !efficiency_out) return invalid_argument("null argument");
  return guarded([&] {
    *efficiency_out = snspd::pulsed_source_efficiency(recovery->value, period_ns, eta_max);
  });
}

/* ------------------------------------------------------------------ */

snspd_status snspd_simulate_stream(const snspd_sim_params* params,
                                   const snspd_recovery* recovery,
                                   snspd_stream** stream_out) {
  if (!params || !recovery || !stream_out) return invalid_argument("null argument");
  return guarded([&] {
    snspd::SourceModel source;
    if (params->source == SNSPD_SOURCE_PULSED) {
      source = snspd::SourceModel::pulsed(params->period_ns, params->mean_photons_per_pulse);
    } else {
      source = snspd::SourceModel::cw(params->rate_per_s);
    }
    *stream_out = new snspd_stream{snspd::simulate_stream(
        source, recovery->value, params->eta_max, params->jitter_fwhm_ps,
        params->dark_rate_per_s, params->duration_ns, params->seed)};
  });
}

void snspd_stream_free(snspd_stream* stream) { delete stream; }

size_t snspd_stream_count(const snspd_stream* stream) {
  return stream ? stream->value.size() : 0;
}

snspd_status snspd_stream_copy_tags(const snspd_stream* stream, double* tags_out,
                                    size_t capacity) {
  if (!stream || !tags_out) return invalid_argument("null argument");
  if (capacity < stream->value.size()) {
    return invalid_argument("tag buffer too small");
  }
  std::memcpy(tags_out, stream->value.tags_ns().data(),
              stream->value.size() * sizeof(double));
  return SNSPD_OK;
}

snspd_status snspd_stream_stats_get(const snspd_stream* stream,
                                    snspd_stream_stats* stats_out) {
  if (!stream || !stats_out) return invalid_argument("null argument");
  const snspd::StreamMeta& m = stream->value.meta();
  stats_out->seed = m.seed;
  stats_out->duration_ns = m.duration_ns;
  stats_out->emitted_photons = m.emitted_photons;
  stats_out->source_detections = m.source_detections;
  stats_out->dark_counts = m.dark_counts;
  stats_out->dropped_out_of_window = m.dropped_out_of_window;
  stats_out->dropped_duplicate = m.dropped_duplicate;
  return SNSPD_OK;
}

snspd_status snspd_stream_save(const snspd_stream* stream, const char* path) {
  if (!stream || !path) return invalid_argument("null argument");
  return guarded([&] { snspd::save_timetags(stream->value, path); });
}

snspd_status snspd_stream_load(const char* path, snspd_stream** stream_out) {
  if (!path || !stream_out) return invalid_argument("null argument");
  return guarded([&] { *stream_out = new snspd_stream{snspd::load_timetags(path)}; });
}

snspd_status snspd_autocorrelation(const snspd_stream* stream, double bin_width_ns,
                                   double max_delay_ns, snspd_histogram** histogram_out) {
  if (!stream || !histogram_out) return invalid_argument("null argument");
  return guarded([&] {
    *histogram_out = new snspd_histogram{
        snspd::autocorrelation_histogram(stream->value, bin_width_ns, max_delay_ns)};
  });
}

snspd_status snspd_fold_pulsed(const snspd_stream* stream, double period_ns,
                               double bin_width_ps, double half_range_ps,
                               snspd_histogram** histogram_out) {
  if (!stream || !histogram_out) return invalid_argument("null argument");
  return guarded([&] {
    *histogram_out = new snspd_histogram{snspd::fold_pulsed_stream(
        stream->value, period_ns, bin_width_ps, half_range_ps)};
  });
}

void snspd_histogram_free(snspd_histogram* histogram) { delete histogram; }

size_t snspd_histogram_size(const snspd_histogram* histogram) {
  return histogram ? histogram->value.size() : 0;
}

snspd_status snspd_histogram_counts(const snspd_histogram* histogram, int64_t* counts_out,
                                    size_t capacity) {
  if (!histogram || !counts_out) return invalid_argument("null argument");
  if (capacity < histogram->value.size()) return invalid_argument("count buffer too small");
  for (size_t i = 0; i < histogram->value.size(); ++i) {
    counts_out[i] = histogram->value.counts[i];
  }
  return SNSPD_OK;
}

snspd_status snspd_histogram_edges(const snspd_histogram* histogram, double* edges_out,
                                   size_t capacity) {
  if (!histogram || !edges_out) return invalid_argument("null argument");
  if (capacity < histogram->value.size() + 1) {
    return invalid_argument("edge buffer too small");
  }
  for (size_t i = 0; i <= histogram->value.size(); ++i) {
    edges_out[i] = histogram->value.edge(i);
  }
  return SNSPD_OK;
}

uint64_t snspd_histogram_discarded(const snspd_histogram* histogram) {
  return histogram ? histogram->value.discarded : 0;
}

snspd_status snspd_histogram_save_csv(const snspd_histogram* histogram, const char* path) {
  if (!histogram || !path) return invalid_argument("null argument");
  return guarded([&] { snspd::save_histogram_csv(histogram->value, path); });
}

snspd_status snspd_histogram_load_csv(const char* path, snspd_histogram** histogram_out) {
  if (!path || !histogram_out) return invalid_argument("null argument");
  return guarded([&] {
    *histogram_out = new snspd_histogram{snspd::load_histogram_csv(path)};
  });
}

snspd_status snspd_fit_gaussian_irf(const snspd_histogram* histogram,
                                    snspd_gaussian_fit* fit_out) {
  if (!histogram || !fit_out) return invalid_argument("null argument");
  return guarded([&] {
    const snspd::GaussianFit fit = snspd::fit_gaussian_irf(histogram->value);
    fit_out->center = fit.center;
    fit_out->sigma = fit.sigma;
    fit_out->fwhm = fit.fwhm;
    fit_out->amplitude = fit.amplitude;
    fit_out->fwhm_std_error = fit.fwhm_std_error;
    fit_out->goodness = fit.goodness;
    fit_out->iterations = fit.iterations;
  });
}

} /* extern "C" */
