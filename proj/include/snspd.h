/*
 * snspd: superconducting nanowire single-photon detector design & metrology
 * toolkit.
 *
 * C API of the shared library. All functions return snspd_status (0 on
 * success); on failure snspd_last_error() gives a per-thread message.
 * Objects are opaque handles released with the matching *_free call.
 *
 * Conventions: wavelengths in nm, times in ns unless the name says ps,
 * powers in W, rates in counts/s or photons/s, fractions in [0, 1].
 * Complex refractive index convention n - i*k with exp(+i*omega*t).
 */

#ifndef SNSPD_H
#define SNSPD_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define SNSPD_API __declspec(dllexport)
#else
#define SNSPD_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum snspd_status {
  SNSPD_OK = 0,
  SNSPD_ERROR_VALIDATION = 2,
  SNSPD_ERROR_NUMERIC = 3,
  SNSPD_ERROR_INSUFFICIENT_DATA = 4,
} snspd_status;

typedef enum snspd_polarization {
  SNSPD_POL_TE = 0, /* E parallel to the meander wires */
  SNSPD_POL_TM = 1, /* E perpendicular to the wires */
} snspd_polarization;

SNSPD_API const char* snspd_version(void);

/* Message for the most recent failure on this thread; never NULL. */
SNSPD_API const char* snspd_last_error(void);

/* Redirect library warnings (e.g. round-off clamps). NULL restores stderr. */
typedef void (*snspd_log_handler)(const char* message, void* user_data);
SNSPD_API void snspd_set_log_handler(snspd_log_handler handler, void* user_data);

/* ------------------------------------------------------------------ */
/* materials                                                           */

typedef struct snspd_materials snspd_materials;

SNSPD_API snspd_materials* snspd_materials_new(void);
SNSPD_API void snspd_materials_free(snspd_materials* materials);

/* CSV with header row "wavelength_nm,n,k"; '#' lines are comments. */
SNSPD_API snspd_status snspd_materials_load_csv(snspd_materials* materials,
                                                const char* name, const char* path);
SNSPD_API snspd_status snspd_materials_add_constant(snspd_materials* materials,
                                                    const char* name, double n, double k);
SNSPD_API snspd_status snspd_materials_add_table(snspd_materials* materials,
                                                 const char* name,
                                                 const double* wavelengths_nm,
                                                 const double* n, const double* k,
                                                 size_t count);

/* Linear interpolation; errors outside the tabulated range. */
SNSPD_API snspd_status snspd_materials_index(const snspd_materials* materials,
                                             const char* name, double wavelength_nm,
                                             double* n_out, double* k_out);

/* Effective-medium permittivity of a wire grating (fill = linewidth/pitch):
 * TE -> fill-weighted mean of the permittivities, TM -> harmonic mean. */
SNSPD_API snspd_status snspd_effective_permittivity(
    double fill_factor, double eps_wire_re, double eps_wire_im, double eps_gap_re,
    double eps_gap_im, snspd_polarization pol, double* eps_re_out, double* eps_im_out);

/* ------------------------------------------------------------------ */
/* stratified stacks                                                   */

typedef struct snspd_stack snspd_stack;

typedef struct snspd_meander_geometry {
  double linewidth_nm;
  double pitch_nm;
  double film_thickness_nm;
  double active_radius_um;
} snspd_meander_geometry;

typedef struct snspd_membrane_params {
  double airgap_nm;
  double spacer_thickness_nm; /* 230 by default */
  double mirror_thickness_nm; /* 200 by default */
  snspd_meander_geometry meander;
  /* material names resolved in the library; NULL picks the default */
  const char* fiber_material;  /* "SiO2" */
  const char* gap_material;    /* "Air" */
  const char* wire_material;   /* "NbTiN" */
  const char* spacer_material; /* "SiO2" */
  const char* mirror_material; /* "Au" */
  const char* exit_material;   /* "Air" */
} snspd_membrane_params;

SNSPD_API void snspd_membrane_params_defaults(snspd_membrane_params* params);

/* Canonical membrane cavity "membrane-cavity-v1":
 * fiber / airgap / meander / spacer / mirror / exit. */
SNSPD_API snspd_status snspd_stack_membrane_cavity_v1(const snspd_materials* materials,
                                                      const snspd_membrane_params* params,
                                                      snspd_stack** stack_out);

/* Stack description JSON (explicit layer list or builder form). */
SNSPD_API snspd_status snspd_stack_from_json(const snspd_materials* materials,
                                             const char* json_text,
                                             snspd_stack** stack_out);

SNSPD_API void snspd_stack_free(snspd_stack* stack);
SNSPD_API size_t snspd_stack_layer_count(const snspd_stack* stack);
/* Index of the meander layer, or -1 if the stack has none. */
SNSPD_API int snspd_stack_meander_index(const snspd_stack* stack);
/* Retarget the designated airgap layer. */
SNSPD_API snspd_status snspd_stack_set_airgap(snspd_stack* stack, double gap_nm);

/* Normal-incidence response. layer_absorptance may be NULL, otherwise it must
 * hold snspd_stack_layer_count() entries. R + T + sum(A) = 1 within 1e-9. */
SNSPD_API snspd_status snspd_stack_solve(const snspd_stack* stack, double wavelength_nm,
                                         snspd_polarization pol, double* reflectance_out,
                                         double* transmittance_out,
                                         double* layer_absorptance_out);

/* Absorptance of the meander layer. */
SNSPD_API snspd_status snspd_stack_detector_absorption(const snspd_stack* stack,
                                                       double wavelength_nm,
                                                       snspd_polarization pol,
                                                       double* absorption_out);

/* Meander absorptance over a gap x wavelength grid; values_out is row-major
 * with gap_count rows of wavelength_count entries. */
SNSPD_API snspd_status snspd_stack_sweep(const snspd_stack* stack,
                                         const double* airgaps_nm, size_t gap_count,
                                         const double* wavelengths_nm,
                                         size_t wavelength_count, snspd_polarization pol,
                                         double* values_out);

/* Dense scan (scan_step_nm) + golden-section refinement (refine_tol_nm) of the
 * weighted multi-wavelength absorption. */
SNSPD_API snspd_status snspd_stack_optimize_gap(const snspd_stack* stack,
                                                const double* target_wavelengths_nm,
                                                const double* weights, size_t target_count,
                                                snspd_polarization pol, double gap_lo_nm,
                                                double gap_hi_nm, double scan_step_nm,
                                                double refine_tol_nm, double* best_gap_out,
                                                double* best_score_out);

/* A_TE / A_TM of the meander at the given gap. */
SNSPD_API snspd_status snspd_stack_polarization_contrast(const snspd_stack* stack,
                                                         double wavelength_nm,
                                                         double gap_nm, double* ratio_out);

typedef struct snspd_peak {
  double wavelength_nm;
  double absorption;
  double prominence;
} snspd_peak;

/* Local maxima with topographic prominence >= threshold. Call with
 * peaks_out = NULL to query the count. */
SNSPD_API snspd_status snspd_find_peaks(const double* x, const double* y, size_t count,
                                        double prominence_threshold, snspd_peak* peaks_out,
                                        size_t capacity, size_t* found_out);

/* ------------------------------------------------------------------ */
/* metrology                                                           */

/* ratio_db = mean of 10*log10(P1/P2); spread = (max-min)/mean linear ratio. */
SNSPD_API snspd_status snspd_calibrate_attenuation(const double* p1_w, const double* p2_w,
                                                   size_t count, double* ratio_db_out,
                                                   double* spread_out);

typedef struct snspd_chain snspd_chain;

/* band_lo/hi: acceptance band for the effective ratio (50-60 dB typical). */
SNSPD_API snspd_status snspd_chain_new(double splitter_ratio_db,
                                       const double* nd_stages_db, size_t nd_count,
                                       double band_lo_db, double band_hi_db,
                                       snspd_chain** chain_out);
SNSPD_API snspd_status snspd_chain_calibrate(snspd_chain* chain, const double* p1_w,
                                             const double* p2_w, size_t count);
SNSPD_API snspd_status snspd_chain_ratio_db(const snspd_chain* chain, double* ratio_db_out);
SNSPD_API void snspd_chain_free(snspd_chain* chain);

/* power_at_detector = P_monitor * 10^(-ratio/10); flux = P*lambda/(h c). */
SNSPD_API snspd_status snspd_photon_flux(double p_monitor_w, const snspd_chain* chain,
                                         double wavelength_nm,
                                         double* power_at_detector_w_out,
                                         double* flux_per_s_out);

/* sde = (1 - r_rfl) * (counts - dark) / flux; over-unity flagged, not clamped. */
SNSPD_API snspd_status snspd_compute_sde(double counts_per_s, double dark_per_s,
                                         double flux_per_s, double r_rfl, double* sde_out,
                                         int* over_unity_out);

/* Normal-incidence Fresnel power reflection. */
SNSPD_API snspd_status snspd_fresnel_reflection(double n_core, double n_outside,
                                                double* reflection_out);

/* Root-sum-square of relative uncertainty components. */
SNSPD_API snspd_status snspd_combine_uncertainty(const double* components, size_t count,
                                                 double* total_out);

/* ------------------------------------------------------------------ */
/* detection recovery                                                  */

typedef struct snspd_recovery snspd_recovery;

typedef struct snspd_recovery_params {
  double tau_rise_ns; /* 0 = pure exponential pulse decay */
  double tau_fall_ns;
  double t_blind_ns;
  double tau_eff_ns; /* 0 = step recovery at t_blind */
  double t_full_ns;  /* INFINITY disables the full-recovery cap */
  double full_recovery_fraction;
} snspd_recovery_params;

SNSPD_API snspd_status snspd_recovery_new(const snspd_recovery_params* params,
                                          snspd_recovery** recovery_out);

/* Pulse time constants from the lumped electrical model:
 * tau_rise = L_k/(R_load + R_hotspot), tau_fall = L_k/R_load. */
SNSPD_API snspd_status snspd_pulse_from_electrical(double kinetic_inductance_nh,
                                                   double load_resistance_ohm,
                                                   double hotspot_resistance_ohm,
                                                   double* tau_rise_ns_out,
                                                   double* tau_fall_ns_out);
/* Named preset, e.g. "detector-fig3a" (25/33/51/97 ns metrics). */
SNSPD_API snspd_status snspd_recovery_preset(const char* name,
                                             snspd_recovery** recovery_out);
SNSPD_API void snspd_recovery_free(snspd_recovery* recovery);

SNSPD_API snspd_status snspd_recovery_pulse_amplitude(const snspd_recovery* recovery,
                                                      double t_ns, double* amplitude_out);
SNSPD_API snspd_status snspd_recovery_efficiency(const snspd_recovery* recovery,
                                                 double t_ns, double* relative_out);

typedef struct snspd_dead_times {
  double tau1_min_separation_ns;
  double tau2_one_over_e_ns;
  double tau3_minus3db_ns;
  double tau4_full_recovery_ns;
} snspd_dead_times;

/* full_recovery_fraction < 0 uses the curve's configured fraction. */
SNSPD_API snspd_status snspd_dead_time_metrics(const snspd_recovery* recovery,
                                               double full_recovery_fraction,
                                               snspd_dead_times* metrics_out);

/* Expected CW efficiency at the given Poisson flux (renewal result). */
SNSPD_API snspd_status snspd_rate_dependent_efficiency(const snspd_recovery* recovery,
                                                       double flux_per_s, double eta_max,
                                                       double* efficiency_out);

SNSPD_API snspd_status snspd_pulsed_efficiency(const snspd_recovery* recovery,
                                               double period_ns, double eta_max,
                                               double* efficiency_out);

/* ------------------------------------------------------------------ */
/* time-tag simulation & analysis                                      */

typedef struct snspd_stream snspd_stream;
typedef struct snspd_histogram snspd_histogram;

typedef enum snspd_source_kind {
  SNSPD_SOURCE_CW = 0,
  SNSPD_SOURCE_PULSED = 1,
} snspd_source_kind;

typedef struct snspd_sim_params {
  snspd_source_kind source;
  double rate_per_s;            /* CW */
  double period_ns;             /* pulsed */
  double mean_photons_per_pulse;/* pulsed */
  double eta_max;
  double jitter_fwhm_ps;
  double dark_rate_per_s;
  double duration_ns;
  uint64_t seed;
} snspd_sim_params;

SNSPD_API snspd_status snspd_simulate_stream(const snspd_sim_params* params,
                                             const snspd_recovery* recovery,
                                             snspd_stream** stream_out);
SNSPD_API void snspd_stream_free(snspd_stream* stream);
SNSPD_API size_t snspd_stream_count(const snspd_stream* stream);
SNSPD_API snspd_status snspd_stream_copy_tags(const snspd_stream* stream, double* tags_out,
                                              size_t capacity);

typedef struct snspd_stream_stats {
  uint64_t seed;
  double duration_ns;
  uint64_t emitted_photons;
  uint64_t source_detections;
  uint64_t dark_counts;
  uint64_t dropped_out_of_window;
  uint64_t dropped_duplicate;
} snspd_stream_stats;

SNSPD_API snspd_status snspd_stream_stats_get(const snspd_stream* stream,
                                              snspd_stream_stats* stats_out);

/* Time-tag text file: '#' metadata header, one ns timestamp per line
 * (fixed-point, 3 decimals). */
SNSPD_API snspd_status snspd_stream_save(const snspd_stream* stream, const char* path);
SNSPD_API snspd_status snspd_stream_load(const char* path, snspd_stream** stream_out);

/* Consecutive inter-event delays; delays beyond max_delay are counted as
 * discarded. Needs >= 2 tags. */
SNSPD_API snspd_status snspd_autocorrelation(const snspd_stream* stream,
                                             double bin_width_ns, double max_delay_ns,
                                             snspd_histogram** histogram_out);

/* Fold a pulsed stream onto one period; residuals histogrammed in ps. */
SNSPD_API snspd_status snspd_fold_pulsed(const snspd_stream* stream, double period_ns,
                                         double bin_width_ps, double half_range_ps,
                                         snspd_histogram** histogram_out);

SNSPD_API void snspd_histogram_free(snspd_histogram* histogram);
SNSPD_API size_t snspd_histogram_size(const snspd_histogram* histogram);
SNSPD_API snspd_status snspd_histogram_counts(const snspd_histogram* histogram,
                                              int64_t* counts_out, size_t capacity);
/* edges_out needs size+1 entries. */
SNSPD_API snspd_status snspd_histogram_edges(const snspd_histogram* histogram,
                                             double* edges_out, size_t capacity);
SNSPD_API uint64_t snspd_histogram_discarded(const snspd_histogram* histogram);
SNSPD_API snspd_status snspd_histogram_save_csv(const snspd_histogram* histogram,
                                                const char* path);
SNSPD_API snspd_status snspd_histogram_load_csv(const char* path,
                                                snspd_histogram** histogram_out);

typedef struct snspd_gaussian_fit {
  double center;
  double sigma;
  double fwhm;
  double amplitude;
  double fwhm_std_error;
  double goodness; /* reduced residual norm */
  int iterations;
} snspd_gaussian_fit;

/* Damped Gauss-Newton fit; needs >= 5 nonzero bins. Units follow the
 * histogram's. */
SNSPD_API snspd_status snspd_fit_gaussian_irf(const snspd_histogram* histogram,
                                              snspd_gaussian_fit* fit_out);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* SNSPD_H */
