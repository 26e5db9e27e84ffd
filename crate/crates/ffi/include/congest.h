#ifndef CONGEST_H
#define CONGEST_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Which admissibility alternative of the stiff limit holds.
typedef enum CongestAdmissibility {
  CONGEST_ADMISSIBILITY_POSITIVE_FLUX = 0,
  CONGEST_ADMISSIBILITY_SMALLNESS = 1,
  CONGEST_ADMISSIBILITY_NO_GUARANTEE = 2,
} CongestAdmissibility;

// Cell fields that can be copied out of a simulation.
typedef enum CongestField {
  CONGEST_FIELD_RHO = 0,
  CONGEST_FIELD_Z = 1,
  CONGEST_FIELD_RHOSTAR = 2,
  // Truncated pressure of `Z`.
  CONGEST_FIELD_PRESSURE = 3,
} CongestField;

// Result of every fallible call.
typedef enum CongestStatus {
  CONGEST_STATUS_OK = 0,
  // A required pointer argument was null.
  CONGEST_STATUS_NULL_POINTER = 1,
  // A string argument was not valid UTF-8.
  CONGEST_STATUS_INVALID_STRING = 2,
  // The caller's buffer is too small; the required size was reported.
  CONGEST_STATUS_BUFFER_TOO_SMALL = 3,
  // Parameters, grid or continuation plan rejected.
  CONGEST_STATUS_INVALID_PARAMS = 10,
  // Malformed configuration text.
  CONGEST_STATUS_PARSE = 11,
  // The problem data violate a hypothesis of the model.
  CONGEST_STATUS_HYPOTHESIS = 12,
  // A pressure-law argument lies outside its domain.
  CONGEST_STATUS_DOMAIN = 13,
  // The time stepper aborted.
  CONGEST_STATUS_SOLVER = 20,
  // A file could not be read or written.
  CONGEST_STATUS_IO = 30,
  // An internal panic was caught.
  CONGEST_STATUS_PANIC = 99,
} CongestStatus;

// Opaque scenario description.
typedef struct CongestScenario CongestScenario;

// Opaque running simulation.
typedef struct CongestSimulation CongestSimulation;

// Run-wide diagnostics accumulated so far.
typedef struct CongestSummary {
  double time;
  size_t steps;
  double max_z;
  double energy_residual_positive;
  double max_rho_closure;
  double max_z_closure;
  double max_recovery;
  double pi_one_minus_z_time;
} CongestSummary;

// Constants of the singular pressure law. `delta = 0` selects the
// untruncated law.
typedef struct CongestPressureParams {
  double epsilon;
  double delta;
  double alpha;
  double beta;
  double gamma;
} CongestPressureParams;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or null if none failed.
// The pointer stays valid until the next failing call on the same thread.
const char *congest_last_error_message(void);

// Library version as a static NUL-terminated string.
const char *congest_version(void);

// Creates a scenario from a built-in preset name.
//
// # Safety
// `name` must be a NUL-terminated string and `out` a valid pointer.
enum CongestStatus congest_scenario_preset(const char *name, struct CongestScenario **out);

// Parses a scenario from configuration text.
//
// # Safety
// `text` must be a NUL-terminated string and `out` a valid pointer.
enum CongestStatus congest_scenario_parse(const char *text, struct CongestScenario **out);

// Releases a scenario. Null is ignored.
//
// # Safety
// `scenario` must come from this library and not be used afterwards.
void congest_scenario_free(struct CongestScenario *scenario);

// Replaces the stiffness `epsilon` and truncation width `delta`.
//
// # Safety
// `scenario` must be a live handle.
enum CongestStatus congest_scenario_set_epsilon(struct CongestScenario *scenario,
                                                double epsilon,
                                                double delta);

// Replaces the cell count along x (the aspect ratio is kept in 2D).
//
// # Safety
// `scenario` must be a live handle.
enum CongestStatus congest_scenario_set_cells(struct CongestScenario *scenario, size_t nx);

// Replaces the final time.
//
// # Safety
// `scenario` must be a live handle.
enum CongestStatus congest_scenario_set_horizon(struct CongestScenario *scenario, double horizon);

// Checks every data hypothesis. Returns `CONGEST_STATUS_HYPOTHESIS` (or
// `CONGEST_STATUS_INVALID_PARAMS`) naming the first violation; on success
// writes which stiff-limit alternative holds to `admissibility` if it is
// not null.
//
// # Safety
// `scenario` must be a live handle; `admissibility` may be null.
enum CongestStatus congest_scenario_validate(const struct CongestScenario *scenario,
                                             enum CongestAdmissibility *admissibility);

// Writes the scenario in configuration syntax, NUL-terminated, into `buf`.
// `needed` receives the required size including the terminator; when it
// exceeds `capacity` nothing is written and `CONGEST_STATUS_BUFFER_TOO_SMALL`
// is returned. `buf` may be null when `capacity` is 0.
//
// # Safety
// `buf` must be writable for `capacity` bytes and `needed` valid.
enum CongestStatus congest_scenario_to_config(const struct CongestScenario *scenario,
                                              char *buf,
                                              size_t capacity,
                                              size_t *needed);

// Runs a scenario to its horizon, writing all outputs into `dir`.
//
// # Safety
// `scenario` must be a live handle and `dir` a NUL-terminated path.
enum CongestStatus congest_run_to_dir(const struct CongestScenario *scenario, const char *dir);

// Validates the scenario and creates a simulation at `t = 0`. The scenario
// handle remains owned by the caller.
//
// # Safety
// `scenario` must be a live handle and `out` a valid pointer.
enum CongestStatus congest_simulation_new(const struct CongestScenario *scenario,
                                          struct CongestSimulation **out);

// Releases a simulation. Null is ignored.
//
// # Safety
// `sim` must come from this library and not be used afterwards.
void congest_simulation_free(struct CongestSimulation *sim);

// Advances to `t_stop`, capped at the horizon. After a solver failure the
// simulation keeps the last accepted state.
//
// # Safety
// `sim` must be a live handle.
enum CongestStatus congest_simulation_run_until(struct CongestSimulation *sim, double t_stop);

// Current simulation time, or NaN for a null handle.
//
// # Safety
// `sim` must be a live handle or null.
double congest_simulation_time(const struct CongestSimulation *sim);

// Number of cells, or 0 for a null handle.
//
// # Safety
// `sim` must be a live handle or null.
size_t congest_simulation_cell_count(const struct CongestSimulation *sim);

// Copies a cell field (row-major, x fastest) into `buf`, which must hold
// at least `congest_simulation_cell_count` values.
//
// # Safety
// `sim` must be a live handle and `buf` writable for `len` values.
enum CongestStatus congest_simulation_copy_field(const struct CongestSimulation *sim,
                                                 enum CongestField field,
                                                 double *buf,
                                                 size_t len);

// Fills `out` with the diagnostics accumulated so far.
//
// # Safety
// `sim` must be a live handle and `out` a valid pointer.
enum CongestStatus congest_simulation_summary(const struct CongestSimulation *sim,
                                              struct CongestSummary *out);

// Pressure at `z`: the truncated law when `params->delta > 0`, otherwise
// the singular law (which requires `0 <= z < 1`).
//
// # Safety
// `params` and `out` must be valid pointers.
enum CongestStatus congest_pressure(double z,
                                    const struct CongestPressureParams *params,
                                    double *out);

// Energy potential `z ∫₀^z π(s)/s² ds` of the law selected as in
// [`congest_pressure`].
//
// # Safety
// `params` and `out` must be valid pointers.
enum CongestStatus congest_pressure_potential(double z,
                                              const struct CongestPressureParams *params,
                                              double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CONGEST_H */
