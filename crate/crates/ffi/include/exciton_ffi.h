#ifndef EXCITON_FFI_H
#define EXCITON_FFI_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define XPH_KIND_GENERAL_NONLOCAL 0

#define XPH_KIND_FRACTIONAL_ZAKHAROV 1

#define XPH_KIND_HILBERT_ZAKHAROV 2

#define XPH_KIND_NLFSE 3

#define XPH_KIND_HILBERT_NLS 4

#define XPH_KIND_CLASSICAL_NLS 5

#define XPH_STENCIL_FORWARD 0

#define XPH_STENCIL_BACKWARD 1

#define XPH_STENCIL_SYMMETRIC 2

#define XPH_DISPERSION_FRACTIONAL 0

#define XPH_DISPERSION_HILBERT 1

#define XPH_DISPERSION_QUADRATIC 2

#define XPH_DISPERSION_EXACT_GAP 3

/**
 * Result codes.
 */
typedef enum XphStatus {
  XPH_STATUS_OK = 0,
  XPH_STATUS_NULL_POINTER = 1,
  XPH_STATUS_INVALID_ARGUMENT = 2,
  /**
   * Exponent outside the domain of the requested quantity or scenario.
   */
  XPH_STATUS_OUT_OF_DOMAIN = 3,
  XPH_STATUS_SONIC_SINGULARITY = 4,
  XPH_STATUS_ALIASING = 5,
  XPH_STATUS_STEP_TOO_LARGE = 6,
  /**
   * A non-finite value appeared during time stepping.
   */
  XPH_STATUS_DIVERGENCE = 7,
  XPH_STATUS_NO_CONVERGENCE = 8,
  XPH_STATUS_TRIVIAL_ATTRACTOR = 9,
  /**
   * Configuration document failed to parse or validate.
   */
  XPH_STATUS_INVALID_CONFIG = 10,
  XPH_STATUS_IO = 11,
  XPH_STATUS_PANIC = 12,
} XphStatus;

/**
 * Opaque continuum simulation.
 */
typedef struct XphContinuum XphContinuum;

/**
 * Opaque lattice simulation.
 */
typedef struct XphLattice XphLattice;

/**
 * Model constants; mirrors `ModelParams`.
 */
typedef struct XphParams {
  double hbar;
  double mass;
  double elasticity;
  double coupling_chi;
  double site_energy;
  double interaction_j;
  double exponent_s;
} XphParams;

typedef struct XphComplex {
  double re;
  double im;
} XphComplex;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *xph_version(void);

/**
 * Copies the calling thread's last error message (NUL-terminated, truncated
 * to `len`) into `buf` and returns the full message length.
 *
 * # Safety
 * `buf` must be null or valid for `len` bytes.
 */
size_t xph_last_error_message(char *buf, size_t len);

/**
 * Default constants (`hbar = m = w = J = 1`, `chi = eps = 0`, `s = 2.5`).
 *
 * # Safety
 * `out` must be null or point to writable memory.
 */
enum XphStatus xph_params_default(struct XphParams *out);

/**
 * Exact spectral gap `G(k) = J(0) - J(k)`.
 *
 * # Safety
 * `params` and `out` must be null or valid pointers.
 */
enum XphStatus xph_spectral_gap(const struct XphParams *params, double k, double *out);

/**
 * Lattice dispersion `J(k)`.
 *
 * # Safety
 * `params` and `out` must be null or valid pointers.
 */
enum XphStatus xph_lattice_dispersion(const struct XphParams *params, double k, double *out);

/**
 * Leading small-`k` asymptote of `G(k)`.
 *
 * # Safety
 * `params` and `out` must be null or valid pointers.
 */
enum XphStatus xph_asymptotic_gap(const struct XphParams *params, double k, double *out);

/**
 * Traveling-wave nonlinearity `gamma(v)`.
 *
 * # Safety
 * `params` and `out` must be null or valid pointers.
 */
enum XphStatus xph_gamma_coefficient(const struct XphParams *params,
                                     double wave_speed,
                                     double *out);

/**
 * `D_s` of the fractional regime.
 *
 * # Safety
 * `params` and `out` must be null or valid pointers.
 */
enum XphStatus xph_fractional_coefficient(const struct XphParams *params, double *out);

/**
 * Cubic coefficient `g`: `2 chi^2 / w`, or `2 chi / w` when `literal`.
 *
 * # Safety
 * `params` and `out` must be null or valid pointers.
 */
enum XphStatus xph_effective_nonlinearity(const struct XphParams *params,
                                          bool literal,
                                          double *out);

/**
 * Creates a chain of `sites` at rest with zero amplitudes.
 * `cutoff = 0` couples all pairs. `stencil` is one of `XPH_STENCIL_*`.
 *
 * # Safety
 * `params` and `out` must be null or valid pointers.
 */
enum XphStatus xph_lattice_new(const struct XphParams *params,
                               size_t sites,
                               bool periodic,
                               size_t cutoff,
                               uint32_t stencil,
                               double source_factor,
                               struct XphLattice **out);

/**
 * # Safety
 * `handle` must be null or come from [`xph_lattice_new`] and not be used afterwards.
 */
void xph_lattice_free(struct XphLattice *handle);

/**
 * Replaces the amplitudes (length `sites`) and resets phonons and time.
 *
 * # Safety
 * `handle` must be valid; `psi` must hold `n` elements.
 */
enum XphStatus xph_lattice_set_psi(struct XphLattice *handle,
                                   const struct XphComplex *psi,
                                   size_t n);

/**
 * Copies the amplitudes into `out` (length `n = sites`).
 *
 * # Safety
 * `handle` must be valid; `out` must hold `n` elements.
 */
enum XphStatus xph_lattice_get_psi(const struct XphLattice *handle,
                                   struct XphComplex *out,
                                   size_t n);

/**
 * Takes `steps` RK4 steps of size `dt`. On divergence the state before the
 * failing step is kept.
 *
 * # Safety
 * `handle` must be valid.
 */
enum XphStatus xph_lattice_step(struct XphLattice *handle, double dt, uint64_t steps);

/**
 * Norm, total energy and time of the current state; any pointer may be null.
 *
 * # Safety
 * `handle` must be valid; outputs must be null or writable.
 */
enum XphStatus xph_lattice_observables(const struct XphLattice *handle,
                                       double *norm,
                                       double *energy,
                                       double *time);

/**
 * Creates a split-step solver for `kind` (one of `XPH_KIND_*`) with the
 * default scenario settings on a periodic grid.
 *
 * # Safety
 * `params` and `out` must be null or valid pointers.
 */
enum XphStatus xph_continuum_new(const struct XphParams *params,
                                 uint32_t kind,
                                 double length,
                                 size_t points,
                                 double dt,
                                 struct XphContinuum **out);

/**
 * # Safety
 * `handle` must be null or come from [`xph_continuum_new`] and not be used afterwards.
 */
void xph_continuum_free(struct XphContinuum *handle);

/**
 * Replaces `psi` (length `points`) and resets the strain and time.
 *
 * # Safety
 * `handle` must be valid; `psi` must hold `n` elements.
 */
enum XphStatus xph_continuum_set_psi(struct XphContinuum *handle,
                                     const struct XphComplex *psi,
                                     size_t n);

/**
 * # Safety
 * `handle` must be valid; `out` must hold `n` elements.
 */
enum XphStatus xph_continuum_get_psi(const struct XphContinuum *handle,
                                     struct XphComplex *out,
                                     size_t n);

/**
 * # Safety
 * `handle` must be valid.
 */
enum XphStatus xph_continuum_step(struct XphContinuum *handle, uint64_t steps);

/**
 * Norm, conserved functional and time; any pointer may be null.
 *
 * # Safety
 * `handle` must be valid; outputs must be null or writable.
 */
enum XphStatus xph_continuum_observables(const struct XphContinuum *handle,
                                         double *norm,
                                         double *hamiltonian,
                                         double *time);

/**
 * Solves the traveling-wave profile equation on a periodic grid of
 * `points` samples over `length`, starting from `guess` and writing the
 * profile to `out`; `residual` (may be null) receives the max-norm residual.
 * `dispersion` is one of `XPH_DISPERSION_*`.
 *
 * # Safety
 * Pointers must be valid; `guess` and `out` must hold `points` elements.
 */
enum XphStatus xph_solve_profile(const struct XphParams *params,
                                 double wave_speed,
                                 uint32_t dispersion,
                                 double length,
                                 size_t points,
                                 double frequency_shift,
                                 const struct XphComplex *guess,
                                 struct XphComplex *out,
                                 double *residual);

/**
 * Parses, validates and runs a JSON configuration into `directory`
 * (`outputs.directory` under the output root when null). `exit_code`
 * (may be null) receives the CLI exit code of the run.
 *
 * # Safety
 * `config_json` must be a NUL-terminated string; `directory` null or NUL-terminated.
 */
enum XphStatus xph_run_config_json(const char *config_json,
                                   const char *directory,
                                   int32_t *exit_code);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* EXCITON_FFI_H */
