#ifndef PHOTON_FILTER_H
#define PHOTON_FILTER_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum {
  PF_OK = 0,
  PF_ERR_NULL_POINTER = 1,
  PF_ERR_INVALID_PARAMETER = 2,
  PF_ERR_INVALID_TRUNCATION = 3,
  PF_ERR_INVALID_MATRIX = 4,
  PF_ERR_DIMENSION = 5,
  PF_ERR_NEVER_CLICKS = 6,
  PF_ERR_COMB_ALIASING = 7,
  PF_ERR_BUFFER_TOO_SMALL = 8,
  PF_ERR_PANIC = 99,
} PfStatus;

typedef enum {
  PF_MODE_EXACT = 0,
  PF_MODE_PAPER_LITERAL = 1,
} PfFilterMode;

/**
 * Opaque density matrix handle.
 */
typedef struct PfDensityMatrix PfDensityMatrix;

typedef struct {
  double re;
  double im;
} PfComplex;

/**
 * Device settings; `n_kerr` is 1 or 2.
 */
typedef struct {
  double tau;
  double chi_t;
  double psi;
  double eta;
  uint8_t n_kerr;
} PfCavityParams;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *pf_version(void);

/**
 * Message for the last failed call on this thread; empty after a success.
 *
 * The pointer stays valid until the next `pf_*` call on the same thread.
 */
const char *pf_last_error_message(void);

/**
 * Truncated coherent state `|beta><beta|` (trace slightly below one).
 */
PfStatus pf_density_matrix_coherent(PfComplex beta, size_t n_trunc, PfDensityMatrix **out);

PfStatus pf_density_matrix_fock(size_t n, size_t n_trunc, PfDensityMatrix **out);

/**
 * Validated density matrix from `dim * dim` row-major entries.
 *
 * `mode_dims` lists the dimension of each mode; their product must equal `dim`.
 */
PfStatus pf_density_matrix_from_entries(const PfComplex *entries,
                                        size_t dim,
                                        const size_t *mode_dims,
                                        size_t n_modes,
                                        PfDensityMatrix **out);

/**
 * Releases a handle. Null is ignored.
 */
void pf_density_matrix_free(PfDensityMatrix *rho);

PfStatus pf_density_matrix_dim(const PfDensityMatrix *rho, size_t *out);

PfStatus pf_density_matrix_n_modes(const PfDensityMatrix *rho, size_t *out);

PfStatus pf_density_matrix_get(const PfDensityMatrix *rho, size_t row, size_t col, PfComplex *out);

/**
 * Copies all entries row-major into `buf`, which must hold at least `dim * dim` values.
 */
PfStatus pf_density_matrix_entries(const PfDensityMatrix *rho, PfComplex *buf, size_t len);

PfStatus pf_density_matrix_purity(const PfDensityMatrix *rho, double *out);

/**
 * Photon-number distribution of a single-mode state into `buf` (at least `dim` values).
 */
PfStatus pf_photon_number_distribution(const PfDensityMatrix *rho, double *buf, size_t len);

/**
 * `<psi|rho|psi> / <psi|psi>` for a state vector of length `dim`.
 */
PfStatus pf_fidelity_with_pure(const PfDensityMatrix *rho,
                               const PfComplex *psi,
                               size_t len,
                               double *out);

PfStatus pf_partial_trace(const PfDensityMatrix *rho, size_t keep_mode, PfDensityMatrix **out);

/**
 * Conditional single-mode output state and its success probability.
 */
PfStatus pf_conditional_output(const PfDensityMatrix *nu,
                               PfComplex alpha,
                               const PfCavityParams *params,
                               PfFilterMode mode,
                               PfDensityMatrix **out_rho,
                               double *out_p_on);

/**
 * Conditional two-mode output; `params.n_kerr` must be 2.
 */
PfStatus pf_two_mode_conditional_output(const PfDensityMatrix *nu1,
                                        const PfDensityMatrix *nu2,
                                        PfComplex alpha,
                                        const PfCavityParams *params,
                                        PfFilterMode mode,
                                        PfDensityMatrix **out_rho,
                                        double *out_p_on);

PfStatus pf_success_probability(const PfDensityMatrix *nu,
                                PfComplex alpha,
                                const PfCavityParams *params,
                                double *out);

PfComplex pf_kappa(double phi, double tau);

PfComplex pf_sigma(double phi, double tau);

/**
 * Comb spacing `l*` and first peak `n*` of a cavity setting.
 */
PfStatus pf_comb(const PfCavityParams *params, double *out_l_star, double *out_n_star);

/**
 * Coherent amplitude giving equal weight to `|n*>` and `|n*+l*>`.
 */
PfStatus pf_design_superposition(size_t n_star, size_t l_star, double phase, PfComplex *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PHOTON_FILTER_H */
