/* ridgekit C API: continuous ridgelet / Radon / wavelet analysis on R^2 and
 * quasiasymptotic scaling diagnostics, exposed through opaque handles and
 * integer status codes. All functions return RDG_OK (0) on success; on
 * failure they return a status code and leave a message in
 * rdg_last_error() (thread-local). Output handles must be released with the
 * matching rdg_*_free call. */
#ifndef RIDGEKIT_H
#define RIDGEKIT_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define RDG_API __declspec(dllexport)
#else
#define RDG_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum rdg_status {
  RDG_OK = 0,
  RDG_E_INVALID = 1,    /* bad argument or malformed input */
  RDG_E_IO = 2,         /* file missing or unparsable */
  RDG_E_NUMERIC = 3,    /* numeric failure (non-finite data, singular node) */
  RDG_E_DEGENERATE = 4, /* degenerate reconstruction pair (K ~ 0 or undefined) */
  RDG_E_UNKNOWN = 9
} rdg_status;

typedef struct rdg_field rdg_field;       /* samples of f: R^2 -> R */
typedef struct rdg_sinogram rdg_sinogram; /* Radon transform samples */
typedef struct rdg_wavelet rdg_wavelet;   /* analysis wavelet profile */
typedef struct rdg_coeffs rdg_coeffs;     /* ridgelet coefficients */
typedef struct rdg_report rdg_report;     /* scaling analysis report */

RDG_API const char* rdg_last_error(void);
RDG_API const char* rdg_version(void);
RDG_API void rdg_set_threads(int n);

/* grid/transform parameters; zero-initialized fields fall back to the
 * reference desk-scale defaults */
typedef struct rdg_params {
  int ndir;       /* directions on S^1 (default 64) */
  int nb;         /* offsets (default 257) */
  int na;         /* scales (default 48) */
  double extent;  /* half-extent of the b window (default 8) */
  double amin;    /* smallest scale (default 2^-4) */
  double amax;    /* largest scale (default 2^3) */
} rdg_params;

/* ---- wavelets: spec is "bump" or "gauss:<k>" ---- */
RDG_API rdg_status rdg_wavelet_create(const char* spec, rdg_wavelet** out);
RDG_API void rdg_wavelet_free(rdg_wavelet* w);

/* ---- fields ---- */
RDG_API rdg_status rdg_field_load(const char* path, rdg_field** out);
RDG_API rdg_status rdg_field_save(const rdg_field* f, const char* path);
RDG_API rdg_status rdg_field_save_csv(const rdg_field* f, const char* path);
/* sample a gallery entry ("gaussian_delta_surrogate[:eps]", "riesz:<a>", ...)
 * on a res x res grid over [-extent, extent]^2 */
RDG_API rdg_status rdg_field_gallery(const char* gallery_spec, int res, double extent,
                                     rdg_field** out);
RDG_API rdg_status rdg_field_dims(const rdg_field* f, int* nx, int* ny);
RDG_API rdg_status rdg_field_rel_l2(const rdg_field* a, const rdg_field* b, double* out);
RDG_API void rdg_field_free(rdg_field* f);

/* ---- radon ---- */
typedef enum rdg_radon_method { RDG_RADON_DIRECT = 0, RDG_RADON_FOURIER_SLICE = 1 } rdg_radon_method;
RDG_API rdg_status rdg_radon(const rdg_field* f, int ndir, int np, double extent,
                             rdg_radon_method method, rdg_sinogram** out);
RDG_API rdg_status rdg_sinogram_save(const rdg_sinogram* s, const char* path);
RDG_API rdg_status rdg_sinogram_load(const char* path, rdg_sinogram** out);
RDG_API rdg_status rdg_sinogram_rel_l2(const rdg_sinogram* a, const rdg_sinogram* b, double* out);
RDG_API void rdg_sinogram_free(rdg_sinogram* s);

/* ---- ridgelet transform ---- */
typedef enum rdg_ridgelet_method { RDG_RIDGELET_DIRECT = 0, RDG_RIDGELET_VIA_RADON = 1 } rdg_ridgelet_method;
RDG_API rdg_status rdg_ridgelet(const rdg_field* f, const rdg_wavelet* psi,
                                const rdg_params* params, rdg_ridgelet_method method,
                                rdg_coeffs** out);
RDG_API rdg_status rdg_coeffs_save(const rdg_coeffs* c, const char* path);
RDG_API rdg_status rdg_coeffs_load(const char* path, rdg_coeffs** out);
RDG_API rdg_status rdg_coeffs_rel_l2(const rdg_coeffs* a, const rdg_coeffs* b, double* out);
RDG_API void rdg_coeffs_free(rdg_coeffs* c);

/* ---- synthesis / inversion ---- */
RDG_API rdg_status rdg_synthesize(const rdg_coeffs* c, const rdg_wavelet* eta, int res,
                                  double extent, rdg_field** out);
/* (1/K_{psi,eta}) R^t_eta R_psi f; K and the relative L2 error vs f are
 * reported. Degenerate pairs yield RDG_E_DEGENERATE. */
RDG_API rdg_status rdg_reconstruct(const rdg_field* f, const rdg_wavelet* psi,
                                   const rdg_wavelet* eta, const rdg_params* params,
                                   rdg_field** out, double* rel_l2, double* k_re, double* k_im);
/* inversion from stored coefficients: (1/K_{psi,eta}) R^t_eta applied to c,
 * where psi is the analysis wavelet the coefficients were computed with */
RDG_API rdg_status rdg_invert(const rdg_coeffs* c, const rdg_wavelet* psi,
                              const rdg_wavelet* eta, int res, double extent, rdg_field** out,
                              double* k_re, double* k_im);
RDG_API rdg_status rdg_reconstruction_constant(const rdg_wavelet* psi, const rdg_wavelet* eta,
                                               int n, double* k_re, double* k_im,
                                               double* err_bound);

/* ---- scaling analysis ---- */
typedef struct rdg_scaling_params {
  int regime_origin;   /* 0 = infinity (default), 1 = origin */
  int ndir, n_probes, n_windows, n_lambda;
  double lam_lo, lam_hi; /* 0 = regime default */
  uint64_t seed;
  const char* wavelet;   /* NULL = "bump" */
} rdg_scaling_params;

RDG_API rdg_status rdg_scaling_gallery(const char* gallery_spec, const rdg_scaling_params* sp,
                                       rdg_report** out);
RDG_API rdg_status rdg_scaling_field(const rdg_field* f, const rdg_scaling_params* sp,
                                     rdg_report** out);
RDG_API rdg_status rdg_report_write_json(const rdg_report* r, const char* path);
RDG_API rdg_status rdg_report_write_orbits_csv(const rdg_report* r, const char* path);
/* verdict: 0 = quasiasymptotic, 1 = not quasiasymptotic, 2 = indeterminate */
RDG_API rdg_status rdg_report_verdict(const rdg_report* r, int* verdict);
RDG_API rdg_status rdg_report_alpha(const rdg_report* r, double* alpha_hat, int* determined);
RDG_API void rdg_report_free(rdg_report* r);

/* ---- selftest ---- */
/* Runs the invariant suite; returns the number of failed checks through
 * n_failures and writes the JSON summary to path when non-NULL. inject=1
 * flips the a^{-n} synthesis measure (mutation fixture). */
RDG_API rdg_status rdg_selftest(int quick, int inject, const char* json_path, int* n_failures);

#ifdef __cplusplus
}
#endif

#endif /* RIDGEKIT_H */
