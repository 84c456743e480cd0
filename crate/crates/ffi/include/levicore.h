#ifndef LEVICORE_H
#define LEVICORE_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Status codes. The non-zero values below 5 match the CLI exit codes.
typedef enum LcStatus {
  LC_STATUS_OK = 0,
  LC_STATUS_IO = 1,
  LC_STATUS_PRECONDITION = 2,
  LC_STATUS_NOT_STABILIZED = 3,
  LC_STATUS_INVARIANT_BREACH = 4,
  LC_STATUS_NULL_POINTER = 5,
  LC_STATUS_INVALID_ARGUMENT = 6,
  LC_STATUS_NOT_READY = 7,
  LC_STATUS_PANIC = 8,
} LcStatus;

// Opaque pipeline handle.
typedef struct LcPipeline LcPipeline;

typedef struct LcComplex {
  double re;
  double im;
} LcComplex;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failure on this thread, or NULL. The pointer stays
// valid until the next failing call on the same thread.
const char *lc_last_error_message(void);

// Library version as a static NUL-terminated string.
const char *lc_version(void);

// Builds a pipeline from a JSON run configuration.
//
// # Safety
// `config_json` must be a NUL-terminated string and `out` a writable pointer.
enum LcStatus lc_pipeline_new(const char *config_json, struct LcPipeline **out);

// # Safety
// `p` must come from `lc_pipeline_new` and not be used afterwards. NULL is ignored.
void lc_pipeline_free(struct LcPipeline *p);

// Number of boundary samples.
//
// # Safety
// `p` must be a live handle and `out` writable.
enum LcStatus lc_pipeline_sample_count(const struct LcPipeline *p, size_t *out);

// Classifies, builds the chain and partitions the boundary. Results stay in
// the handle. On non-stabilization nothing is stored.
//
// # Safety
// `p` must be a live handle.
enum LcStatus lc_pipeline_run_core(struct LcPipeline *p);

// Weakly pseudoconvex sample count.
//
// # Safety
// `p` must be a live handle and `out` writable.
enum LcStatus lc_pipeline_weak_count(const struct LcPipeline *p, size_t *out);

// Number of chain stages, the stable one included.
//
// # Safety
// `p` must be a live handle and `out` writable.
enum LcStatus lc_pipeline_stage_count(const struct LcPipeline *p, size_t *out);

// Point count of stage `stage`.
//
// # Safety
// `p` must be a live handle and `out` writable.
enum LcStatus lc_pipeline_stage_size(const struct LcPipeline *p, size_t stage, size_t *out);

// Writes one partition code per sample: -1 strongly pseudoconvex, `a >= 0`
// dropped while deriving stage `a + 1`, and the last stage index for the
// core. `len` must equal the sample count.
//
// # Safety
// `p` must be a live handle and `labels` must hold `len` writable entries.
enum LcStatus lc_pipeline_partition(const struct LcPipeline *p, int64_t *labels, size_t len);

// Levi eigenvalues (ascending, `n - 1` of them) at a boundary point of
// `C^n`. `grad` holds `rho_{z_j}` and `hessian` is row-major with
// `hessian[j * n + k] = rho_{z_j zbar_k}`.
//
// # Safety
// `point` and `grad` must hold `n` entries, `hessian` `n * n`, `eigenvalues` `n - 1`.
enum LcStatus lc_levi_eigenvalues(size_t n,
                                  const struct LcComplex *point,
                                  double rho,
                                  const struct LcComplex *grad,
                                  const struct LcComplex *hessian,
                                  double *eigenvalues);

// Builds the witness `M |z - p_i|^2` for a finite set and verifies it on a
// grid of spacing `h`. `pass` receives 1 or 0.
//
// # Safety
// `points` must hold `len` entries and `pass` must be writable.
enum LcStatus lc_finite_witness_verify(const struct LcComplex *points,
                                       size_t len,
                                       double m,
                                       double h,
                                       int32_t *pass);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LEVICORE_H */
