#ifndef MKRAW_H
#define MKRAW_H

/*
 * C interface to the multivariate Krawtchouk library.
 *
 * Every call that produces data leaves one document (JSON with a top-level
 * "schema": 1 field, or CSV) in the session; read it with
 * mk_session_output. Failures leave a message in mk_session_error.
 * Handles are not thread-safe; use one session per thread.
 */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define MKRAW_API __declspec(dllexport)
#else
#define MKRAW_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mk_status {
  MK_OK = 0,
  MK_E_CAPACITY = 1,
  MK_E_DIMENSION = 2,
  MK_E_PROBABILITY = 3,
  MK_E_PARSE = 4,
  MK_E_UNSORTED = 5,
  MK_E_ZERO_LAST_COLUMN = 6,
  MK_E_ZERO_B = 7,
  MK_E_BASIS_CONVENTION = 8,
  MK_E_HYPERGROUP = 9,
  MK_E_REVERSIBILITY = 10,
  MK_E_MARGIN = 11,
  MK_E_SYMMETRY = 12,
  MK_E_CHARACTER_DATA = 13,
  MK_E_INDEX = 14,
  MK_E_ARGUMENT = 15,
  MK_E_NULL = 98,
  MK_E_INTERNAL = 99
} mk_status;

typedef enum mk_backend { MK_BACKEND_FLOAT = 0, MK_BACKEND_EXACT = 1 } mk_backend;
typedef enum mk_format { MK_FORMAT_JSON = 0, MK_FORMAT_CSV = 1 } mk_format;

typedef struct mk_session mk_session;
typedef struct mk_basis mk_basis;
typedef struct mk_chain mk_chain;

MKRAW_API const char* mk_status_name(mk_status status);
/* 1 when the status describes bad input or an exceeded capacity limit. */
MKRAW_API int mk_status_is_usage(mk_status status);

MKRAW_API mk_session* mk_session_new(void);
MKRAW_API void mk_session_free(mk_session* s);
MKRAW_API mk_status mk_session_set_backend(mk_session* s, mk_backend backend);
MKRAW_API mk_status mk_session_set_tolerance(mk_session* s, double tol);
/* Upper bound on enumerated states or table cells (default 10^7). */
MKRAW_API mk_status mk_session_set_capacity(mk_session* s, uint64_t cells);
MKRAW_API const char* mk_session_output(const mk_session* s);
MKRAW_API const char* mk_session_error(const mk_session* s);

/* --- bases ---------------------------------------------------------------
 * kind: "helmert", "xu", "hadamard4", "character:s3" or "character:c2^n".
 * p: comma-separated rationals ("1/2,1/3,1/6" or decimals); ignored (may be
 * NULL) for hadamard4 and character bases, whose p is fixed. */
MKRAW_API mk_status mk_basis_new(mk_session* s, const char* kind, const char* p, mk_basis** out);
MKRAW_API void mk_basis_free(mk_basis* b);
MKRAW_API int mk_basis_dim(const mk_basis* b);
MKRAW_API mk_status mk_basis_describe(mk_session* s, const mk_basis* b);

#define MK_CHECK_VALIDATE 1u
#define MK_CHECK_HYPERGROUP 2u
#define MK_CHECK_GKS 4u
#define MK_CHECK_STRONG_MONOTONE 8u
MKRAW_API mk_status mk_basis_check(mk_session* s, const mk_basis* b, unsigned checks, int* passed);

/* --- polynomials ---------------------------------------------------------- */
MKRAW_API mk_status mk_poly_table(mk_session* s, const mk_basis* b, int N, mk_format format);

#define MK_VERIFY_ORTHOGONALITY 1u
#define MK_VERIFY_DUALITY 2u
#define MK_VERIFY_XU_IDENTITY 4u
#define MK_VERIFY_RECURRENCE 8u
#define MK_VERIFY_TRANSFORM 16u
#define MK_VERIFY_KERNEL_INVARIANCE 32u
#define MK_VERIFY_EVALUATORS 64u
MKRAW_API mk_status mk_poly_verify(mk_session* s, const mk_basis* b, int N, unsigned checks,
                                   int* passed);

/* --- chains ---------------------------------------------------------------
 * kind: "metropolis", "ehrenfest", "hoare-rahmann", "circulant",
 * "lightbulb" or "lancaster". String fields are comma-separated rationals
 * and may be NULL when the kind does not use them. */
typedef struct mk_chain_params {
  const char* p;      /* stationary law (metropolis, lancaster, ehrenfest) */
  const char* q;      /* circulant step law q_0..q_{d-1} */
  const char* alpha;  /* hoare-rahmann holding probabilities */
  const char* theta;  /* hoare-rahmann refresh law */
  const char* beta;   /* lancaster eigenvalues beta_1..beta_{d-1} */
  const char* basis;  /* lancaster basis kind, default "helmert" */
  const char* law;    /* subset-size law over 0..N, for lift "law" */
  const char* lift;   /* "single-site" (default), "all-sites", "subset", "law" */
  int N;              /* number of balls, default 1 */
  int k;              /* subset size for lift "subset", ehrenfest, lightbulb */
} mk_chain_params;

MKRAW_API void mk_chain_params_init(mk_chain_params* params);
MKRAW_API mk_status mk_chain_new(mk_session* s, const char* kind, const mk_chain_params* params,
                                 mk_chain** out);
MKRAW_API void mk_chain_free(mk_chain* c);
MKRAW_API size_t mk_chain_state_count(const mk_chain* c);
MKRAW_API mk_status mk_chain_describe(mk_session* s, const mk_chain* c, mk_format format);
/* Eigenfunction residuals, spectral reconstruction, stationarity. */
MKRAW_API mk_status mk_chain_verify_eigen(mk_session* s, const mk_chain* c, int* passed);
/* Exact comparison with the lumped chain on [d]^N (requires d*N <= 12). */
MKRAW_API mk_status mk_chain_lump_check(mk_session* s, const mk_chain* c, int* passed);
/* Seeded trajectory from composition index start (0-based, descending
 * lexicographic order); trace_path, when non-NULL, receives JSON lines. */
MKRAW_API mk_status mk_chain_simulate(mk_session* s, const mk_chain* c, uint64_t steps,
                                      uint64_t seed, size_t start, const char* trace_path,
                                      double* tv_distance);

/* --- Lancaster distributions ----------------------------------------------
 * rho lists one correlation per multi-index |n| <= N in graded order; the
 * leading rho_0 = 1 may be omitted. */
MKRAW_API mk_status mk_lancaster_build(mk_session* s, const mk_basis* b, int N, const char* rho,
                                       mk_format format, int* positive);
MKRAW_API mk_status mk_lancaster_from_chain(mk_session* s, const mk_chain* c, int* positive);
/* table_csv: S rows of S entries, '#' starts a comment line. */
MKRAW_API mk_status mk_lancaster_extract(mk_session* s, const mk_basis* b, int N,
                                         const char* table_csv);
/* Triple sums over every composition triple against the base check. */
MKRAW_API mk_status mk_lancaster_check(mk_session* s, const mk_basis* b, int N, int* holds);
/* x, y: comma-separated compositions with the same total. */
MKRAW_API mk_status mk_lancaster_linearize(mk_session* s, const mk_basis* b, const char* x,
                                           const char* y, int* passed);

#ifdef __cplusplus
}
#endif

#endif
