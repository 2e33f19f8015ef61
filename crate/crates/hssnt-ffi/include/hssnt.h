#ifndef HSSNT_H
#define HSSNT_H

/* Generated by cbindgen from hssnt-ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/* Opaque handle to a fully built Hermitian symmetric space model. */
typedef struct HssntSpace HssntSpace;

#define HSSNT_OK 0

#define HSSNT_CHECK_FAILED 1

#define HSSNT_BAD_INPUT 2

#define HSSNT_MODEL_ERROR 3

#define HSSNT_DOMAIN_ERROR 4

#define HSSNT_NULL_POINTER 5

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Builds a space from a spec string such as "su:2,2" or "sp:3".
// On success writes an owned handle into `out`; free it with
// `hssnt_space_free`.
//
// # Safety
// `spec` must be a valid NUL-terminated string and `out` a valid pointer.
int32_t hssnt_space_new(const char *spec, HssntSpace **out);

// Frees a handle returned by `hssnt_space_new`. Null is ignored.
//
// # Safety
// `ptr` must be null or a handle produced by `hssnt_space_new`, not yet
// freed.
void hssnt_space_free(HssntSpace *ptr);

// Writes the description report (rank, type, multiplicities, C,
// dimensions) as a JSON string; free it with `hssnt_string_free`.
//
// # Safety
// `space` must be a live handle; `out_json` a valid pointer.
int32_t hssnt_describe(const HssntSpace *space, char **out_json);

// Evaluates the strongly diagonal realization for the named builtin odd
// function at a point given either by rank-many coefficients in the
// normalized root-vector frame or by dim_p-many p-coordinates.
//
// # Safety
// `space` must be a live handle, `eta` a valid string, `coeffs` must
// point to `len` doubles, and `out_json` must be a valid pointer.
int32_t hssnt_realize(const HssntSpace *space,
                      const char *eta,
                      const double *coeffs,
                      size_t len,
                      char **out_json);

// Runs a verification suite ("roots", "kahler", "polydisk", "holo",
// "symp", "dual", "bergman", "duality", "tgeo" or "all") and writes the
// JSON report. Passing tol <= 0 keeps the per-check defaults; `eta` may
// be null to use the suite default map. Returns 1 (with the report
// still written) when a check fails.
//
// # Safety
// `space` must be a live handle, `suite` a valid string, `eta` null or a
// valid string, `out_json` a valid pointer.
int32_t hssnt_verify(const HssntSpace *space,
                     const char *suite,
                     uint64_t seed,
                     double tol,
                     uint32_t samples,
                     const char *eta,
                     char **out_json);

// Frees a string returned by this library. Null is ignored.
//
// # Safety
// `s` must be null or a string returned by this library, not yet freed.
void hssnt_string_free(char *s);

// Copies the most recent error message on this thread into `buf`
// (truncated, always NUL-terminated). Returns the full message length,
// or 0 if there is no pending error.
//
// # Safety
// `buf` must point to `len` writable bytes (or be null to query the
// length only).
size_t hssnt_last_error_message(char *buf, size_t len);

// Version string of the underlying library (static storage).
const char *hssnt_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HSSNT_H */
