#ifndef NOF_LAB_H
#define NOF_LAB_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

/**
 * Result code of every fallible call.
 */
typedef enum NofStatus {
  NOF_STATUS_OK = 0,
  NOF_STATUS_NULL_POINTER = 1,
  NOF_STATUS_INVALID_ARGUMENT = 2,
  NOF_STATUS_DIMENSION_MISMATCH = 3,
  NOF_STATUS_HYPOTHESIS_VIOLATED = 4,
  NOF_STATUS_AMBIGUOUS = 5,
  NOF_STATUS_NO_SOLUTION = 6,
  NOF_STATUS_LIMIT_EXCEEDED = 7,
  NOF_STATUS_CORRUPT_TRANSCRIPT = 8,
  NOF_STATUS_UNKNOWN_FUNCTION = 9,
  NOF_STATUS_PANIC = 10,
} NofStatus;

/**
 * A `k × n` matrix over `Z_d`.
 */
typedef struct NofMatrix NofMatrix;

/**
 * A composed function `f ∘ (g_1, …, g_n)`.
 */
typedef struct NofSpec NofSpec;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Builds a matrix from `k·n` row-major entries.
 *
 * # Safety
 * `entries` must point to `k·n` readable values and `out` must be writable.
 */
enum NofStatus nof_matrix_new(uint32_t d,
                              uintptr_t k,
                              uintptr_t n,
                              const uint32_t *entries,
                              struct NofMatrix **out);

/**
 * Uniformly random matrix from a ChaCha8 stream seeded with `seed`.
 *
 * # Safety
 * `out` must be writable.
 */
enum NofStatus nof_matrix_random(uint32_t d,
                                 uintptr_t k,
                                 uintptr_t n,
                                 uint64_t seed,
                                 struct NofMatrix **out);

/**
 * # Safety
 * `m` must come from this library and not be used afterwards. NULL is ignored.
 */
void nof_matrix_free(struct NofMatrix *m);

/**
 * # Safety
 * `m` must be a live handle; the out pointers must be writable.
 */
enum NofStatus nof_matrix_dims(const struct NofMatrix *m, uintptr_t *k, uintptr_t *n, uint32_t *d);

/**
 * Entry in row `i`, column `j`.
 *
 * # Safety
 * `m` must be a live handle and `out` writable.
 */
enum NofStatus nof_matrix_get(const struct NofMatrix *m, uintptr_t i, uintptr_t j, uint32_t *out);

/**
 * A named function: `GIP`, `DISJ`, `MAJ-MAJ` or `MAJ-THR:<s>`.
 *
 * # Safety
 * `name` must be a nul-terminated string and `out` writable.
 */
enum NofStatus nof_spec_named(const char *name,
                              uint32_t d,
                              uintptr_t k,
                              uintptr_t n,
                              struct NofSpec **out);

/**
 * Random outer function with random inner functions, pairwise distinct
 * when `mixed` is true and all equal otherwise.
 *
 * # Safety
 * `out` must be writable.
 */
enum NofStatus nof_spec_random(uint32_t d,
                               uintptr_t k,
                               uintptr_t n,
                               bool mixed,
                               uint64_t seed,
                               struct NofSpec **out);

/**
 * # Safety
 * `s` must come from this library and not be used afterwards. NULL is ignored.
 */
void nof_spec_free(struct NofSpec *s);

/**
 * The function's value computed column by column.
 *
 * # Safety
 * Both handles must be live and `out` writable.
 */
enum NofStatus nof_direct_eval(const struct NofSpec *s, const struct NofMatrix *m, bool *out);

/**
 * Runs the equation-solving protocol (one shared inner function) and
 * evaluates the function from the recovered counts. `bits` receives the
 * transcript length.
 *
 * # Safety
 * Both handles must be live; `value` and `bits` must be writable.
 */
enum NofStatus nof_eqsolve_eval(const struct NofSpec *s,
                                const struct NofMatrix *m,
                                bool strict,
                                bool *value,
                                uint64_t *bits);

/**
 * Runs the full protocol with `l` counting rows (`0` picks the default).
 *
 * # Safety
 * Both handles must be live; `value` and `bits` must be writable.
 */
enum NofStatus nof_full_eval(const struct NofSpec *s,
                             const struct NofMatrix *m,
                             uintptr_t l,
                             bool strict,
                             bool *value,
                             uint64_t *bits);

/**
 * Message of the last failed call on this thread, or NULL. Valid until the
 * next call into the library from the same thread.
 */
const char *nof_last_error(void);

/**
 * Static name of a status code; unknown codes give `"unknown status"`.
 */
const char *nof_status_str(int32_t status);

const char *nof_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* NOF_LAB_H */
