#ifndef QEULER_H
#define QEULER_H

/* Generated with cbindgen:0.29.4 */

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

// Status codes shared by all entry points.
typedef enum QeStatus {
  QE_STATUS_OK = 0,
  QE_STATUS_NULL_POINTER = 1,
  QE_STATUS_INVALID_ARGUMENT = 2,
  QE_STATUS_INADMISSIBLE_Q = 3,
  QE_STATUS_NON_INTEGRAL_POWER = 4,
  QE_STATUS_PADIC_DOMAIN = 5,
  QE_STATUS_INVALID_WEIGHTS = 6,
  QE_STATUS_BUDGET_EXCEEDED = 7,
  QE_STATUS_PANIC = 8,
} QeStatus;

// Memo table of q-Euler numbers, shared across calls.
typedef struct QeCache QeCache;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the most recent failure on this thread, or null. Valid until
// the next failing call on the same thread.
const char *qe_last_error(void);

struct QeCache *qe_cache_new(void);

// # Safety
// `cache` must come from [`qe_cache_new`] and not be used afterwards.
void qe_cache_free(struct QeCache *cache);

// Number of recurrence evaluations stored in the cache.
//
// # Safety
// `cache` must be a live handle or null.
uintptr_t qe_cache_evaluations(const struct QeCache *cache);

// # Safety
// `s` must come from this library, or be null.
void qe_string_free(char *s);

// `E_{n, q^w}` by the recurrence.
//
// # Safety
// `cache` must be live, `q` a NUL-terminated string, `out` writable.
enum QeStatus qe_euler_number(const struct QeCache *cache,
                              uint32_t n,
                              uint64_t w,
                              const char *q,
                              char **out);

// `E_{n, q^w}` from the closed form.
//
// # Safety
// `q` must be a NUL-terminated string and `out` writable.
enum QeStatus qe_euler_number_closed(uint32_t n, uint64_t w, const char *q, char **out);

// `E_{n, q^w}(x)`; `w * x` must be an integer.
//
// # Safety
// `cache` must be live, `x` and `q` NUL-terminated strings, `out` writable.
enum QeStatus qe_euler_poly(const struct QeCache *cache,
                            uint32_t n,
                            const char *x,
                            uint64_t w,
                            const char *q,
                            char **out);

// Classical Euler polynomial `E_n(x)`.
//
// # Safety
// `x` must be a NUL-terminated string and `out` writable.
enum QeStatus qe_classical_euler_poly(uint32_t n, const char *x, char **out);

// Exact check of the shift identity for `E_{m,q}` and shift `n_shift ≥ 1`.
//
// # Safety
// `q` must be a NUL-terminated string and `holds` writable.
enum QeStatus qe_shift_identity(uint32_t m, uint32_t n_shift, const char *q, bool *holds);

// Truncated fermionic q-integral of `[y + shift]_q^degree` at level `N`,
// with `q = 1 + p t`, as a residue modulo `p^precision`.
//
// # Safety
// `residue` must be writable.
enum QeStatus qe_padic_partial_sum(uint64_t p,
                                   uint32_t precision,
                                   uint32_t level,
                                   uint32_t degree,
                                   uint64_t shift,
                                   uint64_t t,
                                   uint64_t *residue);

// Writes `v_1..=v_{max_level}` of the convergence profile into
// `valuations`, which must hold `max_level` entries.
//
// # Safety
// `valuations` must point to `max_level` writable `u32`s.
enum QeStatus qe_padic_profile(uint64_t p,
                               uint32_t precision,
                               uint32_t degree,
                               uint64_t shift,
                               uint64_t t,
                               uint32_t max_level,
                               uint32_t *valuations);

// Runs the invariance check for one weight vector and writes the JSON
// report. `seed` may be null. With `certified` set, `q_count` is ignored.
//
// # Safety
// `cache` must be live, `weights` must point to `n_weights` values, `out`
// and `passed` must be writable.
enum QeStatus qe_symmetry_report(const struct QeCache *cache,
                                 const uint64_t *weights,
                                 uintptr_t n_weights,
                                 uint32_t m_max,
                                 uint64_t x,
                                 uint32_t q_count,
                                 bool certified,
                                 const uint64_t *seed,
                                 bool *passed,
                                 char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QEULER_H */
