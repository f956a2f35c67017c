#ifndef NILMIX_H
#define NILMIX_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum NilmixStatus {
  NILMIX_STATUS_OK = 0,
  NILMIX_STATUS_NULL_POINTER = 1,
  NILMIX_STATUS_INVALID_ARGUMENT = 2,
  NILMIX_STATUS_CAP_EXCEEDED = 3,
  NILMIX_STATUS_NOT_GENERATING = 4,
  NILMIX_STATUS_BUFFER_TOO_SMALL = 5,
  NILMIX_STATUS_INTERNAL = 6,
  NILMIX_STATUS_PANIC = 7,
} NilmixStatus;

typedef enum NilmixFamily {
  NILMIX_FAMILY_UNITRIANGULAR = 0,
  NILMIX_FAMILY_HEISENBERG = 1,
} NilmixFamily;

// An enumerated group.
typedef struct NilmixGroup NilmixGroup;

// A continuous-time walk on a group, with its step multiset.
typedef struct NilmixWalk NilmixWalk;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Copies the last error message of this thread into `buf` (NUL-terminated,
// truncated to `len`). Returns the full message length including the NUL,
// or 0 if there is none.
//
// # Safety
// `buf` must be null or point to `len` writable bytes.
size_t nilmix_last_error(char *buf, size_t len);

// Library version as a static NUL-terminated string.
const char *nilmix_version(void);

// Builds `U(m, d)` or `H(m, d)`. `cap` bounds `|G|`; 0 uses the default.
//
// # Safety
// `out` must point to writable storage for one pointer.
enum NilmixStatus nilmix_group_new(enum NilmixFamily family,
                                   uint32_t m,
                                   uint32_t d,
                                   size_t cap,
                                   struct NilmixGroup **out);

// Builds `Z_{n_1} x ... x Z_{n_len}`.
//
// # Safety
// `moduli` must point to `len` readable values; `out` as for
// [`nilmix_group_new`].
enum NilmixStatus nilmix_group_new_abelian(const uint32_t *moduli,
                                           size_t len,
                                           size_t cap,
                                           struct NilmixGroup **out);

// # Safety
// `g` must be null or a handle from `nilmix_group_new*` not yet freed.
void nilmix_group_free(struct NilmixGroup *g);

// `|G|`, or 0 for a null handle.
//
// # Safety
// `g` must be null or a live group handle.
size_t nilmix_group_order(const struct NilmixGroup *g);

// Nilpotency class, or 0 for a null handle.
//
// # Safety
// `g` must be null or a live group handle.
size_t nilmix_group_step(const struct NilmixGroup *g);

// `|G_ab|`, or 0 for a null handle.
//
// # Safety
// `g` must be null or a live group handle.
size_t nilmix_group_ab_order(const struct NilmixGroup *g);

// Writes `|G_1|, ..., |G_{L+1}|` into `buf`. `*written` receives the
// series length; if it exceeds `len` nothing is copied and
// `BufferTooSmall` is returned.
//
// # Safety
// `g` must be a live group handle, `buf` must point to `len` writable
// values and `written` to one.
enum NilmixStatus nilmix_group_series(const struct NilmixGroup *g,
                                      size_t *buf,
                                      size_t len,
                                      size_t *written);

// `t_0(k, N)`: the time at which the rate-1 walk on `Z^k` reaches entropy
// `log N`.
//
// # Safety
// `t0` must point to writable storage.
enum NilmixStatus nilmix_entropic_time(size_t k, double n, double *t0);

// The cutoff time `t_*` for `k` random generators of `g`; `omega <= 0`
// uses the default.
//
// # Safety
// `g` must be a live group handle and `t_star` writable.
enum NilmixStatus nilmix_cutoff_time(const struct NilmixGroup *g,
                                     size_t k,
                                     double omega,
                                     double *t_star);

// The walk stepping by `Z_i^{±1}` for the given element indices.
//
// # Safety
// `g` must be a live group handle, `members` must point to `k` readable
// indices and `out` to writable storage.
enum NilmixStatus nilmix_walk_new(const struct NilmixGroup *g,
                                  const uint32_t *members,
                                  size_t k,
                                  struct NilmixWalk **out);

// The walk for `k` uniform generators, redrawn until they generate.
//
// # Safety
// As for [`nilmix_walk_new`].
enum NilmixStatus nilmix_walk_new_random(const struct NilmixGroup *g,
                                         size_t k,
                                         uint64_t seed,
                                         struct NilmixWalk **out);

// # Safety
// `w` must be null or a live walk handle.
void nilmix_walk_free(struct NilmixWalk *w);

// Copies the generator indices `Z_1, ..., Z_k` into `buf`, as
// [`nilmix_group_series`] does for the series.
//
// # Safety
// `w` must be a live walk handle, `buf` must point to `len` writable
// values and `written` to one.
enum NilmixStatus nilmix_walk_generators(const struct NilmixWalk *w,
                                         uint32_t *buf,
                                         size_t len,
                                         size_t *written);

// Diameter of the Cayley graph; `NotGenerating` if it is disconnected.
//
// # Safety
// `w` must be a live walk handle and `diam` writable.
enum NilmixStatus nilmix_walk_diameter(const struct NilmixWalk *w, uint32_t *diam);

// `d(t)`: total variation distance from uniform at time `t`, started at
// the identity.
//
// # Safety
// `w` must be a live walk handle and `d` writable.
enum NilmixStatus nilmix_walk_tv(const struct NilmixWalk *w, double t, double *d);

// `t_mix(eps)` from the identity.
//
// # Safety
// `w` must be a live walk handle and `t` writable.
enum NilmixStatus nilmix_walk_mixing_time(const struct NilmixWalk *w, double eps, double *t);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* NILMIX_H */
