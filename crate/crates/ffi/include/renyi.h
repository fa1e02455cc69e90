#ifndef RENYI_H
#define RENYI_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result code of every fallible call.
typedef enum RenyiStatus {
  RENYI_STATUS_OK = 0,
  RENYI_STATUS_NULL_POINTER = 1,
  // An order, evaluation point or length was out of range.
  RENYI_STATUS_INVALID_ARGUMENT = 2,
  // Weights failed validation (negative, non-finite, not normalized, ...).
  RENYI_STATUS_INVALID_INPUT = 3,
  // Text was not valid UTF-8 or not valid JSON for the expected shape.
  RENYI_STATUS_PARSE_ERROR = 4,
  // A Rust panic was caught at the boundary.
  RENYI_STATUS_INTERNAL = 5,
} RenyiStatus;

// Markov ordering of two curves; `Less` means the first is below the second
// in the lattice order (its curve lies above).
typedef enum RenyiOrdering {
  RENYI_ORDERING_EQUAL = 0,
  RENYI_ORDERING_LESS = 1,
  RENYI_ORDERING_GREATER = 2,
  RENYI_ORDERING_INCOMPARABLE = 3,
} RenyiOrdering;

// Opaque Lorenz curve.
typedef struct RenyiCurve RenyiCurve;

// Opaque pair of measures `(P, Q)` on a labelled finite alphabet.
typedef struct RenyiPair RenyiPair;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the most recent failure on this thread, or null.
//
// The pointer stays valid until the next failing call on the same thread.
const char *renyi_last_error_message(void);

// Builds a pair from two aligned arrays of length `n`; atoms are labelled `x0`, `x1`, ...
//
// # Safety
// `p` and `q` must point to `n` readable doubles; `out` must be valid for writes.
enum RenyiStatus renyi_pair_from_arrays(const double *p,
                                        const double *q,
                                        size_t n,
                                        struct RenyiPair **out);

// Parses a pair from `{"atoms": [{"label": ..., "p": ..., "q": ...}, ...]}`.
//
// # Safety
// `json` must be a NUL-terminated string; `out` must be valid for writes.
enum RenyiStatus renyi_pair_from_json(const char *json, struct RenyiPair **out);

// Releases a pair; null is ignored.
//
// # Safety
// `pair` must come from this library and not have been freed.
void renyi_pair_free(struct RenyiPair *pair);

// Number of atoms kept in the pair.
//
// # Safety
// `pair` must be a live handle; `out` must be valid for writes.
enum RenyiStatus renyi_pair_len(const struct RenyiPair *pair, size_t *out);

// `D_α(P‖Q)` in nats; may be `INFINITY`.
//
// # Safety
// `pair` must be a live handle; `out` must be valid for writes.
enum RenyiStatus renyi_divergence(const struct RenyiPair *pair, double alpha, double *out);

// Power divergence `d_α` for finite `α > 0`, `α ≠ 1`.
//
// # Safety
// `pair` must be a live handle; `out` must be valid for writes.
enum RenyiStatus renyi_power_divergence(const struct RenyiPair *pair, double alpha, double *out);

// Lorenz curve of a pair.
//
// # Safety
// `pair` must be a live handle; `out` must be valid for writes.
enum RenyiStatus renyi_curve_build(const struct RenyiPair *pair, struct RenyiCurve **out);

// Releases a curve; null is ignored.
//
// # Safety
// `curve` must come from this library and not have been freed.
void renyi_curve_free(struct RenyiCurve *curve);

// Pointwise maximum of two curves (greatest lower bound).
//
// # Safety
// `a` and `b` must be live handles; `out` must be valid for writes.
enum RenyiStatus renyi_curve_meet(const struct RenyiCurve *a,
                                  const struct RenyiCurve *b,
                                  struct RenyiCurve **out);

// Convex envelope of the pointwise minimum (least upper bound).
//
// # Safety
// `a` and `b` must be live handles; `out` must be valid for writes.
enum RenyiStatus renyi_curve_join(const struct RenyiCurve *a,
                                  const struct RenyiCurve *b,
                                  struct RenyiCurve **out);

// # Safety
// `a` and `b` must be live handles; `out` must be valid for writes.
enum RenyiStatus renyi_curve_compare(const struct RenyiCurve *a,
                                     const struct RenyiCurve *b,
                                     enum RenyiOrdering *out);

// `L(u)` for `u ∈ [0, 1]`.
//
// # Safety
// `curve` must be a live handle; `out` must be valid for writes.
enum RenyiStatus renyi_curve_evaluate(const struct RenyiCurve *curve, double u, double *out);

// Singular P-mass of the curve, `1 − L(1)`.
//
// # Safety
// `curve` must be a live handle; `out` must be valid for writes.
enum RenyiStatus renyi_curve_singular_mass(const struct RenyiCurve *curve, double *out);

// `D_α` of any pair with this curve.
//
// # Safety
// `curve` must be a live handle; `out` must be valid for writes.
enum RenyiStatus renyi_curve_divergence(const struct RenyiCurve *curve, double alpha, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RENYI_H */
