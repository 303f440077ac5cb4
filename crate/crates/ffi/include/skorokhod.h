#ifndef SKOROKHOD_H
#define SKOROKHOD_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

typedef enum SkConstruction {
  SK_CONSTRUCTION_AZEMA_YOR = 0,
  SK_CONSTRUCTION_REVERSED_AZEMA_YOR = 1,
  SK_CONSTRUCTION_JACKA = 2,
} SkConstruction;

typedef enum SkSide {
  SK_SIDE_BELOW = 0,
  SK_SIDE_ABOVE = 1,
} SkSide;

typedef enum SkStatus {
  SK_STATUS_OK = 0,
  SK_STATUS_NULL_POINTER = 1,
  SK_STATUS_INVALID_MEASURE = 2,
  SK_STATUS_INVALID_ARGUMENT = 3,
  SK_STATUS_INVALID_TANGENT = 4,
  SK_STATUS_INADMISSIBLE_C = 5,
  SK_STATUS_INCOMPLETE_PLAN = 6,
  SK_STATUS_UNDEFINED_PHI = 7,
  SK_STATUS_PARSE_ERROR = 8,
  SK_STATUS_PLAN_MISMATCH = 9,
  SK_STATUS_INDEX_OUT_OF_RANGE = 10,
  SK_STATUS_PANIC = 11,
} SkStatus;

// Opaque atomic measure.
typedef struct SkMeasure SkMeasure;

// Opaque embedding plan.
typedef struct SkPlan SkPlan;

// Message of the last failed call on this thread; empty after a success.
// Valid until the next call into this library on the same thread.
const char *sk_last_error(void);

// Builds a measure from `len` positions and positive weights with total
// mass at most 1. Coincident positions are merged.
//
// # Safety
// `positions` and `weights` must point to `len` readable values.
enum SkStatus sk_measure_new(const double *positions,
                             const double *weights,
                             uintptr_t len,
                             struct SkMeasure **out);

// # Safety
// `m` must be null or a handle from this library not yet freed.
void sk_measure_free(struct SkMeasure *m);

// # Safety
// `m` must be a live handle; `out` must be writable.
enum SkStatus sk_measure_len(const struct SkMeasure *m, uintptr_t *out);

// Atom `index` in increasing position order.
//
// # Safety
// `m` must be a live handle; the out-pointers must be writable.
enum SkStatus sk_measure_atom(const struct SkMeasure *m,
                              uintptr_t index,
                              double *position,
                              double *weight);

// # Safety
// `m` must be a live handle; `out` must be writable.
enum SkStatus sk_measure_mean(const struct SkMeasure *m, double *out);

// `u(x) = -Σ wᵢ|x - xᵢ|`.
//
// # Safety
// `m` must be a live handle; `out` must be writable.
enum SkStatus sk_potential(const struct SkMeasure *m, double x, double *out);

// # Safety
// Handles must be live; `out` must be writable.
enum SkStatus sk_gap_c(const struct SkMeasure *mu0, const struct SkMeasure *mu, double *out);

// Number of components of the contact set and its extreme points
// (`±INFINITY` when unbounded).
//
// # Safety
// Handles must be live; out-pointers must be writable.
enum SkStatus sk_region_a(const struct SkMeasure *mu0,
                          const struct SkMeasure *mu,
                          uintptr_t *components,
                          double *a_minus,
                          double *a_plus);

// Closed component `index` of the contact set; a point has `lo == hi`.
//
// # Safety
// Handles must be live; out-pointers must be writable.
enum SkStatus sk_region_a_component(const struct SkMeasure *mu0,
                                    const struct SkMeasure *mu,
                                    uintptr_t index,
                                    double *lo,
                                    double *hi);

// # Safety
// Handles must be live; `out` must be writable.
enum SkStatus sk_max_law_bound(const struct SkMeasure *mu0,
                               const struct SkMeasure *mu,
                               double x,
                               double *out);

// # Safety
// Handles must be live; `out` must be writable.
enum SkStatus sk_ay_max_law(const struct SkMeasure *mu0,
                            const struct SkMeasure *mu,
                            double x,
                            double *out);

// # Safety
// Handles must be live; `out` must be writable.
enum SkStatus sk_barycentre(const struct SkMeasure *mu0,
                            const struct SkMeasure *mu,
                            double x,
                            double *out);

// Builds one of the sweep constructions at the gap constant.
//
// # Safety
// Handles must be live; `out` must be writable.
enum SkStatus sk_plan_build(const struct SkMeasure *mu0,
                            const struct SkMeasure *mu,
                            enum SkConstruction kind,
                            struct SkPlan **out);

// ε-approximate Vallois construction; may be truncated, see
// [`sk_plan_is_complete`].
//
// # Safety
// Handles must be live; `out` must be writable.
enum SkStatus sk_plan_vallois(const struct SkMeasure *mu0,
                              const struct SkMeasure *mu,
                              double eps,
                              uintptr_t max_steps,
                              struct SkPlan **out);

// Applies `n` tangents `slopes[i] * x + intercepts[i]` in order, aiming at
// `u_mu - c`.
//
// # Safety
// Handles must be live; the arrays must hold `n` values; `out` must be
// writable.
enum SkStatus sk_plan_custom(const struct SkMeasure *mu0,
                             const struct SkMeasure *mu,
                             const double *slopes,
                             const double *intercepts,
                             uintptr_t n,
                             double c,
                             struct SkPlan **out);

// # Safety
// `p` must be null or a handle from this library not yet freed.
void sk_plan_free(struct SkPlan *p);

// # Safety
// `p` must be a live handle; `out` must be writable.
enum SkStatus sk_plan_step_count(const struct SkPlan *p, uintptr_t *out);

// Tangent and interval of step `index`; open ends are `±INFINITY`.
//
// # Safety
// `p` must be a live handle; out-pointers must be writable.
enum SkStatus sk_plan_step(const struct SkPlan *p,
                           uintptr_t index,
                           double *slope,
                           double *intercept,
                           double *lower,
                           double *upper);

// # Safety
// `p` must be a live handle; out-pointers must be writable.
enum SkStatus sk_plan_summary(const struct SkPlan *p, double *c, double *residual);

// # Safety
// `p` must be a live handle; `out` must be writable.
enum SkStatus sk_plan_is_complete(const struct SkPlan *p, bool *out);

// Law reached by the plan, as a new handle.
//
// # Safety
// `p` must be a live handle; `out` must be writable.
enum SkStatus sk_plan_final_measure(const struct SkPlan *p, struct SkMeasure **out);

// Serialises a plan; release the string with [`sk_string_free`].
//
// # Safety
// `p` must be a live handle; `out` must be writable.
enum SkStatus sk_plan_to_json(const struct SkPlan *p, char **out);

// Reads and replays a plan file.
//
// # Safety
// `json` must be a NUL-terminated string; `out` must be writable.
enum SkStatus sk_plan_from_json(const char *json, struct SkPlan **out);

// # Safety
// `s` must be null or a string returned by this library not yet freed.
void sk_string_free(char *s);

// Expected local time at zero accumulated by a complete plan.
//
// # Safety
// `p` must be a live handle; `out` must be writable.
enum SkStatus sk_expected_local_time_zero(const struct SkPlan *p, double *out);

// Total variation distance between the law of `n` simulated endpoints and
// the target.
//
// # Safety
// `p` must be a live handle; `out` must be writable.
enum SkStatus sk_simulate_tv(const struct SkPlan *p, uintptr_t n, uint64_t seed, double *out);

// Estimate and standard error of `P(T > H_{-γ}, B₀ ≥ a₋)` (below) or
// `P(T > H_γ, B₀ ≤ a₊)` (above), with 𝒜 taken from the plan's measures.
//
// # Safety
// `p` must be a live handle; out-pointers must be writable.
enum SkStatus sk_tail_probability(const struct SkPlan *p,
                                  double gamma,
                                  enum SkSide side,
                                  uintptr_t n,
                                  uint64_t seed,
                                  double *estimate,
                                  double *std_error);

#endif /* SKOROKHOD_H */
