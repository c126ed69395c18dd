#ifndef PROJEX_H
#define PROJEX_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result codes shared by all functions.
typedef enum ProjexStatus {
  PROJEX_STATUS_OK = 0,
  PROJEX_STATUS_NULL_POINTER = 1,
  PROJEX_STATUS_INVALID_ARGUMENT = 2,
  PROJEX_STATUS_DOMAIN = 3,
  PROJEX_STATUS_CAP_EXCEEDED = 4,
  PROJEX_STATUS_CONDITION_FAILED = 5,
  PROJEX_STATUS_NEED_EXACT = 6,
  PROJEX_STATUS_OVERFLOW = 7,
  PROJEX_STATUS_IO = 8,
  PROJEX_STATUS_PANIC = 9,
} ProjexStatus;

// Union of closed balls of a common rational radius.
typedef struct ProjexBallUnion ProjexBallUnion;

// Result of a bigex construction.
typedef struct ProjexBigex ProjexBigex;

// Finite set of exact rational points.
typedef struct ProjexPointSet ProjexPointSet;

// Grid projection check for `{1..n}²` along `c(1, p/q)`.
typedef struct ProjexGridCheck {
  uint64_t cardinality;
  // `(1 + p)(1 + q)n`
  uint64_t bound;
  uint64_t min_preimages;
  // 1 when the cardinality bound and the preimage count hold.
  int32_t holds;
} ProjexGridCheck;

// Parameters of [`projex_bounds_evaluate`]; a NaN field is absent.
typedef struct ProjexBoundQuery {
  double gamma;
  double sigma;
  double s;
  double tau;
  double m;
} ProjexBoundQuery;

// Summary of a bigex run.
typedef struct ProjexBigexSummary {
  // 1 when every certificate passes.
  int32_t passed;
  uint32_t d;
  uint64_t root_checks;
  uint64_t root_violations;
  // 1 when an expansion was built.
  int32_t expanded;
  uint32_t expansion_n;
  uint64_t children;
  // Constant `c_w` of the children.
  double c_child;
  int32_t arcs_disjoint;
  uint64_t child_checks;
  uint64_t child_violations;
} ProjexBigexSummary;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failure on this thread, or null. The pointer stays
// valid until the next failing call on the same thread.
const char *projex_last_error(void);

// Library version as a static NUL-terminated string.
const char *projex_version(void);

// Point set from `len` coordinates `x_num[i]/x_den[i]`, `y_num[i]/y_den[i]`.
//
// # Safety
// The four arrays must hold `len` elements; `out` must be writable.
enum ProjexStatus projex_point_set_new(const int64_t *x_num,
                                       const int64_t *x_den,
                                       const int64_t *y_num,
                                       const int64_t *y_den,
                                       size_t len,
                                       struct ProjexPointSet **out);

// The grid `{1..n}²`.
//
// # Safety
// `out` must be writable.
enum ProjexStatus projex_point_set_grid(int64_t n, struct ProjexPointSet **out);

// # Safety
// `set` must come from this library or be null.
void projex_point_set_free(struct ProjexPointSet *set);

// Number of distinct points, or 0 for null.
//
// # Safety
// `set` must come from this library or be null.
size_t projex_point_set_len(const struct ProjexPointSet *set);

// Exact `card ρ_e(P)` for `e ∝ (a, b)`.
//
// # Safety
// `set` must be a live handle and `out` writable.
enum ProjexStatus projex_projection_cardinality(const struct ProjexPointSet *set,
                                                int64_t a,
                                                int64_t b,
                                                uint64_t *out);

// Number of directions `e` with `card ρ_e(P) ≤ n^s`, `s ∈ [1/2, 1)`.
//
// # Safety
// `set` must be a live handle and `out` writable.
enum ProjexStatus projex_exceptional_direction_count(const struct ProjexPointSet *set,
                                                     double s,
                                                     uint64_t *out);

// # Safety
// `out` must be writable.
enum ProjexStatus projex_grid_check(uint64_t n,
                                    uint64_t p,
                                    uint64_t q,
                                    struct ProjexGridCheck *out);

// The block `B_n` for `d ≥ 3`.
//
// # Safety
// `out` must be writable.
enum ProjexStatus projex_block_b(uint32_t n, uint32_t d, struct ProjexBallUnion **out);

// Balls of radius `r_num/r_den` around the points of `points`.
//
// # Safety
// `points` must be a live handle and `out` writable.
enum ProjexStatus projex_ball_union_new(const struct ProjexPointSet *points,
                                        int64_t r_num,
                                        int64_t r_den,
                                        struct ProjexBallUnion **out);

// # Safety
// `k` must come from this library or be null.
void projex_ball_union_free(struct ProjexBallUnion *k);

// Number of balls, or 0 for null.
//
// # Safety
// `k` must come from this library or be null.
size_t projex_ball_union_len(const struct ProjexBallUnion *k);

// Exact `N(ρ_e(K), δ)` for `e ∝ (a, b)` and `δ = num/den`; saturates at
// `UINT64_MAX`.
//
// # Safety
// `k` must be a live handle and `out` writable.
enum ProjexStatus projex_projection_cover(const struct ProjexBallUnion *k,
                                          int64_t a,
                                          int64_t b,
                                          int64_t delta_num,
                                          int64_t delta_den,
                                          uint64_t *out);

// Evaluates a named bound formula.
//
// # Safety
// `formula` must be a NUL-terminated string; `query` readable; `out` writable.
enum ProjexStatus projex_bounds_evaluate(const char *formula,
                                         const struct ProjexBoundQuery *query,
                                         double *out);

// Fitted slope of `log N` against `−log δ` for `len ≥ 3` strictly decreasing scales.
//
// # Safety
// `deltas` and `counts` must hold `len` elements; `out` must be writable.
enum ProjexStatus projex_box_dimension(const double *deltas,
                                       const uint64_t *counts,
                                       size_t len,
                                       uint32_t ambient_dim,
                                       double *out);

// Builds the bigex construction to `depth` at `sigma`.
//
// # Safety
// `out` must be writable.
enum ProjexStatus projex_bigex_new(double sigma, size_t depth, struct ProjexBigex **out);

// # Safety
// `h` must be a live handle and `out` writable.
enum ProjexStatus projex_bigex_summary(const struct ProjexBigex *h, struct ProjexBigexSummary *out);

// # Safety
// `h` must come from this library or be null.
void projex_bigex_free(struct ProjexBigex *h);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* PROJEX_H */
