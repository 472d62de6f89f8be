#ifndef PARKING_ILU_H
#define PARKING_ILU_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stddef.h>
#include <stdint.h>
#include <stdbool.h>

// Result codes.
typedef enum PiluStatus {
  PILU_STATUS_OK = 0,
  PILU_STATUS_NULL_POINTER = 1,
  PILU_STATUS_INVALID_ARGUMENT = 2,
  PILU_STATUS_DOMAIN = 3,
  PILU_STATUS_CLASS_VIOLATION = 4,
  PILU_STATUS_EMPTY_RECORDS = 5,
  PILU_STATUS_NUMERICAL = 6,
  PILU_STATUS_IO = 7,
  PILU_STATUS_PANIC = 8,
} PiluStatus;

// Learner state of one ILU replication.
typedef struct PiluIlu PiluIlu;

// An intensity model bound to its environment.
typedef struct PiluModel PiluModel;

// Solved optimal-stopping problem for one model.
typedef struct PiluOracle PiluOracle;

typedef struct PiluOracleResult {
  double b_star;
  double tail_mean;
  double expected_cost_at_star;
  double residual;
} PiluOracleResult;

typedef struct PiluBounds {
  double lower_bound;
  double b_star_min;
  double c_upper;
  double upper_constant;
  double mse_coefficient;
  double c;
  double c_tilde;
  double c_prime;
  double c_lower;
} PiluBounds;

typedef struct PiluStep {
  uint64_t round;
  double threshold;
  double stop;
  bool full_information;
  // Full-information records after the round.
  uint64_t records;
} PiluStep;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or NULL. Valid until the
// next failing call on the same thread.
const char *pilu_last_error_message(void);

// Library version, a static NUL-terminated string.
const char *pilu_version(void);

// Creates a model from a family expression such as `"constant(1.0)"` or
// `"sinusoidal(1.5, 0.3, 1.0)"`. Class membership is not checked here.
//
// # Safety
// `expr` must be a NUL-terminated string; `out` must be writable.
enum PiluStatus pilu_model_new(double street_start,
                               double class_bound,
                               const char *expr,
                               struct PiluModel **out);

// # Safety
// `out` must be writable.
enum PiluStatus pilu_model_new_constant(double street_start,
                                        double class_bound,
                                        double rate,
                                        struct PiluModel **out);

// # Safety
// `model` must come from a `pilu_model_new*` call and not be freed twice.
void pilu_model_free(struct PiluModel *model);

// `PILU_STATUS_OK` when the model belongs to the class, otherwise
// `PILU_STATUS_CLASS_VIOLATION` with the violated property in the message.
//
// # Safety
// `model` must be a live handle.
enum PiluStatus pilu_model_validate(const struct PiluModel *model);

// `λ(u)` for `u ≥ S`.
//
// # Safety
// `model` must be a live handle; `out` must be writable.
enum PiluStatus pilu_model_evaluate(const struct PiluModel *model, double u, double *out);

// `∫_0^y λ` for `y ≥ S`.
//
// # Safety
// `model` must be a live handle; `out` must be writable.
enum PiluStatus pilu_model_cumulative(const struct PiluModel *model, double y, double *out);

// Solves for the optimal threshold with default tolerances. The oracle keeps
// its own copy of the model.
//
// # Safety
// `model` must be a live handle; `out` must be writable.
enum PiluStatus pilu_oracle_new(const struct PiluModel *model, struct PiluOracle **out);

// # Safety
// `oracle` must come from `pilu_oracle_new` and not be freed twice.
void pilu_oracle_free(struct PiluOracle *oracle);

// # Safety
// `oracle` must be a live handle; `out` must be writable.
enum PiluStatus pilu_oracle_result(const struct PiluOracle *oracle, struct PiluOracleResult *out);

// `E|τ_b|` for `b ∈ [S, 0]`.
//
// # Safety
// `oracle` must be a live handle; `out` must be writable.
enum PiluStatus pilu_oracle_expected_cost(const struct PiluOracle *oracle, double b, double *out);

// Optimality gap `Δ(b) = E|τ_b| − E|τ_{b*}|`.
//
// # Safety
// `oracle` must be a live handle; `out` must be writable.
enum PiluStatus pilu_oracle_gap(const struct PiluOracle *oracle, double b, double *out);

// `Δ''(b)`.
//
// # Safety
// `oracle` must be a live handle; `out` must be writable.
enum PiluStatus pilu_oracle_gap_second_derivative(const struct PiluOracle *oracle,
                                                  double b,
                                                  double *out);

// Theoretical constants for the oracle's model and environment.
//
// # Safety
// `oracle` must be a live handle; `out` must be writable.
enum PiluStatus pilu_bounds(const struct PiluOracle *oracle, struct PiluBounds *out);

// Fresh learner for a street starting at `street_start < 0`.
//
// # Safety
// `out` must be writable.
enum PiluStatus pilu_ilu_new(double street_start, struct PiluIlu **out);

// # Safety
// `ilu` must come from `pilu_ilu_new` and not be freed twice.
void pilu_ilu_free(struct PiluIlu *ilu);

// Threshold the learner would play next.
//
// # Safety
// `ilu` must be a live handle; `out` must be writable.
enum PiluStatus pilu_ilu_next_threshold(const struct PiluIlu *ilu, double *out);

// Plays one round against `model`, drawing randomness from the stream
// `(master_seed, replication, current round)`.
//
// # Safety
// `ilu` and `model` must be live handles; `out` may be NULL.
enum PiluStatus pilu_ilu_step(struct PiluIlu *ilu,
                              const struct PiluModel *model,
                              uint64_t master_seed,
                              uint64_t replication,
                              struct PiluStep *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PARKING_ILU_H */
