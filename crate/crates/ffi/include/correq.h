#ifndef CORREQ_H
#define CORREQ_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum CorreqStatus {
  CORREQ_STATUS_OK = 0,
  CORREQ_STATUS_NULL_POINTER = 1,
  CORREQ_STATUS_INVALID_ARGUMENT = 2,
  CORREQ_STATUS_LOAD_FAILED = 3,
  CORREQ_STATUS_BUDGET_EXCEEDED = 4,
  CORREQ_STATUS_CERTIFICATION_FAILED = 5,
  CORREQ_STATUS_SOLVER_FAILED = 6,
  CORREQ_STATUS_PANIC = 7,
} CorreqStatus;

typedef enum CorreqConcept {
  CORREQ_CONCEPT_NFCCE = 0,
  CORREQ_CONCEPT_EFCCE = 1,
  CORREQ_CONCEPT_EFCE = 2,
} CorreqConcept;

typedef enum CorreqEngine {
  CORREQ_ENGINE_DAG = 0,
  CORREQ_ENGINE_COLGEN = 1,
  CORREQ_ENGINE_AUTO = 2,
} CorreqEngine;

// Opaque game handle.
typedef struct CorreqGame CorreqGame;

// Opaque solve result.
typedef struct CorreqResult CorreqResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failure on this thread. Valid until the next failing
// call on the same thread; never null.
const char *correq_last_error(void);

// Generate a built-in benchmark such as "2RS12" or "3K3".
//
// # Safety
// `name` must be a NUL-terminated string and `out` a valid pointer.
enum CorreqStatus correq_game_from_manifest(const char *name, struct CorreqGame **out);

// Parse a game from its JSON text.
//
// # Safety
// `json` must be a NUL-terminated string and `out` a valid pointer.
enum CorreqStatus correq_game_from_json(const char *json, struct CorreqGame **out);

// # Safety
// `game` must come from a `correq_game_*` constructor or be null.
void correq_game_free(struct CorreqGame *game);

// 0 for a null handle.
//
// # Safety
// `game` must be a live handle or null.
size_t correq_game_num_players(const struct CorreqGame *game);

// 0 for a null handle.
//
// # Safety
// `game` must be a live handle or null.
size_t correq_game_num_terminals(const struct CorreqGame *game);

// Optimal equilibrium of `game`. With `weights` null the objective is
// social welfare, otherwise `Σ weights[i] u_i` over `num_weights` players.
//
// # Safety
// `game` must be a live handle, `weights` null or readable for
// `num_weights` doubles, and `out` a valid pointer.
enum CorreqStatus correq_solve(const struct CorreqGame *game,
                               enum CorreqConcept concept,
                               enum CorreqEngine engine,
                               const double *weights,
                               size_t num_weights,
                               struct CorreqResult **out);

// NaN for a null handle.
//
// # Safety
// `result` must be a live handle or null.
double correq_result_value(const struct CorreqResult *result);

// Largest gain of any trigger deviation; NaN for a null handle.
//
// # Safety
// `result` must be a live handle or null.
double correq_result_certified_benefit(const struct CorreqResult *result);

// Expected utility of a 0-based player; NaN when out of range.
//
// # Safety
// `result` must be a live handle or null.
double correq_result_utility(const struct CorreqResult *result, size_t player);

// Result JSON including the plan. Owned by the result handle.
//
// # Safety
// `result` must be a live handle or null.
const char *correq_result_json(const struct CorreqResult *result);

// # Safety
// `result` must come from `correq_solve` or be null.
void correq_result_free(struct CorreqResult *result);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CORREQ_H */
