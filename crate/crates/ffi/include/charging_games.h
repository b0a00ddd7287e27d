#ifndef CHARGING_GAMES_H
#define CHARGING_GAMES_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum CgStatus {
  CG_STATUS_OK = 0,
  CG_STATUS_NULL_POINTER = 1,
  CG_STATUS_INVALID_ARGUMENT = 2,
  CG_STATUS_INVALID_INSTANCE = 3,
  CG_STATUS_INVALID_COST = 4,
  CG_STATUS_ASSUMPTION_VIOLATED = 5,
  CG_STATUS_BUDGET_EXCEEDED = 6,
  CG_STATUS_NON_CONVERGENCE = 7,
  CG_STATUS_ROUTE_MISMATCH = 8,
  CG_STATUS_CONDITION_VIOLATED = 9,
  CG_STATUS_CERTIFICATE_FAILED = 10,
  CG_STATUS_BUFFER_TOO_SMALL = 11,
  CG_STATUS_PANIC = 12,
} CgStatus;

/*
 An atomic game with identity pricing.
 */
typedef struct CgAtomicGame CgAtomicGame;

/*
 A grid cost function.
 */
typedef struct CgCost CgCost;

/*
 The equilibrium configurations of an atomic game.
 */
typedef struct CgEquilibriumSet CgEquilibriumSet;

typedef struct CgNonatomicInstance CgNonatomicInstance;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Library version as a static NUL-terminated string.
 */
const char *cg_version(void);

/*
 Bytes needed to hold the last error message, including the terminating NUL.
 */
size_t cg_last_error_length(void);

/*
 Copies the last error message of this thread into `buffer`.

 # Safety
 `buffer` must be valid for `length` bytes.
 */
enum CgStatus cg_last_error_message(char *buffer, size_t length);

/*
 `f(L) = L^exponent`.

 # Safety
 `out` must be a valid pointer.
 */
enum CgStatus cg_cost_power(double exponent, struct CgCost **out);

/*
 `f(L) = sqrt(L)`.

 # Safety
 `out` must be a valid pointer.
 */
enum CgStatus cg_cost_sqrt(struct CgCost **out);

/*
 # Safety
 `cost` must come from a `cg_cost_*` constructor, or be null.
 */
void cg_cost_free(struct CgCost *cost);

/*
 Atomic game with one window per player.

 # Safety
 `exogenous` must hold `slots` values and the window arrays `players` values each.
 */
enum CgStatus cg_atomic_game_new(size_t slots,
                                 const double *exogenous,
                                 double power,
                                 const size_t *arrivals,
                                 const size_t *departures,
                                 const size_t *durations,
                                 size_t players,
                                 const struct CgCost *cost,
                                 struct CgAtomicGame **out);

/*
 # Safety
 `game` must come from `cg_atomic_game_new`, or be null.
 */
void cg_atomic_game_free(struct CgAtomicGame *game);

/*
 Enumerates the pure equilibria, scanning at most `budget` candidates.
 A truncated scan fails with `BudgetExceeded`.

 # Safety
 `game` must be a live handle and `out` a valid pointer.
 */
enum CgStatus cg_atomic_enumerate(const struct CgAtomicGame *game,
                                  uint64_t budget,
                                  struct CgEquilibriumSet **out);

/*
 # Safety
 `set` must be a live handle and `count` a valid pointer.
 */
enum CgStatus cg_equilibrium_set_len(const struct CgEquilibriumSet *set, size_t *count);

/*
 Occupancy vector of equilibrium `index` into `out`, which holds `length` entries.

 # Safety
 `set` must be a live handle and `out` valid for `length` entries.
 */
enum CgStatus cg_equilibrium_set_occupancy(const struct CgEquilibriumSet *set,
                                           size_t index,
                                           uint32_t *out,
                                           size_t length);

/*
 # Safety
 `set` must come from `cg_atomic_enumerate`, or be null.
 */
void cg_equilibrium_set_free(struct CgEquilibriumSet *set);

/*
 Worst equilibrium cost over optimal cost.

 # Safety
 `game` must be a live handle and `efficiency` a valid pointer.
 */
enum CgStatus cg_atomic_efficiency(const struct CgAtomicGame *game,
                                   uint64_t budget,
                                   double *efficiency);

/*
 Share of configurations that are equilibria.

 # Safety
 `game` must be a live handle and `proportion` a valid pointer.
 */
enum CgStatus cg_atomic_ne_proportion(const struct CgAtomicGame *game,
                                      uint64_t budget,
                                      double *proportion);

/*
 Nonatomic instance with `classes` user classes whose weights sum to one.

 # Safety
 `exogenous` must hold `slots` values and the class arrays `classes` values each.
 */
enum CgStatus cg_nonatomic_instance_new(size_t slots,
                                        const double *exogenous,
                                        double power,
                                        const double *weights,
                                        const size_t *arrivals,
                                        const size_t *departures,
                                        const size_t *durations,
                                        size_t classes,
                                        struct CgNonatomicInstance **out);

/*
 # Safety
 `instance` must come from `cg_nonatomic_instance_new`, or be null.
 */
void cg_nonatomic_instance_free(struct CgNonatomicInstance *instance);

/*
 Wardrop equilibrium: start mass per slot into `start_mass` (`length >= slots`)
 and the reached gap into `gap`, which may be null.

 # Safety
 Handles must be live and `start_mass` valid for `length` entries.
 */
enum CgStatus cg_nonatomic_equilibrium(const struct CgNonatomicInstance *instance,
                                       const struct CgCost *cost,
                                       double tolerance,
                                       double *start_mass,
                                       size_t length,
                                       double *gap);

/*
 Equilibrium cost over optimal cost; needs a differentiable, strictly convex cost.

 # Safety
 Handles must be live and `efficiency` a valid pointer.
 */
enum CgStatus cg_nonatomic_efficiency(const struct CgNonatomicInstance *instance,
                                      const struct CgCost *cost,
                                      double tolerance,
                                      double *efficiency);

/*
 Cost-independent equilibrium of the symmetric game on a convex increasing
 load, from the window linear system. Writes `slots - duration + 1` start masses.

 # Safety
 `exogenous` must hold `slots` values and `start_mass` be valid for `length` entries.
 */
enum CgStatus cg_symmetric_invariant(const double *exogenous,
                                     size_t slots,
                                     size_t duration,
                                     double *start_mass,
                                     size_t length);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CHARGING_GAMES_H */
