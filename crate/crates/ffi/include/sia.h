#ifndef SIA_H
#define SIA_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum SiaBranchRule {
  SIA_BRANCH_RULE_ACT_FIRST_MOST_FRACTIONAL = 0,
  SIA_BRANCH_RULE_X_MOST_FRACTIONAL = 1,
} SiaBranchRule;

typedef enum SiaPivotRule {
  SIA_PIVOT_RULE_BLAND = 0,
  SIA_PIVOT_RULE_DANTZIG = 1,
} SiaPivotRule;

typedef enum SiaSearchOrder {
  SIA_SEARCH_ORDER_BEST_BOUND = 0,
  SIA_SEARCH_ORDER_DEPTH_FIRST = 1,
} SiaSearchOrder;

typedef enum SiaSolveStatus {
  SIA_SOLVE_STATUS_OPTIMAL = 0,
  SIA_SOLVE_STATUS_NODE_LIMIT = 1,
  SIA_SOLVE_STATUS_TIME_LIMIT = 2,
} SiaSolveStatus;

/**
 * Result code of every fallible call.
 */
typedef enum SiaStatus {
  SIA_STATUS_OK = 0,
  SIA_STATUS_NULL_ARGUMENT = 1,
  SIA_STATUS_INVALID_UTF8 = 2,
  SIA_STATUS_PARSE = 3,
  SIA_STATUS_INVALID_ARGUMENT = 4,
  SIA_STATUS_INFEASIBLE = 5,
  SIA_STATUS_LIMIT_REACHED = 6,
  SIA_STATUS_SEARCH_SPACE_TOO_LARGE = 7,
  SIA_STATUS_EXPORT = 8,
  SIA_STATUS_INTERNAL = 9,
  SIA_STATUS_PANIC = 10,
} SiaStatus;

/**
 * A validated instance.
 */
typedef struct SiaInstance SiaInstance;

/**
 * A solved instance: allocation, cost and solver statistics.
 */
typedef struct SiaSolution SiaSolution;

/**
 * Branch-and-bound settings. Start from [`sia_solve_options_default`].
 */
typedef struct SiaSolveOptions {
  uint64_t node_limit;
  double time_limit_seconds;
  enum SiaBranchRule branch_rule;
  enum SiaSearchOrder search_order;
  enum SiaPivotRule pivot_rule;
} SiaSolveOptions;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library defaults: 10^6 nodes, 60 s, act-first branching, best-bound
 * search, Bland pivoting.
 */
struct SiaSolveOptions sia_solve_options_default(void);

/**
 * Message for the last failure on this thread, or null if none. The
 * pointer stays valid until the next failing call on the same thread.
 */
const char *sia_last_error_message(void);

/**
 * Releases a string returned by this library. Null is ignored.
 */
void sia_string_free(char *s);

/**
 * Parses and validates an instance document (TOML text).
 */
enum SiaStatus sia_instance_from_toml(const char *text, struct SiaInstance **out);

/**
 * Releases an instance. Null is ignored.
 */
void sia_instance_free(struct SiaInstance *instance);

/**
 * Writes the interface, service and resource counts.
 */
enum SiaStatus sia_instance_dims(const struct SiaInstance *instance,
                                 size_t *interfaces,
                                 size_t *services,
                                 size_t *resources);

/**
 * Solves by branch and bound. `options` may be null for the defaults.
 *
 * Returns `SIA_STATUS_INFEASIBLE` when no allocation exists and
 * `SIA_STATUS_LIMIT_REACHED` when a limit stops the search before any
 * feasible allocation is found. A limit hit after an allocation is known
 * still returns a solution; check [`sia_solution_status`].
 */
enum SiaStatus sia_solve(const struct SiaInstance *instance,
                         const struct SiaSolveOptions *options,
                         struct SiaSolution **out);

/**
 * Releases a solution. Null is ignored.
 */
void sia_solution_free(struct SiaSolution *solution);

enum SiaStatus sia_solution_status(const struct SiaSolution *solution, enum SiaSolveStatus *out);

/**
 * Exact cost as a `"p/q"` string; release with [`sia_string_free`].
 */
enum SiaStatus sia_solution_objective(const struct SiaSolution *solution, char **out);

/**
 * Cost rounded to the nearest double.
 */
enum SiaStatus sia_solution_objective_f64(const struct SiaSolution *solution, double *out);

/**
 * Number of extra interfaces used across services.
 */
enum SiaStatus sia_solution_splits(const struct SiaSolution *solution, uint64_t *out);

/**
 * Branch-and-bound nodes explored.
 */
enum SiaStatus sia_solution_nodes(const struct SiaSolution *solution, uint64_t *out);

/**
 * Amount of resource `k` of service `j` placed on interface `i`
 * (0-based).
 */
enum SiaStatus sia_solution_amount(const struct SiaSolution *solution,
                                   size_t interface,
                                   size_t service,
                                   size_t resource,
                                   uint64_t *out);

/**
 * Exhaustive optimum as a `"p/q"` string, enumerating at most
 * `max_allocations` allocations.
 */
enum SiaStatus sia_oracle_objective(const struct SiaInstance *instance,
                                    uint64_t max_allocations,
                                    char **out);

/**
 * Whether the `len` positive integers at `elements` split into two halves
 * of equal sum, decided through the assignment solver.
 */
enum SiaStatus sia_decide_partition(const uint64_t *elements, size_t len, bool *out);

/**
 * The instance's model in LP format; release with [`sia_string_free`].
 * `name` may be null.
 */
enum SiaStatus sia_export_lp(const struct SiaInstance *instance, const char *name, char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SIA_H */
