#ifndef STABILIQ_H
#define STABILIQ_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum StqStatus {
  STQ_STATUS_OK = 0,
  /**
   * The call succeeded and a selected check does not hold.
   */
  STQ_STATUS_CHECK_FAILED = 1,
  STQ_STATUS_INVALID_ARGUMENT = 2,
  STQ_STATUS_PARSE_ERROR = 3,
  STQ_STATUS_STATE_CAP = 4,
  STQ_STATUS_MODEL_ERROR = 5,
  STQ_STATUS_IO = 6,
  STQ_STATUS_NULL_POINTER = 7,
  STQ_STATUS_PANIC = 8,
} StqStatus;

/**
 * A loaded protocol: a built-in bundle, a parsed program, or the leader
 * election fixture.
 */
typedef struct StqBundle StqBundle;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Builds a built-in protocol (`cm`, `la`, `pif`, `abp` or `le`). `n == 0`
 * selects the default size; `ids` may be null, and applies to `cm` only.
 *
 * # Safety
 * `name` is a NUL-terminated string; `ids` is null or points to `ids_len`
 * integers; `out` is valid for writes.
 */
enum StqStatus stq_bundle_builtin(const char *name,
                                  size_t n,
                                  const int64_t *ids,
                                  size_t ids_len,
                                  struct StqBundle **out);

/**
 * Parses guarded-command source. `protocol` may name a built-in whose mapping
 * and specifications apply to the parsed program; `n == 0` keeps the source's
 * default.
 *
 * # Safety
 * `source` is a NUL-terminated string; `protocol` is null or NUL-terminated;
 * `out` is valid for writes.
 */
enum StqStatus stq_bundle_from_source(const char *source,
                                      const char *protocol,
                                      size_t n,
                                      struct StqBundle **out);

/**
 * # Safety
 * `b` is null or a handle from this library that has not been freed.
 */
void stq_bundle_free(struct StqBundle *b);

/**
 * Number of states in the bundle's universe.
 *
 * # Safety
 * `b` is a live handle; `out` is valid for writes.
 */
enum StqStatus stq_universe_size(const struct StqBundle *b, uint64_t *out);

/**
 * Runs comma-separated checks (`closed`, `convergence`, `stabilizing`,
 * `ideal`, `pif-coverage`, `merge-symmetry`) and writes the JSON report.
 * Returns `STQ_STATUS_CHECK_FAILED` when a check does not hold.
 *
 * # Safety
 * `b` is a live handle; string arguments are null or NUL-terminated;
 * `out_json` is valid for writes.
 */
enum StqStatus stq_verify(const struct StqBundle *b,
                          const char *checks,
                          const char *predicate,
                          const char *stutter_policy,
                          char **out_json);

/**
 * Simulates from `from` (`random`, `all-idle` or a state literal) under
 * `policy` (`round-robin` or `uniform-random`) and writes the JSON report.
 *
 * # Safety
 * `b` is a live handle; string arguments are null or NUL-terminated;
 * `out_json` is valid for writes.
 */
enum StqStatus stq_simulate(const struct StqBundle *b,
                            const char *from,
                            const char *policy,
                            size_t steps,
                            uint64_t seed,
                            char **out_json);

/**
 * Writes the transition system, or its component DAG, as Graphviz DOT.
 *
 * # Safety
 * `b` is a live handle; `predicate` is null or NUL-terminated; `out` is valid
 * for writes.
 */
enum StqStatus stq_export_dot(const struct StqBundle *b,
                              bool condensed,
                              const char *predicate,
                              char **out);

/**
 * Writes the program as guarded-command source.
 *
 * # Safety
 * `b` is a live handle; `out` is valid for writes.
 */
enum StqStatus stq_render(const struct StqBundle *b, char **out);

/**
 * Runs the merge-closure impossibility test and writes the JSON report. The
 * status is `STQ_STATUS_OK` whenever the analysis completes; the verdict is
 * in the report.
 *
 * # Safety
 * `b` is a live handle; `out_json` is valid for writes.
 */
enum StqStatus stq_impossibility(const struct StqBundle *b, char **out_json);

/**
 * Message for the most recent failure on this thread; empty if none. Valid
 * until the next failing call on the same thread.
 */
const char *stq_last_error_message(void);

/**
 * # Safety
 * `s` is null or a string returned by this library that has not been freed.
 */
void stq_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* STABILIQ_H */
