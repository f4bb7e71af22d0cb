#ifndef RDBENCH_H
#define RDBENCH_H

/* Generated by cbindgen; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum rdb_status {
  RDB_OK = 0,
  RDB_INVALID_ARGUMENT = 1,
  RDB_PROPERTY_FAILURE = 2,
  RDB_RESOURCE = 3,
  RDB_IO = 4,
  RDB_NULL_POINTER = 5,
  RDB_INTERNAL = 6,
} rdb_status;

/**
 * A ball around the identity, tied to the group it was built from.
 */
typedef struct rdb_ball rdb_ball;

/**
 * A group model.
 */
typedef struct rdb_group rdb_group;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failing call on this thread, or an empty string.
 * The pointer stays valid until the next call on this thread.
 */
const char *rdb_last_error(void);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void rdb_string_free(char *s);

/**
 * Parses a family descriptor such as `free(2)`.
 *
 * # Safety
 * `descriptor` must be a nul-terminated string; `out` must be writable.
 */
enum rdb_status rdb_group_new(const char *descriptor, struct rdb_group **out);

/**
 * # Safety
 * `g` must come from [`rdb_group_new`] and not have been freed. Null is ignored.
 */
void rdb_group_free(struct rdb_group *g);

/**
 * Normal form of a word, e.g. `aBba` becomes `aa` in a free group.
 *
 * # Safety
 * Pointers must be valid; the result must be freed with [`rdb_string_free`].
 */
enum rdb_status rdb_group_normal_form(const struct rdb_group *g, const char *word, char **out);

/**
 * Product of two words in normal form.
 *
 * # Safety
 * Pointers must be valid; the result must be freed with [`rdb_string_free`].
 */
enum rdb_status rdb_group_multiply(const struct rdb_group *g,
                                   const char *a,
                                   const char *b,
                                   char **out);

/**
 * Word length of the element a word represents.
 *
 * # Safety
 * Pointers must be valid.
 */
enum rdb_status rdb_group_word_length(const struct rdb_group *g, const char *word, size_t *out);

/**
 * Enumerates `B(radius)`.
 *
 * # Safety
 * Pointers must be valid; the ball must be freed with [`rdb_ball_free`].
 */
enum rdb_status rdb_ball_new(const struct rdb_group *g, size_t radius, struct rdb_ball **out);

/**
 * Loads a ball written by [`rdb_ball_save`] or the CLI cache.
 *
 * # Safety
 * Pointers must be valid; the ball must be freed with [`rdb_ball_free`].
 */
enum rdb_status rdb_ball_load(const struct rdb_group *g, const char *path, struct rdb_ball **out);

/**
 * # Safety
 * Pointers must be valid.
 */
enum rdb_status rdb_ball_save(const struct rdb_ball *b, const char *path);

/**
 * # Safety
 * `b` must come from this library and not have been freed. Null is ignored.
 */
void rdb_ball_free(struct rdb_ball *b);

/**
 * Number of elements in the ball.
 *
 * # Safety
 * Pointers must be valid.
 */
enum rdb_status rdb_ball_size(const struct rdb_ball *b, size_t *out);

/**
 * Number of elements of length exactly `k`.
 *
 * # Safety
 * Pointers must be valid.
 */
enum rdb_status rdb_ball_sphere_size(const struct rdb_ball *b, size_t k, size_t *out);

/**
 * Element of the given ShortLex rank, as a normal-form word.
 *
 * # Safety
 * Pointers must be valid; the result must be freed with [`rdb_string_free`].
 */
enum rdb_status rdb_ball_element(const struct rdb_ball *b, size_t rank, char **out);

/**
 * Checks every canonical-geodesic triangle in `B(radius)` at `(sigma, delta)`.
 *
 * Returns `RDB_OK` on pass and `RDB_PROPERTY_FAILURE` on failure, in which
 * case `counterexample` (if not null) receives the failing triangle as three
 * space-separated words.
 *
 * # Safety
 * Pointers must be valid; `counterexample` may be null.
 */
enum rdb_status rdb_verify_star(const struct rdb_ball *b,
                                const char *peripheral,
                                size_t sigma,
                                size_t delta,
                                size_t radius,
                                char **counterexample);

/**
 * Runs an experiment from TOML text and returns the JSON report.
 *
 * The status is `RDB_OK` when the experiment passes and
 * `RDB_PROPERTY_FAILURE` when it fails; in both cases `report` receives the
 * report. `cache_dir` may be null.
 *
 * # Safety
 * Pointers must be valid; the result must be freed with [`rdb_string_free`].
 */
enum rdb_status rdb_run_experiment(const char *config_toml, const char *cache_dir, char **report);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RDBENCH_H */
