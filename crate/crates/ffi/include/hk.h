#ifndef HK_H
#define HK_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status code of every fallible call.
 */
typedef enum HkStatus {
  HK_STATUS_OK = 0,
  HK_STATUS_NULL_POINTER = 1,
  HK_STATUS_INVALID_UTF8 = 2,
  HK_STATUS_PARSE = 3,
  HK_STATUS_INVALID_MODEL = 4,
  /**
   * A pipeline stage failed (flag, selector, connection, holonomy, decision).
   */
  HK_STATUS_PIPELINE = 5,
  HK_STATUS_IO = 6,
  HK_STATUS_BUFFER_TOO_SMALL = 7,
  HK_STATUS_PANIC = 8,
} HkStatus;

typedef enum HkCommand {
  HK_COMMAND_FLAG = 0,
  HK_COMMAND_SELECTOR = 1,
  HK_COMMAND_CURVATURE = 2,
  HK_COMMAND_HOLONOMY = 3,
  HK_COMMAND_HOLONOMY_WITH_ORACLE = 4,
  HK_COMMAND_DECIDE_TG = 5,
  HK_COMMAND_DECIDE_PRINCIPAL = 6,
  HK_COMMAND_DECIDE_ONE_DIM = 7,
} HkCommand;

/**
 * Result of a command: the CLI exit codes 0, 1 and 2.
 */
typedef enum HkOutcome {
  HK_OUTCOME_SUCCESS = 0,
  HK_OUTCOME_NO = 1,
  HK_OUTCOME_INCONCLUSIVE = 2,
} HkOutcome;

/**
 * Opaque model handle.
 */
typedef struct HkModel HkModel;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Parses a TOML model. On success `*out` owns a new handle.
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` a valid pointer.
 */
enum HkStatus hk_model_from_toml(const char *text, struct HkModel **out);

/**
 * Parses a JSON model. On success `*out` owns a new handle.
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` a valid pointer.
 */
enum HkStatus hk_model_from_json(const char *text, struct HkModel **out);

/**
 * Loads a `.toml` or `.json` model file.
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out` a valid pointer.
 */
enum HkStatus hk_model_load(const char *path, struct HkModel **out);

/**
 * Releases a handle. Null is ignored.
 *
 * # Safety
 * `model` must come from one of the constructors and not be used afterwards.
 */
void hk_model_free(struct HkModel *model);

/**
 * Frame dimension `n` and vertical rank `ν`.
 *
 * # Safety
 * `model` must be a live handle; `dim` and `nu` valid pointers.
 */
enum HkStatus hk_model_dims(const struct HkModel *model, size_t *dim, size_t *nu);

/**
 * Replaces the seed used for sampling, the oracle and the PD search.
 *
 * # Safety
 * `model` must be a live handle.
 */
enum HkStatus hk_model_set_seed(struct HkModel *model, uint64_t seed);

/**
 * Copies the growth vector into `buf`. `*len` receives its length; if it
 * exceeds `cap` nothing is copied and `BufferTooSmall` is returned.
 *
 * # Safety
 * `model` must be a live handle, `buf` valid for `cap` writes, `len` valid.
 */
enum HkStatus hk_growth_vector(const struct HkModel *model, size_t *buf, size_t cap, size_t *len);

/**
 * Dimension of the horizontal holonomy algebra at the base point.
 * `*stabilized` is 1 when the iteration stabilized, 0 otherwise.
 *
 * # Safety
 * `model` must be a live handle; `dim` and `stabilized` valid pointers.
 */
enum HkStatus hk_holonomy_dim(const struct HkModel *model, size_t *dim, int32_t *stabilized);

/**
 * Runs a command. `*json` receives the report (free with
 * `hk_string_free`) and `*outcome` its outcome. Either may be null.
 *
 * # Safety
 * `model` must be a live handle; non-null output pointers must be valid.
 */
enum HkStatus hk_run(const struct HkModel *model,
                     enum HkCommand command,
                     char **json,
                     enum HkOutcome *outcome);

/**
 * JSON model file of the free nilpotent algebra on `generators` generators
 * of the given step, split as `p₁ ⊕ p₂ | 𝔨`.
 *
 * # Safety
 * `json` must be a valid pointer.
 */
enum HkStatus hk_free_nilpotent_json(size_t generators, size_t step, char **json);

/**
 * Message of the last failure on this thread, or null. The pointer stays
 * valid until the next failing call on the same thread.
 */
const char *hk_last_error(void);

/**
 * Frees a string returned by the library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not be freed twice.
 */
void hk_string_free(char *s);

/**
 * Library version, a static string.
 */
const char *hk_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HK_H */
