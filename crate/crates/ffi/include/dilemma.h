#ifndef DILEMMA_H
#define DILEMMA_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define DG_OBLIGATION 0

#define DG_PROHIBITION 1

/**
 * Outcome of an FFI call.
 */
typedef enum DgStatus {
  DG_STATUS_OK = 0,
  /**
   * A required pointer was null or an enum argument out of range.
   */
  DG_STATUS_INVALID_ARGUMENT = 1,
  DG_STATUS_INVALID_UTF8 = 2,
  /**
   * A document is not well-formed JSON.
   */
  DG_STATUS_PARSE = 3,
  /**
   * A document is well-formed but not a valid model or instruction.
   */
  DG_STATUS_SCHEMA = 4,
  DG_STATUS_UNKNOWN_TASK = 5,
  DG_STATUS_UNKNOWN_NODE = 6,
  /**
   * Too many free scenario dimensions to verify exhaustively.
   */
  DG_STATUS_MODEL_TOO_LARGE = 7,
  DG_STATUS_INVALID_INSTRUCTION = 8,
  /**
   * Any other domain error; see `dg_last_error`.
   */
  DG_STATUS_FAILED = 9,
  DG_STATUS_PANIC = 10,
} DgStatus;

/**
 * Opaque, immutable model bundle. Safe to share between threads for
 * reading.
 */
typedef struct DgBundle DgBundle;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version, a static string.
 */
const char *dg_version(void);

/**
 * Message of the last failed call on this thread, or null. Valid until the
 * next call into the library on the same thread.
 */
const char *dg_last_error(void);

/**
 * Parses and cross-checks the three model documents. `world_json` may be
 * null for an empty world; `strict` also requires every condition subject
 * to name a world class or instance.
 *
 * # Safety
 * String arguments are null or NUL-terminated; `out` is valid for writing.
 */
enum DgStatus dg_bundle_from_json(const char *tasks_json,
                                  const char *causality_json,
                                  const char *world_json,
                                  bool strict,
                                  struct DgBundle **out);

/**
 * # Safety
 * `b` is null or a bundle not yet freed.
 */
void dg_bundle_free(struct DgBundle *b);

/**
 * # Safety
 * `s` is null or a string handed out by this library, not yet freed.
 */
void dg_string_free(char *s);

/**
 * Ranked result document (JSON) for an instruction given as JSON, or the
 * default instruction when `instruction_json` is null.
 *
 * # Safety
 * `b` is a live bundle; strings are null or NUL-terminated; `out` is
 * valid for writing.
 */
enum DgStatus dg_generate(const struct DgBundle *b, const char *instruction_json, char **out);

/**
 * Verification report (JSON) for a task pair; `kind` is `DG_OBLIGATION` or
 * `DG_PROHIBITION`.
 *
 * # Safety
 * As for [`dg_generate`].
 */
enum DgStatus dg_verify(const struct DgBundle *b,
                        uint32_t kind,
                        const char *task1,
                        const char *task2,
                        char **out);

/**
 * One pipeline stage as text, one entry per line: `barriers` and
 * `actions` list task ids; `pairs`, `filtered` and `ranked` list
 * `KIND task_a task_b` (ranked adds the total score).
 *
 * # Safety
 * As for [`dg_generate`].
 */
enum DgStatus dg_inspect(const struct DgBundle *b, const char *stage, char **out);

/**
 * Graphviz rendering of the bundle's causality graph.
 *
 * # Safety
 * As for [`dg_generate`].
 */
enum DgStatus dg_export_dot(const struct DgBundle *b, char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DILEMMA_H */
