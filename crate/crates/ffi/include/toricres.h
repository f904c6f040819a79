#ifndef TORICRES_H
#define TORICRES_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum TrKind {
  TR_KIND_MONOMIAL = 0,
  TR_KIND_AFFINE = 1,
  TR_KIND_REFLEXIVE = 2,
  TR_KIND_GLOBAL = 3,
} TrKind;

typedef enum TrLift {
  /**
   * General lift for families, reflexive lift for filtrations.
   */
  TR_LIFT_DEFAULT = 0,
  TR_LIFT_GENERAL = 1,
  TR_LIFT_EXPLICIT = 2,
  TR_LIFT_REFLEXIVE = 3,
} TrLift;

typedef enum TrMode {
  TR_MODE_CANONICAL = 0,
  TR_MODE_CLOSED = 1,
} TrMode;

/**
 * Status codes; the nonzero engine codes agree with the command-line exit codes.
 */
typedef enum TrStatus {
  TR_STATUS_OK = 0,
  /**
   * Invalid input data or settings.
   */
  TR_STATUS_VALIDATION = 2,
  /**
   * A computed or supplied resolution failed its exactness check.
   */
  TR_STATUS_CERTIFICATE = 3,
  /**
   * Malformed JSON.
   */
  TR_STATUS_PARSE = 4,
  TR_STATUS_NULL_ARGUMENT = 5,
  TR_STATUS_INVALID_UTF8 = 6,
  /**
   * The engine panicked; the context is still usable.
   */
  TR_STATUS_INTERNAL = 7,
} TrStatus;

/**
 * Opaque engine context.
 */
typedef struct TrContext TrContext;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Creates a context over `field` (`"Q"` or a supported prime; null means `"Q"`).
 *
 * # Safety
 * `field` must be null or a valid nul-terminated string; `out` must be a valid pointer.
 */
enum TrStatus tr_context_new(const char *field, struct TrContext **out);

/**
 * # Safety
 * `ctx` must be null or a pointer from `tr_context_new` not yet freed.
 */
void tr_context_free(struct TrContext *ctx);

/**
 * Sets the window margin; zero restores the default.
 *
 * # Safety
 * `ctx` must be a live context.
 */
enum TrStatus tr_context_set_window(struct TrContext *ctx, int64_t margin);

/**
 * Sets the search bound; zero restores the default.
 *
 * # Safety
 * `ctx` must be a live context.
 */
enum TrStatus tr_context_set_bound(struct TrContext *ctx, int64_t bound);

/**
 * The message of the last failure on `ctx`, empty after a success. Owned by the context.
 *
 * # Safety
 * `ctx` must be null or a live context.
 */
const char *tr_last_error(const struct TrContext *ctx);

/**
 * # Safety
 * `s` must be null or a string returned through an `out` parameter of this library.
 */
void tr_string_free(char *s);

/**
 * The lcm-lattice and anchor table of a presentation over the polynomial ring.
 *
 * # Safety
 * `ctx` must be a live context, `input` a nul-terminated string, `out` a valid pointer.
 */
enum TrStatus tr_lcm_lattice(struct TrContext *ctx, const char *input, char **out);

/**
 * Resolves a module; `expect` may be null, otherwise it lists generator degrees per level and is
 * compared up to permutation within levels.
 *
 * # Safety
 * `ctx` must be a live context, `input` a nul-terminated string, `expect` null or a
 * nul-terminated string, `out` a valid pointer.
 */
enum TrStatus tr_resolve(struct TrContext *ctx,
                         enum TrKind kind,
                         const char *input,
                         enum TrMode mode,
                         enum TrLift lift,
                         const char *expect,
                         char **out);

/**
 * Re-checks a resolution document against its input.
 *
 * # Safety
 * `ctx` must be a live context, `input` and `resolution` nul-terminated strings, `out` a valid
 * pointer.
 */
enum TrStatus tr_verify(struct TrContext *ctx,
                        const char *input,
                        const char *resolution,
                        char **out);

/**
 * # Safety
 * `ctx` must be a live context, `input` a nul-terminated string, `out` a valid pointer.
 */
enum TrStatus tr_tensor_diagnostic(struct TrContext *ctx, const char *input, char **out);

/**
 * # Safety
 * `ctx` must be a live context, `input` a nul-terminated string, `out` a valid pointer.
 */
enum TrStatus tr_export_model(struct TrContext *ctx, const char *input, char **out);

/**
 * # Safety
 * `ctx` must be a live context, `input` a nul-terminated string, `out` a valid pointer.
 */
enum TrStatus tr_validate_fan(struct TrContext *ctx, const char *input, char **out);

/**
 * # Safety
 * `ctx` must be a live context, `input` a nul-terminated string, `out` a valid pointer.
 */
enum TrStatus tr_validate_family(struct TrContext *ctx, const char *input, char **out);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* TORICRES_H */
