#ifndef KMKIT_H
#define KMKIT_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum KmkitStatus {
  KMKIT_STATUS_OK = 0,
  KMKIT_STATUS_INVALID = 1,
  KMKIT_STATUS_WINDOW_EXCEEDED = 2,
  KMKIT_STATUS_VIOLATION = 3,
  KMKIT_STATUS_UNSUPPORTED = 4,
  KMKIT_STATUS_INTEGRAL_DEFECT = 5,
  KMKIT_STATUS_INTERNAL = 6,
} KmkitStatus;

/**
 * A truncated Kac-Moody algebra over some ring.
 */
typedef struct KmkitAlgebra KmkitAlgebra;

/**
 * A root datum built from a GCM document.
 */
typedef struct KmkitDatum KmkitDatum;

/**
 * A finite field F_{p^m}; elements are encoded as integers in `0..p^m`.
 */
typedef struct KmkitField KmkitField;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or "" after a success.
 * The pointer stays valid until the next kmkit call on the same thread.
 */
const char *kmkit_last_error(void);

/**
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void kmkit_string_free(char *s);

/**
 * Builds a root datum from a GCM document such as
 * `{"matrix": [[2,-1],[-1,2]], "variant": "minimal"}`.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a writable pointer.
 */
enum KmkitStatus kmkit_datum_from_json(const char *json, struct KmkitDatum **out);

/**
 * # Safety
 * `d` must come from `kmkit_datum_from_json` and not have been freed.
 */
void kmkit_datum_free(struct KmkitDatum *d);

/**
 * Number of simple roots.
 *
 * # Safety
 * `d` must be a live datum handle and `out` writable.
 */
enum KmkitStatus kmkit_datum_rank(const struct KmkitDatum *d, size_t *out);

/**
 * Number of positive real roots of height at most `height`.
 *
 * # Safety
 * `d` must be a live datum handle and `out` writable.
 */
enum KmkitStatus kmkit_real_root_count(const struct KmkitDatum *d, int64_t height, size_t *out);

/**
 * Truncated algebra of the datum up to `height` over the ring named by
 * `ring` ("Z", "Q", "F5", "F2^3").
 *
 * # Safety
 * `d` must be a live datum handle, `ring` a NUL-terminated string and `out` writable.
 */
enum KmkitStatus kmkit_algebra_new(const struct KmkitDatum *d,
                                   int64_t height,
                                   const char *ring,
                                   struct KmkitAlgebra **out);

/**
 * # Safety
 * `a` must come from `kmkit_algebra_new` and not have been freed.
 */
void kmkit_algebra_free(struct KmkitAlgebra *a);

/**
 * # Safety
 * `a` must be a live algebra handle and `out` writable.
 */
enum KmkitStatus kmkit_algebra_dim(const struct KmkitAlgebra *a, size_t *out);

/**
 * The algebra as a JSON document (basis, graded dimensions, brackets).
 * Release the result with `kmkit_string_free`.
 *
 * # Safety
 * `a` must be a live algebra handle and `out` writable.
 */
enum KmkitStatus kmkit_algebra_dump(const struct KmkitAlgebra *a, char **out);

/**
 * Whether the adjoint representation of a finite-type algebra over a field
 * of characteristic `p` is over-restricted.
 *
 * # Safety
 * `a` must be a live algebra handle and `out` writable.
 */
enum KmkitStatus kmkit_adjoint_over_restricted(const struct KmkitAlgebra *a, uint64_t p, bool *out);

/**
 * The field F_{p^m} with the smallest monic irreducible modulus.
 *
 * # Safety
 * `out` must be writable.
 */
enum KmkitStatus kmkit_field_new(uint64_t p, uint32_t m, struct KmkitField **out);

/**
 * # Safety
 * `f` must come from `kmkit_field_new` and not have been freed.
 */
void kmkit_field_free(struct KmkitField *f);

/**
 * # Safety
 * `f` must be a live field handle and `out` writable.
 */
enum KmkitStatus kmkit_field_order(const struct KmkitField *f, uint64_t *out);

/**
 * # Safety
 * `f` must be a live field handle and `out` writable.
 */
enum KmkitStatus kmkit_field_add(const struct KmkitField *f, uint64_t a, uint64_t b, uint64_t *out);

/**
 * # Safety
 * `f` must be a live field handle and `out` writable.
 */
enum KmkitStatus kmkit_field_mul(const struct KmkitField *f, uint64_t a, uint64_t b, uint64_t *out);

/**
 * Multiplicative inverse; zero has none and yields `Invalid`.
 *
 * # Safety
 * `f` must be a live field handle and `out` writable.
 */
enum KmkitStatus kmkit_field_inv(const struct KmkitField *f, uint64_t a, uint64_t *out);

/**
 * Homology of a simplicial complex document with trivial rank-one
 * coefficients in `ring`, as a JSON report.
 *
 * # Safety
 * `complex_json` and `ring` must be NUL-terminated strings and `out` writable.
 */
enum KmkitStatus kmkit_homology_json(const char *complex_json, const char *ring, char **out);

/**
 * Runs a command line (without the program name) exactly as the `kmkit`
 * binary would. The report is stored in `report` and the process exit code
 * in `exit_code`; the status only reflects failures of the call itself.
 *
 * # Safety
 * `argv` must point to `argc` NUL-terminated strings; `report` and
 * `exit_code` must be writable.
 */
enum KmkitStatus kmkit_run(const char *const *argv, size_t argc, char **report, int32_t *exit_code);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* KMKIT_H */
