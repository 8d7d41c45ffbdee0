#ifndef CURRENTLAB_H
#define CURRENTLAB_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result codes of every fallible call.
typedef enum CurrentlabStatus {
  CURRENTLAB_STATUS_OK = 0,
  // A required pointer argument was null.
  CURRENTLAB_STATUS_NULL_POINTER = 1,
  // A string argument was not valid UTF-8.
  CURRENTLAB_STATUS_INVALID_UTF8 = 2,
  // Reading or writing a file failed.
  CURRENTLAB_STATUS_IO = 3,
  // Input text could not be parsed.
  CURRENTLAB_STATUS_PARSE = 4,
  // An argument was out of range or inconsistent.
  CURRENTLAB_STATUS_INVALID_ARGUMENT = 5,
  // The computation itself failed (solver, geometry, missing cells).
  CURRENTLAB_STATUS_COMPUTATION = 6,
  // The caller's buffer holds fewer values than requested.
  CURRENTLAB_STATUS_BUFFER_TOO_SMALL = 7,
  // A Rust panic was caught at the boundary.
  CURRENTLAB_STATUS_PANIC = 8,
} CurrentlabStatus;

// Opaque handle to an integral simplicial current.
typedef struct CurrentlabCurrent CurrentlabCurrent;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or null after a success.
// The pointer stays valid until the next call into this library on the same thread.
const char *currentlab_last_error_message(void);

// Library version as a static NUL-terminated string.
const char *currentlab_version(void);

// Reads a current from an SCM file.
//
// # Safety
// `path` must be a NUL-terminated string and `out` a valid pointer.
enum CurrentlabStatus currentlab_current_read_scm(const char *path, struct CurrentlabCurrent **out);

// Parses a current from SCM text.
//
// # Safety
// `text` must be a NUL-terminated string and `out` a valid pointer.
enum CurrentlabStatus currentlab_current_parse_scm(const char *text,
                                                   struct CurrentlabCurrent **out);

// Writes a current to an SCM file.
//
// # Safety
// `current` must be a live handle and `path` a NUL-terminated string.
enum CurrentlabStatus currentlab_current_write_scm(const struct CurrentlabCurrent *current,
                                                   const char *path);

// Releases a handle; null is ignored.
//
// # Safety
// `current` must be null or a handle not yet freed.
void currentlab_current_free(struct CurrentlabCurrent *current);

// Cell dimension `k`.
//
// # Safety
// `current` must be a live handle and `out` a valid pointer.
enum CurrentlabStatus currentlab_current_dim(const struct CurrentlabCurrent *current, size_t *out);

// Dimension of the ambient space.
//
// # Safety
// `current` must be a live handle and `out` a valid pointer.
enum CurrentlabStatus currentlab_current_ambient_dim(const struct CurrentlabCurrent *current,
                                                     size_t *out);

// Number of cells with nonzero multiplicity.
//
// # Safety
// `current` must be a live handle and `out` a valid pointer.
enum CurrentlabStatus currentlab_current_cell_count(const struct CurrentlabCurrent *current,
                                                    size_t *out);

// Mass: sum of `|multiplicity| · volume` over cells.
//
// # Safety
// `current` must be a live handle and `out` a valid pointer.
enum CurrentlabStatus currentlab_current_mass(const struct CurrentlabCurrent *current, double *out);

// Boundary as a new handle owned by the caller.
//
// # Safety
// `current` must be a live handle and `out` a valid pointer.
enum CurrentlabStatus currentlab_current_boundary(const struct CurrentlabCurrent *current,
                                                  struct CurrentlabCurrent **out);

// The `count` smallest min-max eigenvalues, written to `values[0..count]`.
// `capacity` is the length of `values`. `seed` drives the iterative solver's start block.
//
// # Safety
// `current` must be a live handle and `values` must hold `capacity` doubles.
enum CurrentlabStatus currentlab_spectrum(const struct CurrentlabCurrent *current,
                                          size_t count,
                                          uint64_t seed,
                                          double *values,
                                          size_t capacity);

// Flat distance between two currents of equal dimension inside the Freudenthal grid
// complex on the box `[lo, hi]` with `resolution[i]` cells along axis `i`.
// `ambient` is the length of the three arrays; `exact` selects rational arithmetic.
//
// # Safety
// `a` and `b` must be live handles, the three arrays must hold `ambient` entries and
// `out` must be a valid pointer.
enum CurrentlabStatus currentlab_flat_distance(const struct CurrentlabCurrent *a,
                                               const struct CurrentlabCurrent *b,
                                               const double *lo,
                                               const double *hi,
                                               const size_t *resolution,
                                               size_t ambient,
                                               bool exact,
                                               double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CURRENTLAB_H */
