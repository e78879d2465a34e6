#ifndef QCP_H
#define QCP_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

// Status codes. Values 2 and 3 match the CLI exit codes.
typedef enum QcpStatus {
  QCP_STATUS_OK = 0,
  QCP_STATUS_NULL_POINTER = 1,
  QCP_STATUS_INPUT_ERROR = 2,
  QCP_STATUS_NUMERIC_ERROR = 3,
  QCP_STATUS_OUT_OF_RANGE = 5,
  QCP_STATUS_BUFFER_TOO_SMALL = 6,
  QCP_STATUS_PANIC = 7,
} QcpStatus;

// Opaque rhombic embedding.
typedef struct QcpEmbedding QcpEmbedding;

// Opaque square-grid Z^γ map.
typedef struct QcpMap QcpMap;

// Opaque circle pattern.
typedef struct QcpPattern QcpPattern;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failure on this thread. The pointer stays valid until
// the next failing call on the same thread.
const char *qcp_last_error(void);

// f_θ(x) (order 0) or f′_θ(x) (order 1).
//
// # Safety
// `out` must be valid for writes.
enum QcpStatus qcp_angle_function(double x, double theta, uint8_t order, double *out);

// Rhombic embedding of the `folds`-fold symmetric plane with all offsets
// equal to `offset`, restricted to the disk of radius `window`.
//
// # Safety
// `out` must be valid for writes.
enum QcpStatus qcp_embedding_generate(uintptr_t folds,
                                      double offset,
                                      double window,
                                      struct QcpEmbedding **out);

// Number of vertices and faces.
//
// # Safety
// `e` must be a live handle; the output pointers must be valid for writes.
enum QcpStatus qcp_embedding_size(const struct QcpEmbedding *e,
                                  uintptr_t *vertices,
                                  uintptr_t *faces);

// # Safety
// `e` must be null or a handle not yet freed.
void qcp_embedding_free(struct QcpEmbedding *e);

// Square-grid Z^γ map on the window n + m ≤ 2·size.
//
// # Safety
// `out` must be valid for writes.
enum QcpStatus qcp_zgamma_map(double gamma, double psi, uintptr_t size, struct QcpMap **out);

// f(n, m) as (re, im).
//
// # Safety
// `map` must be a live handle; `re` and `im` valid for writes.
enum QcpStatus qcp_map_value(const struct QcpMap *map,
                             int64_t n,
                             int64_t m,
                             double *re,
                             double *im);

// Circle pattern of a map.
//
// # Safety
// `map` must be a live handle; `out` valid for writes.
enum QcpStatus qcp_map_pattern(const struct QcpMap *map, struct QcpPattern **out);

// # Safety
// `map` must be null or a handle not yet freed.
void qcp_map_free(struct QcpMap *map);

// Quasicrystallic Z^γ pattern on the octant part of an embedding.
//
// # Safety
// `e` must be a live handle; `out` valid for writes.
enum QcpStatus qcp_zgamma_quasi(const struct QcpEmbedding *e,
                                double gamma,
                                struct QcpPattern **out);

// Number of vertices and faces.
//
// # Safety
// `p` must be a live handle; the output pointers valid for writes.
enum QcpStatus qcp_pattern_size(const struct QcpPattern *p, uintptr_t *vertices, uintptr_t *faces);

// Center (or intersection point) of vertex `v` and, for white vertices, the
// radius (0 for black vertices).
//
// # Safety
// `p` must be a live handle; the output pointers valid for writes.
enum QcpStatus qcp_pattern_vertex(const struct QcpPattern *p,
                                  uintptr_t v,
                                  double *x,
                                  double *y,
                                  double *radius);

// Counts immersion, overlap and convexity findings.
//
// # Safety
// `p` must be a live handle; the output pointers valid for writes.
enum QcpStatus qcp_pattern_check(const struct QcpPattern *p,
                                 uintptr_t *immersion,
                                 uintptr_t *overlaps,
                                 uintptr_t *nonconvex);

// Writes the pattern document as NUL-terminated JSON into `buf`. `needed`
// receives the required size including the terminator; if `len` is too
// small nothing is written and `QCP_STATUS_BUFFER_TOO_SMALL` is returned.
//
// # Safety
// `p` must be a live handle, `buf` valid for `len` bytes (or null with
// `len` 0) and `needed` valid for writes.
enum QcpStatus qcp_pattern_to_json(const struct QcpPattern *p,
                                   char *buf,
                                   uintptr_t len,
                                   uintptr_t *needed);

// # Safety
// `p` must be null or a handle not yet freed.
void qcp_pattern_free(struct QcpPattern *p);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QCP_H */
