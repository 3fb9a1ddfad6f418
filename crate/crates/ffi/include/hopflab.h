#ifndef HOPFLAB_H
#define HOPFLAB_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Result codes. Zero is success.
 */
typedef enum HlStatus {
  HL_STATUS_OK = 0,
  HL_STATUS_NULL_POINTER = 1,
  HL_STATUS_INVALID_ARGUMENT = 2,
  HL_STATUS_MESH_MISMATCH = 3,
  HL_STATUS_DOMAIN = 4,
  HL_STATUS_ORIENTATION = 5,
  HL_STATUS_BOUNDARY_ADJACENT = 6,
  HL_STATUS_NUMERICAL = 7,
  HL_STATUS_IO = 8,
  HL_STATUS_PARSE = 9,
  /*
   The call panicked; the library state is unchanged.
   */
  HL_STATUS_INTERNAL = 10,
  /*
   A computation finished without meeting its tolerance.
   */
  HL_STATUS_INFEASIBLE = 11,
} HlStatus;

/*
 Opaque piecewise-linear map on a mesh.
 */
typedef struct HlMap HlMap;

/*
 Opaque ring mesh of the closed unit disk.
 */
typedef struct HlMesh HlMesh;

typedef struct HlEnergy {
  double dirichlet;
  double negative_jacobian_mass;
  double min_jacobian;
} HlEnergy;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Copies the last error message of this thread into `buf` (NUL-terminated,
 truncated to `len`). Returns the full message length, 0 if none.

 # Safety
 `buf` must be valid for `len` bytes, or null with `len == 0`.
 */
size_t hl_last_error(char *buf, size_t len);

/*
 Library version as a static NUL-terminated string.
 */
const char *hl_version(void);

/*
 Builds the mesh with `rings` rings and `sectors` sectors.

 # Safety
 `out` must be a valid pointer.
 */
enum HlStatus hl_mesh_new(size_t rings, size_t sectors, struct HlMesh **out);

/*
 # Safety
 `mesh` must come from [`hl_mesh_new`] and not be used afterwards.
 */
void hl_mesh_free(struct HlMesh *mesh);

/*
 # Safety
 `mesh` must be a live handle or null.
 */
size_t hl_mesh_vertex_count(const struct HlMesh *mesh);

/*
 # Safety
 `mesh` must be a live handle or null.
 */
size_t hl_mesh_triangle_count(const struct HlMesh *mesh);

/*
 Writes `2 * vertex_count` doubles into `xy`.

 # Safety
 `xy` must be valid for `len` doubles.
 */
enum HlStatus hl_mesh_vertices(const struct HlMesh *mesh, double *xy, size_t len);

/*
 Writes `3 * triangle_count` vertex indices into `idx`.

 # Safety
 `idx` must be valid for `len` entries.
 */
enum HlStatus hl_mesh_triangles(const struct HlMesh *mesh, size_t *idx, size_t len);

/*
 Map from `vertex_count` interleaved vertex values.

 # Safety
 `xy` must hold `2 * n` doubles; `out` must be valid.
 */
enum HlStatus hl_map_from_values(const struct HlMesh *mesh,
                                 const double *xy,
                                 size_t n,
                                 struct HlMap **out);

/*
 Samples a gallery map such as `"fig1"` or `"power:2"` at the vertices.

 # Safety
 `name` must be a NUL-terminated string; `out` must be valid.
 */
enum HlStatus hl_map_gallery(const struct HlMesh *mesh, const char *name, struct HlMap **out);

/*
 Poisson extension of boundary values given in boundary-loop order.

 # Safety
 `xy` must hold `2 * n` doubles; `out` must be valid.
 */
enum HlStatus hl_map_harmonic(const struct HlMesh *mesh,
                              const double *xy,
                              size_t n,
                              struct HlMap **out);

/*
 # Safety
 `map` must come from this library and not be used afterwards.
 */
void hl_map_free(struct HlMap *map);

/*
 # Safety
 `xy` must be valid for `len` doubles.
 */
enum HlStatus hl_map_values(const struct HlMap *map, double *xy, size_t len);

/*
 Writes the boundary values of `map` in loop order.

 # Safety
 `xy` must be valid for `len` doubles.
 */
enum HlStatus hl_map_boundary_values(const struct HlMesh *mesh,
                                     const struct HlMap *map,
                                     double *xy,
                                     size_t len);

/*
 # Safety
 Handles must be live; `out` must be valid.
 */
enum HlStatus hl_energy(const struct HlMesh *mesh, const struct HlMap *map, struct HlEnergy *out);

/*
 Constrained minimizer for boundary values in loop order. `solver_json`
 may be null for defaults. The map is written even when the result is
 infeasible, in which case the status is `Infeasible`.

 # Safety
 `xy` must hold `2 * n` doubles; `solver_json` must be null or a
 NUL-terminated string; `out` must be valid.
 */
enum HlStatus hl_minimize(const struct HlMesh *mesh,
                          const double *xy,
                          size_t n,
                          const char *solver_json,
                          struct HlMap **out);

/*
 Discrete degree of `map` over the ball `B(y, r)`. A radius of zero or
 less selects the default.

 # Safety
 Handles must be live; `out` must be valid.
 */
enum HlStatus hl_degree(const struct HlMesh *mesh,
                        const struct HlMap *map,
                        double y_re,
                        double y_im,
                        double radius,
                        int64_t *out);

/*
 Capacity of the disk `|z| ≤ radius` relative to the unit disk.

 # Safety
 `mesh` must be live; `out` must be valid.
 */
enum HlStatus hl_capacity_disk(const struct HlMesh *mesh, double radius, double *out);

/*
 Holomorphy residual of the Hopf product of `map`.

 # Safety
 Handles must be live; `out` must be valid.
 */
enum HlStatus hl_hopf_residual(const struct HlMesh *mesh, const struct HlMap *map, double *out);

/*
 Largest number of fiber components over a `grid × grid` sample of the
 image. A radius of zero or less selects the default.

 # Safety
 Handles must be live; `out` must be valid.
 */
enum HlStatus hl_monotonicity(const struct HlMesh *mesh,
                              const struct HlMap *map,
                              size_t grid,
                              double radius,
                              size_t *out);

/*
 Runs a scene given as JSON, with relative paths resolved against
 `base_dir` (null for the working directory). The report is returned as
 a string to be released with [`hl_string_free`].

 # Safety
 String arguments must be NUL-terminated; `out` must be valid.
 */
enum HlStatus hl_run_scene(const char *scene_json, const char *base_dir, char **out);

/*
 # Safety
 `s` must come from this library and not be used afterwards.
 */
void hl_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HOPFLAB_H */
