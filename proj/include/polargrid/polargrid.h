/*
 * Copyright 2026 The polargrid Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef POLARGRID_POLARGRID_H_
#define POLARGRID_POLARGRID_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(POLARGRID_BUILDING_LIBRARY)
#define PG_API __declspec(dllexport)
#else
#define PG_API __declspec(dllimport)
#endif
#else
#define PG_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum pg_status {
  PG_OK = 0,
  PG_ERR_INVALID_ARGUMENT = 1,
  PG_ERR_IO = 2,
  PG_ERR_FORMAT = 3,
  PG_ERR_NON_FINITE = 4,
  PG_ERR_SIZE_MISMATCH = 5,
  PG_ERR_UNMAPPED_LABEL = 6,
  PG_ERR_CONFIG = 7,
  PG_ERR_SHAPE_MISMATCH = 8,
  PG_ERR_NUMERIC = 9,
  PG_ERR_STATE = 10,
  PG_ERR_INTERNAL = 100
} pg_status;

typedef enum pg_grid_kind {
  PG_GRID_CARTESIAN = 0,
  PG_GRID_POLAR = 1,
  PG_GRID_SPHERICAL = 2
} pg_grid_kind;

typedef struct pg_scan pg_scan;
typedef struct pg_label_map pg_label_map;
typedef struct pg_grid_spec pg_grid_spec;
typedef struct pg_voxelized pg_voxelized;
typedef struct pg_confusion pg_confusion;
typedef struct pg_experiment pg_experiment;

/* Library version, e.g. "0.1.0". */
PG_API const char* pg_version(void);
PG_API const char* pg_status_name(pg_status status);
/* Message of the last failed call on this thread; "" if none. */
PG_API const char* pg_last_error(void);
/* Frees strings returned through char** out-parameters. */
PG_API void pg_string_free(char* s);

/* Scans. Points are (x, y, z, reflection) float quadruples. */
PG_API pg_status pg_scan_load(const char* path, pg_scan** out);
PG_API pg_status pg_scan_from_points(const float* xyzr, size_t count,
                                     pg_scan** out);
PG_API pg_status pg_scan_generate(const char* synth_spec_path, uint64_t seed,
                                  pg_scan** out);
PG_API pg_status pg_scan_write(const pg_scan* scan, const char* path);
PG_API size_t pg_scan_size(const pg_scan* scan);
PG_API pg_status pg_scan_points(const pg_scan* scan, float* xyzr, size_t count);
PG_API int pg_scan_has_labels(const pg_scan* scan);
PG_API pg_status pg_scan_labels(const pg_scan* scan, uint16_t* labels,
                                size_t count);
PG_API pg_status pg_scan_set_labels(pg_scan* scan, const uint16_t* labels,
                                    size_t count);
PG_API pg_status pg_scan_load_labels(pg_scan* scan, const char* path,
                                     const pg_label_map* map);
PG_API void pg_scan_free(pg_scan* scan);

/* Label maps. */
PG_API pg_status pg_label_map_load(const char* path, pg_label_map** out);
PG_API int pg_label_map_num_classes(const pg_label_map* map);
/* Writes the ignore id; returns 0 when the map has no ignore class. */
PG_API int pg_label_map_ignore(const pg_label_map* map, uint16_t* ignore);
PG_API pg_status pg_write_predictions(const uint16_t* labels, size_t count,
                                      const pg_label_map* map,
                                      const char* path);
PG_API void pg_label_map_free(pg_label_map* map);

/* Grids. Angles in radians. */
PG_API pg_status pg_grid_cartesian(double x_min, double x_max, double y_min,
                                   double y_max, double z_min, double z_max,
                                   int nx, int ny, int nz, pg_grid_spec** out);
PG_API pg_status pg_grid_polar(double r_min, double r_max, double z_min,
                               double z_max, int n_radius, int n_azimuth,
                               int nz, pg_grid_spec** out);
PG_API pg_status pg_grid_spherical(double zenith_min, double zenith_max,
                                   int rows, int cols, pg_grid_spec** out);
PG_API pg_grid_kind pg_grid_kind_of(const pg_grid_spec* grid);
PG_API void pg_grid_free(pg_grid_spec* grid);

/* Voxelization and partition statistics. */
PG_API pg_status pg_quantize(const pg_scan* scan, const pg_grid_spec* grid,
                             pg_voxelized** out);
/* ijk holds 3 ints per point. */
PG_API pg_status pg_voxelized_assignment(const pg_voxelized* vox, int32_t* ijk,
                                         size_t count);
PG_API size_t pg_voxelized_occupied_cells(const pg_voxelized* vox);
PG_API pg_status pg_cell_purity(const pg_voxelized* vox, const uint16_t* labels,
                                size_t count, int ignore, double* purity);
/* ignore < 0 means no ignore class. */
PG_API pg_status pg_upper_bound_labels(const pg_voxelized* vox,
                                       const uint16_t* labels, size_t count,
                                       int ignore, uint16_t* out);
PG_API void pg_voxelized_free(pg_voxelized* vox);

/* Metrics. ignore < 0 means no ignore class. */
PG_API pg_status pg_confusion_create(int num_classes, int ignore,
                                     pg_confusion** out);
PG_API pg_status pg_confusion_accumulate(pg_confusion* cm, const uint16_t* gt,
                                         const uint16_t* pred, size_t count);
/* Returns PG_ERR_NUMERIC with *iou untouched when the IoU is undefined. */
PG_API pg_status pg_confusion_iou(const pg_confusion* cm, int cls, double* iou);
PG_API pg_status pg_confusion_miou(const pg_confusion* cm, double* miou);
PG_API pg_status pg_confusion_accuracy(const pg_confusion* cm, double* accuracy);
PG_API void pg_confusion_free(pg_confusion* cm);

/* Experiments: a sectioned key-value configuration plus a command runner. */
PG_API pg_status pg_experiment_default(pg_experiment** out);
PG_API pg_status pg_experiment_load(const char* path, pg_experiment** out);
/* Rejects unknown keys and malformed values; exp is left unchanged on error.
   Cross-field checks run when the experiment is used. */
PG_API pg_status pg_experiment_set(pg_experiment* exp, const char* section,
                                   const char* key, const char* value);
/* Serialized, normalized configuration; free with pg_string_free. */
PG_API pg_status pg_experiment_to_string(const pg_experiment* exp, char** out);
/* Runs synth | stats | purity | upper-bound | train | eval | predict |
   compare. report (optional) receives the summary text. */
PG_API pg_status pg_experiment_run(const pg_experiment* exp, const char* command,
                                   char** report);
PG_API void pg_experiment_free(pg_experiment* exp);

#ifdef __cplusplus
}
#endif

#endif /* POLARGRID_POLARGRID_H_ */
