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

#include "polargrid/polargrid.h"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <new>
#include <optional>
#include <string>

#include "polargrid/config.hpp"
#include "polargrid/error.hpp"
#include "polargrid/experiment.hpp"
#include "polargrid/grid.hpp"
#include "polargrid/metrics.hpp"
#include "polargrid/partition_stats.hpp"
#include "polargrid/scan_io.hpp"
#include "polargrid/synthetic.hpp"

struct pg_scan {
  polargrid::Scan scan;
};
struct pg_label_map {
  polargrid::LabelMap map;
};
struct pg_grid_spec {
  polargrid::GridSpec spec;
};
struct pg_voxelized {
  polargrid::VoxelizedScan vox;
};
struct pg_confusion {
  polargrid::ConfusionMatrix matrix;
};
struct pg_experiment {
  polargrid::KeyValueConfig config;
};

namespace {

thread_local std::string g_last_error;

pg_status Record(pg_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

template <typename Fn>
pg_status Guard(Fn&& fn) {
  g_last_error.clear();
  try {
    fn();
    return PG_OK;
  } catch (const polargrid::Error& e) {
    return Record(static_cast<pg_status>(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return Record(PG_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return Record(PG_ERR_INTERNAL, e.what());
  } catch (...) {
    return Record(PG_ERR_INTERNAL, "unknown error");
  }
}

void NotNull(const void* p, const char* what) {
  if (p == nullptr) {
    polargrid::Fail(polargrid::ErrorCode::kInvalidArgument,
                    std::string(what) + " is null");
  }
}

std::optional<polargrid::ClassId> IgnoreArg(int ignore) {
  if (ignore < 0) return std::nullopt;
  return static_cast<polargrid::ClassId>(ignore);
}

char* CopyString(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.data(), s.size() + 1);
  return out;
}

template <typename Handle, typename Make>
pg_status Create(Handle** out, Make&& make) {
  return Guard([&] {
    NotNull(out, "out");
    *out = nullptr;
    *out = new Handle{make()};
  });
}

}  // namespace

extern "C" {

const char* pg_version(void) { return "0.1.0"; }

const char* pg_status_name(pg_status status) {
  if (status == PG_OK) return "ok";
  if (status == PG_ERR_INTERNAL) return "internal";
  if (status >= PG_ERR_INVALID_ARGUMENT && status <= PG_ERR_STATE) {
    return polargrid::ErrorCodeName(static_cast<polargrid::ErrorCode>(status));
  }
  return "unknown";
}

const char* pg_last_error(void) { return g_last_error.c_str(); }

void pg_string_free(char* s) { std::free(s); }

pg_status pg_scan_load(const char* path, pg_scan** out) {
  return Create(out, [&] {
    NotNull(path, "path");
    return polargrid::LoadScan(path);
  });
}

pg_status pg_scan_from_points(const float* xyzr, size_t count, pg_scan** out) {
  return Create(out, [&] {
    if (count > 0) NotNull(xyzr, "points");
    polargrid::Scan scan;
    scan.points.resize(count);
    for (size_t n = 0; n < count; ++n) {
      scan.points[n] = {xyzr[4 * n], xyzr[4 * n + 1], xyzr[4 * n + 2], xyzr[4 * n + 3]};
      for (int f = 0; f < 4; ++f) {
        if (!std::isfinite(xyzr[4 * n + f])) {
          polargrid::Fail(polargrid::ErrorCode::kNonFinite,
                          "non-finite value at point " + std::to_string(n));
        }
      }
    }
    return scan;
  });
}

pg_status pg_scan_generate(const char* synth_spec_path, uint64_t seed, pg_scan** out) {
  return Create(out, [&] {
    const auto spec = synth_spec_path == nullptr
                          ? polargrid::SynthSpec::Default()
                          : polargrid::SynthSpec::FromFile(synth_spec_path);
    return polargrid::GenerateSyntheticScan(spec, seed);
  });
}

pg_status pg_scan_write(const pg_scan* scan, const char* path) {
  return Guard([&] {
    NotNull(scan, "scan");
    NotNull(path, "path");
    polargrid::WriteScan(scan->scan, path);
  });
}

size_t pg_scan_size(const pg_scan* scan) { return scan ? scan->scan.size() : 0; }

pg_status pg_scan_points(const pg_scan* scan, float* xyzr, size_t count) {
  return Guard([&] {
    NotNull(scan, "scan");
    polargrid::Require(count == scan->scan.size(), polargrid::ErrorCode::kSizeMismatch,
                       "buffer holds " + std::to_string(count) + " points, scan has " +
                           std::to_string(scan->scan.size()));
    if (count > 0) NotNull(xyzr, "points");
    for (size_t n = 0; n < count; ++n) {
      const auto& p = scan->scan.points[n];
      xyzr[4 * n] = p.x;
      xyzr[4 * n + 1] = p.y;
      xyzr[4 * n + 2] = p.z;
      xyzr[4 * n + 3] = p.reflection;
    }
  });
}

int pg_scan_has_labels(const pg_scan* scan) {
  return scan != nullptr && scan->scan.has_labels() ? 1 : 0;
}

pg_status pg_scan_labels(const pg_scan* scan, uint16_t* labels, size_t count) {
  return Guard([&] {
    NotNull(scan, "scan");
    const auto& l = scan->scan.label_vector();
    polargrid::Require(count == l.size(), polargrid::ErrorCode::kSizeMismatch,
                       "label buffer size does not match the scan");
    if (count > 0) NotNull(labels, "labels");
    std::copy(l.begin(), l.end(), labels);
  });
}

pg_status pg_scan_set_labels(pg_scan* scan, const uint16_t* labels, size_t count) {
  return Guard([&] {
    NotNull(scan, "scan");
    polargrid::Require(count == scan->scan.size(), polargrid::ErrorCode::kSizeMismatch,
                       "label count does not match the scan");
    if (count > 0) NotNull(labels, "labels");
    scan->scan.labels.emplace(labels, labels + count);
  });
}

pg_status pg_scan_load_labels(pg_scan* scan, const char* path, const pg_label_map* map) {
  return Guard([&] {
    NotNull(scan, "scan");
    NotNull(path, "path");
    NotNull(map, "map");
    scan->scan.labels = polargrid::LoadLabels(path, map->map, scan->scan.size());
  });
}

void pg_scan_free(pg_scan* scan) { delete scan; }

pg_status pg_label_map_load(const char* path, pg_label_map** out) {
  return Create(out, [&] {
    NotNull(path, "path");
    return polargrid::LabelMap::FromFile(path);
  });
}

int pg_label_map_num_classes(const pg_label_map* map) {
  return map ? map->map.num_classes() : 0;
}

int pg_label_map_ignore(const pg_label_map* map, uint16_t* ignore) {
  if (map == nullptr || !map->map.ignore()) return 0;
  if (ignore != nullptr) *ignore = *map->map.ignore();
  return 1;
}

pg_status pg_write_predictions(const uint16_t* labels, size_t count,
                               const pg_label_map* map, const char* path) {
  return Guard([&] {
    NotNull(map, "map");
    NotNull(path, "path");
    if (count > 0) NotNull(labels, "labels");
    polargrid::WritePredictions({labels, count}, map->map, path);
  });
}

void pg_label_map_free(pg_label_map* map) { delete map; }

pg_status pg_grid_cartesian(double x_min, double x_max, double y_min, double y_max,
                            double z_min, double z_max, int nx, int ny, int nz,
                            pg_grid_spec** out) {
  return Create(out, [&] {
    auto spec = polargrid::GridSpec::Cartesian({x_min, x_max}, {y_min, y_max},
                                               {z_min, z_max}, nx, ny, nz);
    spec.Validate();
    return spec;
  });
}

pg_status pg_grid_polar(double r_min, double r_max, double z_min, double z_max,
                        int n_radius, int n_azimuth, int nz, pg_grid_spec** out) {
  return Create(out, [&] {
    auto spec = polargrid::GridSpec::Polar({r_min, r_max}, {z_min, z_max}, n_radius,
                                           n_azimuth, nz);
    spec.Validate();
    return spec;
  });
}

pg_status pg_grid_spherical(double zenith_min, double zenith_max, int rows, int cols,
                            pg_grid_spec** out) {
  return Create(out, [&] {
    auto spec = polargrid::GridSpec::Spherical({zenith_min, zenith_max}, rows, cols);
    spec.Validate();
    return spec;
  });
}

pg_grid_kind pg_grid_kind_of(const pg_grid_spec* grid) {
  switch (grid->spec.kind) {
    case polargrid::GridKind::kCartesian:
      return PG_GRID_CARTESIAN;
    case polargrid::GridKind::kPolar:
      return PG_GRID_POLAR;
    case polargrid::GridKind::kSpherical:
      return PG_GRID_SPHERICAL;
  }
  return PG_GRID_POLAR;
}

void pg_grid_free(pg_grid_spec* grid) { delete grid; }

pg_status pg_quantize(const pg_scan* scan, const pg_grid_spec* grid, pg_voxelized** out) {
  return Create(out, [&] {
    NotNull(scan, "scan");
    NotNull(grid, "grid");
    return polargrid::Quantize(scan->scan, grid->spec);
  });
}

pg_status pg_voxelized_assignment(const pg_voxelized* vox, int32_t* ijk, size_t count) {
  return Guard([&] {
    NotNull(vox, "vox");
    polargrid::Require(count == vox->vox.num_points(), polargrid::ErrorCode::kSizeMismatch,
                       "assignment buffer size does not match the point count");
    if (count > 0) NotNull(ijk, "ijk");
    for (size_t n = 0; n < count; ++n) {
      const auto& c = vox->vox.assignment[n];
      ijk[3 * n] = c.i;
      ijk[3 * n + 1] = c.j;
      ijk[3 * n + 2] = c.k;
    }
  });
}

size_t pg_voxelized_occupied_cells(const pg_voxelized* vox) {
  return vox ? vox->vox.cells.size() : 0;
}

pg_status pg_cell_purity(const pg_voxelized* vox, const uint16_t* labels, size_t count,
                         int ignore, double* purity) {
  return Guard([&] {
    NotNull(vox, "vox");
    NotNull(purity, "purity");
    if (count > 0) NotNull(labels, "labels");
    *purity = polargrid::CellPurity(vox->vox, {labels, count}, IgnoreArg(ignore));
  });
}

pg_status pg_upper_bound_labels(const pg_voxelized* vox, const uint16_t* labels,
                                size_t count, int ignore, uint16_t* out) {
  return Guard([&] {
    NotNull(vox, "vox");
    if (count > 0) {
      NotNull(labels, "labels");
      NotNull(out, "out");
    }
    const auto pred =
        polargrid::UpperBoundLabels(vox->vox, {labels, count}, IgnoreArg(ignore));
    std::copy(pred.begin(), pred.end(), out);
  });
}

void pg_voxelized_free(pg_voxelized* vox) { delete vox; }

pg_status pg_confusion_create(int num_classes, int ignore, pg_confusion** out) {
  return Create(out, [&] {
    return polargrid::ConfusionMatrix(num_classes, IgnoreArg(ignore));
  });
}

pg_status pg_confusion_accumulate(pg_confusion* cm, const uint16_t* gt,
                                  const uint16_t* pred, size_t count) {
  return Guard([&] {
    NotNull(cm, "confusion");
    if (count > 0) {
      NotNull(gt, "gt");
      NotNull(pred, "pred");
    }
    cm->matrix.Accumulate({gt, count}, {pred, count});
  });
}

pg_status pg_confusion_iou(const pg_confusion* cm, int cls, double* iou) {
  return Guard([&] {
    NotNull(cm, "confusion");
    NotNull(iou, "iou");
    const auto v = cm->matrix.Iou(cls);
    if (!v) {
      polargrid::Fail(polargrid::ErrorCode::kNumeric,
                      "IoU of class " + std::to_string(cls) + " is undefined");
    }
    *iou = *v;
  });
}

pg_status pg_confusion_miou(const pg_confusion* cm, double* miou) {
  return Guard([&] {
    NotNull(cm, "confusion");
    NotNull(miou, "miou");
    *miou = cm->matrix.MeanIou();
  });
}

pg_status pg_confusion_accuracy(const pg_confusion* cm, double* accuracy) {
  return Guard([&] {
    NotNull(cm, "confusion");
    NotNull(accuracy, "accuracy");
    *accuracy = cm->matrix.Accuracy();
  });
}

void pg_confusion_free(pg_confusion* cm) { delete cm; }

pg_status pg_experiment_default(pg_experiment** out) {
  return Create(out, [] { return polargrid::ExperimentConfig::Default().ToConfig(); });
}

pg_status pg_experiment_load(const char* path, pg_experiment** out) {
  return Create(out, [&] {
    NotNull(path, "path");
    auto config = polargrid::KeyValueConfig::FromFile(path);
    polargrid::ExperimentConfig::FromConfig(config);  // validate early
    return config;
  });
}

pg_status pg_experiment_set(pg_experiment* exp, const char* section, const char* key,
                            const char* value) {
  return Guard([&] {
    NotNull(exp, "experiment");
    NotNull(section, "section");
    NotNull(key, "key");
    NotNull(value, "value");
    polargrid::KeyValueConfig updated = exp->config;
    updated.Set(section, key, value);
    polargrid::ExperimentConfig::Parse(updated);
    exp->config = std::move(updated);
  });
}

pg_status pg_experiment_to_string(const pg_experiment* exp, char** out) {
  return Guard([&] {
    NotNull(exp, "experiment");
    NotNull(out, "out");
    *out = CopyString(
        polargrid::ExperimentConfig::FromConfig(exp->config).ToConfig().ToString());
  });
}

pg_status pg_experiment_run(const pg_experiment* exp, const char* command, char** report) {
  if (report != nullptr) *report = nullptr;
  return Guard([&] {
    NotNull(exp, "experiment");
    NotNull(command, "command");
    const auto config = polargrid::ExperimentConfig::FromConfig(exp->config);
    const std::string text = polargrid::RunCommand(command, config);
    if (report != nullptr) *report = CopyString(text);
  });
}

void pg_experiment_free(pg_experiment* exp) { delete exp; }

}  // extern "C"
