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

#ifndef POLARGRID_SCAN_IO_HPP_
#define POLARGRID_SCAN_IO_HPP_

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "polargrid/config.hpp"

namespace polargrid {

// Training class id. Small and non-negative; bounded by LabelMap::num_classes.
using ClassId = std::uint16_t;

struct Point {
  float x = 0.f;
  float y = 0.f;
  float z = 0.f;
  float reflection = 0.f;
};

// One LiDAR sweep. If labels are present they are parallel to points.
struct Scan {
  std::vector<Point> points;
  std::optional<std::vector<ClassId>> labels;

  std::size_t size() const { return points.size(); }
  bool has_labels() const { return labels.has_value(); }
  const std::vector<ClassId>& label_vector() const;
};

// Maps raw 16-bit dataset labels onto contiguous training ids and back.
//
// Text format:
//
//   [classes]
//   count = 20
//   ignore = 0
//   [names]
//   0 = unlabeled
//   [learning_map]        ; raw -> train, must cover every raw id in the data
//   10 = 1
//   [learning_map_inv]    ; train -> raw, used when writing predictions
//   1 = 10
class LabelMap {
 public:
  LabelMap() = default;

  static LabelMap FromFile(const std::string& path);
  static LabelMap FromConfig(const KeyValueConfig& config);
  // raw id == train id for 0..num_classes-1.
  static LabelMap Identity(const std::vector<std::string>& names,
                           std::optional<ClassId> ignore);

  ClassId ToTrain(std::uint16_t raw) const;
  std::uint16_t ToRaw(ClassId train) const;
  bool HasRaw(ClassId train) const;

  int num_classes() const { return static_cast<int>(names_.size()); }
  std::optional<ClassId> ignore() const { return ignore_; }
  const std::string& name(ClassId id) const;
  const std::vector<std::string>& names() const { return names_; }

  KeyValueConfig ToConfig() const;

 private:
  std::map<std::uint16_t, ClassId> to_train_;
  std::vector<std::optional<std::uint16_t>> to_raw_;
  std::vector<std::string> names_;
  std::optional<ClassId> ignore_;
};

// KITTI velodyne layout: little-endian float32 (x, y, z, reflection) per point.
Scan LoadScan(const std::string& path);
Scan DecodeScan(std::span<const std::byte> bytes);
void WriteScan(const Scan& scan, const std::string& path);

// Label layout: little-endian uint32 per point, low 16 bits semantic class,
// high 16 bits instance id (discarded).
std::vector<std::uint32_t> LoadRawLabels(const std::string& path);
std::vector<ClassId> LoadLabels(const std::string& path, const LabelMap& map);
std::vector<ClassId> LoadLabels(const std::string& path, const LabelMap& map,
                                std::size_t expected_count);
std::vector<ClassId> DecodeLabels(std::span<const std::uint32_t> raw,
                                  const LabelMap& map);

// Writes train ids mapped back to raw ids with zero instance bits.
void WritePredictions(std::span<const ClassId> labels, const LabelMap& map,
                      const std::string& path);

std::vector<std::byte> ReadFileBytes(const std::string& path);
void WriteFileBytes(const std::string& path, std::span<const std::byte> bytes);

}  // namespace polargrid

#endif  // POLARGRID_SCAN_IO_HPP_
