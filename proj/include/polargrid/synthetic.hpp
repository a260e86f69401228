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

#ifndef POLARGRID_SYNTHETIC_HPP_
#define POLARGRID_SYNTHETIC_HPP_

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "polargrid/config.hpp"
#include "polargrid/scan_io.hpp"

namespace polargrid {

struct GroundPlane {
  double z = -1.73;
  ClassId label = 1;
  double reflectivity = 0.3;
};

struct BoxPrimitive {
  std::array<double, 3> min{};
  std::array<double, 3> max{};
  ClassId label = 0;
  double reflectivity = 0.5;
};

// Vertical cylinder.
struct CylinderPrimitive {
  double cx = 0.0;
  double cy = 0.0;
  double radius = 0.2;
  double zmin = 0.0;
  double zmax = 1.0;
  ClassId label = 0;
  double reflectivity = 0.5;
};

// Objects scattered around the sensor from the scan seed. Positions are
// drawn uniformly in planar radius within [min_radius, max_radius].
struct RandomObjects {
  int cars = 0;
  int buildings = 0;
  int poles = 0;
  ClassId car_label = 3;
  ClassId building_label = 2;
  ClassId pole_label = 4;
  double min_radius = 5.0;
  double max_radius = 45.0;
};

struct Scene {
  std::optional<GroundPlane> ground;
  std::vector<BoxPrimitive> boxes;
  std::vector<CylinderPrimitive> cylinders;

  bool empty() const {
    return !ground && boxes.empty() && cylinders.empty();
  }

  // Label of the primitive whose surface is closest to p, if that distance
  // is within tolerance.
  std::optional<ClassId> LabelAt(const std::array<double, 3>& p,
                                 double tolerance) const;
};

struct SynthSpec {
  int beams = 64;
  // Beam angles above the horizontal plane, evenly spaced, inclusive.
  double zenith_min_deg = -24.8;
  double zenith_max_deg = 2.0;
  int columns = 1024;
  double max_range = 80.0;
  double range_noise = 0.0;   // std-dev in meters, along the ray
  std::vector<std::string> class_names = {"unlabeled", "ground", "building",
                                          "car", "pole"};
  std::optional<ClassId> ignore = 0;
  Scene scene;
  RandomObjects random;

  static SynthSpec Default();
  static SynthSpec FromConfig(const KeyValueConfig& config);
  static SynthSpec FromFile(const std::string& path);
  KeyValueConfig ToConfig() const;

  LabelMap label_map() const { return LabelMap::Identity(class_names, ignore); }
};

// Fixed primitives plus the seeded random objects.
Scene BuildScene(const SynthSpec& spec, std::uint64_t seed);

// Ray-casts the scene with a spinning multi-beam sensor at the origin.
// Deterministic in (spec, seed).
Scan GenerateSyntheticScan(const SynthSpec& spec, std::uint64_t seed);

}  // namespace polargrid

#endif  // POLARGRID_SYNTHETIC_HPP_
