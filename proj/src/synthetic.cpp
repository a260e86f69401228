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

#include "polargrid/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "polargrid/error.hpp"
#include "polargrid/rng.hpp"

namespace polargrid {
namespace {

using Vec3 = std::array<double, 3>;

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kRayEpsilon = 1e-12;

struct Hit {
  double t = kInf;
  ClassId label = 0;
  double reflectivity = 0.0;
  double cos_incidence = 1.0;
};

void IntersectPlane(const GroundPlane& g, const Vec3& d, Hit& best) {
  if (std::abs(d[2]) < kRayEpsilon) return;
  const double t = g.z / d[2];
  if (t > 0.0 && t < best.t) {
    best = {t, g.label, g.reflectivity, std::abs(d[2])};
  }
}

void IntersectBox(const BoxPrimitive& b, const Vec3& d, Hit& best) {
  double t_enter = -kInf;
  double t_exit = kInf;
  int enter_axis = 0;
  for (int a = 0; a < 3; ++a) {
    if (std::abs(d[a]) < kRayEpsilon) {
      if (0.0 < b.min[a] || 0.0 > b.max[a]) return;
      continue;
    }
    double t1 = b.min[a] / d[a];
    double t2 = b.max[a] / d[a];
    if (t1 > t2) std::swap(t1, t2);
    if (t1 > t_enter) {
      t_enter = t1;
      enter_axis = a;
    }
    t_exit = std::min(t_exit, t2);
  }
  // A sensor inside the box sees nothing of it.
  if (t_enter > t_exit || t_enter <= 0.0) return;
  if (t_enter < best.t) {
    best = {t_enter, b.label, b.reflectivity, std::abs(d[enter_axis])};
  }
}

void IntersectCylinder(const CylinderPrimitive& c, const Vec3& d, Hit& best) {
  const double a = d[0] * d[0] + d[1] * d[1];
  if (a > kRayEpsilon) {
    const double b = -2.0 * (d[0] * c.cx + d[1] * c.cy);
    const double cc = c.cx * c.cx + c.cy * c.cy - c.radius * c.radius;
    const double disc = b * b - 4.0 * a * cc;
    if (disc >= 0.0) {
      const double t = (-b - std::sqrt(disc)) / (2.0 * a);
      const double z = d[2] * t;
      if (t > 0.0 && z >= c.zmin && z <= c.zmax && t < best.t) {
        const double nx = (d[0] * t - c.cx) / c.radius;
        const double ny = (d[1] * t - c.cy) / c.radius;
        best = {t, c.label, c.reflectivity, std::abs(nx * d[0] + ny * d[1])};
      }
    }
  }
  if (std::abs(d[2]) < kRayEpsilon) return;
  for (double cap : {c.zmin, c.zmax}) {
    const double t = cap / d[2];
    if (t <= 0.0 || t >= best.t) continue;
    const double px = d[0] * t - c.cx;
    const double py = d[1] * t - c.cy;
    if (px * px + py * py <= c.radius * c.radius) {
      best = {t, c.label, c.reflectivity, std::abs(d[2])};
    }
  }
}

double BoxSurfaceDistance(const BoxPrimitive& b, const Vec3& p) {
  double outside = 0.0;
  double inside = kInf;
  for (int a = 0; a < 3; ++a) {
    const double below = b.min[a] - p[a];
    const double above = p[a] - b.max[a];
    const double excess = std::max({below, above, 0.0});
    outside += excess * excess;
    inside = std::min({inside, -below, -above});
  }
  return outside > 0.0 ? std::sqrt(outside) : inside;
}

double CylinderSurfaceDistance(const CylinderPrimitive& c, const Vec3& p) {
  const double rho = std::hypot(p[0] - c.cx, p[1] - c.cy);
  const double dz = std::max({c.zmin - p[2], p[2] - c.zmax, 0.0});
  if (rho <= c.radius && dz == 0.0) {
    return std::min({c.radius - rho, p[2] - c.zmin, c.zmax - p[2]});
  }
  const double dr = std::max(rho - c.radius, 0.0);
  return std::hypot(dr, dz);
}

Vec3 ParseVec3(const std::string& text, const std::string& what) {
  const auto items = SplitList(text);
  if (items.size() != 3) {
    Fail(ErrorCode::kConfig, what + ": expected three comma-separated values");
  }
  return {ParseDouble(items[0], what), ParseDouble(items[1], what),
          ParseDouble(items[2], what)};
}

std::string JoinVec3(const Vec3& v) {
  return JoinDoubles({v[0], v[1], v[2]});
}

ClassId ParseLabel(const KeyValueConfig& config, const std::string& section,
                   const std::string& key, ClassId fallback) {
  const long long v = config.GetInt(section, key, fallback);
  if (v < 0 || v > 65535) {
    Fail(ErrorCode::kConfig, section + "." + key + ": label out of range");
  }
  return static_cast<ClassId>(v);
}

}  // namespace

std::optional<ClassId> Scene::LabelAt(const Vec3& p, double tolerance) const {
  double best = kInf;
  std::optional<ClassId> label;
  if (ground) {
    best = std::abs(p[2] - ground->z);
    label = ground->label;
  }
  for (const auto& b : boxes) {
    const double dist = BoxSurfaceDistance(b, p);
    if (dist < best) {
      best = dist;
      label = b.label;
    }
  }
  for (const auto& c : cylinders) {
    const double dist = CylinderSurfaceDistance(c, p);
    if (dist < best) {
      best = dist;
      label = c.label;
    }
  }
  if (best > tolerance) return std::nullopt;
  return label;
}

SynthSpec SynthSpec::Default() {
  SynthSpec spec;
  spec.scene.ground = GroundPlane{};
  spec.random.cars = 14;
  spec.random.buildings = 8;
  spec.random.poles = 16;
  return spec;
}

SynthSpec SynthSpec::FromFile(const std::string& path) {
  return FromConfig(KeyValueConfig::FromFile(path));
}

SynthSpec SynthSpec::FromConfig(const KeyValueConfig& config) {
  SynthSpec spec;
  spec.beams = static_cast<int>(config.GetInt("sensor", "beams", spec.beams));
  spec.zenith_min_deg =
      config.GetDouble("sensor", "zenith_min_deg", spec.zenith_min_deg);
  spec.zenith_max_deg =
      config.GetDouble("sensor", "zenith_max_deg", spec.zenith_max_deg);
  spec.columns =
      static_cast<int>(config.GetInt("sensor", "columns", spec.columns));
  spec.max_range = config.GetDouble("sensor", "max_range", spec.max_range);
  spec.range_noise =
      config.GetDouble("sensor", "range_noise", spec.range_noise);

  if (auto names = config.Find("classes", "names")) {
    spec.class_names = SplitList(*names);
  }
  const long long ignore = config.GetInt("classes", "ignore", 0);
  spec.ignore = ignore < 0 ? std::nullopt
                           : std::optional<ClassId>(static_cast<ClassId>(ignore));

  for (const auto& section : config.sections()) {
    const std::string& name = section.name;
    if (name == "ground") {
      GroundPlane g;
      g.z = config.GetDouble(name, "z", g.z);
      g.label = ParseLabel(config, name, "label", g.label);
      g.reflectivity = config.GetDouble(name, "reflectivity", g.reflectivity);
      spec.scene.ground = g;
    } else if (name.rfind("box", 0) == 0) {
      BoxPrimitive b;
      b.min = ParseVec3(config.GetString(name, "min", ""), name + ".min");
      b.max = ParseVec3(config.GetString(name, "max", ""), name + ".max");
      b.label = ParseLabel(config, name, "label", b.label);
      b.reflectivity = config.GetDouble(name, "reflectivity", b.reflectivity);
      spec.scene.boxes.push_back(b);
    } else if (name.rfind("cylinder", 0) == 0) {
      CylinderPrimitive c;
      const auto center = config.GetDoubleList(name, "center", {0.0, 0.0});
      const auto z = config.GetDoubleList(name, "z", {c.zmin, c.zmax});
      if (center.size() != 2 || z.size() != 2) {
        Fail(ErrorCode::kConfig, name + ": center and z take two values");
      }
      c.cx = center[0];
      c.cy = center[1];
      c.zmin = z[0];
      c.zmax = z[1];
      c.radius = config.GetDouble(name, "radius", c.radius);
      c.label = ParseLabel(config, name, "label", c.label);
      c.reflectivity = config.GetDouble(name, "reflectivity", c.reflectivity);
      spec.scene.cylinders.push_back(c);
    }
  }

  RandomObjects& r = spec.random;
  r.cars = static_cast<int>(config.GetInt("random", "cars", r.cars));
  r.buildings =
      static_cast<int>(config.GetInt("random", "buildings", r.buildings));
  r.poles = static_cast<int>(config.GetInt("random", "poles", r.poles));
  r.car_label = ParseLabel(config, "random", "car_label", r.car_label);
  r.building_label =
      ParseLabel(config, "random", "building_label", r.building_label);
  r.pole_label = ParseLabel(config, "random", "pole_label", r.pole_label);
  r.min_radius = config.GetDouble("random", "min_radius", r.min_radius);
  r.max_radius = config.GetDouble("random", "max_radius", r.max_radius);
  return spec;
}

KeyValueConfig SynthSpec::ToConfig() const {
  KeyValueConfig c;
  c.Set("sensor", "beams", std::to_string(beams));
  c.Set("sensor", "zenith_min_deg", FormatDouble(zenith_min_deg));
  c.Set("sensor", "zenith_max_deg", FormatDouble(zenith_max_deg));
  c.Set("sensor", "columns", std::to_string(columns));
  c.Set("sensor", "max_range", FormatDouble(max_range));
  c.Set("sensor", "range_noise", FormatDouble(range_noise));
  std::string names;
  for (std::size_t i = 0; i < class_names.size(); ++i) {
    names += (i ? ", " : "") + class_names[i];
  }
  c.Set("classes", "names", names);
  c.Set("classes", "ignore", ignore ? std::to_string(*ignore) : "-1");
  if (scene.ground) {
    c.Set("ground", "z", FormatDouble(scene.ground->z));
    c.Set("ground", "label", std::to_string(scene.ground->label));
    c.Set("ground", "reflectivity", FormatDouble(scene.ground->reflectivity));
  }
  for (std::size_t i = 0; i < scene.boxes.size(); ++i) {
    const auto& b = scene.boxes[i];
    const std::string s = "box." + std::to_string(i);
    c.Set(s, "min", JoinVec3(b.min));
    c.Set(s, "max", JoinVec3(b.max));
    c.Set(s, "label", std::to_string(b.label));
    c.Set(s, "reflectivity", FormatDouble(b.reflectivity));
  }
  for (std::size_t i = 0; i < scene.cylinders.size(); ++i) {
    const auto& cy = scene.cylinders[i];
    const std::string s = "cylinder." + std::to_string(i);
    c.Set(s, "center", JoinDoubles({cy.cx, cy.cy}));
    c.Set(s, "radius", FormatDouble(cy.radius));
    c.Set(s, "z", JoinDoubles({cy.zmin, cy.zmax}));
    c.Set(s, "label", std::to_string(cy.label));
    c.Set(s, "reflectivity", FormatDouble(cy.reflectivity));
  }
  c.Set("random", "cars", std::to_string(random.cars));
  c.Set("random", "buildings", std::to_string(random.buildings));
  c.Set("random", "poles", std::to_string(random.poles));
  c.Set("random", "car_label", std::to_string(random.car_label));
  c.Set("random", "building_label", std::to_string(random.building_label));
  c.Set("random", "pole_label", std::to_string(random.pole_label));
  c.Set("random", "min_radius", FormatDouble(random.min_radius));
  c.Set("random", "max_radius", FormatDouble(random.max_radius));
  return c;
}

Scene BuildScene(const SynthSpec& spec, std::uint64_t seed) {
  Scene scene = spec.scene;
  const RandomObjects& r = spec.random;
  if (r.cars + r.buildings + r.poles == 0) return scene;
  Require(r.min_radius > 0.0 && r.max_radius > r.min_radius,
          ErrorCode::kInvalidArgument,
          "synthetic scene: random radius range must satisfy 0 < min < max");

  std::mt19937_64 rng = StreamFor(seed, 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double base = scene.ground ? scene.ground->z : GroundPlane{}.z;
  auto place = [&](double rmin, double rmax) {
    const double radius = rmin + (rmax - rmin) * unit(rng);
    const double azimuth = 2.0 * std::numbers::pi * unit(rng);
    return std::array<double, 2>{radius * std::cos(azimuth),
                                 radius * std::sin(azimuth)};
  };

  for (int i = 0; i < r.cars; ++i) {
    const auto c = place(r.min_radius, r.max_radius);
    const bool along_x = unit(rng) < 0.5;
    const double half_l = along_x ? 2.1 : 0.9;
    const double half_w = along_x ? 0.9 : 2.1;
    const double height = 1.4 + 0.3 * unit(rng);
    scene.boxes.push_back({{c[0] - half_l, c[1] - half_w, base},
                           {c[0] + half_l, c[1] + half_w, base + height},
                           r.car_label,
                           0.6});
  }
  for (int i = 0; i < r.buildings; ++i) {
    const auto c = place(0.55 * r.max_radius, r.max_radius);
    const double half_l = 2.5 + 5.0 * unit(rng);
    const double half_w = 2.5 + 5.0 * unit(rng);
    const double height = 4.0 + 8.0 * unit(rng);
    scene.boxes.push_back({{c[0] - half_l, c[1] - half_w, base},
                           {c[0] + half_l, c[1] + half_w, base + height},
                           r.building_label,
                           0.4});
  }
  for (int i = 0; i < r.poles; ++i) {
    const auto c = place(r.min_radius, r.max_radius);
    CylinderPrimitive pole;
    pole.cx = c[0];
    pole.cy = c[1];
    pole.radius = 0.12 + 0.13 * unit(rng);
    pole.zmin = base;
    pole.zmax = base + 3.0 + 4.0 * unit(rng);
    pole.label = r.pole_label;
    pole.reflectivity = 0.7;
    scene.cylinders.push_back(pole);
  }
  return scene;
}

Scan GenerateSyntheticScan(const SynthSpec& spec, std::uint64_t seed) {
  Require(spec.beams > 0, ErrorCode::kInvalidArgument,
          "synthetic scan: beam count must be positive");
  Require(spec.columns > 0, ErrorCode::kInvalidArgument,
          "synthetic scan: column count must be positive");
  Require(spec.max_range > 0.0, ErrorCode::kInvalidArgument,
          "synthetic scan: max range must be positive");
  Require(spec.zenith_max_deg >= spec.zenith_min_deg,
          ErrorCode::kInvalidArgument,
          "synthetic scan: zenith range is inverted");
  const Scene scene = BuildScene(spec, seed);
  Require(!scene.empty(), ErrorCode::kInvalidArgument,
          "synthetic scan: scene has no primitives");

  std::mt19937_64 rng = StreamFor(seed, 2);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> noise(0.0, 1.0);
  const double azimuth_step = 2.0 * std::numbers::pi / spec.columns;
  const double azimuth_offset = azimuth_step * unit(rng);
  const double deg = std::numbers::pi / 180.0;

  Scan scan;
  scan.labels.emplace();
  scan.points.reserve(static_cast<std::size_t>(spec.beams) * spec.columns / 2);
  for (int beam = 0; beam < spec.beams; ++beam) {
    const double zenith =
        spec.beams == 1
            ? spec.zenith_min_deg * deg
            : (spec.zenith_min_deg + (spec.zenith_max_deg - spec.zenith_min_deg) *
                                         beam / (spec.beams - 1)) *
                  deg;
    const double cz = std::cos(zenith);
    const double sz = std::sin(zenith);
    for (int col = 0; col < spec.columns; ++col) {
      const double azimuth =
          -std::numbers::pi + azimuth_offset + azimuth_step * col;
      const Vec3 d = {cz * std::cos(azimuth), cz * std::sin(azimuth), sz};
      Hit hit;
      if (scene.ground) IntersectPlane(*scene.ground, d, hit);
      for (const auto& b : scene.boxes) IntersectBox(b, d, hit);
      for (const auto& c : scene.cylinders) IntersectCylinder(c, d, hit);
      if (!(hit.t <= spec.max_range)) continue;
      double range = hit.t;
      if (spec.range_noise > 0.0) {
        range = std::max(1e-3, range + spec.range_noise * noise(rng));
      }
      Point p;
      p.x = static_cast<float>(d[0] * range);
      p.y = static_cast<float>(d[1] * range);
      p.z = static_cast<float>(d[2] * range);
      p.reflection = static_cast<float>(
          std::clamp(hit.reflectivity * (0.5 + 0.5 * hit.cos_incidence), 0.0,
                     1.0));
      scan.points.push_back(p);
      scan.labels->push_back(hit.label);
    }
  }
  return scan;
}

}  // namespace polargrid
