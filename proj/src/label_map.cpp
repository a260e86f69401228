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

#include <algorithm>

#include "polargrid/error.hpp"
#include "polargrid/scan_io.hpp"

namespace polargrid {

LabelMap LabelMap::FromFile(const std::string& path) {
  return FromConfig(KeyValueConfig::FromFile(path));
}

LabelMap LabelMap::FromConfig(const KeyValueConfig& config) {
  LabelMap map;
  const auto* names = config.FindSection("names");
  const auto* forward = config.FindSection("learning_map");
  if (forward == nullptr || forward->entries.empty()) {
    Fail(ErrorCode::kConfig, "label map: missing [learning_map] section");
  }

  int count = static_cast<int>(config.GetInt("classes", "count", -1));
  if (count < 0) {
    int max_id = -1;
    for (const auto& [raw, train] : forward->entries) {
      max_id = std::max<int>(max_id, ParseInt(train, "learning_map." + raw));
    }
    count = max_id + 1;
  }
  if (count <= 0 || count > 65535) {
    Fail(ErrorCode::kConfig, "label map: class count must be in [1, 65535]");
  }
  map.names_.resize(count);
  for (int c = 0; c < count; ++c) map.names_[c] = "class" + std::to_string(c);
  if (names != nullptr) {
    for (const auto& [id, name] : names->entries) {
      const long long c = ParseInt(id, "names." + id);
      if (c < 0 || c >= count) {
        Fail(ErrorCode::kConfig, "label map: name for out-of-range id " + id);
      }
      map.names_[c] = name;
    }
  }

  auto check_raw = [](long long raw, const std::string& what) {
    if (raw < 0 || raw > 0xFFFF) {
      Fail(ErrorCode::kConfig, "label map: raw id out of 16-bit range in " + what);
    }
  };
  auto check_train = [count](long long train, const std::string& what) {
    if (train < 0 || train >= count) {
      Fail(ErrorCode::kConfig, "label map: train id out of range in " + what);
    }
  };

  for (const auto& [raw_text, train_text] : forward->entries) {
    const std::string what = "learning_map." + raw_text;
    const long long raw = ParseInt(raw_text, what);
    const long long train = ParseInt(train_text, what);
    check_raw(raw, what);
    check_train(train, what);
    map.to_train_[static_cast<std::uint16_t>(raw)] = static_cast<ClassId>(train);
  }

  map.to_raw_.assign(count, std::nullopt);
  if (const auto* inverse = config.FindSection("learning_map_inv")) {
    for (const auto& [train_text, raw_text] : inverse->entries) {
      const std::string what = "learning_map_inv." + train_text;
      const long long train = ParseInt(train_text, what);
      const long long raw = ParseInt(raw_text, what);
      check_train(train, what);
      check_raw(raw, what);
      map.to_raw_[train] = static_cast<std::uint16_t>(raw);
    }
  } else {
    // Smallest raw id that maps onto each train id.
    for (const auto& [raw, train] : map.to_train_) {
      if (!map.to_raw_[train]) map.to_raw_[train] = raw;
    }
  }

  const long long ignore = config.GetInt("classes", "ignore", -1);
  if (ignore >= 0) {
    check_train(ignore, "classes.ignore");
    map.ignore_ = static_cast<ClassId>(ignore);
  }
  return map;
}

LabelMap LabelMap::Identity(const std::vector<std::string>& names,
                            std::optional<ClassId> ignore) {
  Require(!names.empty() && names.size() <= 65535, ErrorCode::kInvalidArgument,
          "label map: class count must be in [1, 65535]");
  LabelMap map;
  map.names_ = names;
  map.to_raw_.resize(names.size());
  for (std::size_t c = 0; c < names.size(); ++c) {
    map.to_train_[static_cast<std::uint16_t>(c)] = static_cast<ClassId>(c);
    map.to_raw_[c] = static_cast<std::uint16_t>(c);
  }
  if (ignore) {
    Require(*ignore < names.size(), ErrorCode::kInvalidArgument,
            "label map: ignore id out of range");
  }
  map.ignore_ = ignore;
  return map;
}

ClassId LabelMap::ToTrain(std::uint16_t raw) const {
  auto it = to_train_.find(raw);
  if (it == to_train_.end()) {
    Fail(ErrorCode::kUnmappedLabel,
         "raw label " + std::to_string(raw) + " has no training id");
  }
  return it->second;
}

bool LabelMap::HasRaw(ClassId train) const {
  return train < to_raw_.size() && to_raw_[train].has_value();
}

std::uint16_t LabelMap::ToRaw(ClassId train) const {
  if (!HasRaw(train)) {
    Fail(ErrorCode::kUnmappedLabel,
         "training id " + std::to_string(train) + " has no raw label");
  }
  return *to_raw_[train];
}

const std::string& LabelMap::name(ClassId id) const {
  Require(id < names_.size(), ErrorCode::kInvalidArgument,
          "class id out of range: " + std::to_string(id));
  return names_[id];
}

KeyValueConfig LabelMap::ToConfig() const {
  KeyValueConfig config;
  config.Set("classes", "count", std::to_string(num_classes()));
  if (ignore_) config.Set("classes", "ignore", std::to_string(*ignore_));
  for (int c = 0; c < num_classes(); ++c) {
    config.Set("names", std::to_string(c), names_[c]);
  }
  for (const auto& [raw, train] : to_train_) {
    config.Set("learning_map", std::to_string(raw), std::to_string(train));
  }
  for (int c = 0; c < num_classes(); ++c) {
    if (to_raw_[c]) {
      config.Set("learning_map_inv", std::to_string(c),
                 std::to_string(*to_raw_[c]));
    }
  }
  return config;
}

}  // namespace polargrid
