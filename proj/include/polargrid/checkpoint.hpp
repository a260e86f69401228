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

#ifndef POLARGRID_CHECKPOINT_HPP_
#define POLARGRID_CHECKPOINT_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "polargrid/tensor.hpp"

namespace polargrid {

inline constexpr std::uint32_t kCheckpointVersion = 1;

// Layout (little-endian): magic "PGRDCKPT", u32 version, u32 metadata length
// and bytes, u32 entry count, then per entry u32 name length and bytes,
// u32 rank, rank x u32 dims, u64 element count, float64 values.
struct CheckpointEntry {
  std::string name;
  std::vector<int> shape;
  std::vector<double> values;
};

struct Checkpoint {
  std::uint32_t version = kCheckpointVersion;
  std::string metadata;
  std::vector<CheckpointEntry> entries;
};

std::vector<std::uint8_t> EncodeCheckpoint(const std::string& metadata,
                                           const std::vector<ParamView>& params);
Checkpoint DecodeCheckpoint(const std::vector<std::uint8_t>& bytes);

void SaveCheckpoint(const std::string& path, const std::string& metadata,
                    const std::vector<ParamView>& params);
Checkpoint ReadCheckpoint(const std::string& path);

// Copies entries into params. Names, order and shapes must match exactly.
void RestoreParams(const Checkpoint& checkpoint,
                   const std::vector<ParamView>& params);

}  // namespace polargrid

#endif  // POLARGRID_CHECKPOINT_HPP_
