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

#include "polargrid/scan_io.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

#include "polargrid/error.hpp"

namespace polargrid {
namespace {

std::uint32_t LoadLE32(const std::byte* p) {
  std::uint32_t v;
  std::memcpy(&v, p, sizeof(v));
  if constexpr (std::endian::native == std::endian::big) {
    v = ((v & 0xFFu) << 24) | ((v & 0xFF00u) << 8) | ((v >> 8) & 0xFF00u) |
        (v >> 24);
  }
  return v;
}

void StoreLE32(std::uint32_t v, std::byte* p) {
  if constexpr (std::endian::native == std::endian::big) {
    v = ((v & 0xFFu) << 24) | ((v & 0xFF00u) << 8) | ((v >> 8) & 0xFF00u) |
        (v >> 24);
  }
  std::memcpy(p, &v, sizeof(v));
}

float LoadLEFloat(const std::byte* p) {
  return std::bit_cast<float>(LoadLE32(p));
}

}  // namespace

const std::vector<ClassId>& Scan::label_vector() const {
  Require(labels.has_value(), ErrorCode::kState, "scan has no labels");
  return *labels;
}

std::vector<std::byte> ReadFileBytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary | std::ios::ate);
  if (!in) Fail(ErrorCode::kIo, "cannot open file: " + path);
  const std::streamsize size = in.tellg();
  in.seekg(0, std::ios::beg);
  std::vector<std::byte> bytes(static_cast<std::size_t>(size));
  if (size > 0 && !in.read(reinterpret_cast<char*>(bytes.data()), size)) {
    Fail(ErrorCode::kIo, "failed reading file: " + path);
  }
  return bytes;
}

void WriteFileBytes(const std::string& path, std::span<const std::byte> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) Fail(ErrorCode::kIo, "cannot write file: " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) Fail(ErrorCode::kIo, "failed writing file: " + path);
}

Scan DecodeScan(std::span<const std::byte> bytes) {
  if (bytes.size() % 16 != 0) {
    Fail(ErrorCode::kFormat, "scan size " + std::to_string(bytes.size()) +
                                 " is not a multiple of 16 bytes");
  }
  Scan scan;
  const std::size_t n = bytes.size() / 16;
  scan.points.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const std::byte* p = bytes.data() + 16 * k;
    Point& pt = scan.points[k];
    pt.x = LoadLEFloat(p);
    pt.y = LoadLEFloat(p + 4);
    pt.z = LoadLEFloat(p + 8);
    pt.reflection = LoadLEFloat(p + 12);
    if (!std::isfinite(pt.x) || !std::isfinite(pt.y) || !std::isfinite(pt.z) ||
        !std::isfinite(pt.reflection)) {
      Fail(ErrorCode::kNonFinite,
           "non-finite value in point " + std::to_string(k));
    }
  }
  return scan;
}

Scan LoadScan(const std::string& path) {
  try {
    return DecodeScan(ReadFileBytes(path));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kIo) throw;
    Fail(e.code(), path + ": " + e.what());
  }
}

void WriteScan(const Scan& scan, const std::string& path) {
  std::vector<std::byte> bytes(scan.size() * 16);
  for (std::size_t k = 0; k < scan.size(); ++k) {
    const Point& pt = scan.points[k];
    std::byte* p = bytes.data() + 16 * k;
    StoreLE32(std::bit_cast<std::uint32_t>(pt.x), p);
    StoreLE32(std::bit_cast<std::uint32_t>(pt.y), p + 4);
    StoreLE32(std::bit_cast<std::uint32_t>(pt.z), p + 8);
    StoreLE32(std::bit_cast<std::uint32_t>(pt.reflection), p + 12);
  }
  WriteFileBytes(path, bytes);
}

std::vector<std::uint32_t> LoadRawLabels(const std::string& path) {
  const auto bytes = ReadFileBytes(path);
  if (bytes.size() % 4 != 0) {
    Fail(ErrorCode::kFormat, path + ": label file size " +
                                 std::to_string(bytes.size()) +
                                 " is not a multiple of 4 bytes");
  }
  std::vector<std::uint32_t> raw(bytes.size() / 4);
  for (std::size_t k = 0; k < raw.size(); ++k) {
    raw[k] = LoadLE32(bytes.data() + 4 * k);
  }
  return raw;
}

std::vector<ClassId> DecodeLabels(std::span<const std::uint32_t> raw,
                                  const LabelMap& map) {
  std::vector<ClassId> labels(raw.size());
  for (std::size_t k = 0; k < raw.size(); ++k) {
    labels[k] = map.ToTrain(static_cast<std::uint16_t>(raw[k] & 0xFFFFu));
  }
  return labels;
}

std::vector<ClassId> LoadLabels(const std::string& path, const LabelMap& map) {
  const auto raw = LoadRawLabels(path);
  try {
    return DecodeLabels(raw, map);
  } catch (const Error& e) {
    Fail(e.code(), path + ": " + e.what());
  }
}

std::vector<ClassId> LoadLabels(const std::string& path, const LabelMap& map,
                                std::size_t expected_count) {
  auto labels = LoadLabels(path, map);
  if (labels.size() != expected_count) {
    Fail(ErrorCode::kSizeMismatch,
         path + ": " + std::to_string(labels.size()) + " labels for " +
             std::to_string(expected_count) + " points");
  }
  return labels;
}

void WritePredictions(std::span<const ClassId> labels, const LabelMap& map,
                      const std::string& path) {
  std::vector<std::byte> bytes(labels.size() * 4);
  for (std::size_t k = 0; k < labels.size(); ++k) {
    StoreLE32(map.ToRaw(labels[k]), bytes.data() + 4 * k);
  }
  WriteFileBytes(path, bytes);
}

}  // namespace polargrid
