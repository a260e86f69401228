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

#include "polargrid/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <span>
#include <type_traits>

#include "polargrid/error.hpp"
#include "polargrid/scan_io.hpp"

namespace polargrid {
namespace {

constexpr char kMagic[8] = {'P', 'G', 'R', 'D', 'C', 'K', 'P', 'T'};

template <typename T>
void PutLe(std::vector<std::uint8_t>& out, T value) {
  using U = std::conditional_t<sizeof(T) == 8, std::uint64_t, std::uint32_t>;
  U bits = std::bit_cast<U>(value);
  for (std::size_t b = 0; b < sizeof(U); ++b) {
    out.push_back(static_cast<std::uint8_t>(bits >> (8 * b)));
  }
}

class Reader {
 public:
  explicit Reader(const std::vector<std::uint8_t>& bytes) : bytes_(bytes) {}

  template <typename T>
  T Get() {
    using U = std::conditional_t<sizeof(T) == 8, std::uint64_t, std::uint32_t>;
    Need(sizeof(U));
    U bits = 0;
    for (std::size_t b = 0; b < sizeof(U); ++b) {
      bits |= static_cast<U>(bytes_[pos_ + b]) << (8 * b);
    }
    pos_ += sizeof(U);
    return std::bit_cast<T>(bits);
  }

  std::string GetString(std::size_t n) {
    Need(n);
    std::string s(reinterpret_cast<const char*>(bytes_.data() + pos_), n);
    pos_ += n;
    return s;
  }

  bool done() const { return pos_ == bytes_.size(); }

 private:
  void Need(std::size_t n) const {
    if (bytes_.size() - pos_ < n) {
      Fail(ErrorCode::kFormat, "checkpoint: truncated file");
    }
  }
  const std::vector<std::uint8_t>& bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> EncodeCheckpoint(const std::string& metadata,
                                           const std::vector<ParamView>& params) {
  std::vector<std::uint8_t> out(kMagic, kMagic + sizeof(kMagic));
  PutLe<std::uint32_t>(out, kCheckpointVersion);
  PutLe<std::uint32_t>(out, static_cast<std::uint32_t>(metadata.size()));
  out.insert(out.end(), metadata.begin(), metadata.end());
  PutLe<std::uint32_t>(out, static_cast<std::uint32_t>(params.size()));
  for (const ParamView& p : params) {
    PutLe<std::uint32_t>(out, static_cast<std::uint32_t>(p.name.size()));
    out.insert(out.end(), p.name.begin(), p.name.end());
    PutLe<std::uint32_t>(out, static_cast<std::uint32_t>(p.shape.size()));
    for (int d : p.shape) PutLe<std::uint32_t>(out, static_cast<std::uint32_t>(d));
    PutLe<std::uint64_t>(out, p.size);
    for (std::size_t n = 0; n < p.size; ++n) PutLe<double>(out, p.value[n]);
  }
  return out;
}

Checkpoint DecodeCheckpoint(const std::vector<std::uint8_t>& bytes) {
  Reader in(bytes);
  if (in.GetString(sizeof(kMagic)) != std::string(kMagic, sizeof(kMagic))) {
    Fail(ErrorCode::kFormat, "checkpoint: bad magic");
  }
  Checkpoint ckpt;
  ckpt.version = in.Get<std::uint32_t>();
  if (ckpt.version != kCheckpointVersion) {
    Fail(ErrorCode::kFormat,
         "checkpoint: unsupported format version " + std::to_string(ckpt.version));
  }
  ckpt.metadata = in.GetString(in.Get<std::uint32_t>());
  const std::uint32_t count = in.Get<std::uint32_t>();
  for (std::uint32_t e = 0; e < count; ++e) {
    CheckpointEntry entry;
    entry.name = in.GetString(in.Get<std::uint32_t>());
    const std::uint32_t rank = in.Get<std::uint32_t>();
    std::uint64_t expected = 1;
    for (std::uint32_t r = 0; r < rank; ++r) {
      entry.shape.push_back(static_cast<int>(in.Get<std::uint32_t>()));
      expected *= static_cast<std::uint64_t>(entry.shape.back());
    }
    const std::uint64_t n = in.Get<std::uint64_t>();
    if (n != expected) {
      Fail(ErrorCode::kFormat, "checkpoint: entry '" + entry.name +
                                   "' element count disagrees with its shape");
    }
    if (n > bytes.size() / 8) Fail(ErrorCode::kFormat, "checkpoint: truncated file");
    entry.values.resize(n);
    for (auto& v : entry.values) v = in.Get<double>();
    ckpt.entries.push_back(std::move(entry));
  }
  if (!in.done()) Fail(ErrorCode::kFormat, "checkpoint: trailing bytes");
  return ckpt;
}

void SaveCheckpoint(const std::string& path, const std::string& metadata,
                    const std::vector<ParamView>& params) {
  const auto bytes = EncodeCheckpoint(metadata, params);
  WriteFileBytes(path, std::as_bytes(std::span(bytes)));
}

Checkpoint ReadCheckpoint(const std::string& path) {
  const auto raw = ReadFileBytes(path);
  std::vector<std::uint8_t> bytes(raw.size());
  std::memcpy(bytes.data(), raw.data(), raw.size());
  return DecodeCheckpoint(bytes);
}

void RestoreParams(const Checkpoint& checkpoint,
                   const std::vector<ParamView>& params) {
  if (checkpoint.entries.size() != params.size()) {
    Fail(ErrorCode::kShapeMismatch,
         "checkpoint holds " + std::to_string(checkpoint.entries.size()) +
             " tensors, model expects " + std::to_string(params.size()));
  }
  for (std::size_t p = 0; p < params.size(); ++p) {
    const auto& entry = checkpoint.entries[p];
    if (entry.name != params[p].name || entry.shape != params[p].shape) {
      Fail(ErrorCode::kShapeMismatch,
           "checkpoint tensor '" + entry.name + "' does not match model tensor '" +
               params[p].name + "'");
    }
  }
  for (std::size_t p = 0; p < params.size(); ++p) {
    const auto& values = checkpoint.entries[p].values;
    std::memcpy(params[p].value, values.data(), values.size() * sizeof(double));
  }
}

}  // namespace polargrid
