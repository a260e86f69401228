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

#include "polargrid/error.hpp"

namespace polargrid {

const char* ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid argument";
    case ErrorCode::kIo: return "i/o error";
    case ErrorCode::kFormat: return "format error";
    case ErrorCode::kNonFinite: return "non-finite value";
    case ErrorCode::kSizeMismatch: return "size mismatch";
    case ErrorCode::kUnmappedLabel: return "unmapped label";
    case ErrorCode::kConfig: return "configuration error";
    case ErrorCode::kShapeMismatch: return "shape mismatch";
    case ErrorCode::kNumeric: return "numeric error";
    case ErrorCode::kState: return "invalid state";
  }
  return "unknown error";
}

void Fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace polargrid
