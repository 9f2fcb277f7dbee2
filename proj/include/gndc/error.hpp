// Copyright 2026 The gndc Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace gndc {

// Numeric values are shared with gndc_status in gndc.h.
enum class ErrorCode : int {
  kOk = 0,
  kInvalidArgument = 1,
  kMissingFile = 2,
  kShapeMismatch = 3,
  kNonMonotonicTimestamps = 4,
  kAllInvalidMask = 5,
  kIoFailure = 6,
  kNonFiniteLoss = 7,
  kEmptyBatch = 8,
  kIndexOutOfRange = 9,
  kCorruptStream = 10,
  kInconsistentParts = 11,
  kBadMagic = 12,
  kUnsupportedVersion = 13,
  kSectionOverlap = 14,
  kCrcMismatch = 15,
  kTruncatedFile = 16,
  kMalformedFile = 17,
  kModelNotLoaded = 18,
  kWindowOutOfBounds = 19,
  kZeroVariance = 20,
  kLengthMismatch = 21,
  kFrameTooSmall = 22,
  kNoValidFrames = 23,
  kInternal = 99,
};

const char* error_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace gndc
