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

#include "gndc/error.hpp"

namespace gndc {

const char* error_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kOk: return "Ok";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kMissingFile: return "MissingFile";
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kNonMonotonicTimestamps: return "NonMonotonicTimestamps";
    case ErrorCode::kAllInvalidMask: return "AllInvalidMask";
    case ErrorCode::kIoFailure: return "IoFailure";
    case ErrorCode::kNonFiniteLoss: return "NonFiniteLoss";
    case ErrorCode::kEmptyBatch: return "EmptyBatch";
    case ErrorCode::kIndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::kCorruptStream: return "CorruptStream";
    case ErrorCode::kInconsistentParts: return "InconsistentParts";
    case ErrorCode::kBadMagic: return "BadMagic";
    case ErrorCode::kUnsupportedVersion: return "UnsupportedVersion";
    case ErrorCode::kSectionOverlap: return "SectionOverlap";
    case ErrorCode::kCrcMismatch: return "CrcMismatch";
    case ErrorCode::kTruncatedFile: return "TruncatedFile";
    case ErrorCode::kMalformedFile: return "MalformedFile";
    case ErrorCode::kModelNotLoaded: return "ModelNotLoaded";
    case ErrorCode::kWindowOutOfBounds: return "WindowOutOfBounds";
    case ErrorCode::kZeroVariance: return "ZeroVariance";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kFrameTooSmall: return "FrameTooSmall";
    case ErrorCode::kNoValidFrames: return "NoValidFrames";
    case ErrorCode::kInternal: return "Internal";
  }
  return "Unknown";
}

}  // namespace gndc
