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

#include <cstdint>
#include <span>
#include <vector>

namespace gndc {

// Self-delimiting byte stream:
//   u8 mode | u64 element_count | u64 raw_length | u64 payload_length | payload | u32 crc32
// The CRC covers every preceding byte of the stream. Mode 0 stores the raw
// bytes, mode 1 range-codes them with an adaptive order-0 byte model.
enum class StreamMode : std::uint8_t { kRaw = 0, kRange = 1 };

struct StreamInfo {
  StreamMode mode = StreamMode::kRaw;
  std::uint64_t element_count = 0;
  std::uint64_t raw_length = 0;
  std::uint64_t payload_length = 0;
  std::size_t total_size = 0;  // header + payload + crc
};

inline constexpr std::size_t kStreamHeaderSize = 1 + 8 + 8 + 8;
inline constexpr std::size_t kStreamOverhead = kStreamHeaderSize + 4;

// Range coding, falling back to raw storage when coding would expand.
std::vector<std::uint8_t> compress_bytes(std::span<const std::uint8_t> raw,
                                         std::uint64_t element_count);
inline std::vector<std::uint8_t> compress_bytes(std::span<const std::uint8_t> raw) {
  return compress_bytes(raw, raw.size());
}

// Validates the stream (CRC, lengths, exact consumption) and returns the raw
// bytes. Throws CorruptStream. The stream must span all of data.
std::vector<std::uint8_t> decompress_bytes(std::span<const std::uint8_t> data,
                                           StreamInfo* info = nullptr);

// Parses the fixed header without decoding; throws CorruptStream.
StreamInfo peek_stream(std::span<const std::uint8_t> data);

// Range coder primitives over an adaptive 256-symbol model.
std::vector<std::uint8_t> range_encode(std::span<const std::uint8_t> raw);
std::vector<std::uint8_t> range_decode(std::span<const std::uint8_t> payload, std::uint64_t count);

// Signed integers: zigzag, LEB128 varint, then compress_bytes.
std::vector<std::uint8_t> entropy_encode(std::span<const std::int64_t> values);
std::vector<std::int64_t> entropy_decode(std::span<const std::uint8_t> data);

std::uint64_t zigzag(std::int64_t v);
std::int64_t unzigzag(std::uint64_t v);
void put_varint(std::vector<std::uint8_t>& out, std::uint64_t v);

// One bit per entry, LSB-first within each byte, then compress_bytes.
std::vector<std::uint8_t> encode_bitmask(std::span<const std::uint8_t> bits);
std::vector<std::uint8_t> decode_bitmask(std::span<const std::uint8_t> data,
                                         std::uint64_t expected_count);

}  // namespace gndc
