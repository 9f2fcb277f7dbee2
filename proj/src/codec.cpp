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

#include "gndc/codec.hpp"

#include <array>

#include "gndc/bytes.hpp"
#include "gndc/error.hpp"

namespace gndc {

namespace {

constexpr std::uint32_t kTop = 1u << 24;
constexpr std::uint32_t kMaxTotal = 1u << 16;
constexpr std::uint32_t kIncrement = 32;
constexpr std::uint64_t kMaxRawLength = std::uint64_t{1} << 34;

[[noreturn]] void corrupt(const char* what) { fail(ErrorCode::kCorruptStream, what); }

// Adaptive order-0 frequencies with a Fenwick tree for cumulative counts.
class ByteModel {
 public:
  ByteModel() {
    freq_.fill(1);
    rebuild();
  }

  std::uint32_t total() const { return total_; }
  std::uint32_t freq(int s) const { return freq_[static_cast<std::size_t>(s)]; }

  std::uint32_t cumulative(int s) const {  // sum of freq over symbols < s
    std::uint32_t sum = 0;
    for (int i = s; i > 0; i -= i & -i) sum += tree_[static_cast<std::size_t>(i)];
    return sum;
  }

  // Symbol whose cumulative range contains target; sets its lower bound.
  int find(std::uint32_t target, std::uint32_t& low) const {
    int pos = 0;
    std::uint32_t sum = 0;
    for (int step = 256; step > 0; step >>= 1) {
      const int next = pos + step;
      if (next <= 256 && sum + tree_[static_cast<std::size_t>(next)] <= target) {
        pos = next;
        sum += tree_[static_cast<std::size_t>(next)];
      }
    }
    low = sum;
    return pos;
  }

  void update(int s) {
    freq_[static_cast<std::size_t>(s)] += kIncrement;
    total_ += kIncrement;
    for (int i = s + 1; i <= 256; i += i & -i) tree_[static_cast<std::size_t>(i)] += kIncrement;
    if (total_ > kMaxTotal) {
      for (auto& f : freq_) f = (f + 1) / 2;
      rebuild();
    }
  }

 private:
  void rebuild() {
    tree_.fill(0);
    total_ = 0;
    for (int s = 0; s < 256; ++s) {
      total_ += freq_[static_cast<std::size_t>(s)];
      for (int i = s + 1; i <= 256; i += i & -i) tree_[static_cast<std::size_t>(i)] += freq_[static_cast<std::size_t>(s)];
    }
  }

  std::array<std::uint32_t, 256> freq_{};
  std::array<std::uint32_t, 257> tree_{};
  std::uint32_t total_ = 0;
};

// Carry-propagating range encoder (64-bit low with a one-byte cache).
class RangeEncoder {
 public:
  explicit RangeEncoder(std::vector<std::uint8_t>& out) : out_(out) {}

  void encode(std::uint32_t cum, std::uint32_t freq, std::uint32_t total) {
    range_ /= total;
    low_ += static_cast<std::uint64_t>(cum) * range_;
    range_ *= freq;
    while (range_ < kTop) {
      range_ <<= 8;
      shift_low();
    }
  }

  void finish() {
    for (int i = 0; i < 5; ++i) shift_low();
  }

 private:
  void shift_low() {
    if (low_ < 0xff000000ull || low_ >= (std::uint64_t{1} << 32)) {
      const auto carry = static_cast<std::uint8_t>(low_ >> 32);
      std::uint8_t temp = cache_;
      do {
        out_.push_back(static_cast<std::uint8_t>(temp + carry));
        temp = 0xff;
      } while (--cache_size_ != 0);
      cache_ = static_cast<std::uint8_t>(low_ >> 24);
    }
    ++cache_size_;
    low_ = (low_ & 0x00ffffffull) << 8;
  }

  std::vector<std::uint8_t>& out_;
  std::uint64_t low_ = 0;
  std::uint32_t range_ = 0xffffffffu;
  std::uint8_t cache_ = 0;
  std::uint64_t cache_size_ = 1;
};

class RangeDecoder {
 public:
  explicit RangeDecoder(std::span<const std::uint8_t> in) : in_(in) {
    if (next() != 0) corrupt("range stream must start with a zero byte");
    for (int i = 0; i < 4; ++i) code_ = (code_ << 8) | next();
  }

  std::uint32_t target(std::uint32_t total) {
    range_ /= total;
    const std::uint32_t v = code_ / range_;
    if (v >= total) corrupt("range decoder out of bounds");
    return v;
  }

  void consume(std::uint32_t cum, std::uint32_t freq) {
    code_ -= cum * range_;
    range_ *= freq;
    while (range_ < kTop) {
      range_ <<= 8;
      code_ = (code_ << 8) | next();
    }
  }

  std::size_t consumed() const { return pos_; }

 private:
  std::uint32_t next() {
    if (pos_ >= in_.size()) corrupt("range stream truncated");
    return in_[pos_++];
  }

  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
  std::uint32_t code_ = 0;
  std::uint32_t range_ = 0xffffffffu;
};

std::vector<std::uint8_t> frame_stream(StreamMode mode, std::uint64_t elements, std::uint64_t raw_length,
                                       std::span<const std::uint8_t> payload) {
  ByteWriter w;
  w.u8(static_cast<std::uint8_t>(mode));
  w.u64(elements);
  w.u64(raw_length);
  w.u64(payload.size());
  w.raw(payload);
  w.u32(crc32(w.bytes()));
  return std::move(w.bytes());
}

}  // namespace

std::vector<std::uint8_t> range_encode(std::span<const std::uint8_t> raw) {
  std::vector<std::uint8_t> out;
  out.reserve(raw.size() / 2 + 16);
  RangeEncoder enc(out);
  ByteModel model;
  for (std::uint8_t b : raw) {
    enc.encode(model.cumulative(b), model.freq(b), model.total());
    model.update(b);
  }
  enc.finish();
  return out;
}

std::vector<std::uint8_t> range_decode(std::span<const std::uint8_t> payload, std::uint64_t count) {
  RangeDecoder dec(payload);
  ByteModel model;
  std::vector<std::uint8_t> out;
  out.reserve(static_cast<std::size_t>(std::min<std::uint64_t>(count, std::uint64_t{1} << 26)));
  for (std::uint64_t k = 0; k < count; ++k) {
    std::uint32_t low = 0;
    const int s = model.find(dec.target(model.total()), low);
    if (s < 0 || s > 255) corrupt("range decoder produced an invalid symbol");
    dec.consume(low, model.freq(s));
    model.update(s);
    out.push_back(static_cast<std::uint8_t>(s));
  }
  if (dec.consumed() != payload.size()) corrupt("range stream has trailing bytes");
  return out;
}

std::vector<std::uint8_t> compress_bytes(std::span<const std::uint8_t> raw, std::uint64_t element_count) {
  auto coded = range_encode(raw);
  if (coded.size() >= raw.size()) return frame_stream(StreamMode::kRaw, element_count, raw.size(), raw);
  return frame_stream(StreamMode::kRange, element_count, raw.size(), coded);
}

StreamInfo peek_stream(std::span<const std::uint8_t> data) {
  ByteReader r(data);
  StreamInfo info;
  const std::uint8_t mode = r.u8();
  info.element_count = r.u64();
  info.raw_length = r.u64();
  info.payload_length = r.u64();
  if (!r.ok()) corrupt("stream header truncated");
  if (mode > 1) corrupt("unknown stream mode");
  info.mode = static_cast<StreamMode>(mode);
  if (info.payload_length > data.size() - kStreamHeaderSize ||
      data.size() - kStreamHeaderSize - info.payload_length < 4) {
    corrupt("stream payload exceeds the available bytes");
  }
  if (info.raw_length > kMaxRawLength) corrupt("stream raw length is implausible");
  if (info.mode == StreamMode::kRaw && info.raw_length != info.payload_length) {
    corrupt("raw stream length mismatch");
  }
  info.total_size = kStreamHeaderSize + static_cast<std::size_t>(info.payload_length) + 4;
  return info;
}

std::vector<std::uint8_t> decompress_bytes(std::span<const std::uint8_t> data, StreamInfo* info_out) {
  const StreamInfo info = peek_stream(data);
  if (info.total_size != data.size()) corrupt("stream has trailing bytes");
  const std::size_t crc_at = info.total_size - 4;
  if (crc32(data.first(crc_at)) != load_u32_le(data.data() + crc_at)) corrupt("stream crc mismatch");
  const auto payload = data.subspan(kStreamHeaderSize, static_cast<std::size_t>(info.payload_length));
  if (info_out) *info_out = info;
  if (info.mode == StreamMode::kRaw) return {payload.begin(), payload.end()};
  if (info.payload_length < 5) corrupt("range payload too short");
  return range_decode(payload, info.raw_length);
}

std::uint64_t zigzag(std::int64_t v) {
  return (static_cast<std::uint64_t>(v) << 1) ^ static_cast<std::uint64_t>(v >> 63);
}

std::int64_t unzigzag(std::uint64_t v) {
  return static_cast<std::int64_t>(v >> 1) ^ -static_cast<std::int64_t>(v & 1);
}

void put_varint(std::vector<std::uint8_t>& out, std::uint64_t v) {
  while (v >= 0x80) {
    out.push_back(static_cast<std::uint8_t>(v | 0x80));
    v >>= 7;
  }
  out.push_back(static_cast<std::uint8_t>(v));
}

std::vector<std::uint8_t> entropy_encode(std::span<const std::int64_t> values) {
  std::vector<std::uint8_t> raw;
  raw.reserve(values.size() * 2);
  for (std::int64_t v : values) put_varint(raw, zigzag(v));
  return compress_bytes(raw, values.size());
}

std::vector<std::int64_t> entropy_decode(std::span<const std::uint8_t> data) {
  StreamInfo info;
  const auto raw = decompress_bytes(data, &info);
  if (info.element_count > raw.size()) corrupt("element count exceeds varint bytes");
  std::vector<std::int64_t> out;
  out.reserve(static_cast<std::size_t>(info.element_count));
  std::size_t pos = 0;
  for (std::uint64_t k = 0; k < info.element_count; ++k) {
    std::uint64_t v = 0;
    int shift = 0;
    while (true) {
      if (pos >= raw.size()) corrupt("varint truncated");
      const std::uint8_t b = raw[pos++];
      if (shift == 63 && b > 1) corrupt("varint overflow");
      v |= static_cast<std::uint64_t>(b & 0x7f) << shift;
      if ((b & 0x80) == 0) break;
      shift += 7;
      if (shift > 63) corrupt("varint overflow");
    }
    out.push_back(unzigzag(v));
  }
  if (pos != raw.size()) corrupt("varint stream has trailing bytes");
  return out;
}

std::vector<std::uint8_t> encode_bitmask(std::span<const std::uint8_t> bits) {
  std::vector<std::uint8_t> packed((bits.size() + 7) / 8, 0);
  for (std::size_t k = 0; k < bits.size(); ++k) {
    if (bits[k]) packed[k >> 3] |= static_cast<std::uint8_t>(1u << (k & 7));
  }
  return compress_bytes(packed, bits.size());
}

std::vector<std::uint8_t> decode_bitmask(std::span<const std::uint8_t> data, std::uint64_t expected_count) {
  StreamInfo info;
  const auto packed = decompress_bytes(data, &info);
  if (info.element_count != expected_count) corrupt("bitmask length mismatch");
  if (packed.size() != (expected_count + 7) / 8) corrupt("bitmask byte length mismatch");
  if (expected_count % 8 != 0 && (packed.back() >> (expected_count % 8)) != 0) {
    corrupt("bitmask padding bits must be zero");
  }
  std::vector<std::uint8_t> bits(static_cast<std::size_t>(expected_count));
  for (std::size_t k = 0; k < bits.size(); ++k) bits[k] = (packed[k >> 3] >> (k & 7)) & 1u;
  return bits;
}

}  // namespace gndc
