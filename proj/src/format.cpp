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

#include "gndc/format.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "gndc/bytes.hpp"
#include "gndc/codec.hpp"
#include "gndc/error.hpp"
#include "gndc/timeutil.hpp"
#include "json_io.hpp"

namespace gndc {

using nlohmann::json;

namespace {

constexpr std::size_t kNameBytes = 16;
constexpr std::size_t kEntryBytes = kNameBytes + 8 + 8 + 4 + 4;
constexpr std::size_t kPrefixBytes = 8 + 4;
constexpr std::uint32_t kMaxSections = 4096;

std::size_t align8(std::size_t n) { return (n + 7) & ~std::size_t{7}; }

struct PlannedSection {
  std::string name;
  SectionDtype dtype;
  std::vector<std::uint8_t> bytes;
};

// Name, dtype and byte length of each tensor section implied by the config.
struct ExpectedSection {
  std::string name;
  SectionDtype dtype;
  std::uint64_t length;
};

std::vector<ExpectedSection> expected_tensor_sections(const FieldConfig& cfg, bool half_tables) {
  std::vector<ExpectedSection> out;
  const auto table_dtype = half_tables ? SectionDtype::kF16 : SectionDtype::kF32;
  const std::uint64_t elem = half_tables ? 2 : 4;
  const auto l2 = cfg.grid2d.layout();
  const auto l3 = cfg.grid3d.layout();
  for (std::size_t l = 0; l < l2.size(); ++l) {
    out.push_back({"t2d." + std::to_string(l), table_dtype,
                   std::uint64_t{l2[l].rows} * static_cast<std::uint64_t>(cfg.grid2d.features) * elem});
  }
  for (std::size_t l = 0; l < l3.size(); ++l) {
    out.push_back({"t3d." + std::to_string(l), table_dtype,
                   std::uint64_t{l3[l].rows} * static_cast<std::uint64_t>(cfg.grid3d.features) * elem});
  }
  for (std::size_t k = 0; k < cfg.layer_count(); ++k) {
    out.push_back({"mlp.w" + std::to_string(k), SectionDtype::kF32, cfg.layer_in(k) * cfg.layer_out(k) * 4});
    out.push_back({"mlp.b" + std::to_string(k), SectionDtype::kF32, cfg.layer_out(k) * 4});
  }
  return out;
}

std::vector<std::uint8_t> pack_f32(std::span<const float> v) {
  ByteWriter w;
  for (float x : v) w.f32(x);
  return std::move(w.bytes());
}

std::vector<std::uint8_t> pack_f16(std::span<const Half> v) {
  std::vector<std::uint8_t> out(v.size() * 2);
  for (std::size_t k = 0; k < v.size(); ++k) {
    out[2 * k] = static_cast<std::uint8_t>(v[k].bits);
    out[2 * k + 1] = static_cast<std::uint8_t>(v[k].bits >> 8);
  }
  return out;
}

void unpack_f32(std::span<const std::uint8_t> b, std::vector<float>& out) {
  out.resize(b.size() / 4);
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = std::bit_cast<float>(load_u32_le(b.data() + 4 * k));
}

void unpack_f16(std::span<const std::uint8_t> b, std::vector<Half>& out) {
  out.resize(b.size() / 2);
  for (std::size_t k = 0; k < out.size(); ++k) {
    out[k].bits = static_cast<std::uint16_t>(b[2 * k] | (b[2 * k + 1] << 8));
  }
}

json norm_to_json(const NormalizationSpec& n) {
  return {{"value_min", n.value_min}, {"value_max", n.value_max}};
}

json training_to_json(const TrainingInfo& t) {
  return {{"steps", t.steps},           {"batch_size", t.batch_size}, {"seed", t.seed},
          {"learning_rate", t.learning_rate}, {"final_loss", t.final_loss}, {"seconds", t.seconds}};
}

std::string header_text(const GndcModel& m) {
  json j;
  j["format"] = "gndc";
  j["version"] = kGndcVersion;
  j["cube"] = meta_to_json(m.meta);
  j["normalization"] = norm_to_json(m.norm);
  j["field"] = field_to_json(m.field);
  j["payload"] = {{"table_dtype", m.half_tables() ? "f16" : "f32"},
                  {"mlp_dtype", "f32"},
                  {"parameter_count", m.field.parameter_count()}};
  json corr = residual_to_json(m.residual_config);
  corr["mask"] = m.mask.has_value();
  corr["residuals"] = m.residuals.has_value();
  corr["residual_count"] = m.residuals ? m.residuals->size() : 0;
  j["correction"] = corr;
  j["training"] = training_to_json(m.training);
  return j.dump();
}

[[noreturn]] void malformed(const std::string& what) { fail(ErrorCode::kMalformedFile, what); }

GndcHeader header_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception&) {
    malformed("header is not valid JSON");
  }
  if (!j.is_object() || j.dump() != text) malformed("header JSON is not in canonical form");
  GndcHeader h;
  try {
    if (j.at("format").get<std::string>() != "gndc") malformed("header format tag is not gndc");
    if (j.at("version").get<std::uint32_t>() != kGndcVersion) {
      fail(ErrorCode::kUnsupportedVersion, "unsupported header version");
    }
    h.meta = meta_from_json(j.at("cube"));
    h.meta.validate();
    h.norm = make_normalizer(h.meta);
    h.norm.value_min = j.at("normalization").at("value_min").get<std::vector<double>>();
    h.norm.value_max = j.at("normalization").at("value_max").get<std::vector<double>>();
    if (h.norm.value_min.size() != h.meta.channels() || h.norm.value_max.size() != h.meta.channels()) {
      malformed("normalization ranges do not match the band count");
    }
    for (std::size_t c = 0; c < h.meta.channels(); ++c) {
      if (!(h.norm.value_max[c] > h.norm.value_min[c]) || !std::isfinite(h.norm.value_max[c]) ||
          !std::isfinite(h.norm.value_min[c])) {
        malformed("normalization range must satisfy max > min");
      }
    }
    h.field = field_from_json(j.at("field"));
    h.field.validate();
    if (static_cast<std::size_t>(h.field.out_channels) != h.meta.channels()) {
      malformed("field output width does not match the band count");
    }
    const auto& payload = j.at("payload");
    const auto td = payload.at("table_dtype").get<std::string>();
    if (td != "f16" && td != "f32") malformed("unknown table dtype");
    h.half_tables = td == "f16";
    if (payload.at("mlp_dtype").get<std::string>() != "f32") malformed("unknown MLP dtype");
    h.parameter_count = payload.at("parameter_count").get<std::uint64_t>();
    if (h.parameter_count != h.field.parameter_count()) malformed("parameter count disagrees with the config");
    const auto& corr = j.at("correction");
    h.residual_config.threshold = corr.at("threshold").get<double>();
    h.residual_config.quant_step = corr.at("quant_step").get<double>();
    h.residual_config.enabled = corr.at("enabled").get<bool>();
    h.residual_config.validate();
    h.has_mask = corr.at("mask").get<bool>();
    h.has_residuals = corr.at("residuals").get<bool>();
    h.residual_count = corr.at("residual_count").get<std::uint64_t>();
    const auto& tr = j.at("training");
    h.training.steps = tr.at("steps").get<std::uint64_t>();
    h.training.batch_size = tr.at("batch_size").get<std::uint64_t>();
    h.training.seed = tr.at("seed").get<std::uint64_t>();
    h.training.learning_rate = tr.at("learning_rate").get<double>();
    h.training.final_loss = tr.at("final_loss").get<double>();
    h.training.seconds = tr.at("seconds").get<double>();
  } catch (const json::exception& e) {
    malformed(std::string("header field missing or mistyped: ") + e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kUnsupportedVersion || e.code() == ErrorCode::kMalformedFile) throw;
    malformed(std::string("header invalid: ") + e.what());
  }
  h.header_json = text;
  return h;
}

// Parses magic, header and section table from the first bytes of a file and
// validates the table CRC and section geometry against file_size.
GndcHeader parse_prefix(std::span<const std::uint8_t> data, std::uint64_t file_size, std::size_t* table_end) {
  const std::size_t have = std::min<std::size_t>(data.size(), 4);
  if (std::memcmp(data.data(), kGndcMagic.data(), have) != 0) fail(ErrorCode::kBadMagic, "not a .gndc file");
  if (data.size() < 8) fail(ErrorCode::kTruncatedFile, "file shorter than the magic");
  if (std::memcmp(data.data() + 4, kGndcMagic.data() + 4, 4) != 0) {
    fail(ErrorCode::kUnsupportedVersion, "unsupported .gndc version");
  }
  ByteReader r(data);
  r.take(8);
  const std::uint32_t header_len = r.u32();
  if (!r.ok() || header_len > r.remaining()) fail(ErrorCode::kTruncatedFile, "header extends past end of file");
  const auto header_bytes = r.take(header_len);
  const std::uint32_t count = r.u32();
  if (!r.ok()) fail(ErrorCode::kTruncatedFile, "section count missing");
  if (count > kMaxSections) malformed("implausible section count");
  if (std::uint64_t{count} * kEntryBytes + 4 > r.remaining()) {
    fail(ErrorCode::kTruncatedFile, "section table extends past end of file");
  }
  const std::size_t table_start = r.pos();
  r.take(count * kEntryBytes);
  const std::size_t crc_pos = r.pos();
  if (crc32(data.first(crc_pos)) != load_u32_le(data.data() + crc_pos)) {
    fail(ErrorCode::kCrcMismatch, "header/section table CRC mismatch");
  }

  GndcHeader h = header_from_json(std::string(header_bytes.begin(), header_bytes.end()));
  h.file_size = file_size;
  ByteReader t(data.subspan(table_start, count * kEntryBytes));
  std::uint64_t prev_end = align8(crc_pos + 4);
  for (std::uint32_t k = 0; k < count; ++k) {
    const auto name_raw = t.take(kNameBytes);
    SectionEntry e;
    std::size_t len = 0;
    while (len < kNameBytes && name_raw[len] != 0) ++len;
    if (len == 0) malformed("empty section name");
    for (std::size_t i = len; i < kNameBytes; ++i) {
      if (name_raw[i] != 0) malformed("section name padding must be zero");
    }
    for (std::size_t i = 0; i < len; ++i) {
      if (name_raw[i] < 0x21 || name_raw[i] > 0x7e) malformed("section name is not printable ASCII");
    }
    e.name.assign(name_raw.begin(), name_raw.begin() + static_cast<std::ptrdiff_t>(len));
    e.offset = t.u64();
    e.length = t.u64();
    const std::uint32_t dtype = t.u32();
    e.crc = t.u32();
    if (dtype > 3) malformed("section '" + e.name + "' has an unknown dtype tag");
    e.dtype = static_cast<SectionDtype>(dtype);
    if (e.offset % 8 != 0) malformed("section '" + e.name + "' is not 8-byte aligned");
    if (e.offset < prev_end) fail(ErrorCode::kSectionOverlap, "section '" + e.name + "' overlaps its predecessor");
    if (e.offset > file_size || e.length > file_size - e.offset) {
      fail(ErrorCode::kTruncatedFile, "section '" + e.name + "' extends past end of file");
    }
    prev_end = e.offset + e.length;
    h.sections.push_back(std::move(e));
  }
  const std::uint64_t data_end = count == 0 ? crc_pos + 4 : prev_end;
  if (data_end != file_size) malformed("trailing bytes after the last section");
  if (table_end) *table_end = crc_pos + 4;

  // The section list must be exactly what the header implies.
  auto expected = expected_tensor_sections(h.field, h.half_tables);
  if (h.has_mask) expected.push_back({"mask", SectionDtype::kCodedStream, 0});
  if (h.has_residuals) expected.push_back({"residual", SectionDtype::kCodedStream, 0});
  if (expected.size() != h.sections.size()) malformed("section count disagrees with the header");
  for (std::size_t k = 0; k < expected.size(); ++k) {
    const auto& e = h.sections[k];
    if (e.name != expected[k].name) malformed("unexpected section '" + e.name + "'");
    if (e.dtype != expected[k].dtype) malformed("section '" + e.name + "' has the wrong dtype");
    if (expected[k].dtype != SectionDtype::kCodedStream && e.length != expected[k].length) {
      malformed("section '" + e.name + "' has the wrong length");
    }
  }
  return h;
}

}  // namespace

std::uint64_t GndcHeader::payload_bytes() const {
  std::uint64_t n = 0;
  for (const auto& s : sections) {
    if (s.name != "mask" && s.name != "residual") n += s.length;
  }
  return n;
}

void GndcModel::check_consistency() const {
  try {
    meta.validate();
    field.validate();
    residual_config.validate();
  } catch (const Error& e) {
    fail(ErrorCode::kInconsistentParts, e.what());
  }
  if (static_cast<std::size_t>(field.out_channels) != meta.channels()) {
    fail(ErrorCode::kInconsistentParts, "field output width does not match the band count");
  }
  if (norm.value_min.size() != meta.channels() || norm.value_max.size() != meta.channels()) {
    fail(ErrorCode::kInconsistentParts, "normalization ranges do not match the band count");
  }
  std::visit(
      [&](const auto& p) {
        if (!(p.config == field)) fail(ErrorCode::kInconsistentParts, "tensor config differs from the header config");
        try {
          p.check_shapes();
        } catch (const Error& e) {
          fail(ErrorCode::kInconsistentParts, e.what());
        }
      },
      params);
  if (mask && mask->size() != meta.voxels()) fail(ErrorCode::kInconsistentParts, "mask size mismatch");
  if (residuals) {
    if (residuals->total != meta.samples()) fail(ErrorCode::kInconsistentParts, "residual index space mismatch");
    try {
      residuals->validate();
    } catch (const Error& e) {
      fail(ErrorCode::kInconsistentParts, e.what());
    }
  }
}

std::vector<std::uint8_t> serialize_gndc(const GndcModel& model) {
  model.check_consistency();
  std::vector<PlannedSection> sections;
  std::visit(
      [&](const auto& p) {
        for (std::size_t l = 0; l < p.table2d.size(); ++l) {
          if constexpr (std::is_same_v<std::decay_t<decltype(p)>, CompactFieldParams>) {
            sections.push_back({"t2d." + std::to_string(l), SectionDtype::kF16, pack_f16(p.table2d[l])});
          } else {
            sections.push_back({"t2d." + std::to_string(l), SectionDtype::kF32, pack_f32(p.table2d[l])});
          }
        }
        for (std::size_t l = 0; l < p.table3d.size(); ++l) {
          if constexpr (std::is_same_v<std::decay_t<decltype(p)>, CompactFieldParams>) {
            sections.push_back({"t3d." + std::to_string(l), SectionDtype::kF16, pack_f16(p.table3d[l])});
          } else {
            sections.push_back({"t3d." + std::to_string(l), SectionDtype::kF32, pack_f32(p.table3d[l])});
          }
        }
        for (std::size_t k = 0; k < p.weights.size(); ++k) {
          sections.push_back({"mlp.w" + std::to_string(k), SectionDtype::kF32, pack_f32(p.weights[k])});
          sections.push_back({"mlp.b" + std::to_string(k), SectionDtype::kF32, pack_f32(p.biases[k])});
        }
      },
      model.params);
  if (model.mask) sections.push_back({"mask", SectionDtype::kCodedStream, encode_bitmask(*model.mask)});
  if (model.residuals) {
    sections.push_back({"residual", SectionDtype::kCodedStream, serialize_residuals(*model.residuals)});
  }

  const std::string header = header_text(model);
  ByteWriter w;
  w.raw(kGndcMagic);
  w.u32(static_cast<std::uint32_t>(header.size()));
  w.raw(std::span(reinterpret_cast<const std::uint8_t*>(header.data()), header.size()));
  w.u32(static_cast<std::uint32_t>(sections.size()));
  std::size_t cursor = align8(w.size() + sections.size() * kEntryBytes + 4);
  for (const auto& s : sections) {
    std::array<std::uint8_t, kNameBytes> name{};
    std::memcpy(name.data(), s.name.data(), s.name.size());
    w.raw(name);
    w.u64(cursor);
    w.u64(s.bytes.size());
    w.u32(static_cast<std::uint32_t>(s.dtype));
    w.u32(crc32(s.bytes));
    cursor = align8(cursor + s.bytes.size());
  }
  w.u32(crc32(w.bytes()));
  for (std::size_t k = 0; k < sections.size(); ++k) {
    w.zeros(align8(w.size()) - w.size());
    w.raw(sections[k].bytes);
  }
  return std::move(w.bytes());
}

GndcHeader parse_gndc_header(std::span<const std::uint8_t> prefix, std::uint64_t file_size) {
  return parse_prefix(prefix, file_size, nullptr);
}

GndcModel parse_gndc(std::span<const std::uint8_t> bytes) {
  std::size_t table_end = 0;
  GndcHeader h = parse_prefix(bytes, bytes.size(), &table_end);
  std::uint64_t cursor = table_end;
  for (const auto& s : h.sections) {
    for (std::uint64_t k = cursor; k < s.offset; ++k) {
      if (bytes[k] != 0) malformed("non-zero padding before section '" + s.name + "'");
    }
    const auto body = bytes.subspan(s.offset, s.length);
    if (crc32(body) != s.crc) fail(ErrorCode::kCrcMismatch, "CRC mismatch in section '" + s.name + "'");
    cursor = s.offset + s.length;
  }

  GndcModel m;
  m.meta = h.meta;
  m.norm = h.norm;
  m.field = h.field;
  m.residual_config = h.residual_config;
  m.training = h.training;
  auto body = [&](std::size_t k) { return bytes.subspan(h.sections[k].offset, h.sections[k].length); };
  auto fill = [&](auto& p) {
    std::size_t k = 0;
    for (auto& t : p.table2d) {
      if constexpr (std::is_same_v<std::decay_t<decltype(p)>, CompactFieldParams>) unpack_f16(body(k++), t);
      else unpack_f32(body(k++), t);
    }
    for (auto& t : p.table3d) {
      if constexpr (std::is_same_v<std::decay_t<decltype(p)>, CompactFieldParams>) unpack_f16(body(k++), t);
      else unpack_f32(body(k++), t);
    }
    for (std::size_t l = 0; l < p.weights.size(); ++l) {
      unpack_f32(body(k++), p.weights[l]);
      unpack_f32(body(k++), p.biases[l]);
    }
    return k;
  };
  std::size_t next = 0;
  if (h.half_tables) {
    auto p = CompactFieldParams::zeros(h.field);
    next = fill(p);
    m.params = std::move(p);
  } else {
    auto p = FieldParams::zeros(h.field);
    next = fill(p);
    m.params = std::move(p);
  }
  try {
    if (h.has_mask) m.mask = decode_bitmask(body(next++), h.meta.voxels());
    if (h.has_residuals) {
      m.residuals = deserialize_residuals(body(next++));
      if (m.residuals->total != h.meta.samples() || m.residuals->size() != h.residual_count) {
        malformed("residual package disagrees with the header");
      }
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kCorruptStream) malformed(std::string("correction layer: ") + e.what());
    throw;
  }
  return m;
}

void write_gndc(const GndcModel& model, const std::filesystem::path& path) {
  const auto bytes = serialize_gndc(model);
  write_file(path, bytes);
}

GndcModel read_gndc(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  return parse_gndc(bytes);
}

GndcHeader read_gndc_header(const std::filesystem::path& path) {
  std::error_code ec;
  const auto size = std::filesystem::file_size(path, ec);
  if (ec) fail(ErrorCode::kMissingFile, "cannot open " + path.string());
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kMissingFile, "cannot open " + path.string());
  auto read_more = [&](std::vector<std::uint8_t>& buf, std::size_t n) {
    const std::size_t old = buf.size();
    const std::size_t want = static_cast<std::size_t>(std::min<std::uint64_t>(n, size - old));
    buf.resize(old + want);
    in.read(reinterpret_cast<char*>(buf.data() + old), static_cast<std::streamsize>(want));
    if (in.gcount() != static_cast<std::streamsize>(want)) fail(ErrorCode::kIoFailure, "read failed");
  };
  std::vector<std::uint8_t> buf;
  read_more(buf, kPrefixBytes);
  if (buf.size() == kPrefixBytes && std::memcmp(buf.data(), kGndcMagic.data(), 8) == 0) {
    const std::uint32_t header_len = load_u32_le(buf.data() + 8);
    read_more(buf, std::uint64_t{header_len} + 4);
    if (buf.size() == kPrefixBytes + header_len + 4) {
      const std::uint32_t count = load_u32_le(buf.data() + kPrefixBytes + header_len);
      if (count <= kMaxSections) read_more(buf, std::uint64_t{count} * kEntryBytes + 4);
    }
  }
  return parse_prefix(buf, size, nullptr);
}

InspectSummary inspect(const std::filesystem::path& path) {
  InspectSummary s;
  s.header = read_gndc_header(path);
  s.source_bytes = s.header.meta.samples() * 4;
  s.compression_ratio = static_cast<double>(s.source_bytes) / static_cast<double>(s.header.file_size);
  return s;
}

std::string inspect_json(const InspectSummary& s) {
  const auto& h = s.header;
  json j;
  j["height"] = h.meta.height;
  j["width"] = h.meta.width;
  j["frames"] = h.meta.frames();
  j["channels"] = h.meta.channels();
  j["bands"] = h.meta.band_names;
  j["crs"] = h.meta.crs;
  j["bbox"] = {h.meta.bbox.x_min, h.meta.bbox.y_min, h.meta.bbox.x_max, h.meta.bbox.y_max};
  std::vector<std::string> times;
  for (auto t : h.meta.timestamps) times.push_back(format_iso8601(static_cast<double>(t)));
  j["timestamps"] = times;
  j["time_start"] = times.front();
  j["time_end"] = times.back();
  j["parameter_count"] = h.parameter_count;
  j["payload_bytes"] = h.payload_bytes();
  j["file_bytes"] = h.file_size;
  j["source_bytes"] = s.source_bytes;
  j["compression_ratio"] = s.compression_ratio;
  j["table_dtype"] = h.half_tables ? "f16" : "f32";
  j["has_mask"] = h.has_mask;
  j["has_residuals"] = h.has_residuals;
  j["residual_count"] = h.residual_count;
  j["residual_threshold"] = h.residual_config.threshold;
  j["residual_quant_step"] = h.residual_config.quant_step;
  j["value_min"] = h.norm.value_min;
  j["value_max"] = h.norm.value_max;
  j["scale"] = h.meta.value_scale;
  j["offset"] = h.meta.value_offset;
  j["field"] = field_to_json(h.field);
  j["final_loss"] = h.training.final_loss;
  j["training_steps"] = h.training.steps;
  json sections = json::array();
  for (const auto& e : h.sections) {
    sections.push_back({{"name", e.name}, {"offset", e.offset}, {"length", e.length},
                        {"dtype", static_cast<std::uint32_t>(e.dtype)}});
  }
  j["sections"] = sections;
  return j.dump();
}

std::string inspect_text(const InspectSummary& s) {
  const auto& h = s.header;
  std::ostringstream o;
  o << "dims           " << h.meta.height << " x " << h.meta.width << " x " << h.meta.frames() << " x "
    << h.meta.channels() << " (H x W x T x C)\n";
  o << "bands          ";
  for (std::size_t c = 0; c < h.meta.band_names.size(); ++c) o << (c ? ", " : "") << h.meta.band_names[c];
  o << "\ncrs            " << h.meta.crs << "\n";
  o << "time range     " << format_iso8601(static_cast<double>(h.meta.timestamps.front())) << " .. "
    << format_iso8601(static_cast<double>(h.meta.timestamps.back())) << "\n";
  o << "parameters     " << h.parameter_count << " (tables " << (h.half_tables ? "f16" : "f32")
    << ", mlp f32)\n";
  o << "payload bytes  " << h.payload_bytes() << "\n";
  o << "file bytes     " << h.file_size << "\n";
  o << "source bytes   " << s.source_bytes << "\n";
  o << "ratio          " << s.compression_ratio << " : 1\n";
  o << "mask           " << (h.has_mask ? "present" : "absent") << "\n";
  o << "residuals      ";
  if (h.has_residuals) {
    o << h.residual_count << " entries (tau " << h.residual_config.threshold << ", q "
      << h.residual_config.quant_step << ")\n";
  } else {
    o << "absent\n";
  }
  return o.str();
}

}  // namespace gndc
