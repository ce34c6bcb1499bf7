/* Copyright 2026 The geodiv Authors.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "geodiv/embedding_store.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <nlohmann/json.hpp>
#include <unordered_map>

#include "geodiv/checksum.hpp"
#include "geodiv/errors.hpp"
#include "geodiv/text.hpp"

namespace geodiv {
namespace {

constexpr std::array<std::string_view, 7> kColumns = {
    "id", "source", "object", "region", "country", "prompt_kind", "prompt_text"};

std::string record_prefix(std::size_t index) { return "record " + std::to_string(index) + ": "; }

std::optional<std::string> normalize_optional(std::optional<std::string> value) {
  if (!value || value->empty()) return std::nullopt;
  return text::nfc(*value);
}

void normalize_and_check(std::size_t dim, std::vector<EmbeddingRecord>& records) {
  std::unordered_map<std::string, std::size_t> seen;
  seen.reserve(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    EmbeddingRecord& r = records[i];
    try {
      r.id = text::nfc(r.id);
      r.object = text::nfc(r.object);
      r.region = text::nfc(r.region);
      r.country = normalize_optional(std::move(r.country));
      r.prompt_text = normalize_optional(std::move(r.prompt_text));
    } catch (const DataError& e) {
      throw DataError(record_prefix(i) + e.what());
    }
    if (r.id.empty()) throw DataError(record_prefix(i) + "empty id");
    if (r.vector.size() != dim) {
      throw DataError(record_prefix(i) + "vector has " + std::to_string(r.vector.size()) +
                      " components, dataset dim is " + std::to_string(dim));
    }
    for (std::size_t c = 0; c < r.vector.size(); ++c) {
      if (!std::isfinite(r.vector[c])) {
        throw DataError(record_prefix(i) + "non-finite value at component " + std::to_string(c));
      }
    }
    if (r.prompt_kind == PromptKind::kObjectInCountry && !r.country) {
      throw DataError(record_prefix(i) + "prompt_kind object_in_country requires a country");
    }
    auto [it, inserted] = seen.emplace(r.id, i);
    if (!inserted) {
      throw DataError(record_prefix(i) + "duplicate id \"" + r.id + "\" (first at record " +
                      std::to_string(it->second) + ")");
    }
  }
}

void put_u32_le(std::string& out, std::uint32_t v) {
  for (int b = 0; b < 4; ++b) out += static_cast<char>((v >> (8 * b)) & 0xFFu);
}

std::uint32_t get_u32_le(const char* p) {
  std::uint32_t v = 0;
  for (int b = 0; b < 4; ++b) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(p[b])) << (8 * b);
  return v;
}

bool same_bits(std::span<const float> a, std::span<const float> b) {
  return a.size() == b.size() && (a.empty() || std::memcmp(a.data(), b.data(), a.size_bytes()) == 0);
}

}  // namespace

std::string_view to_string(Source source) {
  return source == Source::kReal ? "real" : "generated";
}

std::string_view to_string(PromptKind kind) {
  switch (kind) {
    case PromptKind::kObject:
      return "object";
    case PromptKind::kObjectInRegion:
      return "object_in_region";
    case PromptKind::kObjectInCountry:
      return "object_in_country";
    case PromptKind::kNone:
      return "none";
  }
  return "none";
}

Source parse_source(std::string_view text) {
  if (text == "real") return Source::kReal;
  if (text == "generated") return Source::kGenerated;
  throw DataError("unknown source \"" + std::string(text) + "\"");
}

PromptKind parse_prompt_kind(std::string_view text) {
  if (text == "object") return PromptKind::kObject;
  if (text == "object_in_region") return PromptKind::kObjectInRegion;
  if (text == "object_in_country") return PromptKind::kObjectInCountry;
  if (text == "none") return PromptKind::kNone;
  throw DataError("unknown prompt_kind \"" + std::string(text) + "\"");
}

bool EmbeddingRecord::operator==(const EmbeddingRecord& other) const {
  return id == other.id && same_bits(vector, other.vector) && object == other.object &&
         region == other.region && country == other.country && prompt_kind == other.prompt_kind &&
         prompt_text == other.prompt_text && source == other.source;
}

EmbeddingDataset::EmbeddingDataset(std::size_t dim, std::vector<EmbeddingRecord> records,
                                   std::string label)
    : dim_(dim), label_(std::move(label)) {
  if (dim == 0) throw DataError("dataset dim must be positive");
  normalize_and_check(dim, records);
  records_ = std::make_shared<const std::vector<EmbeddingRecord>>(std::move(records));
}

EmbeddingDataset::EmbeddingDataset(Unchecked, std::size_t dim,
                                   std::shared_ptr<const std::vector<EmbeddingRecord>> records,
                                   std::string label)
    : dim_(dim), records_(std::move(records)), label_(std::move(label)) {}

EmbeddingDataset EmbeddingDataset::with_label(std::string label) const {
  return EmbeddingDataset(Unchecked{}, dim_, records_, std::move(label));
}

bool EmbeddingDataset::operator==(const EmbeddingDataset& other) const {
  return dim_ == other.dim_ && label_ == other.label_ && *records_ == *other.records_;
}

bool RecordFilter::matches(const EmbeddingRecord& r) const {
  if (object && r.object != *object) return false;
  if (region && r.region != *region) return false;
  if (country && r.country != country) return false;
  if (prompt_kind && r.prompt_kind != *prompt_kind) return false;
  if (source && r.source != *source) return false;
  return true;
}

EmbeddingDataset slice(const EmbeddingDataset& ds,
                       const std::function<bool(const EmbeddingRecord&)>& predicate) {
  auto kept = std::make_shared<std::vector<EmbeddingRecord>>();
  for (const EmbeddingRecord& r : ds.records()) {
    if (predicate(r)) kept->push_back(r);
  }
  // A subset of a valid dataset is valid; skip re-validation.
  return EmbeddingDataset(EmbeddingDataset::Unchecked{}, ds.dim(), std::move(kept), ds.label());
}

EmbeddingDataset slice(const EmbeddingDataset& ds, const RecordFilter& filter) {
  return slice(ds, [&filter](const EmbeddingRecord& r) { return filter.matches(r); });
}

std::string serialize_dataset(const EmbeddingDataset& ds) {
  nlohmann::ordered_json header;
  header["magic"] = kEmbeddingMagic;
  header["dim"] = ds.dim();
  header["count"] = ds.size();
  header["label"] = ds.label();
  header["columns"] = kColumns;

  std::string out = header.dump();
  out += '\n';
  for (const EmbeddingRecord& r : ds.records()) {
    out += text::escape_field(r.id);
    out += '\t';
    out += to_string(r.source);
    out += '\t';
    out += text::escape_field(r.object);
    out += '\t';
    out += text::escape_field(r.region);
    out += '\t';
    out += text::escape_field(r.country.value_or(""));
    out += '\t';
    out += to_string(r.prompt_kind);
    out += '\t';
    out += text::escape_field(r.prompt_text.value_or(""));
    out += '\n';
  }
  out.reserve(out.size() + ds.size() * ds.dim() * 4);
  for (const EmbeddingRecord& r : ds.records()) {
    for (float v : r.vector) put_u32_le(out, std::bit_cast<std::uint32_t>(v));
  }
  return out;
}

EmbeddingDataset parse_dataset(std::string_view bytes) {
  const std::size_t header_end = bytes.find('\n');
  if (header_end == std::string_view::npos) throw DataError("malformed header: no header line");

  nlohmann::json header;
  try {
    header = nlohmann::json::parse(bytes.substr(0, header_end));
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed header: ") + e.what());
  }
  if (!header.is_object()) throw DataError("malformed header: not a key/value document");
  if (!header.contains("magic") || header["magic"] != kEmbeddingMagic) {
    throw DataError("malformed header: magic is not " + std::string(kEmbeddingMagic));
  }
  auto read_count = [&header](const char* key) -> std::size_t {
    if (!header.contains(key) || !header[key].is_number_unsigned()) {
      throw DataError(std::string("malformed header: \"") + key + "\" must be a non-negative integer");
    }
    return header[key].get<std::size_t>();
  };
  const std::size_t dim = read_count("dim");
  const std::size_t count = read_count("count");
  if (dim == 0) throw DataError("malformed header: dim must be positive");
  std::string label;
  if (header.contains("label")) {
    if (!header["label"].is_string()) throw DataError("malformed header: label must be a string");
    label = header["label"].get<std::string>();
  }

  // Column order is declared by the header; all seven columns are required.
  if (!header.contains("columns") || !header["columns"].is_array()) {
    throw DataError("malformed header: missing column list");
  }
  std::array<std::size_t, kColumns.size()> position{};
  position.fill(SIZE_MAX);
  const auto& columns = header["columns"];
  if (columns.size() != kColumns.size()) {
    throw DataError("malformed header: expected " + std::to_string(kColumns.size()) + " columns");
  }
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (!columns[i].is_string()) throw DataError("malformed header: column names must be strings");
    const std::string name = columns[i].get<std::string>();
    std::size_t slot = 0;
    while (slot < kColumns.size() && kColumns[slot] != name) ++slot;
    if (slot == kColumns.size()) throw DataError("malformed header: unknown column \"" + name + "\"");
    if (position[slot] != SIZE_MAX) throw DataError("malformed header: repeated column \"" + name + "\"");
    position[slot] = i;
  }

  std::vector<EmbeddingRecord> records(count);
  std::size_t cursor = header_end + 1;
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t eol = bytes.find('\n', cursor);
    if (eol == std::string_view::npos) throw DataError(record_prefix(i) + "metadata row missing");
    const auto fields = text::split_tabs(bytes.substr(cursor, eol - cursor));
    cursor = eol + 1;
    if (fields.size() != kColumns.size()) {
      throw DataError(record_prefix(i) + "metadata row has " + std::to_string(fields.size()) +
                      " fields, expected " + std::to_string(kColumns.size()));
    }
    EmbeddingRecord& r = records[i];
    try {
      r.id = text::unescape_field(fields[position[0]]);
      r.source = parse_source(fields[position[1]]);
      r.object = text::unescape_field(fields[position[2]]);
      r.region = text::unescape_field(fields[position[3]]);
      std::string country = text::unescape_field(fields[position[4]]);
      if (!country.empty()) r.country = std::move(country);
      r.prompt_kind = parse_prompt_kind(fields[position[5]]);
      std::string prompt = text::unescape_field(fields[position[6]]);
      if (!prompt.empty()) r.prompt_text = std::move(prompt);
    } catch (const DataError& e) {
      throw DataError(record_prefix(i) + e.what());
    }
  }

  const std::size_t row_bytes = dim * 4;
  const std::size_t payload = bytes.size() - cursor;
  if (count != 0 && row_bytes > SIZE_MAX / count) throw DataError("malformed header: size overflow");
  if (payload != count * row_bytes) {
    std::string where = payload < count * row_bytes
                            ? "; first incomplete record is " + std::to_string(payload / row_bytes)
                            : "";
    throw DataError("dimension mismatch: payload has " + std::to_string(payload) +
                    " bytes, header declares " + std::to_string(count) + " x " +
                    std::to_string(dim) + " floats (" + std::to_string(count * row_bytes) +
                    " bytes)" + where);
  }
  const char* p = bytes.data() + cursor;
  for (EmbeddingRecord& r : records) {
    r.vector.resize(dim);
    for (std::size_t c = 0; c < dim; ++c, p += 4) r.vector[c] = std::bit_cast<float>(get_u32_le(p));
  }
  return EmbeddingDataset(dim, std::move(records), std::move(label));
}

EmbeddingDataset load_dataset(const std::filesystem::path& path) {
  const std::string bytes = read_file(path);
  try {
    return parse_dataset(bytes);
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

void write_dataset(const EmbeddingDataset& ds, const std::filesystem::path& path) {
  write_file_atomic(path, serialize_dataset(ds));
}

std::string dataset_checksum(const EmbeddingDataset& ds) { return sha256_hex(serialize_dataset(ds)); }

}  // namespace geodiv
