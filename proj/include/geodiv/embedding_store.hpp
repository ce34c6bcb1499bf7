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

#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace geodiv {

enum class Source { kReal, kGenerated };

enum class PromptKind { kObject, kObjectInRegion, kObjectInCountry, kNone };

std::string_view to_string(Source source);
std::string_view to_string(PromptKind kind);
Source parse_source(std::string_view text);
PromptKind parse_prompt_kind(std::string_view text);

// One image (or prompt) embedding plus the labels the indicators group by.
struct EmbeddingRecord {
  std::string id;
  std::vector<float> vector;
  std::string object;
  std::string region;
  std::optional<std::string> country;
  PromptKind prompt_kind = PromptKind::kNone;
  std::optional<std::string> prompt_text;
  Source source = Source::kReal;

  bool operator==(const EmbeddingRecord& other) const;
};

// Ordered, immutable collection of records sharing one dimensionality.
//
// Copies are cheap: the record storage is shared and never mutated. Every
// constructor validates the record invariants (finite values, uniform length,
// unique non-empty ids, country present for country prompts) and applies NFC
// normalization to the metadata strings.
class EmbeddingDataset {
 public:
  EmbeddingDataset();
  EmbeddingDataset(std::size_t dim, std::vector<EmbeddingRecord> records, std::string label = {});

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return records_->size(); }
  bool empty() const noexcept { return records_->empty(); }
  const std::string& label() const noexcept { return label_; }
  std::span<const EmbeddingRecord> records() const noexcept { return *records_; }
  const EmbeddingRecord& operator[](std::size_t index) const { return (*records_)[index]; }

  EmbeddingDataset with_label(std::string label) const;

  bool operator==(const EmbeddingDataset& other) const;

 private:
  struct Unchecked {};
  EmbeddingDataset(Unchecked, std::size_t dim,
                   std::shared_ptr<const std::vector<EmbeddingRecord>> records, std::string label);

  friend EmbeddingDataset slice(const EmbeddingDataset&,
                                const std::function<bool(const EmbeddingRecord&)>&);

  std::size_t dim_ = 0;
  std::shared_ptr<const std::vector<EmbeddingRecord>> records_;
  std::string label_;
};

// Metadata filter. Unset fields match everything; set fields must match exactly.
struct RecordFilter {
  std::optional<std::string> object = {};
  std::optional<std::string> region = {};
  std::optional<std::string> country = {};
  std::optional<PromptKind> prompt_kind = {};
  std::optional<Source> source = {};

  bool matches(const EmbeddingRecord& record) const;
};

EmbeddingDataset slice(const EmbeddingDataset& ds,
                       const std::function<bool(const EmbeddingRecord&)>& predicate);
EmbeddingDataset slice(const EmbeddingDataset& ds, const RecordFilter& filter);

// GEODIVE-EMB/1 interchange format; byte layout in docs/FORMATS.md.
inline constexpr std::string_view kEmbeddingMagic = "GEODIVE-EMB/1";

std::string serialize_dataset(const EmbeddingDataset& ds);
EmbeddingDataset parse_dataset(std::string_view bytes);

EmbeddingDataset load_dataset(const std::filesystem::path& path);
void write_dataset(const EmbeddingDataset& ds, const std::filesystem::path& path);

// SHA-256 (lowercase hex) of the canonical serialization.
std::string dataset_checksum(const EmbeddingDataset& ds);

}  // namespace geodiv
