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

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "geodiv/embedding_store.hpp"

namespace geodiv {

// How "{object}" prompts are pooled: one shared pool per object (sized
// per_object_region x |regions| unless flat_object_count is set), or one pool
// per (object, region) cell.
enum class ObjectPool { kShared, kPerRegion };

std::string_view to_string(ObjectPool pool);
ObjectPool parse_object_pool(std::string_view text);

struct PromptSpec {
  std::vector<std::string> objects;
  std::vector<std::string> regions;
  // Ordered by representation in the reference dataset, most represented first.
  std::map<std::string, std::vector<std::string>> countries_per_region;
  std::size_t per_object_region = 0;
  // Only the first countries_per_cell countries of each region are prompted.
  std::size_t countries_per_cell = 3;
  ObjectPool object_pool = ObjectPool::kShared;
  std::optional<std::size_t> flat_object_count;
  // Original-distribution counts per (object, region); overrides
  // per_object_region for the listed cells and drops unlisted ones.
  std::optional<std::map<std::pair<std::string, std::string>, std::size_t>> cell_counts;
};

struct PromptRecord {
  std::string prompt_text;
  std::string object;
  std::string region;  // empty for shared "{object}" pools
  std::optional<std::string> country;
  PromptKind prompt_kind = PromptKind::kObject;
  std::size_t replicate_index = 0;

  bool operator==(const PromptRecord&) const = default;
};

// Key of one expected_counts cell. Unused fields are empty.
struct PromptCell {
  std::string object;
  std::string region;
  std::string country;

  auto operator<=>(const PromptCell&) const = default;
};

std::string expand_template(PromptKind kind, std::string_view object, std::string_view place = {});

std::map<PromptCell, std::size_t> expected_counts(const PromptSpec& spec, PromptKind kind);
std::vector<PromptRecord> build_prompts(const PromptSpec& spec, PromptKind kind);

struct ParsedPrompt {
  std::string object;
  std::string place;  // region or country; empty for "{object}"
};

// Inverts expand_template against the PromptSpec vocabularies.
std::optional<ParsedPrompt> parse_prompt(std::string_view text, PromptKind kind, const PromptSpec& spec);

// Tab-delimited prompt list: optional leading "# " comment lines, a header
// row, then one row per prompt.
inline constexpr std::string_view kPromptHeader =
    "prompt_text\tobject\tregion\tcountry\tprompt_kind\treplicate_index";
std::string serialize_prompts(const std::vector<PromptRecord>& prompts);
std::vector<PromptRecord> parse_prompts(std::string_view text);

}  // namespace geodiv
