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

#include <cstdint>
#include <filesystem>
#include <map>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "geodiv/consistency.hpp"
#include "geodiv/embedding_store.hpp"
#include "geodiv/prompt_builder.hpp"

namespace geodiv {

// One evaluation run. Schema and defaults are documented in docs/CONFIG.md.
// Relative paths are resolved against the directory of the config document.
struct RunConfig {
  std::size_t k = 3;
  double percentile = kDefaultPercentile;
  TailMode tail_mode = TailMode::kPercentile;
  std::uint64_t seed = 0;
  PromptKind prompt_kind = PromptKind::kObjectInRegion;
  ObjectPool object_pool = ObjectPool::kShared;
  ConsistencyGrouping consistency_grouping = ConsistencyGrouping::kRegion;
  std::size_t workers = 1;

  std::vector<std::string> regions;
  std::vector<std::string> objects;  // empty: taken from the data
  std::map<std::string, std::string> country_map;
  std::map<std::string, std::vector<std::string>> countries_per_region;
  std::optional<std::size_t> reference_per_cell;

  std::optional<std::filesystem::path> reference;
  std::optional<std::filesystem::path> generated;
  std::optional<std::filesystem::path> generated_joint;
  std::optional<std::filesystem::path> text_embeddings;
  std::filesystem::path output_dir = "geodiv-out";

  // Prompt construction (build-prompts).
  std::size_t per_object_region = 0;
  std::size_t countries_per_cell = 3;
  std::optional<std::size_t> flat_object_count;
  std::optional<std::map<std::pair<std::string, std::string>, std::size_t>> cell_counts;
  std::vector<PromptKind> prompt_kinds;  // empty: {prompt_kind}
};

// Throws ConfigError on unknown keys, wrong types, or invariant violations.
RunConfig parse_run_config(const nlohmann::json& doc, const std::filesystem::path& base_dir);
RunConfig load_run_config(const std::filesystem::path& path);

PromptSpec prompt_spec(const RunConfig& cfg);

}  // namespace geodiv
