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

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "geodiv/embedding_store.hpp"

namespace geodiv {

// Raw cosine similarity in double precision, clamped to [-1, 1].
// No 2.5 * max(cos, 0) rescaling is applied.
double clipscore(std::span<const float> image_vec, std::span<const float> text_vec);

struct ScoredRecord {
  std::string record_id;
  std::string object;
  std::string region;
  std::optional<std::string> country;
  double score = 0.0;
};

using TextEmbeddings = std::map<std::string, std::vector<float>, std::less<>>;

// Bare "{object}" prompt embeddings from a text-embedding dataset: records
// whose id (the prompt text) equals their object label.
TextEmbeddings object_prompt_embeddings(const EmbeddingDataset& text);

// Scores every generated record against its object's bare prompt embedding.
std::vector<ScoredRecord> score_dataset(const EmbeddingDataset& gen, const TextEmbeddings& text,
                                        std::size_t workers = 1);

enum class TailMode { kPercentile, kTailMean };
enum class ConsistencyGrouping { kRegion, kRegionCountry };

std::string_view to_string(TailMode mode);
TailMode parse_tail_mode(std::string_view text);
std::string_view to_string(ConsistencyGrouping grouping);
ConsistencyGrouping parse_consistency_grouping(std::string_view text);

inline constexpr double kDefaultPercentile = 10.0;

struct ObjectTailSummary {
  std::string object;
  std::string group;
  std::size_t n = 0;
  double tail_value = 0.0;  // linear-interpolation percentile
  double tail_mean = 0.0;   // mean of the ceil(n * p / 100) smallest scores
};

// Linear inclusive percentile: h = (n - 1) p / 100 over ascending values.
double percentile_linear(std::span<const double> sorted_ascending, double percentile);
// Mean of the ceil(n p / 100) smallest values.
double lower_tail_mean(std::span<const double> sorted_ascending, double percentile);

// Groups scores by (object, group) and summarizes each cell. Output is
// ordered by (group, object). Throws PreconditionError for 0 >= p or p >= 100.
std::vector<ObjectTailSummary> tail_summary(std::span<const ScoredRecord> scores,
                                            double percentile = kDefaultPercentile,
                                            ConsistencyGrouping grouping = ConsistencyGrouping::kRegion);

// Per group, the unweighted mean over objects of the selected tail statistic.
// Every object must appear in every group.
std::map<std::string, double> consistency_indicator(std::span<const ObjectTailSummary> summaries,
                                                    TailMode mode = TailMode::kPercentile);

// Group key used by tail_summary: "region" or "region/country".
std::string consistency_group_key(const ScoredRecord& record, ConsistencyGrouping grouping);

}  // namespace geodiv
