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
#include <map>
#include <optional>
#include <random>
#include <string_view>
#include <string>
#include <vector>

#include "geodiv/embedding_store.hpp"

namespace geodiv {

struct GroupKey {
  std::string region;
  std::optional<std::string> object;

  auto operator<=>(const GroupKey&) const = default;
};

// Draws are always without replacement. An absent per_cell_target keeps the
// original distribution.
struct SamplingPlan {
  std::uint64_t seed = 0;
  std::optional<std::size_t> per_cell_target;
};

// Deterministic sampler. std::mt19937_64 (whose output sequence is fixed by
// the C++ standard) seeded with the plan seed; bounded draws reject raw
// values r >= 2^64 - (2^64 mod bound) and return r mod bound; subsets come
// from a partial Fisher-Yates shuffle over candidate indices.
class SeededSampler {
 public:
  explicit SeededSampler(std::uint64_t seed);
  // Uniform integer in [0, bound).
  std::uint64_t below(std::uint64_t bound);
  // `take` distinct elements of `candidates`, returned in ascending order.
  std::vector<std::size_t> choose(std::vector<std::size_t> candidates, std::size_t take);

 private:
  std::mt19937_64 engine_;
};

// Stable sub-seed for one named stratum, so strata draw independent streams.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view stratum);

// Partition by region label. Every vocabulary region gets an entry (possibly
// empty); a record outside the vocabulary is a DataError naming its label.
std::map<std::string, EmbeddingDataset> split_by_region(const EmbeddingDataset& ds,
                                                        const std::vector<std::string>& region_vocab);

// Rewrites region from country. A record without a mapped country is a DataError.
EmbeddingDataset merge_countries(const EmbeddingDataset& ds,
                                 const std::map<std::string, std::string>& country_to_region);

// Draws exactly reference_counts[o] records of each object o, output in pool
// order. Objects are visited in lexicographic order with one sampler stream.
EmbeddingDataset match_object_distribution(const EmbeddingDataset& gen_pool,
                                           const std::map<std::string, std::size_t>& reference_counts,
                                           const SamplingPlan& plan);

// Exactly per_cell records per (object, region) cell, output in input order.
EmbeddingDataset balance_cells(const EmbeddingDataset& ds, std::size_t per_cell,
                               const SamplingPlan& plan);
// Uses plan.per_cell_target; absent means the dataset is returned unchanged.
EmbeddingDataset balance_cells(const EmbeddingDataset& ds, const SamplingPlan& plan);

std::map<std::string, std::size_t> object_counts(const EmbeddingDataset& ds);
std::map<std::pair<std::string, std::string>, std::size_t> cell_counts(const EmbeddingDataset& ds);

}  // namespace geodiv
