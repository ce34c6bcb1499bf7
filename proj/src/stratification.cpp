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

#include "geodiv/stratification.hpp"

#include <algorithm>
#include <limits>
#include <set>

#include "geodiv/errors.hpp"

namespace geodiv {
namespace {

std::string quoted_list(const std::set<std::string>& items) {
  std::string out;
  for (const auto& s : items) out += (out.empty() ? "\"" : ", \"") + s + "\"";
  return out;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

EmbeddingDataset take_indices(const EmbeddingDataset& ds, const std::vector<std::size_t>& sorted) {
  std::vector<EmbeddingRecord> out;
  out.reserve(sorted.size());
  for (std::size_t i : sorted) out.push_back(ds[i]);
  return EmbeddingDataset(ds.dim(), std::move(out), ds.label());
}

}  // namespace

SeededSampler::SeededSampler(std::uint64_t seed) : engine_(seed) {}

std::uint64_t SeededSampler::below(std::uint64_t bound) {
  if (bound == 0) throw PreconditionError("sampler bound must be positive");
  // 2^64 mod bound, computed without overflow.
  const std::uint64_t excess = (std::numeric_limits<std::uint64_t>::max() % bound + 1) % bound;
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - excess;
  std::uint64_t r = engine_();
  while (excess != 0 && r > limit) r = engine_();
  return r % bound;
}

std::vector<std::size_t> SeededSampler::choose(std::vector<std::size_t> candidates, std::size_t take) {
  if (take > candidates.size()) throw PreconditionError("cannot draw more than the candidate count");
  for (std::size_t i = 0; i < take; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(below(candidates.size() - i));
    std::swap(candidates[i], candidates[j]);
  }
  candidates.resize(take);
  std::sort(candidates.begin(), candidates.end());
  return candidates;
}

std::uint64_t derive_seed(std::uint64_t seed, std::string_view stratum) {
  // FNV-1a over the stratum name, folded into the seed.
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (unsigned char c : stratum) {
    h ^= c;
    h *= 0x100000001B3ull;
  }
  return splitmix64(seed ^ splitmix64(h));
}

std::map<std::string, EmbeddingDataset> split_by_region(const EmbeddingDataset& ds,
                                                        const std::vector<std::string>& region_vocab) {
  const std::set<std::string> vocab(region_vocab.begin(), region_vocab.end());
  std::set<std::string> strays;
  for (const EmbeddingRecord& r : ds.records()) {
    if (!vocab.contains(r.region)) strays.insert(r.region);
  }
  if (!strays.empty()) throw DataError("unknown region label(s): " + quoted_list(strays));

  std::map<std::string, EmbeddingDataset> out;
  for (const auto& region : vocab) {
    out.emplace(region, slice(ds, RecordFilter{.region = region}));
  }
  return out;
}

EmbeddingDataset merge_countries(const EmbeddingDataset& ds,
                                 const std::map<std::string, std::string>& country_to_region) {
  std::set<std::string> unmapped;
  std::vector<EmbeddingRecord> out(ds.records().begin(), ds.records().end());
  for (EmbeddingRecord& r : out) {
    const auto it = r.country ? country_to_region.find(*r.country) : country_to_region.end();
    if (it == country_to_region.end()) {
      unmapped.insert(r.country.value_or("<none>"));
      continue;
    }
    r.region = it->second;
  }
  if (!unmapped.empty()) throw DataError("unmapped country label(s): " + quoted_list(unmapped));
  return EmbeddingDataset(ds.dim(), std::move(out), ds.label());
}

EmbeddingDataset match_object_distribution(const EmbeddingDataset& gen_pool,
                                           const std::map<std::string, std::size_t>& reference_counts,
                                           const SamplingPlan& plan) {
  std::map<std::string, std::vector<std::size_t>> by_object;
  for (std::size_t i = 0; i < gen_pool.size(); ++i) by_object[gen_pool[i].object].push_back(i);

  std::string shortfalls;
  for (const auto& [object, want] : reference_counts) {
    const std::size_t have = by_object.contains(object) ? by_object[object].size() : 0;
    if (have < want) {
      shortfalls += (shortfalls.empty() ? "" : "; ") + ("\"" + object + "\" needs " + std::to_string(want) +
                                                        ", pool has " + std::to_string(have) + " (short by " +
                                                        std::to_string(want - have) + ")");
    }
  }
  if (!shortfalls.empty()) throw PreconditionError("insufficient generated pool: " + shortfalls);

  SeededSampler sampler(plan.seed);
  std::vector<std::size_t> chosen;
  for (const auto& [object, want] : reference_counts) {
    if (want == 0) continue;
    const auto picked = sampler.choose(by_object[object], want);
    chosen.insert(chosen.end(), picked.begin(), picked.end());
  }
  std::sort(chosen.begin(), chosen.end());
  return take_indices(gen_pool, chosen);
}

EmbeddingDataset balance_cells(const EmbeddingDataset& ds, std::size_t per_cell, const SamplingPlan& plan) {
  std::map<std::pair<std::string, std::string>, std::vector<std::size_t>> cells;
  for (std::size_t i = 0; i < ds.size(); ++i) cells[{ds[i].object, ds[i].region}].push_back(i);

  std::string deficient;
  for (const auto& [cell, members] : cells) {
    if (members.size() < per_cell) {
      deficient += (deficient.empty() ? "" : "; ") + ("(" + cell.first + ", " + cell.second + ") has " +
                                                      std::to_string(members.size()));
    }
  }
  if (!deficient.empty()) {
    throw PreconditionError("deficient cell(s) for " + std::to_string(per_cell) + " per cell: " + deficient);
  }

  SeededSampler sampler(plan.seed);
  std::vector<std::size_t> chosen;
  for (const auto& [cell, members] : cells) {
    const auto picked = sampler.choose(members, per_cell);
    chosen.insert(chosen.end(), picked.begin(), picked.end());
  }
  std::sort(chosen.begin(), chosen.end());
  return take_indices(ds, chosen);
}

EmbeddingDataset balance_cells(const EmbeddingDataset& ds, const SamplingPlan& plan) {
  if (!plan.per_cell_target) return ds;
  return balance_cells(ds, *plan.per_cell_target, plan);
}

std::map<std::string, std::size_t> object_counts(const EmbeddingDataset& ds) {
  std::map<std::string, std::size_t> out;
  for (const EmbeddingRecord& r : ds.records()) ++out[r.object];
  return out;
}

std::map<std::pair<std::string, std::string>, std::size_t> cell_counts(const EmbeddingDataset& ds) {
  std::map<std::pair<std::string, std::string>, std::size_t> out;
  for (const EmbeddingRecord& r : ds.records()) ++out[{r.object, r.region}];
  return out;
}

}  // namespace geodiv
