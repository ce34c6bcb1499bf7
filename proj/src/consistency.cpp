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

#include "geodiv/consistency.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "geodiv/errors.hpp"
#include "geodiv/parallel.hpp"

namespace geodiv {

double clipscore(std::span<const float> image_vec, std::span<const float> text_vec) {
  if (image_vec.size() != text_vec.size()) {
    throw PreconditionError("clipscore dimension mismatch: " + std::to_string(image_vec.size()) +
                            " vs " + std::to_string(text_vec.size()));
  }
  double dot = 0.0;
  double image_sq = 0.0;
  double text_sq = 0.0;
  for (std::size_t c = 0; c < image_vec.size(); ++c) {
    const double a = image_vec[c];
    const double b = text_vec[c];
    dot += a * b;
    image_sq += a * a;
    text_sq += b * b;
  }
  if (image_sq == 0.0 || text_sq == 0.0) throw PreconditionError("clipscore of a zero-norm vector");
  // sqrt(x * x) == x exactly, so identical vectors score exactly 1.
  const double cosine = dot / std::sqrt(image_sq * text_sq);
  return std::clamp(cosine, -1.0, 1.0);
}

std::string_view to_string(TailMode mode) {
  return mode == TailMode::kPercentile ? "percentile" : "tail_mean";
}

TailMode parse_tail_mode(std::string_view text) {
  if (text == "percentile") return TailMode::kPercentile;
  if (text == "tail_mean") return TailMode::kTailMean;
  throw ConfigError("unknown tail_mode \"" + std::string(text) + "\"");
}

std::string_view to_string(ConsistencyGrouping grouping) {
  return grouping == ConsistencyGrouping::kRegion ? "region" : "region_country";
}

ConsistencyGrouping parse_consistency_grouping(std::string_view text) {
  if (text == "region") return ConsistencyGrouping::kRegion;
  if (text == "region_country") return ConsistencyGrouping::kRegionCountry;
  throw ConfigError("unknown consistency grouping \"" + std::string(text) + "\"");
}

TextEmbeddings object_prompt_embeddings(const EmbeddingDataset& text) {
  TextEmbeddings out;
  for (const EmbeddingRecord& r : text.records()) {
    if (r.id != r.object) continue;
    out.emplace(r.object, r.vector);
  }
  return out;
}

std::vector<ScoredRecord> score_dataset(const EmbeddingDataset& gen, const TextEmbeddings& text,
                                        std::size_t workers) {
  std::set<std::string> missing;
  for (const EmbeddingRecord& r : gen.records()) {
    if (!text.contains(r.object)) missing.insert(r.object);
  }
  if (!missing.empty()) {
    std::string list;
    for (const auto& o : missing) list += (list.empty() ? "" : ", ") + ("\"" + o + "\"");
    throw PreconditionError("missing text embedding for object(s): " + list);
  }
  std::vector<ScoredRecord> out(gen.size());
  parallel_for_chunks(gen.size(), workers, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const EmbeddingRecord& r = gen[i];
      out[i] = {r.id, r.object, r.region, r.country, clipscore(r.vector, text.find(r.object)->second)};
    }
  });
  return out;
}

double percentile_linear(std::span<const double> v, double p) {
  if (v.empty()) throw PreconditionError("percentile of an empty group");
  const double h = static_cast<double>(v.size() - 1) * p / 100.0;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const double frac = h - static_cast<double>(lo);
  if (lo + 1 >= v.size() || frac == 0.0) return v[lo];
  return v[lo] + frac * (v[lo + 1] - v[lo]);
}

double lower_tail_mean(std::span<const double> v, double p) {
  if (v.empty()) throw PreconditionError("tail mean of an empty group");
  auto take = static_cast<std::size_t>(std::ceil(static_cast<double>(v.size()) * p / 100.0));
  take = std::clamp<std::size_t>(take, 1, v.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < take; ++i) sum += v[i];
  return sum / static_cast<double>(take);
}

std::string consistency_group_key(const ScoredRecord& record, ConsistencyGrouping grouping) {
  if (grouping == ConsistencyGrouping::kRegion) return record.region;
  return record.region + "/" + record.country.value_or("");
}

std::vector<ObjectTailSummary> tail_summary(std::span<const ScoredRecord> scores, double percentile,
                                            ConsistencyGrouping grouping) {
  if (!(percentile > 0.0 && percentile < 100.0)) {
    throw PreconditionError("percentile must lie in (0, 100), got " + std::to_string(percentile));
  }
  std::map<std::pair<std::string, std::string>, std::vector<double>> cells;
  for (const ScoredRecord& s : scores) {
    cells[{consistency_group_key(s, grouping), s.object}].push_back(s.score);
  }
  std::vector<ObjectTailSummary> out;
  out.reserve(cells.size());
  for (auto& [key, values] : cells) {
    std::sort(values.begin(), values.end());
    out.push_back({key.second, key.first, values.size(), percentile_linear(values, percentile),
                   lower_tail_mean(values, percentile)});
  }
  return out;
}

std::map<std::string, double> consistency_indicator(std::span<const ObjectTailSummary> summaries,
                                                    TailMode mode) {
  std::map<std::string, std::map<std::string, double>> by_group;
  std::set<std::string> objects;
  for (const ObjectTailSummary& s : summaries) {
    if (s.n == 0) throw PreconditionError("empty score group for " + s.object + " in " + s.group);
    const double value = mode == TailMode::kPercentile ? s.tail_value : s.tail_mean;
    if (!by_group[s.group].emplace(s.object, value).second) {
      throw PreconditionError("duplicate summary for " + s.object + " in " + s.group);
    }
    objects.insert(s.object);
  }
  std::string gaps;
  for (const auto& [group, values] : by_group) {
    for (const auto& o : objects) {
      if (!values.contains(o)) gaps += (gaps.empty() ? "" : ", ") + (o + " in " + group);
    }
  }
  if (!gaps.empty()) throw PreconditionError("ragged object coverage across groups: missing " + gaps);

  std::map<std::string, double> out;
  for (const auto& [group, values] : by_group) {
    double sum = 0.0;
    for (const auto& [object, v] : values) sum += v;
    out[group] = sum / static_cast<double>(values.size());
  }
  return out;
}

}  // namespace geodiv
