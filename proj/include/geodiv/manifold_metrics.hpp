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
#include <span>
#include <string>
#include <vector>

#include "geodiv/embedding_store.hpp"

namespace geodiv {

inline constexpr std::size_t kDefaultK = 3;

// Union of closed balls around the real points. radii[j] is the Euclidean
// distance from point j to its k-th nearest neighbour among the other real
// points (self excluded, equal distances counted separately).
class ManifoldModel {
 public:
  const EmbeddingDataset& points() const noexcept { return points_; }
  std::size_t k() const noexcept { return k_; }
  std::size_t size() const noexcept { return radii_.size(); }
  std::span<const double> radii() const noexcept { return radii_; }
  // Squared radii are the exact k-th order statistic of squared distances;
  // membership tests compare against these, never against radii().
  std::span<const double> squared_radii() const noexcept { return squared_radii_; }
  std::span<const double> coordinates() const noexcept { return coords_; }

 private:
  friend ManifoldModel build_manifold(const EmbeddingDataset&, std::size_t, std::size_t);
  friend ManifoldModel load_manifold(const std::filesystem::path&, const EmbeddingDataset&);

  ManifoldModel(EmbeddingDataset points, std::size_t k, std::vector<double> squared_radii);

  EmbeddingDataset points_;
  std::size_t k_ = 0;
  std::vector<double> coords_;  // row-major, widened to double
  std::vector<double> squared_radii_;
  std::vector<double> radii_;
};

struct MetricResult {
  double value = 0.0;
  std::size_t n_real = 0;
  std::size_t n_generated = 0;
  std::size_t k = 0;
  std::size_t hits = 0;  // numerator of value
};

struct PrecisionCoverage {
  MetricResult precision;
  MetricResult coverage;
};

// Throws PreconditionError unless 1 <= k <= |real| - 1.
ManifoldModel build_manifold(const EmbeddingDataset& real, std::size_t k = kDefaultK,
                             std::size_t workers = 1);

// Fraction of generated points inside at least one real ball.
MetricResult precision(const ManifoldModel& manifold, const EmbeddingDataset& gen,
                       std::size_t workers = 1);

// Fraction of real balls containing at least one generated point.
MetricResult coverage(const ManifoldModel& manifold, const EmbeddingDataset& gen,
                      std::size_t workers = 1);

// Both metrics from a single sweep over the generated/real distance tiles.
PrecisionCoverage evaluate(const ManifoldModel& manifold, const EmbeddingDataset& gen,
                           std::size_t workers = 1);

// Radii cache. Layout in docs/FORMATS.md; loading verifies the reference
// dataset checksum and record count.
inline constexpr std::string_view kManifoldMagic = "GEODIVE-MAN/1\n";
void save_manifold(const ManifoldModel& manifold, const std::filesystem::path& path);
ManifoldModel load_manifold(const std::filesystem::path& path, const EmbeddingDataset& real);

}  // namespace geodiv
