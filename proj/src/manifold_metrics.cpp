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

#include "geodiv/manifold_metrics.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>

#include "geodiv/checksum.hpp"
#include "geodiv/errors.hpp"
#include "geodiv/parallel.hpp"

namespace geodiv {
namespace {

// Points per reference tile. Tiles are stored dimension-major so the inner
// loop runs over contiguous reference points and vectorizes without
// reassociating any single distance sum.
constexpr std::size_t kTile = 64;

std::vector<double> widen(const EmbeddingDataset& ds) {
  std::vector<double> out;
  out.reserve(ds.size() * ds.dim());
  for (const EmbeddingRecord& r : ds.records()) out.insert(out.end(), r.vector.begin(), r.vector.end());
  return out;
}

class TiledPoints {
 public:
  TiledPoints(std::span<const double> rows, std::size_t n, std::size_t dim)
      : n_(n), dim_(dim), tiles_((n + kTile - 1) / kTile) {
    data_.assign(tiles_ * dim_ * kTile, 0.0);
    for (std::size_t j = 0; j < n_; ++j) {
      double* tile = data_.data() + (j / kTile) * dim_ * kTile;
      for (std::size_t c = 0; c < dim_; ++c) tile[c * kTile + j % kTile] = rows[j * dim_ + c];
    }
  }

  std::size_t tiles() const { return tiles_; }
  std::size_t tile_begin(std::size_t t) const { return t * kTile; }
  std::size_t tile_width(std::size_t t) const { return std::min(kTile, n_ - t * kTile); }

  // out[jj] = sum_c (query[c] - point[c])^2, accumulated in coordinate order.
  void squared_distances(const double* query, std::size_t t, double* out) const {
    const double* tile = data_.data() + t * dim_ * kTile;
    std::fill(out, out + kTile, 0.0);
    for (std::size_t c = 0; c < dim_; ++c) {
      const double qc = query[c];
      const double* column = tile + c * kTile;
      for (std::size_t jj = 0; jj < kTile; ++jj) {
        const double diff = qc - column[jj];
        out[jj] += diff * diff;
      }
    }
  }

 private:
  std::size_t n_;
  std::size_t dim_;
  std::size_t tiles_;
  std::vector<double> data_;
};

void check_generated(const ManifoldModel& manifold, const EmbeddingDataset& gen) {
  if (gen.dim() != manifold.points().dim()) {
    throw PreconditionError("dimension mismatch: generated dim " + std::to_string(gen.dim()) +
                            ", reference dim " + std::to_string(manifold.points().dim()));
  }
  if (gen.empty()) throw PreconditionError("generated set is empty");
}

PrecisionCoverage sweep(const ManifoldModel& manifold, const EmbeddingDataset& gen,
                        std::size_t workers, bool want_precision, bool want_coverage) {
  check_generated(manifold, gen);
  const std::size_t n = manifold.size();
  const std::size_t m = gen.size();
  const std::size_t dim = gen.dim();
  const TiledPoints real(manifold.coordinates(), n, dim);
  const std::vector<double> queries = widen(gen);
  const auto r2 = manifold.squared_radii();

  std::vector<std::uint8_t> inside(m, 0);
  const std::size_t chunks = std::max<std::size_t>(1, std::min(workers, m));
  std::vector<std::vector<std::uint8_t>> covered(chunks);

  parallel_for_chunks(m, chunks, [&](std::size_t chunk, std::size_t begin, std::size_t end) {
    std::vector<std::uint8_t>& hit = covered[chunk];
    hit.assign(n, 0);
    std::vector<std::size_t> open(real.tiles());
    for (std::size_t t = 0; t < real.tiles(); ++t) open[t] = real.tile_width(t);
    std::array<double, kTile> d2{};

    for (std::size_t i = begin; i < end; ++i) {
      const double* q = queries.data() + i * dim;
      bool found = !want_precision;
      for (std::size_t t = 0; t < real.tiles(); ++t) {
        const bool need_cover = want_coverage && open[t] > 0;
        if (found && !need_cover) continue;
        real.squared_distances(q, t, d2.data());
        const std::size_t base = real.tile_begin(t);
        for (std::size_t jj = 0; jj < real.tile_width(t); ++jj) {
          if (d2[jj] <= r2[base + jj]) {
            found = true;
            if (want_coverage && !hit[base + jj]) {
              hit[base + jj] = 1;
              --open[t];
            }
          }
        }
      }
      if (want_precision) inside[i] = found ? 1 : 0;
    }
  });

  PrecisionCoverage out;
  out.precision = {0.0, n, m, manifold.k(), 0};
  out.coverage = {0.0, n, m, manifold.k(), 0};
  if (want_precision) {
    for (std::uint8_t v : inside) out.precision.hits += v;
    out.precision.value = static_cast<double>(out.precision.hits) / static_cast<double>(m);
  }
  if (want_coverage) {
    for (std::size_t j = 0; j < n; ++j) {
      bool any = false;
      for (const auto& hit : covered) any = any || (!hit.empty() && hit[j]);
      out.coverage.hits += any ? 1 : 0;
    }
    out.coverage.value = static_cast<double>(out.coverage.hits) / static_cast<double>(n);
  }
  return out;
}

void put_u64_le(std::string& out, std::uint64_t v) {
  for (int b = 0; b < 8; ++b) out += static_cast<char>((v >> (8 * b)) & 0xFFu);
}

std::uint64_t get_u64_le(const char* p) {
  std::uint64_t v = 0;
  for (int b = 0; b < 8; ++b) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(p[b])) << (8 * b);
  return v;
}

std::string hex_to_bytes(const std::string& hex) {
  std::string out;
  for (std::size_t i = 0; i + 1 < hex.size(); i += 2) {
    out += static_cast<char>(std::stoi(hex.substr(i, 2), nullptr, 16));
  }
  return out;
}

}  // namespace

ManifoldModel::ManifoldModel(EmbeddingDataset points, std::size_t k, std::vector<double> squared_radii)
    : points_(std::move(points)), k_(k), coords_(widen(points_)), squared_radii_(std::move(squared_radii)) {
  radii_.reserve(squared_radii_.size());
  for (double s : squared_radii_) radii_.push_back(std::sqrt(s));
}

ManifoldModel build_manifold(const EmbeddingDataset& real, std::size_t k, std::size_t workers) {
  const std::size_t n = real.size();
  if (n == 0) throw PreconditionError("reference set is empty");
  if (k == 0) throw PreconditionError("k must be positive");
  if (k >= n) {
    throw PreconditionError("reference set too small for k: " + std::to_string(n) +
                            " points, need at least k + 1 = " + std::to_string(k + 1));
  }
  const std::size_t dim = real.dim();
  const std::vector<double> rows = widen(real);
  const TiledPoints tiled(rows, n, dim);
  std::vector<double> squared(n, 0.0);

  parallel_for_chunks(n, workers, [&](std::size_t begin, std::size_t end) {
    std::vector<double> row(tiled.tiles() * kTile);
    for (std::size_t j = begin; j < end; ++j) {
      for (std::size_t t = 0; t < tiled.tiles(); ++t) {
        tiled.squared_distances(rows.data() + j * dim, t, row.data() + t * kTile);
      }
      // Drop self, keep only real neighbours, then take the k-th smallest.
      row[j] = row[n - 1];
      auto kth = row.begin() + static_cast<std::ptrdiff_t>(k - 1);
      std::nth_element(row.begin(), kth, row.begin() + static_cast<std::ptrdiff_t>(n - 1));
      squared[j] = *kth;
    }
  });
  return ManifoldModel(real, k, std::move(squared));
}

MetricResult precision(const ManifoldModel& manifold, const EmbeddingDataset& gen, std::size_t workers) {
  return sweep(manifold, gen, workers, true, false).precision;
}

MetricResult coverage(const ManifoldModel& manifold, const EmbeddingDataset& gen, std::size_t workers) {
  return sweep(manifold, gen, workers, false, true).coverage;
}

PrecisionCoverage evaluate(const ManifoldModel& manifold, const EmbeddingDataset& gen,
                           std::size_t workers) {
  return sweep(manifold, gen, workers, true, true);
}

void save_manifold(const ManifoldModel& manifold, const std::filesystem::path& path) {
  std::string out(kManifoldMagic);
  put_u64_le(out, manifold.k());
  put_u64_le(out, manifold.size());
  out += hex_to_bytes(dataset_checksum(manifold.points()));
  for (double r : manifold.radii()) put_u64_le(out, std::bit_cast<std::uint64_t>(r));
  for (double r : manifold.squared_radii()) put_u64_le(out, std::bit_cast<std::uint64_t>(r));
  write_file_atomic(path, out);
}

ManifoldModel load_manifold(const std::filesystem::path& path, const EmbeddingDataset& real) {
  const std::string bytes = read_file(path);
  const std::size_t fixed = kManifoldMagic.size() + 8 + 8 + 32;
  if (bytes.size() < fixed || std::string_view(bytes).substr(0, kManifoldMagic.size()) != kManifoldMagic) {
    throw DataError(path.string() + ": not a manifold cache");
  }
  const char* p = bytes.data() + kManifoldMagic.size();
  const std::uint64_t k = get_u64_le(p);
  const std::uint64_t count = get_u64_le(p + 8);
  const std::string checksum(p + 16, 32);
  if (count != real.size()) {
    throw DataError(path.string() + ": cache has " + std::to_string(count) + " radii, reference has " +
                    std::to_string(real.size()) + " records");
  }
  if (checksum != hex_to_bytes(dataset_checksum(real))) {
    throw DataError(path.string() + ": reference dataset checksum does not match the cache");
  }
  if (bytes.size() != fixed + 16 * count) throw DataError(path.string() + ": truncated manifold cache");
  if (k == 0 || k >= count) throw DataError(path.string() + ": invalid k in manifold cache");
  std::vector<double> squared(count);
  const char* sq = bytes.data() + fixed + 8 * count;
  for (std::size_t j = 0; j < count; ++j) squared[j] = std::bit_cast<double>(get_u64_le(sq + 8 * j));
  return ManifoldModel(real, k, std::move(squared));
}

}  // namespace geodiv
