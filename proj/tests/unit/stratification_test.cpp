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

#include <doctest.h>

#include <map>
#include <set>

#include "geodiv/errors.hpp"
#include "geodiv/stratification.hpp"

using namespace geodiv;

namespace {

EmbeddingRecord rec(std::string id, std::string object, std::string region,
                    std::optional<std::string> country = std::nullopt) {
  EmbeddingRecord r;
  r.id = std::move(id);
  r.vector = {static_cast<float>(r.id.size())};
  r.object = std::move(object);
  r.region = std::move(region);
  r.country = std::move(country);
  return r;
}

// objects x regions x per_cell records.
EmbeddingDataset grid(std::size_t objects, const std::vector<std::string>& regions, std::size_t per_cell) {
  std::vector<EmbeddingRecord> records;
  for (std::size_t o = 0; o < objects; ++o) {
    for (const auto& region : regions) {
      for (std::size_t i = 0; i < per_cell; ++i) {
        records.push_back(rec("o" + std::to_string(o) + "/" + region + "/" + std::to_string(i),
                              "o" + std::to_string(o), region));
      }
    }
  }
  return EmbeddingDataset(1, std::move(records));
}

std::vector<std::string> ids(const EmbeddingDataset& ds) {
  std::vector<std::string> out;
  for (const auto& r : ds.records()) out.push_back(r.id);
  return out;
}

bool is_subsequence(const EmbeddingDataset& sub, const EmbeddingDataset& full) {
  std::size_t j = 0;
  for (const auto& r : full.records()) {
    if (j < sub.size() && sub[j].id == r.id) ++j;
  }
  return j == sub.size();
}

const std::vector<std::string> kSix = {"Africa", "Americas", "EastAsia", "Europe", "SouthEastAsia", "WestAsia"};

}  // namespace

TEST_CASE("sampler is reproducible and uniform over its range") {
  SeededSampler a(42), b(42);
  std::vector<std::size_t> hist(7, 0);
  for (int i = 0; i < 7000; ++i) {
    const auto x = a.below(7);
    CHECK(x == b.below(7));
    REQUIRE(x < 7);
    ++hist[x];
  }
  for (auto h : hist) CHECK(h > 850);
  CHECK_THROWS_AS(a.below(0), PreconditionError);
}

TEST_CASE("choose returns sorted distinct candidates") {
  SeededSampler s(1);
  std::vector<std::size_t> candidates = {3, 9, 12, 20, 31, 40};
  const auto picked = s.choose(candidates, 4);
  REQUIRE(picked.size() == 4);
  CHECK(std::is_sorted(picked.begin(), picked.end()));
  CHECK(std::set<std::size_t>(picked.begin(), picked.end()).size() == 4);
  for (auto p : picked) CHECK(std::find(candidates.begin(), candidates.end(), p) != candidates.end());
  CHECK(s.choose(candidates, 6) == candidates);
  CHECK_THROWS_AS(s.choose(candidates, 7), PreconditionError);
}

TEST_CASE("derived seeds separate strata") {
  CHECK(derive_seed(7, "region/Africa") == derive_seed(7, "region/Africa"));
  CHECK(derive_seed(7, "region/Africa") != derive_seed(7, "region/Europe"));
  CHECK(derive_seed(7, "region/Africa") != derive_seed(8, "region/Africa"));
}

TEST_CASE("balancing a GeoDE-shaped dataset") {
  const EmbeddingDataset full = grid(27, kSix, 200);
  const EmbeddingDataset balanced = balance_cells(full, 180, SamplingPlan{2023, std::nullopt});
  CHECK(balanced.size() == 29160);
  const auto cells = cell_counts(balanced);
  CHECK(cells.size() == 162);
  for (const auto& [cell, n] : cells) CHECK(n == 180);
  CHECK(is_subsequence(balanced, full));
  CHECK(ids(balance_cells(full, 180, SamplingPlan{2023, std::nullopt})) == ids(balanced));
  CHECK(ids(balance_cells(full, 180, SamplingPlan{2024, std::nullopt})) != ids(balanced));
}

TEST_CASE("balancing reports deficient cells") {
  std::vector<EmbeddingRecord> records;
  for (int i = 0; i < 5; ++i) records.push_back(rec("a" + std::to_string(i), "car", "Africa"));
  for (int i = 0; i < 2; ++i) records.push_back(rec("b" + std::to_string(i), "stove", "Europe"));
  const EmbeddingDataset ds(1, records);
  try {
    balance_cells(ds, 3, SamplingPlan{1, std::nullopt});
    FAIL("expected a deficient-cell error");
  } catch (const PreconditionError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("stove") != std::string::npos);
    CHECK(msg.find("Europe") != std::string::npos);
    CHECK(msg.find("car") == std::string::npos);
  }
  CHECK(balance_cells(ds, SamplingPlan{1, std::nullopt}) == ds);
}

TEST_CASE("region split covers the vocabulary") {
  const EmbeddingDataset ds = grid(2, {"Africa", "Europe"}, 3);
  const auto split = split_by_region(ds, {"Africa", "Europe", "WestAsia"});
  REQUIRE(split.size() == 3);
  CHECK(split.at("Africa").size() == 6);
  CHECK(split.at("WestAsia").empty());
  try {
    split_by_region(ds, {"Africa"});
    FAIL("expected a stray-region error");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("Europe") != std::string::npos);
  }
}

TEST_CASE("country merge") {
  const EmbeddingDataset ds(1, {rec("a", "car", "", "Nigeria"), rec("b", "car", "", "Italy")});
  const std::map<std::string, std::string> map = {{"Nigeria", "Africa"}, {"Italy", "Europe"}};
  const EmbeddingDataset merged = merge_countries(ds, map);
  CHECK(merged[0].region == "Africa");
  CHECK(merged[1].region == "Europe");
  CHECK(merged[1].country == "Italy");

  const EmbeddingDataset stray(1, {rec("a", "car", "", "Narnia")});
  try {
    merge_countries(stray, map);
    FAIL("expected an unmapped-country error");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("Narnia") != std::string::npos);
  }
}

TEST_CASE("object distribution matching") {
  const EmbeddingDataset pool = grid(3, {""}, 20);
  const std::map<std::string, std::size_t> want = {{"o0", 5}, {"o1", 0}, {"o2", 20}};
  const EmbeddingDataset drawn = match_object_distribution(pool, want, SamplingPlan{9, std::nullopt});
  const auto counts = object_counts(drawn);
  CHECK(counts.at("o0") == 5);
  CHECK(counts.count("o1") == 0);
  CHECK(counts.at("o2") == 20);
  CHECK(is_subsequence(drawn, pool));
  CHECK(ids(match_object_distribution(pool, want, SamplingPlan{9, std::nullopt})) == ids(drawn));

  try {
    match_object_distribution(pool, {{"o0", 21}, {"o3", 1}}, SamplingPlan{9, std::nullopt});
    FAIL("expected a shortfall error");
  } catch (const PreconditionError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("o0") != std::string::npos);
    CHECK(msg.find("o3") != std::string::npos);
  }
}
