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

#include <algorithm>
#include <map>
#include <numeric>

#include "geodiv/errors.hpp"
#include "geodiv/prompt_builder.hpp"

using namespace geodiv;

namespace {

PromptSpec geode_spec() {
  PromptSpec spec;
  for (int i = 0; i < 27; ++i) spec.objects.push_back("object" + std::to_string(i));
  spec.regions = {"Africa", "Americas", "EastAsia", "Europe", "SouthEastAsia", "WestAsia"};
  for (const auto& region : spec.regions) {
    spec.countries_per_region[region] = {region + "-c1", region + "-c2", region + "-c3", region + "-c4"};
  }
  spec.countries_per_region["Africa"] = {"Nigeria", "Egypt", "South Africa", "Kenya"};
  spec.per_object_region = 180;
  return spec;
}

std::size_t total(const std::map<PromptCell, std::size_t>& counts) {
  std::size_t n = 0;
  for (const auto& [cell, c] : counts) n += c;
  return n;
}

}  // namespace

TEST_CASE("template expansion") {
  CHECK(expand_template(PromptKind::kObjectInRegion, "stove", "Europe") == "stove in Europe");
  CHECK(expand_template(PromptKind::kObject, "stove") == "stove");
  CHECK(expand_template(PromptKind::kObjectInCountry, "car", "Nigeria") == "car in Nigeria");
  CHECK_THROWS_AS(expand_template(PromptKind::kNone, "car"), ConfigError);
}

TEST_CASE("GeoDE-shaped build sizes") {
  const PromptSpec spec = geode_spec();
  for (PromptKind kind : {PromptKind::kObject, PromptKind::kObjectInRegion, PromptKind::kObjectInCountry}) {
    const auto prompts = build_prompts(spec, kind);
    CHECK(prompts.size() == 29160);
    CHECK(total(expected_counts(spec, kind)) == prompts.size());
  }
  CHECK(expected_counts(spec, PromptKind::kObjectInRegion).size() == 162);
}

TEST_CASE("country split is even across the top three countries") {
  const PromptSpec spec = geode_spec();
  const auto counts = expected_counts(spec, PromptKind::kObjectInCountry);
  CHECK(counts.size() == 162 * 3);
  for (const auto& [cell, n] : counts) CHECK(n == 60);
  CHECK(counts.count({"object0", "Africa", "Kenya"}) == 0);
  CHECK(counts.at({"object0", "Africa", "Nigeria"}) == 60);
}

TEST_CASE("remainders go to earlier countries") {
  PromptSpec spec;
  spec.objects = {"car"};
  spec.regions = {"Africa"};
  spec.countries_per_region["Africa"] = {"Nigeria", "Egypt", "South Africa"};
  spec.per_object_region = 5;
  const auto counts = expected_counts(spec, PromptKind::kObjectInCountry);
  CHECK(counts.at({"car", "Africa", "Nigeria"}) == 2);
  CHECK(counts.at({"car", "Africa", "Egypt"}) == 2);
  CHECK(counts.at({"car", "Africa", "South Africa"}) == 1);

  for (std::size_t per_cell = 1; per_cell < 40; ++per_cell) {
    spec.per_object_region = per_cell;
    std::vector<std::size_t> shares;
    for (const auto& [cell, n] : expected_counts(spec, PromptKind::kObjectInCountry)) shares.push_back(n);
    CHECK(std::accumulate(shares.begin(), shares.end(), std::size_t{0}) == per_cell);
    if (shares.size() == 3) {
      CHECK(*std::max_element(shares.begin(), shares.end()) - *std::min_element(shares.begin(), shares.end()) <= 1);
    }
  }
}

TEST_CASE("object pools") {
  PromptSpec spec = geode_spec();
  auto shared = expected_counts(spec, PromptKind::kObject);
  CHECK(shared.size() == 27);
  CHECK(shared.at({"object3", "", ""}) == 180 * 6);

  spec.flat_object_count = 100;
  CHECK(expected_counts(spec, PromptKind::kObject).at({"object3", "", ""}) == 100);

  spec.flat_object_count.reset();
  spec.object_pool = ObjectPool::kPerRegion;
  const auto per_region = expected_counts(spec, PromptKind::kObject);
  CHECK(per_region.size() == 162);
  CHECK(per_region.at({"object3", "Europe", ""}) == 180);
  const auto prompts = build_prompts(spec, PromptKind::kObject);
  CHECK(prompts.front().prompt_text == "object0");
  CHECK(prompts.front().region == "Africa");
}

TEST_CASE("original-distribution cell counts") {
  PromptSpec spec;
  spec.objects = {"car", "stove"};
  spec.regions = {"Africa", "Europe"};
  spec.cell_counts = std::map<std::pair<std::string, std::string>, std::size_t>{
      {{"car", "Africa"}, 7}, {{"stove", "Europe"}, 3}, {{"stove", "Africa"}, 0}};
  const auto counts = expected_counts(spec, PromptKind::kObjectInRegion);
  CHECK(counts.size() == 2);
  CHECK(total(counts) == 10);
  CHECK(expected_counts(spec, PromptKind::kObject).at({"car", "", ""}) == 7);

  spec.cell_counts->insert({{"bicycle", "Africa"}, 1});
  CHECK_THROWS_AS(expected_counts(spec, PromptKind::kObjectInRegion), ConfigError);
}

TEST_CASE("replicate indices and template fidelity") {
  const PromptSpec spec = geode_spec();
  for (PromptKind kind : {PromptKind::kObject, PromptKind::kObjectInRegion, PromptKind::kObjectInCountry}) {
    const auto prompts = build_prompts(spec, kind);
    const auto counts = expected_counts(spec, kind);
    std::map<PromptCell, std::size_t> seen;
    for (const PromptRecord& p : prompts) {
      const PromptCell cell{p.object, p.region, p.country.value_or("")};
      CHECK(p.replicate_index == seen[cell]++);
      CHECK(p.replicate_index < counts.at(cell));
      const auto parsed = parse_prompt(p.prompt_text, kind, spec);
      REQUIRE(parsed);
      CHECK(parsed->object == p.object);
      const std::string place = kind == PromptKind::kObjectInCountry ? p.country.value_or("")
                                : kind == PromptKind::kObjectInRegion ? p.region
                                                                      : "";
      CHECK(parsed->place == place);
    }
  }
  CHECK_FALSE(parse_prompt("stove in Narnia", PromptKind::kObjectInRegion, spec));
}

TEST_CASE("country prompts need countries") {
  PromptSpec spec;
  spec.objects = {"car"};
  spec.regions = {"Africa", "Europe"};
  spec.countries_per_region["Africa"] = {"Nigeria"};
  spec.per_object_region = 3;
  CHECK_THROWS_AS(build_prompts(spec, PromptKind::kObjectInCountry), ConfigError);
  CHECK(build_prompts(spec, PromptKind::kObjectInRegion).size() == 6);
  spec.objects.clear();
  CHECK_THROWS_AS(build_prompts(spec, PromptKind::kObjectInRegion), ConfigError);
}

TEST_CASE("prompt list round trip") {
  PromptSpec spec;
  spec.objects = {"hand soap", "tab\there"};
  spec.regions = {"Africa"};
  spec.countries_per_region["Africa"] = {"C\xC3\xB4te d'Ivoire", "Egypt"};
  spec.per_object_region = 3;
  const auto prompts = build_prompts(spec, PromptKind::kObjectInCountry);
  const std::string text = "# comment line\n" + serialize_prompts(prompts);
  CHECK(parse_prompts(text) == prompts);
  CHECK_THROWS_AS(parse_prompts("not a header\n"), DataError);
}
