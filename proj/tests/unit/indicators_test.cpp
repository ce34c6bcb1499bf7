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

#include <fstream>
#include <functional>
#include <nlohmann/json.hpp>

#include "geodiv/checksum.hpp"
#include "geodiv/errors.hpp"
#include "geodiv/indicators.hpp"
#include "temp_dir.hpp"

using namespace geodiv;
using nlohmann::json;

namespace {

const std::filesystem::path kFixtures = GEODIV_FIXTURE_DIR;

struct Spec {
  std::string id;
  std::string object;
  std::string region;
  float x;
  std::optional<std::string> country = std::nullopt;
};

void write(const std::filesystem::path& path, const std::vector<Spec>& specs, Source source,
           PromptKind kind = PromptKind::kNone) {
  std::vector<EmbeddingRecord> records;
  for (const Spec& s : specs) {
    EmbeddingRecord r;
    r.id = s.id;
    r.vector = {s.x, 0.5f * s.x};
    r.object = s.object;
    r.region = s.region;
    r.country = s.country;
    r.source = source;
    r.prompt_kind = kind;
    records.push_back(std::move(r));
  }
  write_dataset(EmbeddingDataset(2, std::move(records)), path);
}

std::vector<Spec> cell(const std::string& object, const std::string& region, int n, float base = 0.0f) {
  std::vector<Spec> out;
  for (int i = 0; i < n; ++i) {
    out.push_back({object + "/" + region + "/" + std::to_string(i), object, region, base + static_cast<float>(i)});
  }
  return out;
}

std::vector<Spec> concat(std::initializer_list<std::vector<Spec>> parts) {
  std::vector<Spec> out;
  for (const auto& p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

RunConfig config(const testdata::TempDir& dir, json doc) {
  std::ofstream(dir / "config.json") << doc.dump();
  return load_run_config(dir / "config.json");
}

std::string message_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("self evaluation fixture scores one everywhere") {
  const RunConfig cfg = load_run_config(kFixtures / "self_eval" / "config.json");
  const IndicatorReport report = full_report(cfg);
  REQUIRE(report.region_indicator);
  REQUIRE(report.object_region_indicator);
  REQUIRE(report.consistency_indicator);
  CHECK(report.region_indicator->size() == 2);
  CHECK(report.object_region_indicator->size() == 4);
  for (const auto* cells : {&*report.region_indicator, &*report.object_region_indicator}) {
    for (const MetricCell& c : *cells) {
      REQUIRE(c.metrics);
      CHECK(c.metrics->precision.value == 1.0);
      CHECK(c.metrics->coverage.value == 1.0);
    }
  }
  for (const ConsistencyGroup& g : report.consistency_indicator->groups) CHECK(g.value == 1.0);
}

TEST_CASE("disparity fixture separates the regions") {
  const auto cells = region_indicator(load_run_config(kFixtures / "disparity" / "config.json"));
  REQUIRE(cells.size() == 2);
  CHECK(cells[0].region == "RegionA");
  CHECK(cells[0].metrics->precision.value == 0.0);
  CHECK(cells[0].metrics->coverage.value == 0.0);
  CHECK(cells[1].metrics->precision.value == 1.0);
  CHECK(cells[1].metrics->coverage.value == 1.0);
}

TEST_CASE("report bytes match the golden files") {
  for (const char* name : {"self_eval", "disparity", "seed_invariance"}) {
    CAPTURE(name);
    const IndicatorReport report = full_report(load_run_config(kFixtures / name / "config.json"));
    CHECK(report_json(report) == read_file(kFixtures / "golden" / (std::string(name) + ".json")));
  }
}

TEST_CASE("GeoDE-shaped fixture yields 162 object-region cells") {
  const RunConfig cfg = load_run_config(kFixtures / "geode_shape" / "config.json");
  const auto cells = object_region_indicator(cfg);
  CHECK(cells.size() == 162);
  for (const MetricCell& c : cells) {
    CHECK(c.metrics);
    CHECK(c.n_real == 5);
    CHECK(c.n_gen == 6);
  }
}

TEST_CASE("results do not depend on the worker count") {
  RunConfig cfg = load_run_config(kFixtures / "geode_shape" / "config.json");
  const std::string serial = report_json(full_report(cfg));
  cfg.workers = 4;
  CHECK(report_json(full_report(cfg)) == serial);
}

TEST_CASE("a cell with exactly k reference records is skipped") {
  testdata::TempDir dir;
  write(dir / "ref.emb", concat({cell("car", "Africa", 3), cell("stove", "Africa", 6)}), Source::kReal);
  write(dir / "gen.emb", concat({cell("car", "Africa", 4), cell("stove", "Africa", 4)}), Source::kGenerated,
        PromptKind::kObjectInRegion);
  const RunConfig cfg = config(dir, {{"regions", {"Africa"}}, {"inputs", {{"reference", "ref.emb"}, {"generated", "gen.emb"}}}});
  const auto cells = object_region_indicator(cfg);
  REQUIRE(cells.size() == 2);
  CHECK(*cells[0].object == "car");
  CHECK_FALSE(cells[0].metrics);
  CHECK(cells[0].skip_reason);
  CHECK(cells[1].metrics);
  const json j = json::parse(report_json(IndicatorReport{nlohmann::ordered_json::object(), std::nullopt, cells, std::nullopt}));
  CHECK(j["object_region_indicator"]["Africa"]["car"]["status"] == "skipped");
}

TEST_CASE("cells without generations are skipped") {
  testdata::TempDir dir;
  write(dir / "ref.emb", concat({cell("car", "Africa", 6), cell("stove", "Africa", 6)}), Source::kReal);
  write(dir / "gen.emb", cell("stove", "Africa", 4), Source::kGenerated, PromptKind::kObjectInRegion);
  const RunConfig cfg = config(dir, {{"regions", {"Africa"}}, {"inputs", {{"reference", "ref.emb"}, {"generated", "gen.emb"}}}});
  const auto cells = object_region_indicator(cfg);
  REQUIRE(cells.size() == 2);
  CHECK_FALSE(cells[0].metrics);
  CHECK(cells[0].n_gen == 0);
}

TEST_CASE("region indicator preconditions") {
  testdata::TempDir dir;
  write(dir / "ref.emb", concat({cell("car", "Africa", 6), cell("car", "Europe", 3)}), Source::kReal);
  write(dir / "gen.emb", concat({cell("car", "Africa", 4), cell("car", "Europe", 4)}), Source::kGenerated,
        PromptKind::kObjectInRegion);
  const RunConfig cfg = config(dir, {{"regions", {"Africa", "Europe"}}, {"inputs", {{"reference", "ref.emb"}, {"generated", "gen.emb"}}}});
  CHECK(message_of([&] { region_indicator(cfg); }).find("Europe") != std::string::npos);
  CHECK_THROWS_AS(region_indicator(cfg), PreconditionError);
}

TEST_CASE("unknown region labels are data errors") {
  testdata::TempDir dir;
  write(dir / "ref.emb", concat({cell("car", "Africa", 6), cell("car", "Atlantis", 6)}), Source::kReal);
  write(dir / "gen.emb", cell("car", "Africa", 4), Source::kGenerated, PromptKind::kObjectInRegion);
  const RunConfig cfg = config(dir, {{"regions", {"Africa"}}, {"inputs", {{"reference", "ref.emb"}, {"generated", "gen.emb"}}}});
  const std::string msg = message_of([&] { region_indicator(cfg); });
  CHECK(msg.find("Atlantis") != std::string::npos);
  CHECK_THROWS_AS(region_indicator(cfg), DataError);
}

TEST_CASE("country prompts are merged into regions") {
  testdata::TempDir dir;
  write(dir / "ref.emb", cell("car", "Africa", 6), Source::kReal);
  std::vector<Spec> gen = cell("car", "", 4);
  for (auto& s : gen) s.country = "Nigeria";
  write(dir / "gen.emb", gen, Source::kGenerated, PromptKind::kObjectInCountry);
  json doc = {{"regions", {"Africa"}},
              {"prompt_kind", "object_in_country"},
              {"countries_per_region", {{"Africa", {"Nigeria"}}}},
              {"inputs", {{"reference", "ref.emb"}, {"generated", "gen.emb"}}}};
  const auto cells = region_indicator(config(dir, doc));
  REQUIRE(cells.size() == 1);
  CHECK(cells[0].metrics->precision.value == 1.0);

  gen.back().country = "Narnia";
  write(dir / "gen.emb", gen, Source::kGenerated, PromptKind::kObjectInCountry);
  CHECK(message_of([&] { region_indicator(config(dir, doc)); }).find("Narnia") != std::string::npos);
}

TEST_CASE("object prompts are sampled to the reference object distribution") {
  testdata::TempDir dir;
  write(dir / "ref.emb", concat({cell("car", "Africa", 6), cell("stove", "Africa", 4), cell("car", "Europe", 5)}),
        Source::kReal);
  write(dir / "gen.emb", concat({cell("car", "", 20), cell("stove", "", 20)}), Source::kGenerated, PromptKind::kObject);
  json doc = {{"regions", {"Africa", "Europe"}},
              {"prompt_kind", "object"},
              {"seed", 3},
              {"inputs", {{"reference", "ref.emb"}, {"generated", "gen.emb"}}}};
  const auto cells = region_indicator(config(dir, doc));
  REQUIRE(cells.size() == 2);
  CHECK(cells[0].n_gen == 10);
  CHECK(cells[1].n_gen == 5);
  CHECK(cells[0].sample_sha256);
  doc["seed"] = 4;
  CHECK(region_indicator(config(dir, doc))[0].sample_sha256 != cells[0].sample_sha256);

  write(dir / "gen.emb", concat({cell("car", "", 3), cell("stove", "", 20)}), Source::kGenerated, PromptKind::kObject);
  CHECK_THROWS_AS(region_indicator(config(dir, doc)), PreconditionError);
}

TEST_CASE("consistency needs every object's text embedding") {
  testdata::TempDir dir;
  write(dir / "joint.emb", concat({cell("car", "Africa", 3, 1.0f), cell("stove", "Africa", 3, 1.0f)}),
        Source::kGenerated, PromptKind::kObjectInRegion);
  write(dir / "text.emb", {{"car", "car", "", 1.0f}}, Source::kReal, PromptKind::kObject);
  const RunConfig cfg = config(
      dir, {{"regions", {"Africa"}}, {"inputs", {{"generated_joint", "joint.emb"}, {"text_embeddings", "text.emb"}}}});
  const std::string msg = message_of([&] { object_consistency_indicator(cfg); });
  CHECK(msg.find("stove") != std::string::npos);
}

TEST_CASE("config echo carries input checksums") {
  const RunConfig cfg = load_run_config(kFixtures / "disparity" / "config.json");
  const EvaluationInputs inputs = load_inputs(cfg, InputNeeds{true, true, false});
  const auto echo = config_echo(cfg, inputs);
  CHECK(echo["k"] == 3);
  CHECK(echo["inputs"]["reference"]["sha256"] == sha256_file_hex(kFixtures / "disparity" / "reference.emb"));
  CHECK(echo["inputs"]["reference"]["file"] == "reference.emb");
}
