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

// Writes the synthetic GEODIVE-EMB/1 fixtures used by the test suites.
//
//   geodiv_make_fixtures <output-dir>
//
// Output is byte-for-byte deterministic; tests/fixtures holds a checked-in
// copy and the fixtures_up_to_date test regenerates and compares it.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <nlohmann/json.hpp>
#include <random>
#include <string>
#include <vector>

#include "geodiv/checksum.hpp"
#include "geodiv/embedding_store.hpp"

namespace {

namespace fs = std::filesystem;
using geodiv::EmbeddingDataset;
using geodiv::EmbeddingRecord;
using geodiv::PromptKind;
using geodiv::Source;
using nlohmann::ordered_json;

// 24-bit uniform floats in [0, 1) from the standard-defined mt19937_64 stream.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  float unit() { return static_cast<float>(engine_() >> 40) * 0x1p-24f; }
  std::vector<float> point(std::size_t dim, float offset = 0.0f) {
    std::vector<float> v(dim);
    for (float& x : v) x = unit() + offset;
    return v;
  }

 private:
  std::mt19937_64 engine_;
};

const std::vector<std::string> kGeodeObjects = {
    "bag", "bicycle", "boat", "bus", "car", "chair", "cleaning equipment", "cooking pot", "dog",
    "dustbin", "fence", "front door", "hairbrush", "hand soap", "hat", "house", "jug", "light fixture",
    "light switch", "medicine", "plate of food", "spices", "stall", "stove", "toothbrush", "tree",
    "wheelbarrow"};
const std::vector<std::string> kGeodeRegions = {"Africa", "Americas", "EastAsia",
                                                "Europe", "SouthEastAsia", "WestAsia"};
const std::vector<std::pair<std::string, std::vector<std::string>>> kGeodeCountries = {
    {"Africa", {"Nigeria", "Egypt", "South Africa"}},
    {"Americas", {"Colombia", "Mexico", "Argentina"}},
    {"EastAsia", {"China", "Japan", "South Korea"}},
    {"Europe", {"Italy", "Romania", "Spain"}},
    {"SouthEastAsia", {"Indonesia", "Philippines", "Thailand"}},
    {"WestAsia", {"Saudi Arabia", "Turkey", "Jordan"}},
};

EmbeddingRecord record(std::string id, std::vector<float> v, std::string object, std::string region,
                       Source source, PromptKind kind = PromptKind::kNone,
                       std::optional<std::string> country = std::nullopt,
                       std::optional<std::string> prompt = std::nullopt) {
  EmbeddingRecord r;
  r.id = std::move(id);
  r.vector = std::move(v);
  r.object = std::move(object);
  r.region = std::move(region);
  r.country = std::move(country);
  r.prompt_kind = kind;
  r.prompt_text = std::move(prompt);
  r.source = source;
  return r;
}

void write_json(const fs::path& path, const ordered_json& doc) {
  geodiv::write_file_atomic(path, doc.dump(2) + "\n");
}

void golden_small(const fs::path& dir) {
  std::vector<EmbeddingRecord> records;
  records.push_back(record("a", {1.0f, -2.5f, 0.0f}, "stove", "Europe", Source::kReal));
  records.push_back(record("g\t1", {0.5f, 3.0e-8f, -0.0f}, "car", "Africa", Source::kGenerated,
                           PromptKind::kObjectInCountry, "C\xC3\xB4te d'Ivoire", "car in C\xC3\xB4te d'Ivoire"));
  geodiv::write_dataset(EmbeddingDataset(3, std::move(records), "golden"), dir / "golden_small.emb");
}

// Generated copies of reference points, one record per reference record.
EmbeddingDataset generated_copy(const EmbeddingDataset& ref, const std::string& label) {
  std::vector<EmbeddingRecord> out;
  for (const EmbeddingRecord& r : ref.records()) {
    out.push_back(record("g-" + r.id, r.vector, r.object, r.region, Source::kGenerated, PromptKind::kObjectInRegion,
                         std::nullopt, r.object + " in " + r.region));
  }
  return EmbeddingDataset(ref.dim(), std::move(out), label);
}

// Prompt-text embeddings: one bare "{object}" record per object plus one
// regional prompt that the consistency indicator must ignore.
EmbeddingDataset text_embeddings(const std::vector<std::pair<std::string, std::vector<float>>>& prototypes,
                                 const std::string& extra_region) {
  std::vector<EmbeddingRecord> out;
  for (const auto& [object, v] : prototypes) {
    out.push_back(record(object, v, object, "", Source::kReal, PromptKind::kObject, std::nullopt, object));
  }
  const auto& [object, v] = prototypes.front();
  std::vector<float> other(v.rbegin(), v.rend());
  const std::string prompt = object + " in " + extra_region;
  out.push_back(record(prompt, other, object, extra_region, Source::kReal, PromptKind::kObjectInRegion, std::nullopt,
                       prompt));
  return EmbeddingDataset(v.size(), std::move(out), "text");
}

void self_eval(const fs::path& dir) {
  fs::create_directories(dir);
  Rng rng(11);
  const std::vector<std::string> regions = {"Africa", "Europe"};
  const std::vector<std::string> objects = {"car", "stove"};
  std::vector<EmbeddingRecord> ref;
  for (const auto& region : regions) {
    for (const auto& object : objects) {
      for (int i = 0; i < 8; ++i) {
        ref.push_back(record("r-" + region + "-" + object + "-" + std::to_string(i), rng.point(4), object, region,
                             Source::kReal));
      }
    }
  }
  const EmbeddingDataset reference(4, std::move(ref), "self-eval reference");
  geodiv::write_dataset(reference, dir / "reference.emb");
  geodiv::write_dataset(generated_copy(reference, "self-eval generated"), dir / "generated.emb");

  std::vector<std::pair<std::string, std::vector<float>>> prototypes;
  for (const auto& object : objects) prototypes.emplace_back(object, rng.point(3, 0.25f));
  std::vector<EmbeddingRecord> joint;
  for (const EmbeddingRecord& r : reference.records()) {
    const auto& proto = r.object == "car" ? prototypes[0].second : prototypes[1].second;
    joint.push_back(record("g-" + r.id, proto, r.object, r.region, Source::kGenerated, PromptKind::kObjectInRegion,
                           std::nullopt, r.object + " in " + r.region));
  }
  geodiv::write_dataset(EmbeddingDataset(3, std::move(joint), "self-eval joint"), dir / "generated_joint.emb");
  geodiv::write_dataset(text_embeddings(prototypes, "Africa"), dir / "text.emb");

  ordered_json cfg;
  cfg["k"] = 3;
  cfg["seed"] = 7;
  cfg["prompt_kind"] = "object_in_region";
  cfg["regions"] = regions;
  cfg["objects"] = objects;
  cfg["inputs"] = {{"reference", "reference.emb"},
                   {"generated", "generated.emb"},
                   {"generated_joint", "generated_joint.emb"},
                   {"text_embeddings", "text.emb"}};
  cfg["output_dir"] = "out";
  write_json(dir / "config.json", cfg);
}

void disparity(const fs::path& dir) {
  fs::create_directories(dir);
  Rng rng(23);
  const std::vector<std::string> regions = {"RegionA", "RegionB"};
  const std::vector<std::string> objects = {"car", "stove"};
  std::vector<EmbeddingRecord> ref;
  std::vector<EmbeddingRecord> gen;
  for (const auto& region : regions) {
    for (const auto& object : objects) {
      for (int i = 0; i < 10; ++i) {
        const std::string id = region + "-" + object + "-" + std::to_string(i);
        std::vector<float> v = rng.point(4);
        std::vector<float> g = v;
        // Data lie in the unit cube; region A generations move 10 units along every axis.
        if (region == "RegionA") {
          for (float& x : g) x += 10.0f;
        }
        ref.push_back(record("r-" + id, v, object, region, Source::kReal));
        gen.push_back(record("g-" + id, g, object, region, Source::kGenerated, PromptKind::kObjectInRegion,
                             std::nullopt, object + " in " + region));
      }
    }
  }
  geodiv::write_dataset(EmbeddingDataset(4, std::move(ref), "disparity reference"), dir / "reference.emb");
  geodiv::write_dataset(EmbeddingDataset(4, std::move(gen), "disparity generated"), dir / "generated.emb");

  ordered_json cfg;
  cfg["k"] = 3;
  cfg["seed"] = 1;
  cfg["prompt_kind"] = "object_in_region";
  cfg["regions"] = regions;
  cfg["inputs"] = {{"reference", "reference.emb"}, {"generated", "generated.emb"}};
  cfg["output_dir"] = "out";
  write_json(dir / "config.json", cfg);
}

// Every record of an object shares one vector, so any draw of the right
// size reproduces the reference manifold exactly.
void seed_invariance(const fs::path& dir) {
  fs::create_directories(dir);
  Rng rng(37);
  const std::vector<std::string> regions = {"Africa", "Europe"};
  const std::vector<std::string> objects = {"car", "chair", "stove"};
  std::vector<std::pair<std::string, std::vector<float>>> prototypes;
  std::vector<std::pair<std::string, std::vector<float>>> text_prototypes;
  for (const auto& object : objects) {
    prototypes.emplace_back(object, rng.point(4));
    text_prototypes.emplace_back(object, rng.point(3, 0.25f));
  }
  std::vector<EmbeddingRecord> ref;
  for (const auto& region : regions) {
    for (const auto& [object, proto] : prototypes) {
      for (int i = 0; i < 6; ++i) {
        ref.push_back(record("r-" + region + "-" + object + "-" + std::to_string(i), proto, object, region,
                             Source::kReal));
      }
    }
  }
  std::vector<EmbeddingRecord> gen;
  std::vector<EmbeddingRecord> joint;
  for (std::size_t o = 0; o < objects.size(); ++o) {
    for (int i = 0; i < 30; ++i) {
      const std::string id = "g-" + objects[o] + "-" + std::to_string(i);
      gen.push_back(record(id, prototypes[o].second, objects[o], "", Source::kGenerated, PromptKind::kObject,
                           std::nullopt, objects[o]));
      joint.push_back(record(id, text_prototypes[o].second, objects[o], "", Source::kGenerated, PromptKind::kObject,
                             std::nullopt, objects[o]));
    }
  }
  geodiv::write_dataset(EmbeddingDataset(4, std::move(ref), "seed reference"), dir / "reference.emb");
  geodiv::write_dataset(EmbeddingDataset(4, std::move(gen), "seed generated"), dir / "generated.emb");
  geodiv::write_dataset(EmbeddingDataset(3, std::move(joint), "seed joint"), dir / "generated_joint.emb");
  geodiv::write_dataset(text_embeddings(text_prototypes, "Europe"), dir / "text.emb");

  ordered_json cfg;
  cfg["k"] = 3;
  cfg["seed"] = 7;
  cfg["prompt_kind"] = "object";
  cfg["object_pool"] = "shared";
  cfg["reference_per_cell"] = 5;
  cfg["regions"] = regions;
  cfg["inputs"] = {{"reference", "reference.emb"},
                   {"generated", "generated.emb"},
                   {"generated_joint", "generated_joint.emb"},
                   {"text_embeddings", "text.emb"}};
  cfg["output_dir"] = "out";
  write_json(dir / "config.json", cfg);
}

// 27 objects x 6 regions, 6 reference and 6 country-prompted generated
// records per cell, plus the prompt-construction settings of the full
// balanced benchmark (180 per cell, top three countries per region).
void geode_shape(const fs::path& dir) {
  fs::create_directories(dir);
  Rng rng(53);
  std::vector<EmbeddingRecord> ref;
  std::vector<EmbeddingRecord> gen;
  for (const auto& [region, countries] : kGeodeCountries) {
    for (const auto& object : kGeodeObjects) {
      for (int i = 0; i < 6; ++i) {
        const std::string id = region + "/" + object + "/" + std::to_string(i);
        ref.push_back(record("r/" + id, rng.point(4), object, region, Source::kReal));
        const std::string& country = countries[static_cast<std::size_t>(i) % countries.size()];
        gen.push_back(record("g/" + id, rng.point(4), object, "", Source::kGenerated, PromptKind::kObjectInCountry,
                             country, object + " in " + country));
      }
    }
  }
  geodiv::write_dataset(EmbeddingDataset(4, std::move(ref), "geode-shaped reference"), dir / "reference.emb");
  geodiv::write_dataset(EmbeddingDataset(4, std::move(gen), "geode-shaped generated"), dir / "generated.emb");

  ordered_json countries = ordered_json::object();
  for (const auto& [region, list] : kGeodeCountries) countries[region] = list;
  ordered_json cfg;
  cfg["k"] = 3;
  cfg["seed"] = 2023;
  cfg["prompt_kind"] = "object_in_country";
  cfg["reference_per_cell"] = 5;
  cfg["regions"] = kGeodeRegions;
  cfg["objects"] = kGeodeObjects;
  cfg["countries_per_region"] = countries;
  cfg["inputs"] = {{"reference", "reference.emb"}, {"generated", "generated.emb"}};
  cfg["output_dir"] = "out";
  cfg["prompts"] = {{"per_object_region", 180},
                    {"countries_per_cell", 3},
                    {"kinds", {"object", "object_in_region", "object_in_country"}}};
  write_json(dir / "config.json", cfg);
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: geodiv_make_fixtures <output-dir>\n";
    return 2;
  }
  const fs::path root = argv[1];
  try {
    fs::create_directories(root);
    golden_small(root);
    self_eval(root / "self_eval");
    disparity(root / "disparity");
    seed_invariance(root / "seed_invariance");
    geode_shape(root / "geode_shape");
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return 1;
  }
  return 0;
}
