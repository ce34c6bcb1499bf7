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

#include <bit>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <limits>
#include <random>

#include "geodiv/checksum.hpp"
#include "geodiv/embedding_store.hpp"
#include "geodiv/errors.hpp"
#include "random_data.hpp"
#include "temp_dir.hpp"

using namespace geodiv;

namespace {

EmbeddingRecord rec(std::string id, std::vector<float> v, std::string object = "stove", std::string region = "Europe") {
  EmbeddingRecord r;
  r.id = std::move(id);
  r.vector = std::move(v);
  r.object = std::move(object);
  r.region = std::move(region);
  return r;
}

std::string float_bytes(std::initializer_list<float> values) {
  static_assert(std::endian::native == std::endian::little);
  std::string out;
  for (float f : values) {
    char buf[4];
    std::memcpy(buf, &f, 4);
    out.append(buf, 4);
  }
  return out;
}

EmbeddingDataset golden() {
  std::vector<EmbeddingRecord> records;
  records.push_back(rec("a", {1.0f, -2.5f, 0.0f}));
  EmbeddingRecord g = rec("g\t1", {0.5f, 3.0e-8f, -0.0f}, "car", "Africa");
  g.source = Source::kGenerated;
  g.prompt_kind = PromptKind::kObjectInCountry;
  g.country = "C\xC3\xB4te d'Ivoire";
  g.prompt_text = "car in C\xC3\xB4te d'Ivoire";
  records.push_back(g);
  return EmbeddingDataset(3, std::move(records), "golden");
}

std::string error_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("serialization matches the golden byte layout") {
  const std::string expected =
      std::string(R"({"magic":"GEODIVE-EMB/1","dim":3,"count":2,"label":"golden",)") +
      R"("columns":["id","source","object","region","country","prompt_kind","prompt_text"]})" + "\n" +
      "a\treal\tstove\tEurope\t\tnone\t\n" +
      "g\\t1\tgenerated\tcar\tAfrica\tC\xC3\xB4te d'Ivoire\tobject_in_country\tcar in C\xC3\xB4te d'Ivoire\n" +
      float_bytes({1.0f, -2.5f, 0.0f, 0.5f, 3.0e-8f, -0.0f});
  CHECK(serialize_dataset(golden()) == expected);
  CHECK(read_file(GEODIV_FIXTURE_DIR "/golden_small.emb") == expected);
}

TEST_CASE("round trip preserves every field and bit") {
  const EmbeddingDataset ds = golden();
  const EmbeddingDataset back = parse_dataset(serialize_dataset(ds));
  CHECK(back == ds);
  CHECK(back.label() == "golden");
  CHECK(std::signbit(back[1].vector[2]));
  CHECK(back[1].id == "g\t1");
  CHECK(back[0].country == std::nullopt);
  CHECK(dataset_checksum(back) == dataset_checksum(ds));
  CHECK(dataset_checksum(ds) == sha256_hex(serialize_dataset(ds)));
}

TEST_CASE("round trip of random datasets through files") {
  std::mt19937_64 rng(5);
  testdata::TempDir dir;
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t dim = 1 + trial % 7;
    auto points = testdata::random_points(rng, 1 + static_cast<std::size_t>(trial) * 3, dim, testdata::Shape::kUniform);
    const EmbeddingDataset ds = testdata::real(points);
    write_dataset(ds, dir / "x.emb");
    CHECK(load_dataset(dir / "x.emb") == ds);
  }
}

TEST_CASE("columns may appear in any order") {
  const std::string bytes =
      std::string(R"({"magic":"GEODIVE-EMB/1","dim":1,"count":1,)") +
      R"("columns":["prompt_text","prompt_kind","country","region","object","source","id"]})" + "\n" +
      "\tnone\t\tEurope\tstove\treal\tz\n" + float_bytes({2.0f});
  const EmbeddingDataset ds = parse_dataset(bytes);
  REQUIRE(ds.size() == 1);
  CHECK(ds[0].id == "z");
  CHECK(ds[0].object == "stove");
  CHECK(ds[0].region == "Europe");
  CHECK(ds[0].vector[0] == 2.0f);
}

TEST_CASE("metadata is NFC normalized") {
  // "e" + combining acute accent composes to U+00E9.
  const EmbeddingDataset ds(1, {rec("x", {1.0f}, "cafe\xCC\x81", "Europe")});
  CHECK(ds[0].object == "caf\xC3\xA9");
}

TEST_CASE("non-finite values are rejected with the record index") {
  const float nan = std::numeric_limits<float>::quiet_NaN();
  const std::string msg = error_of([&] { EmbeddingDataset(2, {rec("a", {0.0f, 1.0f}), rec("b", {nan, 1.0f})}); });
  CHECK(msg.find("record 1") != std::string::npos);
  CHECK(msg.find("non-finite") != std::string::npos);
  CHECK_THROWS_AS(EmbeddingDataset(1, {rec("a", {std::numeric_limits<float>::infinity()})}), DataError);
}

TEST_CASE("duplicate ids name the id") {
  const std::string msg = error_of([] { EmbeddingDataset(1, {rec("a", {0.0f}), rec("b", {1.0f}), rec("a", {2.0f})}); });
  CHECK(msg.find("\"a\"") != std::string::npos);
  CHECK(msg.find("record 2") != std::string::npos);
}

TEST_CASE("structural record errors") {
  CHECK_THROWS_AS(EmbeddingDataset(2, {rec("a", {0.0f})}), DataError);
  CHECK_THROWS_AS(EmbeddingDataset(1, {rec("", {0.0f})}), DataError);
  CHECK_THROWS_AS(EmbeddingDataset(0, {}), DataError);
  EmbeddingRecord r = rec("a", {0.0f});
  r.prompt_kind = PromptKind::kObjectInCountry;
  CHECK_THROWS_AS(EmbeddingDataset(1, {r}), DataError);
}

TEST_CASE("malformed files") {
  const std::string good = serialize_dataset(golden());
  SUBCASE("bad magic") {
    std::string bad = good;
    bad.replace(bad.find("EMB/1"), 5, "EMB/2");
    CHECK(error_of([&] { parse_dataset(bad); }).find("malformed header") != std::string::npos);
  }
  SUBCASE("truncated payload reports the incomplete record") {
    const std::string bad = good.substr(0, good.size() - 5);
    const std::string msg = error_of([&] { parse_dataset(bad); });
    CHECK(msg.find("dimension mismatch") != std::string::npos);
    CHECK(msg.find("first incomplete record is 1") != std::string::npos);
  }
  SUBCASE("extra payload") { CHECK_THROWS_AS(parse_dataset(good + "xxxx"), DataError); }
  SUBCASE("no header line") { CHECK_THROWS_AS(parse_dataset("{}"), DataError); }
  SUBCASE("unknown column") {
    std::string bad = good;
    bad.replace(bad.find("\"country\""), 9, "\"nation\"");
    CHECK(error_of([&] { parse_dataset(bad); }).find("unknown column") != std::string::npos);
  }
  SUBCASE("missing file") { CHECK_THROWS_AS(load_dataset("/nonexistent/geodiv.emb"), IoError); }
}

TEST_CASE("slicing keeps order and labels") {
  std::vector<EmbeddingRecord> records;
  for (int i = 0; i < 6; ++i) {
    records.push_back(rec("r" + std::to_string(i), {static_cast<float>(i)}, i % 2 ? "car" : "stove",
                          i < 3 ? "Africa" : "Europe"));
  }
  const EmbeddingDataset ds(1, records, "all");
  const EmbeddingDataset cars = slice(ds, RecordFilter{.object = "car"});
  REQUIRE(cars.size() == 3);
  CHECK(cars[0].id == "r1");
  CHECK(cars[2].id == "r5");
  const EmbeddingDataset cell = slice(ds, RecordFilter{.object = "stove", .region = "Europe"});
  REQUIRE(cell.size() == 1);
  CHECK(cell[0].id == "r4");
  CHECK(slice(ds, RecordFilter{.source = Source::kGenerated}).empty());
}
