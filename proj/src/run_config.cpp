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

#include "geodiv/run_config.hpp"

#include <set>

#include "geodiv/checksum.hpp"
#include "geodiv/errors.hpp"

namespace geodiv {
namespace {

using nlohmann::json;

const std::set<std::string> kTopLevelKeys = {
    "k", "percentile", "tail_mode", "seed", "prompt_kind", "object_pool", "consistency_grouping",
    "workers", "regions", "objects", "country_map", "countries_per_region", "reference_per_cell",
    "inputs", "output_dir", "prompts"};
const std::set<std::string> kInputKeys = {"reference", "generated", "generated_joint", "text_embeddings"};
const std::set<std::string> kPromptKeys = {"per_object_region", "countries_per_cell", "flat_object_count",
                                           "cell_counts", "kinds"};

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.contains(key)) throw ConfigError("unknown key \"" + key + "\" in " + where);
  }
}

const json& require_object(const json& value, const std::string& where) {
  if (!value.is_object()) throw ConfigError(where + " must be an object");
  return value;
}

std::size_t as_count(const json& value, const std::string& key, bool positive) {
  if (!value.is_number_unsigned()) throw ConfigError("\"" + key + "\" must be a non-negative integer");
  const auto v = value.get<std::size_t>();
  if (positive && v == 0) throw ConfigError("\"" + key + "\" must be positive");
  return v;
}

std::string as_string(const json& value, const std::string& key) {
  if (!value.is_string()) throw ConfigError("\"" + key + "\" must be a string");
  return value.get<std::string>();
}

std::vector<std::string> as_string_list(const json& value, const std::string& key) {
  if (!value.is_array()) throw ConfigError("\"" + key + "\" must be a list of strings");
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (const auto& item : value) {
    out.push_back(as_string(item, key));
    if (!seen.insert(out.back()).second) throw ConfigError("\"" + key + "\" repeats \"" + out.back() + "\"");
  }
  return out;
}

template <typename Parse>
auto as_enum(const json& value, const std::string& key, Parse parse) {
  const std::string text = as_string(value, key);
  try {
    return parse(text);
  } catch (const Error& e) {
    throw ConfigError("\"" + key + "\": " + e.what());
  }
}

}  // namespace

RunConfig parse_run_config(const json& doc, const std::filesystem::path& base_dir) {
  require_object(doc, "configuration document");
  reject_unknown(doc, kTopLevelKeys, "configuration document");
  RunConfig cfg;

  if (doc.contains("k")) cfg.k = as_count(doc["k"], "k", true);
  if (doc.contains("percentile")) {
    if (!doc["percentile"].is_number()) throw ConfigError("\"percentile\" must be a number");
    cfg.percentile = doc["percentile"].get<double>();
    if (!(cfg.percentile > 0.0 && cfg.percentile < 100.0)) throw ConfigError("\"percentile\" must lie in (0, 100)");
  }
  if (doc.contains("tail_mode")) cfg.tail_mode = as_enum(doc["tail_mode"], "tail_mode", parse_tail_mode);
  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_unsigned()) throw ConfigError("\"seed\" must be a non-negative integer");
    cfg.seed = doc["seed"].get<std::uint64_t>();
  }
  if (doc.contains("prompt_kind")) {
    cfg.prompt_kind = as_enum(doc["prompt_kind"], "prompt_kind", parse_prompt_kind);
    if (cfg.prompt_kind == PromptKind::kNone) throw ConfigError("\"prompt_kind\" cannot be \"none\"");
  }
  if (doc.contains("object_pool")) cfg.object_pool = as_enum(doc["object_pool"], "object_pool", parse_object_pool);
  if (doc.contains("consistency_grouping")) {
    cfg.consistency_grouping =
        as_enum(doc["consistency_grouping"], "consistency_grouping", parse_consistency_grouping);
  }
  if (doc.contains("workers")) cfg.workers = as_count(doc["workers"], "workers", true);

  if (!doc.contains("regions")) throw ConfigError("\"regions\" is required");
  cfg.regions = as_string_list(doc["regions"], "regions");
  if (cfg.regions.empty()) throw ConfigError("\"regions\" must not be empty");
  if (doc.contains("objects")) cfg.objects = as_string_list(doc["objects"], "objects");
  const std::set<std::string> region_set(cfg.regions.begin(), cfg.regions.end());

  if (doc.contains("countries_per_region")) {
    for (const auto& [region, list] : require_object(doc["countries_per_region"], "\"countries_per_region\"").items()) {
      if (!region_set.contains(region)) throw ConfigError("countries_per_region names unknown region \"" + region + "\"");
      cfg.countries_per_region[region] = as_string_list(list, "countries_per_region." + region);
      for (const auto& country : cfg.countries_per_region[region]) cfg.country_map.emplace(country, region);
    }
  }
  if (doc.contains("country_map")) {
    for (const auto& [country, region] : require_object(doc["country_map"], "\"country_map\"").items()) {
      const std::string r = as_string(region, "country_map." + country);
      if (!region_set.contains(r)) throw ConfigError("country_map sends \"" + country + "\" to unknown region \"" + r + "\"");
      cfg.country_map[country] = r;
    }
  }
  if (doc.contains("reference_per_cell") && !doc["reference_per_cell"].is_null()) {
    cfg.reference_per_cell = as_count(doc["reference_per_cell"], "reference_per_cell", true);
  }

  auto resolve = [&base_dir](const json& value, const std::string& key) {
    std::filesystem::path p = as_string(value, key);
    return p.is_absolute() ? p : base_dir / p;
  };
  if (doc.contains("inputs")) {
    const json& inputs = require_object(doc["inputs"], "\"inputs\"");
    reject_unknown(inputs, kInputKeys, "\"inputs\"");
    if (inputs.contains("reference")) cfg.reference = resolve(inputs["reference"], "inputs.reference");
    if (inputs.contains("generated")) cfg.generated = resolve(inputs["generated"], "inputs.generated");
    if (inputs.contains("generated_joint")) cfg.generated_joint = resolve(inputs["generated_joint"], "inputs.generated_joint");
    if (inputs.contains("text_embeddings")) cfg.text_embeddings = resolve(inputs["text_embeddings"], "inputs.text_embeddings");
    for (const auto* p : {&cfg.reference, &cfg.generated, &cfg.generated_joint, &cfg.text_embeddings}) {
      if (*p && !std::filesystem::exists(**p)) throw ConfigError("input file " + (*p)->string() + " does not exist");
    }
  }
  if (doc.contains("output_dir")) cfg.output_dir = resolve(doc["output_dir"], "output_dir");
  else cfg.output_dir = base_dir / cfg.output_dir;

  if (doc.contains("prompts")) {
    const json& prompts = require_object(doc["prompts"], "\"prompts\"");
    reject_unknown(prompts, kPromptKeys, "\"prompts\"");
    if (prompts.contains("per_object_region")) {
      cfg.per_object_region = as_count(prompts["per_object_region"], "prompts.per_object_region", false);
    }
    if (prompts.contains("countries_per_cell")) {
      cfg.countries_per_cell = as_count(prompts["countries_per_cell"], "prompts.countries_per_cell", true);
    }
    if (prompts.contains("flat_object_count") && !prompts["flat_object_count"].is_null()) {
      cfg.flat_object_count = as_count(prompts["flat_object_count"], "prompts.flat_object_count", false);
    }
    if (prompts.contains("cell_counts") && !prompts["cell_counts"].is_null()) {
      if (!prompts["cell_counts"].is_array()) throw ConfigError("\"prompts.cell_counts\" must be a list");
      cfg.cell_counts.emplace();
      for (const auto& row : prompts["cell_counts"]) {
        require_object(row, "prompts.cell_counts entry");
        reject_unknown(row, {"object", "region", "count"}, "prompts.cell_counts entry");
        if (!row.contains("object") || !row.contains("region") || !row.contains("count")) {
          throw ConfigError("prompts.cell_counts entries need object, region and count");
        }
        auto key = std::make_pair(as_string(row["object"], "object"), as_string(row["region"], "region"));
        if (!cfg.cell_counts->emplace(key, as_count(row["count"], "count", false)).second) {
          throw ConfigError("prompts.cell_counts repeats (" + key.first + ", " + key.second + ")");
        }
      }
    }
    if (prompts.contains("kinds")) {
      for (const auto& kind : as_string_list(prompts["kinds"], "prompts.kinds")) {
        const PromptKind parsed = as_enum(json(kind), "prompts.kinds", parse_prompt_kind);
        if (parsed == PromptKind::kNone) throw ConfigError("\"prompts.kinds\" cannot contain \"none\"");
        cfg.prompt_kinds.push_back(parsed);
      }
    }
  }
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const IoError& e) {
    throw ConfigError(e.what());
  }
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return parse_run_config(doc, path.parent_path());
}

PromptSpec prompt_spec(const RunConfig& cfg) {
  PromptSpec spec;
  spec.objects = cfg.objects;
  spec.regions = cfg.regions;
  spec.countries_per_region = cfg.countries_per_region;
  spec.per_object_region = cfg.per_object_region;
  spec.countries_per_cell = cfg.countries_per_cell;
  spec.object_pool = cfg.object_pool;
  spec.flat_object_count = cfg.flat_object_count;
  spec.cell_counts = cfg.cell_counts;
  return spec;
}

}  // namespace geodiv
