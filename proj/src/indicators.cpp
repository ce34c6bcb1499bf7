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

#include "geodiv/indicators.hpp"

#include <algorithm>
#include <set>

#include "geodiv/checksum.hpp"
#include "geodiv/errors.hpp"
#include "geodiv/stratification.hpp"
#include "geodiv/text.hpp"

namespace geodiv {
namespace {

using nlohmann::ordered_json;

std::vector<std::string> sorted(std::vector<std::string> v) {
  std::sort(v.begin(), v.end());
  return v;
}

EmbeddingDataset load_role(const std::optional<std::filesystem::path>& path, const std::string& role,
                           EvaluationInputs& inputs) {
  if (!path) throw ConfigError("inputs." + role + " is required for this command");
  const std::string bytes = read_file(*path);
  inputs.checksums[role] = sha256_hex(bytes);
  inputs.file_names[role] = path->filename().string();
  try {
    return parse_dataset(bytes);
  } catch (const DataError& e) {
    throw DataError(path->string() + ": " + e.what());
  }
}

void check_objects(const EmbeddingDataset& ds, const std::vector<std::string>& objects, const std::string& role) {
  const std::set<std::string> vocab(objects.begin(), objects.end());
  std::set<std::string> strays;
  for (const EmbeddingRecord& r : ds.records()) {
    if (!vocab.contains(r.object)) strays.insert(r.object);
  }
  if (strays.empty()) return;
  std::string list;
  for (const auto& s : strays) list += (list.empty() ? "\"" : ", \"") + s + "\"";
  throw DataError(role + " contains object label(s) outside the object vocabulary: " + list);
}

std::string ids_digest(const EmbeddingDataset& ds) {
  std::string joined;
  for (const EmbeddingRecord& r : ds.records()) joined += r.id + '\n';
  return sha256_hex(joined);
}

// Generated data prepared once per run for region lookups.
class GeneratedRegions {
 public:
  GeneratedRegions(const RunConfig& cfg, const EmbeddingDataset& generated) : cfg_(cfg), generated_(generated) {
    switch (cfg.prompt_kind) {
      case PromptKind::kObjectInRegion:
        by_region_ = split_by_region(generated, cfg.regions);
        break;
      case PromptKind::kObjectInCountry:
        by_region_ = split_by_region(merge_countries(generated, cfg.country_map), cfg.regions);
        break;
      case PromptKind::kObject:
        if (cfg.object_pool == ObjectPool::kPerRegion) by_region_ = split_by_region(generated, cfg.regions);
        break;
      case PromptKind::kNone:
        throw ConfigError("prompt_kind \"none\" cannot be evaluated");
    }
  }

  // Records a region is evaluated on (or sampled from, for "{object}" prompts).
  const EmbeddingDataset& pool(const std::string& region) const {
    if (cfg_.prompt_kind == PromptKind::kObject && cfg_.object_pool == ObjectPool::kShared) return generated_;
    return by_region_.at(region);
  }

  EmbeddingDataset region(const EmbeddingDataset& reference_region, const std::string& name,
                          std::optional<std::string>* digest) const {
    if (cfg_.prompt_kind != PromptKind::kObject) return pool(name);
    SamplingPlan plan{derive_seed(cfg_.seed, "region/" + name), std::nullopt};
    EmbeddingDataset sample = match_object_distribution(pool(name), object_counts(reference_region), plan);
    if (digest) *digest = ids_digest(sample);
    return sample;
  }

 private:
  const RunConfig& cfg_;
  const EmbeddingDataset& generated_;
  std::map<std::string, EmbeddingDataset> by_region_;
};

std::map<std::string, EmbeddingDataset> reference_regions(const RunConfig& cfg, const EvaluationInputs& inputs) {
  if (!inputs.reference) throw ConfigError("inputs.reference is required for this command");
  return split_by_region(*inputs.reference, cfg.regions);
}

MetricCell measure(const RunConfig& cfg, std::string region, std::optional<std::string> object,
                   const EmbeddingDataset& real, const EmbeddingDataset& gen) {
  MetricCell cell{std::move(region), std::move(object), std::nullopt, real.size(), gen.size(), std::nullopt, std::nullopt};
  const ManifoldModel manifold = build_manifold(real, cfg.k, cfg.workers);
  cell.metrics = evaluate(manifold, gen, cfg.workers);
  return cell;
}

ordered_json cell_json(const MetricCell& cell) {
  ordered_json j;
  if (cell.metrics) {
    j["status"] = "ok";
    j["precision"] = cell.metrics->precision.value;
    j["coverage"] = cell.metrics->coverage.value;
    j["precision_hits"] = cell.metrics->precision.hits;
    j["coverage_hits"] = cell.metrics->coverage.hits;
  } else {
    j["status"] = "skipped";
    j["reason"] = cell.skip_reason.value_or("");
  }
  j["n_real"] = cell.n_real;
  j["n_gen"] = cell.n_gen;
  if (cell.sample_sha256) j["sample_sha256"] = *cell.sample_sha256;
  return j;
}

std::string echo_line(const IndicatorReport& report) { return "# " + report.config_echo.dump() + "\n"; }

void append_metric_row(std::string& out, const MetricCell& c) {
  if (c.metrics) {
    out += text::format_double(c.metrics->precision.value) + '\t' + text::format_double(c.metrics->coverage.value);
  } else {
    out += "\t";
  }
  out += '\t' + std::to_string(c.n_real) + '\t' + std::to_string(c.n_gen) + '\t' +
         (c.metrics ? "ok" : "skipped") + '\t' + text::escape_field(c.skip_reason.value_or("")) + '\n';
}

}  // namespace

EvaluationInputs load_inputs(const RunConfig& cfg, InputNeeds needs) {
  EvaluationInputs inputs;
  if (needs.reference) {
    EmbeddingDataset reference = load_role(cfg.reference, "reference", inputs);
    if (cfg.reference_per_cell) {
      SamplingPlan plan{derive_seed(cfg.seed, "reference"), cfg.reference_per_cell};
      reference = balance_cells(reference, plan);
    }
    inputs.reference = std::move(reference);
  }
  if (needs.generated) inputs.generated = load_role(cfg.generated, "generated", inputs);
  if (needs.joint) {
    inputs.generated_joint = load_role(cfg.generated_joint, "generated_joint", inputs);
    inputs.text_embeddings = load_role(cfg.text_embeddings, "text_embeddings", inputs);
  }

  if (!cfg.objects.empty()) {
    inputs.objects = sorted(cfg.objects);
  } else {
    const EmbeddingDataset* source = inputs.reference ? &*inputs.reference
                                     : inputs.generated_joint ? &*inputs.generated_joint
                                     : inputs.generated ? &*inputs.generated : nullptr;
    if (source) {
      std::set<std::string> found;
      for (const EmbeddingRecord& r : source->records()) found.insert(r.object);
      inputs.objects.assign(found.begin(), found.end());
    }
  }
  if (inputs.reference) check_objects(*inputs.reference, inputs.objects, "reference");
  if (inputs.generated) check_objects(*inputs.generated, inputs.objects, "generated");
  if (inputs.generated_joint) check_objects(*inputs.generated_joint, inputs.objects, "generated_joint");
  return inputs;
}

ordered_json config_echo(const RunConfig& cfg, const EvaluationInputs& inputs) {
  ordered_json echo;
  echo["k"] = cfg.k;
  echo["seed"] = cfg.seed;
  echo["percentile"] = cfg.percentile;
  echo["tail_mode"] = to_string(cfg.tail_mode);
  echo["prompt_kind"] = to_string(cfg.prompt_kind);
  echo["object_pool"] = to_string(cfg.object_pool);
  echo["consistency_grouping"] = to_string(cfg.consistency_grouping);
  echo["reference_per_cell"] = cfg.reference_per_cell ? ordered_json(*cfg.reference_per_cell) : ordered_json();
  echo["regions"] = sorted(cfg.regions);
  echo["objects"] = inputs.objects;
  ordered_json files = ordered_json::object();
  for (const auto& [role, sum] : inputs.checksums) {
    files[role] = {{"file", inputs.file_names.at(role)}, {"sha256", sum}};
  }
  echo["inputs"] = files;
  return echo;
}

EmbeddingDataset compose_generated_region(const RunConfig& cfg, const EmbeddingDataset& reference_region,
                                          const EmbeddingDataset& generated, const std::string& region,
                                          std::optional<std::string>* digest) {
  const GeneratedRegions prepared(cfg, generated);
  return prepared.region(reference_region, region, digest);
}

std::vector<MetricCell> region_indicator(const RunConfig& cfg, const EvaluationInputs& inputs) {
  const auto reference = reference_regions(cfg, inputs);
  if (!inputs.generated) throw ConfigError("inputs.generated is required for this command");
  const GeneratedRegions generated(cfg, *inputs.generated);

  std::vector<MetricCell> out;
  for (const auto& [region, real] : reference) {
    if (real.size() <= cfg.k) {
      throw PreconditionError("region \"" + region + "\" has " + std::to_string(real.size()) +
                              " reference records; need more than k = " + std::to_string(cfg.k));
    }
    std::optional<std::string> digest;
    const EmbeddingDataset gen = generated.region(real, region, &digest);
    if (gen.empty()) throw PreconditionError("missing generated slice for region \"" + region + "\"");
    MetricCell cell = measure(cfg, region, std::nullopt, real, gen);
    cell.sample_sha256 = digest;
    out.push_back(std::move(cell));
  }
  return out;
}

std::vector<MetricCell> object_region_indicator(const RunConfig& cfg, const EvaluationInputs& inputs) {
  const auto reference = reference_regions(cfg, inputs);
  if (!inputs.generated) throw ConfigError("inputs.generated is required for this command");
  const GeneratedRegions generated(cfg, *inputs.generated);
  const bool sampled = cfg.prompt_kind == PromptKind::kObject;

  std::vector<MetricCell> out;
  for (const auto& [region, real_region] : reference) {
    const EmbeddingDataset& pool = generated.pool(region);
    for (const auto& object : inputs.objects) {
      const EmbeddingDataset real = slice(real_region, RecordFilter{.object = object});
      EmbeddingDataset gen = slice(pool, RecordFilter{.object = object});
      MetricCell cell{region, object, std::nullopt, real.size(), gen.size(), std::nullopt, std::nullopt};

      if (real.size() <= cfg.k) {
        cell.skip_reason = "reference cell has " + std::to_string(real.size()) +
                           " records; need more than k = " + std::to_string(cfg.k);
      } else if (sampled && gen.size() < real.size()) {
        cell.skip_reason = "generated pool has " + std::to_string(gen.size()) + " records; need " +
                           std::to_string(real.size()) + " to match the reference cell";
      } else if (gen.empty()) {
        cell.skip_reason = "no generated records";
      }
      if (cell.skip_reason) {
        out.push_back(std::move(cell));
        continue;
      }
      std::optional<std::string> digest;
      if (sampled) {
        SamplingPlan plan{derive_seed(cfg.seed, "cell/" + region + "/" + object), std::nullopt};
        gen = match_object_distribution(gen, {{object, real.size()}}, plan);
        digest = ids_digest(gen);
      }
      MetricCell measured = measure(cfg, region, object, real, gen);
      measured.sample_sha256 = digest;
      out.push_back(std::move(measured));
    }
  }
  return out;
}

ConsistencySection object_consistency_indicator(const RunConfig& cfg, const EvaluationInputs& inputs) {
  if (!inputs.generated_joint || !inputs.text_embeddings) {
    throw ConfigError("inputs.generated_joint and inputs.text_embeddings are required for this command");
  }
  const TextEmbeddings text = object_prompt_embeddings(*inputs.text_embeddings);
  std::vector<ScoredRecord> scores;
  if (cfg.prompt_kind == PromptKind::kObject) {
    // Same draw as the region indicator: identical seeds over a generated
    // file with the same record order select the same ids.
    const auto reference = reference_regions(cfg, inputs);
    const GeneratedRegions generated(cfg, *inputs.generated_joint);
    for (const auto& [region, real] : reference) {
      auto part = score_dataset(generated.region(real, region, nullptr), text, cfg.workers);
      for (ScoredRecord& s : part) s.region = region;
      scores.insert(scores.end(), part.begin(), part.end());
    }
  } else {
    EmbeddingDataset joint = *inputs.generated_joint;
    if (cfg.prompt_kind == PromptKind::kObjectInCountry) joint = merge_countries(joint, cfg.country_map);
    split_by_region(joint, cfg.regions);  // rejects labels outside the vocabulary
    scores = score_dataset(joint, text, cfg.workers);
  }

  std::set<std::pair<std::string, std::string>> present;
  for (const ScoredRecord& s : scores) present.emplace(s.region, s.object);
  std::string gaps;
  for (const auto& region : sorted(cfg.regions)) {
    for (const auto& object : inputs.objects) {
      if (!present.contains({region, object})) gaps += (gaps.empty() ? "" : ", ") + ("(" + object + ", " + region + ")");
    }
  }
  if (!gaps.empty()) throw PreconditionError("empty object-region score group(s): " + gaps);

  ConsistencySection section{cfg.tail_mode, cfg.percentile, cfg.consistency_grouping, {}};
  const auto summaries = tail_summary(scores, cfg.percentile, cfg.consistency_grouping);
  const auto values = consistency_indicator(summaries, cfg.tail_mode);
  for (const auto& [group, value] : values) section.groups.push_back({group, value, {}});
  for (const ObjectTailSummary& s : summaries) {
    auto it = std::find_if(section.groups.begin(), section.groups.end(),
                           [&s](const ConsistencyGroup& g) { return g.group == s.group; });
    it->tails.push_back(s);
  }
  return section;
}

std::vector<MetricCell> region_indicator(const RunConfig& cfg) {
  return region_indicator(cfg, load_inputs(cfg, {.reference = true, .generated = true}));
}

std::vector<MetricCell> object_region_indicator(const RunConfig& cfg) {
  return object_region_indicator(cfg, load_inputs(cfg, {.reference = true, .generated = true}));
}

ConsistencySection object_consistency_indicator(const RunConfig& cfg) {
  const bool needs_reference = cfg.prompt_kind == PromptKind::kObject;
  return object_consistency_indicator(cfg, load_inputs(cfg, {.reference = needs_reference, .joint = true}));
}

IndicatorReport full_report(const RunConfig& cfg) {
  const bool joint = cfg.generated_joint.has_value() && cfg.text_embeddings.has_value();
  const EvaluationInputs inputs = load_inputs(cfg, {.reference = true, .generated = true, .joint = joint});
  IndicatorReport report;
  report.config_echo = config_echo(cfg, inputs);
  report.region_indicator = region_indicator(cfg, inputs);
  report.object_region_indicator = object_region_indicator(cfg, inputs);
  if (joint) report.consistency_indicator = object_consistency_indicator(cfg, inputs);
  return report;
}

std::string report_json(const IndicatorReport& report) {
  ordered_json doc;
  doc["format"] = kReportFormat;
  doc["config"] = report.config_echo;
  if (report.region_indicator) {
    ordered_json regions = ordered_json::object();
    for (const MetricCell& c : *report.region_indicator) regions[c.region] = cell_json(c);
    doc["region_indicator"] = regions;
  }
  if (report.object_region_indicator) {
    ordered_json regions = ordered_json::object();
    for (const MetricCell& c : *report.object_region_indicator) regions[c.region][*c.object] = cell_json(c);
    doc["object_region_indicator"] = regions;
  }
  if (report.consistency_indicator) {
    const ConsistencySection& s = *report.consistency_indicator;
    ordered_json section;
    section["mode"] = to_string(s.mode);
    section["percentile"] = s.percentile;
    section["grouping"] = to_string(s.grouping);
    ordered_json groups = ordered_json::object();
    for (const ConsistencyGroup& g : s.groups) {
      ordered_json objects = ordered_json::object();
      for (const ObjectTailSummary& t : g.tails) {
        objects[t.object] = {{"n", t.n}, {"tail_value", t.tail_value}, {"tail_mean", t.tail_mean}};
      }
      groups[g.group] = {{"value", g.value}, {"objects", objects}};
    }
    section["groups"] = groups;
    doc["consistency_indicator"] = section;
  }
  return doc.dump(2) + "\n";
}

std::string region_table(const IndicatorReport& report) {
  std::string out = echo_line(report) + "region\tprecision\tcoverage\tn_real\tn_gen\tstatus\treason\n";
  if (!report.region_indicator) return out;
  for (const MetricCell& c : *report.region_indicator) {
    out += text::escape_field(c.region) + '\t';
    append_metric_row(out, c);
  }
  return out;
}

std::string object_region_table(const IndicatorReport& report) {
  std::string out = echo_line(report) + "region\tobject\tprecision\tcoverage\tn_real\tn_gen\tstatus\treason\n";
  if (!report.object_region_indicator) return out;
  for (const MetricCell& c : *report.object_region_indicator) {
    out += text::escape_field(c.region) + '\t' + text::escape_field(c.object.value_or("")) + '\t';
    append_metric_row(out, c);
  }
  return out;
}

std::string consistency_table(const IndicatorReport& report) {
  std::string out = echo_line(report) + "group\tvalue\tmode\tpercentile\tn_objects\n";
  if (!report.consistency_indicator) return out;
  const ConsistencySection& s = *report.consistency_indicator;
  for (const ConsistencyGroup& g : s.groups) {
    out += text::escape_field(g.group) + '\t' + text::format_double(g.value) + '\t' + std::string(to_string(s.mode)) +
           '\t' + text::format_double(s.percentile) + '\t' + std::to_string(g.tails.size()) + '\n';
  }
  return out;
}

std::string consistency_tails_table(const IndicatorReport& report) {
  std::string out = echo_line(report) + "group\tobject\tn\ttail_value\ttail_mean\n";
  if (!report.consistency_indicator) return out;
  for (const ConsistencyGroup& g : report.consistency_indicator->groups) {
    for (const ObjectTailSummary& t : g.tails) {
      out += text::escape_field(g.group) + '\t' + text::escape_field(t.object) + '\t' + std::to_string(t.n) + '\t' +
             text::format_double(t.tail_value) + '\t' + text::format_double(t.tail_mean) + '\n';
    }
  }
  return out;
}

std::vector<std::filesystem::path> write_report(const IndicatorReport& report, const std::filesystem::path& out_dir,
                                                const std::string& stem) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create " + out_dir.string() + ": " + ec.message());

  std::vector<std::pair<std::filesystem::path, std::string>> files;
  files.emplace_back(out_dir / (stem + ".json"), report_json(report));
  if (report.region_indicator) files.emplace_back(out_dir / "region_indicator.tsv", region_table(report));
  if (report.object_region_indicator) {
    files.emplace_back(out_dir / "object_region_indicator.tsv", object_region_table(report));
  }
  if (report.consistency_indicator) {
    files.emplace_back(out_dir / "consistency_indicator.tsv", consistency_table(report));
    files.emplace_back(out_dir / "consistency_tails.tsv", consistency_tails_table(report));
  }
  std::vector<std::filesystem::path> written;
  for (const auto& [path, bytes] : files) {
    write_file_atomic(path, bytes);
    written.push_back(path);
  }
  return written;
}

}  // namespace geodiv
