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

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "geodiv/consistency.hpp"
#include "geodiv/embedding_store.hpp"
#include "geodiv/manifold_metrics.hpp"
#include "geodiv/run_config.hpp"

namespace geodiv {

inline constexpr std::string_view kReportFormat = "GEODIVE-REPORT/1";

// Datasets for one run, loaded once and shared by the three indicators.
// Checksums are SHA-256 of the input file bytes.
struct EvaluationInputs {
  std::optional<EmbeddingDataset> reference;  // balanced when reference_per_cell is set
  std::optional<EmbeddingDataset> generated;
  std::optional<EmbeddingDataset> generated_joint;
  std::optional<EmbeddingDataset> text_embeddings;
  std::map<std::string, std::string> checksums;  // input role -> sha256
  std::map<std::string, std::string> file_names;  // input role -> file name
  std::vector<std::string> objects;               // resolved object vocabulary
};

struct InputNeeds {
  bool reference = false;
  bool generated = false;
  bool joint = false;
};

EvaluationInputs load_inputs(const RunConfig& cfg, InputNeeds needs);

// One row of the region or object-region indicator.
struct MetricCell {
  std::string region;
  std::optional<std::string> object;
  std::optional<PrecisionCoverage> metrics;
  std::size_t n_real = 0;
  std::size_t n_gen = 0;
  std::optional<std::string> skip_reason;
  std::optional<std::string> sample_sha256;  // ids drawn for the {object} prompt kind
};

struct ConsistencyGroup {
  std::string group;
  double value = 0.0;
  std::vector<ObjectTailSummary> tails;
};

struct ConsistencySection {
  TailMode mode = TailMode::kPercentile;
  double percentile = kDefaultPercentile;
  ConsistencyGrouping grouping = ConsistencyGrouping::kRegion;
  std::vector<ConsistencyGroup> groups;
};

struct IndicatorReport {
  nlohmann::ordered_json config_echo;
  std::optional<std::vector<MetricCell>> region_indicator;
  std::optional<std::vector<MetricCell>> object_region_indicator;
  std::optional<ConsistencySection> consistency_indicator;
};

nlohmann::ordered_json config_echo(const RunConfig& cfg, const EvaluationInputs& inputs);

// Generated records evaluated against region R (D_g^R) for the configured
// prompt kind: region slice, country-merged slice, or an object-distribution
// matched sample of the "{object}" pool. `digest` receives the SHA-256 of
// the drawn ids when sampling happened.
EmbeddingDataset compose_generated_region(const RunConfig& cfg, const EmbeddingDataset& reference_region,
                                          const EmbeddingDataset& generated, const std::string& region,
                                          std::optional<std::string>* digest = nullptr);

// Region indicator. Fatal (PreconditionError) when a region's reference has
// at most k points or its generated slice is empty.
std::vector<MetricCell> region_indicator(const RunConfig& cfg, const EvaluationInputs& inputs);
// Object-region indicator. Deficient cells are kept with a skip reason.
std::vector<MetricCell> object_region_indicator(const RunConfig& cfg, const EvaluationInputs& inputs);
// Object consistency indicator over CLIPScores against bare "{object}" prompts.
ConsistencySection object_consistency_indicator(const RunConfig& cfg, const EvaluationInputs& inputs);

std::vector<MetricCell> region_indicator(const RunConfig& cfg);
std::vector<MetricCell> object_region_indicator(const RunConfig& cfg);
ConsistencySection object_consistency_indicator(const RunConfig& cfg);

IndicatorReport full_report(const RunConfig& cfg);

// Serialization. The JSON document has a fixed key order; tables are
// tab-delimited with a leading "# " line carrying the config echo.
std::string report_json(const IndicatorReport& report);
std::string region_table(const IndicatorReport& report);
std::string object_region_table(const IndicatorReport& report);
std::string consistency_table(const IndicatorReport& report);
std::string consistency_tails_table(const IndicatorReport& report);

// Writes report.json and the tables present in the report; returns the paths written.
std::vector<std::filesystem::path> write_report(const IndicatorReport& report,
                                                const std::filesystem::path& out_dir,
                                                const std::string& stem = "report");

}  // namespace geodiv
