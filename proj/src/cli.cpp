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

#include "geodiv/cli.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>
#include <optional>

#include "geodiv/checksum.hpp"
#include "geodiv/errors.hpp"
#include "geodiv/indicators.hpp"
#include "geodiv/prompt_builder.hpp"
#include "geodiv/run_config.hpp"
#include "geodiv/stratification.hpp"

namespace geodiv {
namespace {

using nlohmann::ordered_json;

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kConfig:
      return kExitConfig;
    case ErrorKind::kData:
      return kExitData;
    case ErrorKind::kPrecondition:
      return kExitPrecondition;
    case ErrorKind::kIo:
      return kExitIo;
  }
  return kExitIo;
}

struct Overrides {
  std::optional<std::size_t> k;
  std::optional<std::uint64_t> seed;
  std::optional<double> percentile;
  std::optional<std::size_t> workers;
  std::optional<std::string> tail_mode;
  std::optional<std::string> output_dir;
};

RunConfig resolve_config(const std::string& path, const Overrides& o) {
  RunConfig cfg = load_run_config(path);
  if (o.k) {
    if (*o.k == 0) throw ConfigError("--k must be positive");
    cfg.k = *o.k;
  }
  if (o.seed) cfg.seed = *o.seed;
  if (o.percentile) {
    if (!(*o.percentile > 0.0 && *o.percentile < 100.0)) throw ConfigError("--percentile must lie in (0, 100)");
    cfg.percentile = *o.percentile;
  }
  if (o.workers) {
    if (*o.workers == 0) throw ConfigError("--workers must be positive");
    cfg.workers = *o.workers;
  }
  if (o.tail_mode) cfg.tail_mode = parse_tail_mode(*o.tail_mode);
  if (o.output_dir) cfg.output_dir = *o.output_dir;
  return cfg;
}

ordered_json summarize_file(const std::filesystem::path& path) {
  const std::string bytes = read_file(path);
  EmbeddingDataset ds = [&] {
    try {
      return parse_dataset(bytes);
    } catch (const DataError& e) {
      throw DataError(path.string() + ": " + e.what());
    }
  }();
  ordered_json cells = ordered_json::array();
  for (const auto& [cell, count] : cell_counts(ds)) {
    cells.push_back({{"object", cell.first}, {"region", cell.second}, {"count", count}});
  }
  ordered_json j;
  j["file"] = path.filename().string();
  j["sha256"] = sha256_hex(bytes);
  j["label"] = ds.label();
  j["dim"] = ds.dim();
  j["count"] = ds.size();
  j["cells"] = cells;
  return j;
}

void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
}

int cmd_validate(const std::vector<std::string>& files, const std::string& config, std::ostream& out) {
  std::vector<std::filesystem::path> paths(files.begin(), files.end());
  if (!config.empty()) {
    const RunConfig cfg = load_run_config(config);
    for (const auto* p : {&cfg.reference, &cfg.generated, &cfg.generated_joint, &cfg.text_embeddings}) {
      if (*p) paths.push_back(**p);
    }
  }
  if (paths.empty()) throw ConfigError("validate needs embedding files or a --config naming inputs");
  ordered_json summary;
  summary["valid"] = true;
  summary["files"] = ordered_json::array();
  for (const auto& p : paths) summary["files"].push_back(summarize_file(p));
  out << summary.dump(2) << "\n";
  return kExitOk;
}

int cmd_build_prompts(const RunConfig& cfg, std::ostream& out) {
  const PromptSpec spec = prompt_spec(cfg);
  const std::vector<PromptKind> kinds = cfg.prompt_kinds.empty() ? std::vector{cfg.prompt_kind} : cfg.prompt_kinds;
  ordered_json echo = config_echo(cfg, EvaluationInputs{});
  echo["per_object_region"] = cfg.per_object_region;
  echo["countries_per_cell"] = cfg.countries_per_cell;

  // Build everything before writing anything.
  std::vector<std::pair<std::filesystem::path, std::string>> files;
  ordered_json summary = ordered_json::object();
  for (PromptKind kind : kinds) {
    const auto prompts = build_prompts(spec, kind);
    const std::string name = "prompts_" + std::string(to_string(kind)) + ".tsv";
    files.emplace_back(cfg.output_dir / name, "# " + echo.dump() + "\n" + serialize_prompts(prompts));
    summary[std::string(to_string(kind))] = {{"file", name}, {"rows", prompts.size()}};
  }
  ensure_dir(cfg.output_dir);
  for (const auto& [path, bytes] : files) write_file_atomic(path, bytes);
  out << summary.dump(2) << "\n";
  return kExitOk;
}

int cmd_balance(const RunConfig& cfg, std::ostream& out) {
  const EvaluationInputs inputs = load_inputs(cfg, {.reference = true});
  ordered_json manifest;
  manifest["config"] = config_echo(cfg, inputs);
  manifest["records"] = inputs.reference->size();
  manifest["sha256"] = dataset_checksum(*inputs.reference);
  ensure_dir(cfg.output_dir);
  write_dataset(*inputs.reference, cfg.output_dir / "reference_balanced.emb");
  write_file_atomic(cfg.output_dir / "reference_balanced.json", manifest.dump(2) + "\n");
  out << manifest.dump(2) << "\n";
  return kExitOk;
}

int cmd_report(const std::string& command, const RunConfig& cfg, std::ostream& out) {
  IndicatorReport report;
  if (command == "full-report") {
    report = full_report(cfg);
  } else if (command == "consistency-indicator") {
    const bool needs_reference = cfg.prompt_kind == PromptKind::kObject;
    const EvaluationInputs inputs = load_inputs(cfg, {.reference = needs_reference, .joint = true});
    report.config_echo = config_echo(cfg, inputs);
    report.consistency_indicator = object_consistency_indicator(cfg, inputs);
  } else {
    const EvaluationInputs inputs = load_inputs(cfg, {.reference = true, .generated = true});
    report.config_echo = config_echo(cfg, inputs);
    if (command == "region-indicator") {
      report.region_indicator = region_indicator(cfg, inputs);
    } else {
      report.object_region_indicator = object_region_indicator(cfg, inputs);
    }
  }
  const std::string stem = command == "full-report" ? "report" : command;
  for (const auto& path : write_report(report, cfg.output_dir, stem)) out << path.string() << "\n";
  return kExitOk;
}

void report_error(std::ostream& err, const std::optional<std::filesystem::path>& out_dir, std::string_view kind,
                  int code, const std::string& message) {
  ordered_json doc;
  doc["error"] = {{"kind", kind}, {"exit_code", code}, {"message", message}};
  const std::string text = doc.dump(2) + "\n";
  err << text;
  if (!out_dir) return;
  try {
    ensure_dir(*out_dir);
    write_file_atomic(*out_dir / "error.json", text);
  } catch (const Error&) {
    // stderr already carries the report
  }
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Geodiversity indicators over embedding datasets", "geodiv"};
  app.require_subcommand(1);

  std::string config;
  Overrides overrides;
  std::vector<std::string> files;

  auto* validate = app.add_subcommand("validate", "Check embedding files and count records per (object, region)");
  validate->add_option("files", files, "GEODIVE-EMB/1 files");
  validate->add_option("-c,--config", config, "Run configuration; validates every input it names");

  const std::vector<std::pair<std::string, std::string>> run_commands = {
      {"build-prompts", "Expand prompt templates into prompt lists"},
      {"balance", "Write the object-region balanced reference dataset"},
      {"region-indicator", "Precision and coverage per region"},
      {"object-region-indicator", "Precision and coverage per (object, region) cell"},
      {"consistency-indicator", "Lower-tail CLIPScore per object, averaged per region"},
      {"full-report", "All indicators in one report"},
  };
  for (const auto& [name, help] : run_commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("-c,--config", config, "Run configuration document")->required();
    sub->add_option("--k", overrides.k, "Nearest-neighbour rank for hypersphere radii");
    sub->add_option("--seed", overrides.seed, "Sampling seed");
    sub->add_option("--percentile", overrides.percentile, "Lower-tail percentile");
    sub->add_option("--tail-mode", overrides.tail_mode, "percentile or tail_mean");
    sub->add_option("--workers", overrides.workers, "Worker threads");
    sub->add_option("--output-dir", overrides.output_dir, "Artifact directory");
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    report_error(err, std::nullopt, to_string(ErrorKind::kConfig), kExitConfig, e.what());
    return kExitConfig;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  std::optional<std::filesystem::path> out_dir;
  try {
    if (command == "validate") return cmd_validate(files, config, out);
    const RunConfig cfg = resolve_config(config, overrides);
    out_dir = cfg.output_dir;
    std::error_code ignored;
    std::filesystem::remove(cfg.output_dir / "error.json", ignored);
    if (command == "build-prompts") return cmd_build_prompts(cfg, out);
    if (command == "balance") return cmd_balance(cfg, out);
    return cmd_report(command, cfg, out);
  } catch (const Error& e) {
    const int code = exit_code(e.kind());
    report_error(err, out_dir, to_string(e.kind()), code, e.what());
    return code;
  } catch (const std::exception& e) {
    report_error(err, out_dir, "internal", kExitIo, e.what());
    return kExitIo;
  }
}

}  // namespace geodiv
