// Copyright 2026 The HPQS Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include "hpqs/tasks.hpp"

#include <json.hpp>

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace hpqs {

/// Insertion-ordered so emitted files read in declaration order.
using Json = nlohmann::ordered_json;

/// Toolkit version stamped into every record.
std::string toolkit_version();

struct ExperimentConfig {
  TaskConfig run;
  std::filesystem::path output_dir = "runs/default";
};

/// Full default tree for a task; also the schema for unknown-key checks.
Json default_config_json(TaskKind task);
Json to_json(const ExperimentConfig& cfg);

/// Overlays `doc` on the task defaults. `doc` must name the task; any key
/// absent from the default tree is a ConfigError naming its dotted path, and
/// so is an unknown noise preset, variant or optimizer.
ExperimentConfig parse_config(const Json& doc);

/// `path.to.key=value`. The path must already exist in `doc`; the value is
/// read as JSON when it parses and as a bare string otherwise.
void apply_override(Json& doc, const std::string& assignment);

/// Reads a JSON config file, applies overrides in order and parses it.
ExperimentConfig load_config(const std::filesystem::path& file,
                             const std::vector<std::string>& overrides = {});

/// FNV-1a 64 over the canonical dump with output_dir removed, as 16 hex digits.
std::string config_hash(const ExperimentConfig& cfg);

struct RunRecord {
  std::string config_hash;
  std::string version;
  Json config;
  TaskKind task = TaskKind::Qml;
  Variant variant = Variant::HpqsFinite;
  std::string noise = "ideal";
  double shot_multiplier = 0.0;
  std::uint64_t shots_per_evaluation = 0;
  std::size_t trainable_count = 0;
  double duration_seconds = 0.0;
  std::vector<SeedResult> seeds;
};

Json to_json(const RunRecord& record);
RunRecord record_from_json(const Json& doc);
RunRecord load_record(const std::filesystem::path& file);

/// Per-seed metrics document: {seed, ..., epochs: {"0": {loss, accuracy, train_loss}}}.
Json seed_metrics_json(const RunRecord& record, const SeedResult& seed);

/// Headline metric: final held-out accuracy (percent) for classification
/// tasks, final training loss for qpa-gen.
std::string metric_name(TaskKind task);
double final_metric(TaskKind task, const SeedResult& seed);

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation; 0 for one value
};
MeanStd mean_std(const std::vector<double>& values);

/// One CSV row (with header) summarising a record across seeds.
std::string summary_csv(const RunRecord& record);

/// Runs every seed, writing seed-<s>.json after each one and config.json,
/// summary.csv and record.json at the end. `log` receives progress lines.
RunRecord run_experiment(const ExperimentConfig& cfg, std::ostream* log = nullptr);

struct Comparison {
  std::string csv;
  std::string text;
};

/// Rows sorted by (variant, noise, shot multiplier). ConfigError when the
/// records mix tasks or the list is empty.
Comparison emit_comparison(std::vector<RunRecord> records);

}  // namespace hpqs
