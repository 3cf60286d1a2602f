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

// Command-line entry point: run, compare, selftest, defaults.

#include "hpqs/error.hpp"
#include "hpqs/harness.hpp"
#include "hpqs/selftest.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

namespace {

// Exit codes: 0 success, 1 runtime failure, 2 configuration error, 3 data error.
constexpr int kRuntimeFailure = 1;
constexpr int kConfigFailure = 2;
constexpr int kDataFailure = 3;

int report(const char* kind, const std::string& message, int code) {
  const hpqs::Json doc{{"error", kind}, {"message", message}, {"exit_code", code}};
  std::cerr << doc.dump() << '\n';
  return code;
}

int run_command(const std::string& config, const std::vector<std::string>& overrides,
                const std::string& output, bool quiet) {
  hpqs::ExperimentConfig cfg = hpqs::load_config(config, overrides);
  if (!output.empty()) cfg.output_dir = output;
  const hpqs::RunRecord record = hpqs::run_experiment(cfg, quiet ? nullptr : &std::cerr);
  std::cout << hpqs::summary_csv(record);
  std::cout << "trainable parameters: " << record.trainable_count << "\n"
            << "outputs: " << cfg.output_dir.string() << "\n";
  return 0;
}

int compare_command(const std::vector<std::string>& files, const std::string& csv_out) {
  std::vector<hpqs::RunRecord> records;
  for (const auto& f : files) records.push_back(hpqs::load_record(f));
  const hpqs::Comparison table = hpqs::emit_comparison(std::move(records));
  std::cout << table.text;
  if (!csv_out.empty()) {
    std::ofstream out(csv_out, std::ios::binary);
    if (!out) throw hpqs::DataError("cannot write " + csv_out);
    out << table.csv;
  }
  return 0;
}

int selftest_command() {
  bool all = true;
  for (const auto& check : hpqs::run_invariant_checks()) {
    std::printf("[%s] %s: %s\n", check.passed ? "PASS" : "FAIL", check.name.c_str(),
                check.detail.c_str());
    all = all && check.passed;
  }
  return all ? 0 : kRuntimeFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hybrid parameterized quantum state toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", hpqs::toolkit_version());

  std::string config, output, csv_out, task_name;
  std::vector<std::string> overrides, records;
  bool quiet = false;

  auto* run = app.add_subcommand("run", "Train every seed of an experiment and write metrics");
  run->add_option("-c,--config", config, "JSON experiment file")->required()->check(CLI::ExistingFile);
  run->add_option("-s,--set", overrides, "Override a config value, e.g. --set lambda=0.3")
      ->take_all();
  run->add_option("-o,--output", output, "Output directory (overrides output_dir)");
  run->add_flag("-q,--quiet", quiet, "Suppress per-epoch progress on stderr");

  auto* compare = app.add_subcommand("compare", "Tabulate run records of one task");
  compare->add_option("records", records, "record.json files")->required()->check(CLI::ExistingFile);
  compare->add_option("--csv", csv_out, "Also write the table as CSV");

  auto* selftest = app.add_subcommand("selftest", "Run the built-in invariant checks");

  auto* defaults = app.add_subcommand("defaults", "Print the default config for a task");
  defaults->add_option("task", task_name, "qml, qt or qpa-gen")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigFailure;
  }

  try {
    if (*run) return run_command(config, overrides, output, quiet);
    if (*compare) return compare_command(records, csv_out);
    if (*selftest) return selftest_command();
    if (*defaults) {
      std::cout << hpqs::default_config_json(hpqs::parse_task_kind(task_name)).dump(2) << '\n';
      return 0;
    }
  } catch (const hpqs::ConfigError& e) {
    return report("config", e.what(), kConfigFailure);
  } catch (const hpqs::DataError& e) {
    return report("data", e.what(), kDataFailure);
  } catch (const hpqs::ShapeError& e) {
    return report("shape", e.what(), kRuntimeFailure);
  } catch (const hpqs::NumericError& e) {
    return report("numeric", e.what(), kRuntimeFailure);
  } catch (const std::exception& e) {
    return report("runtime", e.what(), kRuntimeFailure);
  }
  return 0;
}
