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

#include "hpqs/error.hpp"
#include "hpqs/harness.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>

namespace hpqs {
namespace {

namespace fs = std::filesystem;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

Json tiny_qpa() {
  Json doc = default_config_json(TaskKind::QpaGen);
  doc["seeds"] = {1, 2};
  doc["epochs"] = 1;
  doc["qpa"]["samples"] = 32;
  return doc;
}

template <typename F>
std::string config_error_message(F&& f) {
  try {
    f();
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "<no ConfigError>";
}

// ------------------------------------------------------------------ config

TEST(Config, DefaultsRoundTrip) {
  for (TaskKind t : {TaskKind::Qml, TaskKind::Qt, TaskKind::QpaGen}) {
    const Json doc = default_config_json(t);
    EXPECT_EQ(to_json(parse_config(doc)), doc) << to_string(t);
  }
}

TEST(Config, UnknownKeyNamesItsPath) {
  Json doc = default_config_json(TaskKind::Qml);
  doc["qml"]["pool_size"] = 3;
  EXPECT_NE(config_error_message([&] { parse_config(doc); }).find("qml.pool_size"), std::string::npos);
  doc = default_config_json(TaskKind::Qml);
  doc["learning_rat"] = 0.1;
  EXPECT_NE(config_error_message([&] { parse_config(doc); }).find("learning_rat"), std::string::npos);
}

TEST(Config, OtherTaskSectionIsUnknown) {
  Json doc = default_config_json(TaskKind::Qml);
  doc["qt"] = Json::object();
  EXPECT_THROW(parse_config(doc), ConfigError);
}

TEST(Config, MissingTaskIsRejected) {
  EXPECT_THROW(parse_config(Json{{"epochs", 3}}), ConfigError);
}

TEST(Config, PartialDocumentTakesDefaults) {
  const ExperimentConfig cfg = parse_config(Json{{"task", "qt"}, {"lambda", 0.25}});
  EXPECT_EQ(cfg.run.lambda, 0.25);
  EXPECT_EQ(cfg.run.epochs, TaskConfig::defaults(TaskKind::Qt).epochs);
}

TEST(Config, WrongTypeIsConfigError) {
  Json doc = default_config_json(TaskKind::Qt);
  doc["epochs"] = "ten";
  EXPECT_THROW(parse_config(doc), ConfigError);
}

TEST(Config, UnknownPresetNamesIt) {
  Json doc = default_config_json(TaskKind::Qml);
  doc["noise"] = "noisy-z";
  EXPECT_NE(config_error_message([&] { parse_config(doc); }).find("noisy-z"), std::string::npos);
}

TEST(Config, InvalidValuesAreRejected) {
  Json doc = default_config_json(TaskKind::Qml);
  doc["lambda"] = 1.5;
  EXPECT_THROW(parse_config(doc), ConfigError);
  doc = default_config_json(TaskKind::Qml);
  doc["variant"] = "hpqs_exact";
  doc["noise"] = "noisy-a";
  EXPECT_THROW(parse_config(doc), ConfigError);
}

TEST(Override, ReplacesExistingValues) {
  Json doc = default_config_json(TaskKind::Qt);
  apply_override(doc, "lambda=0.3");
  apply_override(doc, "qt.bond_g=4");
  apply_override(doc, "noise=noisy-b");
  apply_override(doc, "seeds=[5,6]");
  const ExperimentConfig cfg = parse_config(doc);
  EXPECT_EQ(cfg.run.lambda, 0.3);
  EXPECT_EQ(cfg.run.qt.bond_g, 4u);
  EXPECT_EQ(cfg.run.noise.name, "noisy-b");
  EXPECT_EQ(cfg.run.seeds, (std::vector<std::uint64_t>{5, 6}));
}

TEST(Override, RejectsUnknownPathsAndSyntax) {
  Json doc = default_config_json(TaskKind::Qt);
  EXPECT_THROW(apply_override(doc, "qt.nope=1"), ConfigError);
  EXPECT_THROW(apply_override(doc, "lambda"), ConfigError);
  EXPECT_THROW(apply_override(doc, "lambda.x=1"), ConfigError);
}

TEST(Hash, IgnoresOutputDirOnly) {
  ExperimentConfig a = parse_config(default_config_json(TaskKind::Qml));
  ExperimentConfig b = a;
  b.output_dir = "elsewhere";
  EXPECT_EQ(config_hash(a), config_hash(b));
  EXPECT_EQ(config_hash(a).size(), 16u);
  b.run.lambda = 0.2;
  EXPECT_NE(config_hash(a), config_hash(b));
}

// ------------------------------------------------------------------ records

TEST(Metrics, MeanStd) {
  const MeanStd one = mean_std({4.0});
  EXPECT_EQ(one.mean, 4.0);
  EXPECT_EQ(one.std, 0.0);
  const MeanStd three = mean_std({1.0, 2.0, 3.0});
  EXPECT_DOUBLE_EQ(three.mean, 2.0);
  EXPECT_DOUBLE_EQ(three.std, 1.0);
}

TEST(Experiment, RerunIsBitIdentical) {
  const fs::path root = fs::temp_directory_path() / "hpqs-test-rerun";
  fs::remove_all(root);
  ExperimentConfig cfg = parse_config(tiny_qpa());
  cfg.output_dir = root / "a";
  const RunRecord first = run_experiment(cfg);
  cfg.output_dir = root / "b";
  run_experiment(cfg);
  for (const char* f : {"seed-1.json", "seed-2.json", "summary.csv"})
    EXPECT_EQ(slurp(root / "a" / f), slurp(root / "b" / f)) << f;

  const Json seed = Json::parse(slurp(root / "a" / "seed-1.json"));
  ASSERT_TRUE(seed["epochs"].contains("0"));
  ASSERT_TRUE(seed["epochs"].contains("1"));
  EXPECT_TRUE(seed["epochs"]["1"].contains("loss"));

  const RunRecord back = load_record(root / "a" / "record.json");
  EXPECT_EQ(back.config_hash, first.config_hash);
  EXPECT_EQ(back.version, toolkit_version());
  ASSERT_EQ(back.seeds.size(), 2u);
  EXPECT_EQ(back.seeds[1].epochs.back().loss, first.seeds[1].epochs.back().loss);
}

RunRecord fake_record(Variant v, const std::string& noise, double k, std::vector<double> acc) {
  RunRecord r;
  r.task = TaskKind::Qml;
  r.variant = v;
  r.noise = noise;
  r.shot_multiplier = k;
  std::uint64_t s = 1;
  for (double a : acc) {
    SeedResult sr;
    sr.seed = s++;
    EpochRecord e;
    e.loss = 0.5;
    e.accuracy = a;
    sr.epochs = {e};
    r.seeds.push_back(sr);
  }
  return r;
}

TEST(Comparison, SortsRowsAndFormats) {
  const Comparison c = emit_comparison({fake_record(Variant::PqcFinite, "ideal", 20, {0.8}),
                                        fake_record(Variant::HpqsFinite, "ideal", 20, {0.9, 0.95})});
  std::istringstream lines(c.csv);
  std::string header, row1, row2, extra;
  std::getline(lines, header);
  std::getline(lines, row1);
  std::getline(lines, row2);
  EXPECT_FALSE(std::getline(lines, extra) && !extra.empty());
  EXPECT_NE(header.find("accuracy_percent"), std::string::npos);
  EXPECT_NE(row1.find("hpqs_finite"), std::string::npos);
  EXPECT_NE(row2.find("pqc_finite"), std::string::npos);
  EXPECT_NE(row2.find("80.00"), std::string::npos);
  EXPECT_NE(row2.find("0.00"), std::string::npos);
  EXPECT_NE(c.text.find("80.00 +/- 0.00"), std::string::npos);
}

TEST(Comparison, MixedTasksAreRejected) {
  RunRecord qt = fake_record(Variant::PqcFinite, "ideal", 1, {0.1});
  qt.task = TaskKind::Qt;
  EXPECT_THROW(emit_comparison({fake_record(Variant::PqcFinite, "ideal", 20, {0.8}), qt}), ConfigError);
  EXPECT_THROW(emit_comparison({}), ConfigError);
}

}  // namespace
}  // namespace hpqs
