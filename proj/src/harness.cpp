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

#include "hpqs/harness.hpp"

#include "hpqs/error.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>
#include <tuple>

#ifndef HPQS_VERSION
#define HPQS_VERSION "0.0.0"
#endif

namespace hpqs {

std::string toolkit_version() { return HPQS_VERSION; }

namespace {

const char* section_key(TaskKind task) {
  switch (task) {
    case TaskKind::Qml: return "qml";
    case TaskKind::Qt: return "qt";
    case TaskKind::QpaGen: return "qpa";
  }
  return "?";
}

Json section_json(const ExperimentConfig& cfg) {
  const TaskConfig& c = cfg.run;
  switch (c.task) {
    case TaskKind::Qml: {
      const QmlSettings& s = c.qml;
      return Json{{"layers", s.layers},
                  {"classes", s.classes},
                  {"pool_kernel", s.pool_kernel},
                  {"feature_mean", s.feature_mean},
                  {"feature_std", s.feature_std},
                  {"group_affine", s.group_affine},
                  {"train_limit", s.train_limit},
                  {"test_limit", s.test_limit}};
    }
    case TaskKind::Qt: {
      const QtSettings& s = c.qt;
      return Json{{"target", s.target},
                  {"layers", s.layers},
                  {"nqs_hidden", s.nqs_hidden},
                  {"bond_g", s.bond_g},
                  {"bond_h", s.bond_h},
                  {"decoder_init_noise", s.decoder_init_noise},
                  {"decoder_passthrough", s.decoder_passthrough},
                  {"center", s.center},
                  {"train_limit", s.train_limit},
                  {"test_limit", s.test_limit}};
    }
    case TaskKind::QpaGen: {
      const QpaSettings& s = c.qpa;
      return Json{{"d", s.d},
                  {"k", s.k},
                  {"rank", s.rank},
                  {"n_mlp", s.n_mlp},
                  {"alpha", s.alpha},
                  {"layers", s.layers},
                  {"nqs_hidden", s.nqs_hidden},
                  {"bond_g", s.bond_g},
                  {"bond_h", s.bond_h},
                  {"decoder_init_noise", s.decoder_init_noise},
                  {"decoder_passthrough", s.decoder_passthrough},
                  {"center", s.center},
                  {"samples", s.samples},
                  {"data_seed", s.data_seed}};
    }
  }
  return Json::object();
}

// Every key of `doc` must exist in `schema`; objects recurse.
void check_keys(const Json& doc, const Json& schema, const std::string& prefix) {
  if (!doc.is_object()) throw ConfigError("config '" + prefix + "' must be an object");
  for (const auto& [key, value] : doc.items()) {
    const std::string path = prefix.empty() ? key : prefix + "." + key;
    if (!schema.contains(key)) throw ConfigError("unknown config key '" + path + "'");
    if (schema.at(key).is_object()) check_keys(value, schema.at(key), path);
  }
}

void overlay(Json& base, const Json& doc) {
  for (const auto& [key, value] : doc.items()) {
    if (base.at(key).is_object()) overlay(base.at(key), value);
    else base[key] = value;
  }
}

template <typename T>
T field(const Json& doc, const std::string& path) {
  const Json* node = &doc;
  std::size_t start = 0;
  while (true) {
    const std::size_t dot = path.find('.', start);
    node = &node->at(path.substr(start, dot - start));
    if (dot == std::string::npos) break;
    start = dot + 1;
  }
  try {
    if constexpr (std::is_unsigned_v<T>) {
      if (node->is_number_integer() && node->template get<long long>() < 0)
        throw ConfigError("config '" + path + "' must be non-negative");
    }
    if constexpr (std::is_integral_v<T> && !std::is_same_v<T, bool>) {
      if (!node->is_number_integer())
        throw ConfigError("config '" + path + "' must be an integer, got " + node->dump());
    }
    return node->template get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError("config '" + path + "' has the wrong type: " + node->dump());
  }
}

NoisePreset resolve_preset(const std::string& name) {
  const auto& presets = builtin_noise_presets();
  const auto it = presets.find(name);
  if (it != presets.end()) return it->second;
  std::string known;
  for (const auto& [key, _] : presets) known += (known.empty() ? "" : ", ") + key;
  throw ConfigError("unknown noise preset '" + name + "' (known: " + known + ")");
}

void validate(const ExperimentConfig& cfg) {
  const TaskConfig& c = cfg.run;
  if (c.seeds.empty()) throw ConfigError("config 'seeds' must not be empty");
  if (!(c.lambda >= 0.0 && c.lambda <= 1.0))
    throw ConfigError("config 'lambda' must lie in [0, 1], got " + std::to_string(c.lambda));
  if (!(c.shot_multiplier > 0.0)) throw ConfigError("config 'shot_multiplier' must be positive");
  if (c.epochs < 0) throw ConfigError("config 'epochs' must be non-negative");
  if (c.batch_size == 0) throw ConfigError("config 'batch_size' must be positive");
  if (!(c.learning_rate > 0.0)) throw ConfigError("config 'learning_rate' must be positive");
  if (readout_mode(c.variant) == ReadoutMode::Exact && !c.noise.is_ideal())
    throw ConfigError("config 'noise' = '" + c.noise.name + "' needs a finite-shot variant, not " +
                      to_string(c.variant));
  if (c.task == TaskKind::Qml) {
    if (c.qml.classes.size() != 2 || c.qml.classes[0] == c.qml.classes[1])
      throw ConfigError("config 'qml.classes' must name two distinct digits");
    if (c.qml.layers < 1) throw ConfigError("config 'qml.layers' must be at least 1");
  }
  if (c.task == TaskKind::Qt) {
    TargetSpec::by_name(c.qt.target);
    if (c.qt.layers < 1) throw ConfigError("config 'qt.layers' must be at least 1");
  }
  if (c.task == TaskKind::QpaGen && c.qpa.layers < 1)
    throw ConfigError("config 'qpa.layers' must be at least 1");
}

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

Json number_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json epochs_json(const std::vector<EpochRecord>& epochs) {
  Json out = Json::object();
  for (const auto& e : epochs) {
    Json row{{"loss", number_or_null(e.loss)},
             {"accuracy", e.accuracy ? Json(*e.accuracy) : Json(nullptr)},
             {"train_loss", number_or_null(e.train_loss)}};
    out[std::to_string(e.epoch)] = row;
  }
  return out;
}

std::vector<EpochRecord> epochs_from_json(const Json& doc) {
  std::vector<EpochRecord> out;
  for (const auto& [key, row] : doc.items()) {
    EpochRecord e;
    e.epoch = std::stoi(key);
    const auto num = [](const Json& v) {
      return v.is_null() ? std::numeric_limits<double>::quiet_NaN() : v.get<double>();
    };
    e.loss = num(row.at("loss"));
    e.train_loss = num(row.at("train_loss"));
    if (!row.at("accuracy").is_null()) e.accuracy = row.at("accuracy").get<double>();
    out.push_back(e);
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.epoch < b.epoch; });
  return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << text;
  if (!out) throw DataError("write failed for " + path.string());
}

std::string format_fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string display_name(Variant v) {
  switch (v) {
    case Variant::PqcExact: return "PQC (exact)";
    case Variant::PqcFinite: return "PQC (finite)";
    case Variant::Nqs: return "NQS";
    case Variant::HpqsExact: return "HPQS (exact)";
    case Variant::HpqsFinite: return "HPQS (finite)";
  }
  return "?";
}

std::string shot_budget(const RunRecord& r) {
  if (readout_mode(r.variant) == ReadoutMode::Exact || !uses_quantum(r.variant)) return "exact";
  return format_fixed(r.shot_multiplier, 0) + "xHSS (" + std::to_string(r.shots_per_evaluation) + ")";
}

int metric_digits(TaskKind task) { return task == TaskKind::QpaGen ? 4 : 2; }

MeanStd record_metric(const RunRecord& r) {
  std::vector<double> values;
  for (const auto& s : r.seeds) values.push_back(final_metric(r.task, s));
  return mean_std(values);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + "\"";
}

}  // namespace

Json default_config_json(TaskKind task) {
  ExperimentConfig cfg;
  cfg.run = TaskConfig::defaults(task);
  cfg.output_dir = std::filesystem::path("runs") / (to_string(task) + "-" + to_string(cfg.run.variant));
  return to_json(cfg);
}

Json to_json(const ExperimentConfig& cfg) {
  const TaskConfig& c = cfg.run;
  Json doc{{"task", to_string(c.task)},
           {"variant", to_string(c.variant)},
           {"lambda", c.lambda},
           {"shot_multiplier", c.shot_multiplier},
           {"noise", c.noise.name},
           {"seeds", c.seeds},
           {"epochs", c.epochs},
           {"learning_rate", c.learning_rate},
           {"optimizer", to_string(c.optimizer)},
           {"weight_decay", c.weight_decay},
           {"batch_size", c.batch_size},
           {"data_root", c.data_root.string()},
           {"output_dir", cfg.output_dir.string()}};
  doc[section_key(c.task)] = section_json(cfg);
  return doc;
}

ExperimentConfig parse_config(const Json& doc) {
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  if (!doc.contains("task") || !doc.at("task").is_string())
    throw ConfigError("config must name a 'task' (qml, qt or qpa-gen)");
  const TaskKind task = parse_task_kind(doc.at("task").get<std::string>());
  Json merged = default_config_json(task);
  check_keys(doc, merged, "");
  overlay(merged, doc);

  ExperimentConfig cfg;
  TaskConfig& c = cfg.run;
  c = TaskConfig::defaults(task);
  c.variant = parse_variant(field<std::string>(merged, "variant"));
  c.lambda = field<double>(merged, "lambda");
  c.shot_multiplier = field<double>(merged, "shot_multiplier");
  c.noise = resolve_preset(field<std::string>(merged, "noise"));
  c.seeds = field<std::vector<std::uint64_t>>(merged, "seeds");
  c.epochs = field<int>(merged, "epochs");
  c.learning_rate = field<double>(merged, "learning_rate");
  c.optimizer = parse_optimizer_kind(field<std::string>(merged, "optimizer"));
  c.weight_decay = field<double>(merged, "weight_decay");
  c.batch_size = field<std::size_t>(merged, "batch_size");
  c.data_root = field<std::string>(merged, "data_root");
  cfg.output_dir = field<std::string>(merged, "output_dir");

  switch (task) {
    case TaskKind::Qml: {
      QmlSettings& s = c.qml;
      s.layers = field<int>(merged, "qml.layers");
      s.classes = field<std::vector<int>>(merged, "qml.classes");
      s.pool_kernel = field<std::size_t>(merged, "qml.pool_kernel");
      s.feature_mean = field<double>(merged, "qml.feature_mean");
      s.feature_std = field<double>(merged, "qml.feature_std");
      s.group_affine = field<bool>(merged, "qml.group_affine");
      s.train_limit = field<std::size_t>(merged, "qml.train_limit");
      s.test_limit = field<std::size_t>(merged, "qml.test_limit");
      break;
    }
    case TaskKind::Qt: {
      QtSettings& s = c.qt;
      s.target = field<std::string>(merged, "qt.target");
      s.layers = field<int>(merged, "qt.layers");
      s.nqs_hidden = field<std::size_t>(merged, "qt.nqs_hidden");
      s.bond_g = field<std::size_t>(merged, "qt.bond_g");
      s.bond_h = field<std::size_t>(merged, "qt.bond_h");
      s.decoder_init_noise = field<double>(merged, "qt.decoder_init_noise");
      s.decoder_passthrough = field<bool>(merged, "qt.decoder_passthrough");
      s.center = field<bool>(merged, "qt.center");
      s.train_limit = field<std::size_t>(merged, "qt.train_limit");
      s.test_limit = field<std::size_t>(merged, "qt.test_limit");
      break;
    }
    case TaskKind::QpaGen: {
      QpaSettings& s = c.qpa;
      s.d = field<std::size_t>(merged, "qpa.d");
      s.k = field<std::size_t>(merged, "qpa.k");
      s.rank = field<std::size_t>(merged, "qpa.rank");
      s.n_mlp = field<std::size_t>(merged, "qpa.n_mlp");
      s.alpha = field<double>(merged, "qpa.alpha");
      s.layers = field<int>(merged, "qpa.layers");
      s.nqs_hidden = field<std::size_t>(merged, "qpa.nqs_hidden");
      s.bond_g = field<std::size_t>(merged, "qpa.bond_g");
      s.bond_h = field<std::size_t>(merged, "qpa.bond_h");
      s.decoder_init_noise = field<double>(merged, "qpa.decoder_init_noise");
      s.decoder_passthrough = field<bool>(merged, "qpa.decoder_passthrough");
      s.center = field<bool>(merged, "qpa.center");
      s.samples = field<std::size_t>(merged, "qpa.samples");
      s.data_seed = field<std::uint64_t>(merged, "qpa.data_seed");
      break;
    }
  }
  validate(cfg);
  return cfg;
}

void apply_override(Json& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0)
    throw ConfigError("override '" + assignment + "' must look like key=value");
  const std::string path = assignment.substr(0, eq);
  const std::string raw = assignment.substr(eq + 1);
  Json* node = &doc;
  std::size_t start = 0;
  while (true) {
    const std::size_t dot = path.find('.', start);
    const std::string key = path.substr(start, dot - start);
    if (!node->is_object() || !node->contains(key))
      throw ConfigError("unknown config key '" + path + "' in override");
    node = &(*node)[key];
    if (dot == std::string::npos) break;
    start = dot + 1;
  }
  Json value = Json::parse(raw, nullptr, false);
  *node = value.is_discarded() ? Json(raw) : value;
}

ExperimentConfig load_config(const std::filesystem::path& file,
                             const std::vector<std::string>& overrides) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot open config file " + file.string());
  Json doc = Json::parse(in, nullptr, false);
  if (doc.is_discarded()) throw ConfigError("config file " + file.string() + " is not valid JSON");
  if (!overrides.empty()) {
    // Overrides address the full tree, so fill in the defaults first.
    if (!doc.is_object() || !doc.contains("task") || !doc.at("task").is_string())
      throw ConfigError("config must name a 'task' (qml, qt or qpa-gen)");
    Json full = default_config_json(parse_task_kind(doc.at("task").get<std::string>()));
    check_keys(doc, full, "");
    overlay(full, doc);
    for (const auto& o : overrides) apply_override(full, o);
    doc = std::move(full);
  }
  return parse_config(doc);
}

std::string config_hash(const ExperimentConfig& cfg) {
  Json doc = to_json(cfg);
  doc.erase("output_dir");
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(doc.dump())));
  return buf;
}

Json seed_metrics_json(const RunRecord& record, const SeedResult& seed) {
  return Json{{"task", to_string(record.task)},
              {"variant", to_string(record.variant)},
              {"seed", seed.seed},
              {"config_hash", record.config_hash},
              {"version", record.version},
              {"trainable_count", seed.trainable_count},
              {"n_qubits", seed.n_qubits},
              {"shots_per_evaluation", seed.shots_per_evaluation},
              {"epochs", epochs_json(seed.epochs)}};
}

Json to_json(const RunRecord& record) {
  Json seeds = Json::array();
  for (const auto& s : record.seeds) seeds.push_back(seed_metrics_json(record, s));
  return Json{{"config_hash", record.config_hash},
              {"version", record.version},
              {"task", to_string(record.task)},
              {"variant", to_string(record.variant)},
              {"noise", record.noise},
              {"shot_multiplier", record.shot_multiplier},
              {"shots_per_evaluation", record.shots_per_evaluation},
              {"trainable_count", record.trainable_count},
              {"duration_seconds", record.duration_seconds},
              {"config", record.config},
              {"seeds", seeds}};
}

RunRecord record_from_json(const Json& doc) {
  try {
    RunRecord r;
    r.config_hash = doc.at("config_hash").get<std::string>();
    r.version = doc.at("version").get<std::string>();
    r.task = parse_task_kind(doc.at("task").get<std::string>());
    r.variant = parse_variant(doc.at("variant").get<std::string>());
    r.noise = doc.at("noise").get<std::string>();
    r.shot_multiplier = doc.at("shot_multiplier").get<double>();
    r.shots_per_evaluation = doc.at("shots_per_evaluation").get<std::uint64_t>();
    r.trainable_count = doc.at("trainable_count").get<std::size_t>();
    r.duration_seconds = doc.at("duration_seconds").get<double>();
    r.config = doc.at("config");
    for (const auto& s : doc.at("seeds")) {
      SeedResult sr;
      sr.seed = s.at("seed").get<std::uint64_t>();
      sr.trainable_count = s.at("trainable_count").get<std::size_t>();
      sr.n_qubits = s.at("n_qubits").get<std::size_t>();
      sr.shots_per_evaluation = s.at("shots_per_evaluation").get<std::uint64_t>();
      sr.epochs = epochs_from_json(s.at("epochs"));
      r.seeds.push_back(std::move(sr));
    }
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed run record: ") + e.what());
  }
}

RunRecord load_record(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot open run record " + file.string());
  Json doc = Json::parse(in, nullptr, false);
  if (doc.is_discarded()) throw ConfigError("run record " + file.string() + " is not valid JSON");
  return record_from_json(doc);
}

std::string metric_name(TaskKind task) {
  return task == TaskKind::QpaGen ? "final_loss" : "accuracy_percent";
}

double final_metric(TaskKind task, const SeedResult& seed) {
  if (seed.epochs.empty()) throw ConfigError("seed " + std::to_string(seed.seed) + " has no epochs");
  const EpochRecord& last = seed.epochs.back();
  if (task == TaskKind::QpaGen) return last.loss;
  if (!last.accuracy) throw ConfigError("seed " + std::to_string(seed.seed) + " has no accuracy");
  return 100.0 * *last.accuracy;
}

MeanStd mean_std(const std::vector<double>& values) {
  if (values.empty()) return {};
  const double n = static_cast<double>(values.size());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  if (values.size() == 1) return {mean, 0.0};
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / (n - 1.0))};
}

std::string summary_csv(const RunRecord& r) {
  const MeanStd m = record_metric(r);
  const int digits = metric_digits(r.task);
  std::ostringstream out;
  out << "task,variant,noise,lambda,shot_multiplier,shots_per_evaluation,trainable_params,seeds,"
         "metric,mean,std\n";
  std::string seeds;
  for (const auto& s : r.seeds) seeds += (seeds.empty() ? "" : " ") + std::to_string(s.seed);
  const double lambda = r.config.contains("lambda") ? r.config.at("lambda").get<double>() : 0.0;
  out << to_string(r.task) << ',' << to_string(r.variant) << ',' << r.noise << ','
      << format_fixed(lambda, 3) << ',' << format_fixed(r.shot_multiplier, 2) << ','
      << r.shots_per_evaluation << ',' << r.trainable_count << ',' << seeds << ','
      << metric_name(r.task) << ',' << format_fixed(m.mean, digits) << ','
      << format_fixed(m.std, digits) << '\n';
  return out.str();
}

RunRecord run_experiment(const ExperimentConfig& cfg, std::ostream* log) {
  validate(cfg);
  const auto start = std::chrono::steady_clock::now();
  const TaskConfig& c = cfg.run;
  RunRecord record;
  record.config = to_json(cfg);
  record.config_hash = config_hash(cfg);
  record.version = toolkit_version();
  record.task = c.task;
  record.variant = c.variant;
  record.noise = c.noise.name;
  record.shot_multiplier = c.shot_multiplier;

  std::filesystem::create_directories(cfg.output_dir);
  write_text(cfg.output_dir / "config.json", record.config.dump(2) + "\n");

  const auto root = c.data_root.empty() ? default_data_root() : c.data_root;
  std::optional<QmlData> qml;
  std::optional<QtData> qt;
  if (c.task == TaskKind::Qml) qml = prepare_qml_data(load_mnist(root), c.qml);
  if (c.task == TaskKind::Qt) qt = prepare_qt_data(load_mnist(root), c.qt);

  const EpochCallback progress = [log](std::uint64_t seed, const EpochRecord& e) {
    if (!log) return;
    *log << "seed " << seed << " epoch " << e.epoch << " loss " << format_fixed(e.loss, 4);
    if (std::isfinite(e.train_loss)) *log << " train_loss " << format_fixed(e.train_loss, 4);
    if (e.accuracy) *log << " accuracy " << format_fixed(100.0 * *e.accuracy, 2) << "%";
    *log << '\n' << std::flush;
  };
  for (std::uint64_t seed : c.seeds) {
    SeedResult result = qml ? run_qml(c, *qml, seed, progress)
                      : qt  ? run_qt(c, *qt, seed, progress)
                            : run_qpa_gen(c, seed, progress);
    record.seeds.push_back(std::move(result));
    write_text(cfg.output_dir / ("seed-" + std::to_string(seed) + ".json"),
               seed_metrics_json(record, record.seeds.back()).dump(2) + "\n");
  }
  record.trainable_count = record.seeds.front().trainable_count;
  record.shots_per_evaluation = record.seeds.front().shots_per_evaluation;
  record.duration_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  write_text(cfg.output_dir / "summary.csv", summary_csv(record));
  write_text(cfg.output_dir / "record.json", to_json(record).dump(2) + "\n");
  return record;
}

Comparison emit_comparison(std::vector<RunRecord> records) {
  if (records.empty()) throw ConfigError("compare: no run records given");
  const TaskKind task = records.front().task;
  for (const auto& r : records)
    if (r.task != task)
      throw ConfigError("compare: records mix tasks (" + to_string(task) + " and " +
                        to_string(r.task) + ")");
  std::sort(records.begin(), records.end(), [](const RunRecord& a, const RunRecord& b) {
    return std::make_tuple(to_string(a.variant), a.noise, a.shot_multiplier) <
           std::make_tuple(to_string(b.variant), b.noise, b.shot_multiplier);
  });
  const int digits = metric_digits(task);
  const std::string metric = metric_name(task);

  std::ostringstream csv;
  csv << "model," << metric << "_mean," << metric << "_std,trainable_params,shot_budget,noise\n";
  std::vector<std::array<std::string, 5>> rows;
  for (const auto& r : records) {
    const MeanStd m = record_metric(r);
    csv << to_string(r.variant) << ',' << format_fixed(m.mean, digits) << ','
        << format_fixed(m.std, digits) << ',' << r.trainable_count << ','
        << csv_field(shot_budget(r)) << ',' << r.noise << '\n';
    rows.push_back({display_name(r.variant),
                    format_fixed(m.mean, digits) + " +/- " + format_fixed(m.std, digits),
                    std::to_string(r.trainable_count), shot_budget(r), r.noise});
  }
  const std::array<std::string, 5> header{
      "Model", task == TaskKind::QpaGen ? "Final Loss" : "Testing Accuracy (%)",
      "# Training Param.", "Shot Count", "Noise"};
  std::array<std::size_t, 5> width{};
  for (std::size_t c = 0; c < 5; ++c) {
    width[c] = header[c].size();
    for (const auto& row : rows) width[c] = std::max(width[c], row[c].size());
  }
  std::ostringstream text;
  auto line = [&](const std::array<std::string, 5>& cells) {
    for (std::size_t c = 0; c < 5; ++c) {
      text << (c == 0 ? "" : " | ") << cells[c];
      if (c + 1 < 5) text << std::string(width[c] - cells[c].size(), ' ');
    }
    text << '\n';
  };
  line(header);
  std::size_t total = 3 * 4;
  for (auto w : width) total += w;
  text << std::string(total, '-') << '\n';
  for (const auto& row : rows) line(row);
  return {csv.str(), text.str()};
}

}  // namespace hpqs
