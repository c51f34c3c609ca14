// Copyright 2026 The predrepo Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "predrepo/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "predrepo/metrics.hpp"
#include "predrepo/rng.hpp"

namespace predrepo {
namespace {

using nlohmann::json;

// Stream purposes.
enum Stream : std::uint64_t {
  kProblemStream = 1,
  kTaskStream,
  kConfigSkillStream,
  kDatasetSkillStream,
  kConfigNoiseStream,
  kFamilyNoiseStream,
  kFitTimeStream,
  kInferTimeStream,
  kRowsStream,
};

// Shapes and metadata (problem types, row counts, per-config skill) come
// from streams that ignore the seed, so reseeding only changes values.
constexpr std::uint64_t kStructureSeed = 0x5354525543545552ULL;

constexpr int kMaxLabelAttempts = 64;

void Require(bool ok, const std::string& message) {
  if (!ok) throw SpecError("spec: " + message);
}

std::string DatasetName(int d) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "ds%03d", d);
  return buf;
}

double Sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

struct DatasetPlan {
  ProblemType problem = ProblemType::kRegression;
  std::uint32_t classes = 1;
  std::uint32_t n_features = 0;
  double positive_rate = 0.5;
};

DatasetPlan PlanDataset(const GeneratorSpec& spec, int d) {
  CounterRng rng(CounterRng::Key(kStructureSeed, {kProblemStream, static_cast<std::uint64_t>(d)}));
  DatasetPlan plan;
  const double total = spec.binary_weight + spec.multiclass_weight + spec.regression_weight;
  const double u = rng.Uniform() * total;
  if (u < spec.binary_weight) {
    plan.problem = ProblemType::kBinary;
  } else if (u < spec.binary_weight + spec.multiclass_weight) {
    plan.problem = ProblemType::kMulticlass;
  } else {
    plan.problem = ProblemType::kRegression;
  }
  const std::uint64_t class_span = static_cast<std::uint64_t>(spec.max_classes - 2);
  const std::uint32_t classes = 3 + static_cast<std::uint32_t>(rng.Below(class_span > 0 ? class_span : 1));
  plan.classes = std::min<std::uint32_t>(classes, static_cast<std::uint32_t>(spec.max_classes));
  plan.n_features = 4 + static_cast<std::uint32_t>(rng.Below(60));
  plan.positive_rate = 0.3 + 0.4 * rng.Uniform();
  return plan;
}

std::uint32_t DrawRows(CounterRng& rng, int lo, int hi) {
  return static_cast<std::uint32_t>(lo) + static_cast<std::uint32_t>(rng.Below(static_cast<std::uint64_t>(hi - lo + 1)));
}

std::vector<double> DrawLabels(CounterRng& rng, const DatasetPlan& plan, std::uint32_t n) {
  std::vector<double> y(n);
  for (auto& v : y) {
    switch (plan.problem) {
      case ProblemType::kRegression:
        v = rng.Normal();
        break;
      case ProblemType::kBinary:
        v = rng.Uniform() < plan.positive_rate ? 1.0 : 0.0;
        break;
      case ProblemType::kMulticlass:
        v = static_cast<double>(rng.Below(plan.classes));
        break;
    }
  }
  return y;
}

bool HasBothClasses(const std::vector<double>& y) {
  const bool pos = std::find(y.begin(), y.end(), 1.0) != y.end();
  const bool neg = std::find(y.begin(), y.end(), 0.0) != y.end();
  return pos && neg;
}

// Link-space target for one row: o values.
void Target(const TaskMeta& task, double label, double logit_scale, double* out) {
  switch (task.problem) {
    case ProblemType::kRegression:
      out[0] = label;
      break;
    case ProblemType::kBinary:
      out[0] = label == 1.0 ? logit_scale : -logit_scale;
      break;
    case ProblemType::kMulticlass:
      for (std::uint32_t k = 0; k < task.output_dim; ++k) out[k] = k == label ? logit_scale : 0.0;
      break;
  }
}

// Inverse link, in place on one row.
void InverseLink(const TaskMeta& task, double* z) {
  switch (task.problem) {
    case ProblemType::kRegression:
      break;
    case ProblemType::kBinary:
      z[0] = Sigmoid(z[0]);
      break;
    case ProblemType::kMulticlass: {
      const double max = *std::max_element(z, z + task.output_dim);
      double sum = 0.0;
      for (std::uint32_t k = 0; k < task.output_dim; ++k) {
        z[k] = std::exp(z[k] - max);
        sum += z[k];
      }
      for (std::uint32_t k = 0; k < task.output_dim; ++k) z[k] /= sum;
      break;
    }
  }
}

struct ConfigPlan {
  std::size_t family = 0;
  double skill = 0.0;
};

}  // namespace

void GeneratorSpec::Validate() const {
  Require(n_datasets >= 1, "n_datasets must be at least 1");
  Require(folds >= 1, "folds must be at least 1");
  Require(!families.empty(), "families must not be empty");
  std::set<std::string> names;
  for (std::size_t i = 0; i < families.size(); ++i) {
    const auto& f = families[i];
    const std::string where = "families[" + std::to_string(i) + "]";
    Require(!f.name.empty(), where + ".name must not be empty");
    Require(names.insert(f.name).second, where + ".name duplicates " + f.name);
    Require(f.count >= 1, where + ".count must be positive");
    Require(f.skill >= 0.0 && f.skill <= 1.0, where + ".skill must be in [0, 1]");
    Require(f.noise > 0.0, where + ".noise must be positive");
    Require(f.correlation >= 0.0 && f.correlation < 1.0, where + ".correlation must be in [0, 1)");
    Require(f.fit_log_sd >= 0.0, where + ".fit_log_sd must be nonnegative");
    Require(f.infer_per_row >= 0.0, where + ".infer_per_row must be nonnegative");
  }
  Require(val_rows_min >= 2 && val_rows_min <= val_rows_max, "val_rows range must satisfy 2 <= min <= max");
  Require(test_rows_min >= 2 && test_rows_min <= test_rows_max, "test_rows range must satisfy 2 <= min <= max");
  Require(binary_weight >= 0 && multiclass_weight >= 0 && regression_weight >= 0 &&
              binary_weight + multiclass_weight + regression_weight > 0,
          "problem weights must be nonnegative with a positive sum");
  Require(max_classes >= 3, "max_classes must be at least 3");
  Require(bag_folds >= 1, "bag_folds must be at least 1");
  Require(bag_folds <= val_rows_min, "bag_folds cannot exceed val_rows min");
  Require(skill_spread >= 0.0 && dataset_skill_spread >= 0.0, "skill spreads must be nonnegative");
  Require(logit_scale > 0.0, "logit_scale must be positive");
}

GeneratorSpec ParseGeneratorSpec(std::string_view text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SpecError(std::string("spec: ") + e.what());
  }
  if (!root.is_object()) throw SpecError("spec: top level must be an object");

  GeneratorSpec spec;
  auto read = [](const json& obj, const std::string& where, auto& field, const char* key) {
    if (!obj.contains(key)) return;
    try {
      obj.at(key).get_to(field);
    } catch (const json::exception&) {
      throw SpecError("spec: " + where + key + " has the wrong type");
    }
  };
  static const std::set<std::string> kTopKeys = {
      "seed",          "n_datasets",        "folds",           "families",          "val_rows",
      "test_rows",     "problem_weights",   "max_classes",     "bag_folds",         "skill_spread",
      "dataset_skill_spread", "logit_scale"};
  for (const auto& [key, value] : root.items()) {
    if (!kTopKeys.contains(key)) throw SpecError("spec: unknown key '" + key + "'");
  }
  read(root, "", spec.seed, "seed");
  read(root, "", spec.n_datasets, "n_datasets");
  read(root, "", spec.folds, "folds");
  read(root, "", spec.max_classes, "max_classes");
  read(root, "", spec.bag_folds, "bag_folds");
  read(root, "", spec.skill_spread, "skill_spread");
  read(root, "", spec.dataset_skill_spread, "dataset_skill_spread");
  read(root, "", spec.logit_scale, "logit_scale");
  auto read_range = [](const json& root_obj, const char* key, int& lo, int& hi) {
    if (!root_obj.contains(key)) return;
    const json& r = root_obj.at(key);
    if (!r.is_array() || r.size() != 2 || !r[0].is_number_integer() || !r[1].is_number_integer()) {
      throw SpecError(std::string("spec: ") + key + " must be [min, max]");
    }
    lo = r[0].get<int>();
    hi = r[1].get<int>();
  };
  read_range(root, "val_rows", spec.val_rows_min, spec.val_rows_max);
  read_range(root, "test_rows", spec.test_rows_min, spec.test_rows_max);
  if (root.contains("problem_weights")) {
    const json& w = root.at("problem_weights");
    if (!w.is_object()) throw SpecError("spec: problem_weights must be an object");
    for (const auto& [key, value] : w.items()) {
      if (key != "binary" && key != "multiclass" && key != "regression") {
        throw SpecError("spec: unknown key 'problem_weights." + key + "'");
      }
    }
    read(w, "problem_weights.", spec.binary_weight, "binary");
    read(w, "problem_weights.", spec.multiclass_weight, "multiclass");
    read(w, "problem_weights.", spec.regression_weight, "regression");
  }
  if (root.contains("families")) {
    const json& families = root.at("families");
    if (!families.is_array()) throw SpecError("spec: families must be an array");
    static const std::set<std::string> kFamilyKeys = {"name",        "count",        "skill",     "noise",
                                                      "correlation", "fit_log_mean", "fit_log_sd", "infer_per_row"};
    for (std::size_t i = 0; i < families.size(); ++i) {
      const json& jf = families[i];
      const std::string where = "families[" + std::to_string(i) + "].";
      if (!jf.is_object()) throw SpecError("spec: " + where + " must be an object");
      for (const auto& [key, value] : jf.items()) {
        if (!kFamilyKeys.contains(key)) throw SpecError("spec: unknown key '" + where + key + "'");
      }
      FamilySpec f;
      read(jf, where, f.name, "name");
      read(jf, where, f.count, "count");
      read(jf, where, f.skill, "skill");
      read(jf, where, f.noise, "noise");
      read(jf, where, f.correlation, "correlation");
      read(jf, where, f.fit_log_mean, "fit_log_mean");
      read(jf, where, f.fit_log_sd, "fit_log_sd");
      read(jf, where, f.infer_per_row, "infer_per_row");
      spec.families.push_back(std::move(f));
    }
  }
  spec.Validate();
  return spec;
}

GeneratorSpec LoadGeneratorSpec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SpecError("spec: cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ParseGeneratorSpec(ss.str());
}

std::string GeneratorSpecToJson(const GeneratorSpec& spec) {
  json root;
  root["seed"] = spec.seed;
  root["n_datasets"] = spec.n_datasets;
  root["folds"] = spec.folds;
  root["val_rows"] = {spec.val_rows_min, spec.val_rows_max};
  root["test_rows"] = {spec.test_rows_min, spec.test_rows_max};
  root["problem_weights"] = {{"binary", spec.binary_weight},
                             {"multiclass", spec.multiclass_weight},
                             {"regression", spec.regression_weight}};
  root["max_classes"] = spec.max_classes;
  root["bag_folds"] = spec.bag_folds;
  root["skill_spread"] = spec.skill_spread;
  root["dataset_skill_spread"] = spec.dataset_skill_spread;
  root["logit_scale"] = spec.logit_scale;
  json families = json::array();
  for (const auto& f : spec.families) {
    families.push_back({{"name", f.name},
                        {"count", f.count},
                        {"skill", f.skill},
                        {"noise", f.noise},
                        {"correlation", f.correlation},
                        {"fit_log_mean", f.fit_log_mean},
                        {"fit_log_sd", f.fit_log_sd},
                        {"infer_per_row", f.infer_per_row}});
  }
  root["families"] = std::move(families);
  return root.dump(2) + "\n";
}

Matrix AggregateBagPredictions(std::span<const Matrix> fold_preds) {
  if (fold_preds.empty()) throw std::invalid_argument("aggregate_bag_predictions: no bag predictions");
  Matrix out(fold_preds.front().rows, fold_preds.front().cols);
  for (const Matrix& m : fold_preds) {
    if (m.rows != out.rows || m.cols != out.cols) {
      throw std::invalid_argument("aggregate_bag_predictions: shape mismatch");
    }
    for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] += m.values[i];
  }
  const double b = static_cast<double>(fold_preds.size());
  for (double& v : out.values) v /= b;
  return out;
}

RepositoryContents GenerateContents(const GeneratorSpec& spec) {
  spec.Validate();
  RepositoryContents repo;
  repo.folds_per_dataset = spec.folds;

  std::vector<ConfigPlan> plans;
  for (std::size_t f = 0; f < spec.families.size(); ++f) {
    const FamilySpec& family = spec.families[f];
    for (int k = 0; k < family.count; ++k) {
      const std::size_t c = repo.configs.size();
      ConfigPlan plan{f, family.skill};
      if (k > 0) {
        CounterRng rng(CounterRng::Key(kStructureSeed, {kConfigSkillStream, c}));
        plan.skill = std::clamp(family.skill + spec.skill_spread * rng.Normal(), 0.0, 1.0);
      }
      ConfigMeta meta;
      meta.family = family.name;
      meta.is_default = k == 0;
      meta.config_id = k == 0 ? family.name + "_default" : family.name + "_r" + std::to_string(k);
      char hp[64];
      std::snprintf(hp, sizeof(hp), "skill=%.4f", plan.skill);
      meta.hyperparams = hp;
      repo.configs.push_back(std::move(meta));
      plans.push_back(plan);
    }
  }
  const std::size_t num_configs = repo.configs.size();

  for (int d = 0; d < spec.n_datasets; ++d) {
    const DatasetPlan plan = PlanDataset(spec, d);
    for (int fold = 0; fold < spec.folds; ++fold) {
      TaskMeta task;
      task.dataset_id = DatasetName(d);
      task.fold = fold;
      task.problem = plan.problem;
      task.output_dim = plan.problem == ProblemType::kMulticlass ? plan.classes : 1;
      task.n_features = plan.n_features;

      CounterRng rows_rng(CounterRng::Key(kStructureSeed, {kRowsStream, static_cast<std::uint64_t>(d),
                                                           static_cast<std::uint64_t>(fold)}));
      task.n_val = DrawRows(rows_rng, spec.val_rows_min, spec.val_rows_max);
      task.n_test = DrawRows(rows_rng, spec.test_rows_min, spec.test_rows_max);

      std::vector<double> y_val;
      std::vector<double> y_test;
      for (int attempt = 0;; ++attempt) {
        if (attempt == kMaxLabelAttempts) {
          throw SpecError("spec: could not draw labels with both classes for " + task.dataset_id);
        }
        CounterRng rng(CounterRng::Key(spec.seed, {kTaskStream, static_cast<std::uint64_t>(d),
                                                   static_cast<std::uint64_t>(fold), static_cast<std::uint64_t>(attempt)}));
        y_val = DrawLabels(rng, plan, task.n_val);
        y_test = DrawLabels(rng, plan, task.n_test);
        if (plan.problem != ProblemType::kBinary || (HasBothClasses(y_val) && HasBothClasses(y_test))) break;
      }
      repo.tasks.push_back(task);
      repo.labels_val.push_back(y_val);
      repo.labels_test.push_back(y_test);
    }
  }

  const std::size_t num_tasks = repo.tasks.size();
  const std::size_t bags = static_cast<std::size_t>(spec.bag_folds);
  repo.predictions.resize(num_tasks * num_configs * 2);
  repo.evaluations.resize(num_tasks * num_configs);

  for (std::size_t t = 0; t < num_tasks; ++t) {
    const TaskMeta& task = repo.tasks[t];
    const std::size_t dataset = t / static_cast<std::size_t>(spec.folds);
    const std::size_t o = task.output_dim;
    std::vector<double> target(o);
    std::vector<double> z(o);

    for (std::size_t c = 0; c < num_configs; ++c) {
      const ConfigPlan& plan = plans[c];
      const FamilySpec& family = spec.families[plan.family];
      CounterRng skill_rng(CounterRng::Key(spec.seed, {kDatasetSkillStream, dataset, c}));
      const double skill = std::clamp(plan.skill + spec.dataset_skill_spread * skill_rng.Normal(), 0.0, 1.0);
      const double own = family.noise * std::sqrt(1.0 - family.correlation);
      const double shared = family.noise * std::sqrt(family.correlation);

      // Bag model b's prediction for `rows` rows of `split`; noise streams are
      // keyed by (task, config or family, bag, split) and drawn row-major.
      auto predict_rows = [&](Split split, std::size_t bag, std::size_t first, std::size_t count,
                              const std::vector<double>& labels, std::vector<double>& out) {
        const std::uint64_t s = static_cast<std::uint64_t>(split);
        CounterRng own_rng(CounterRng::Key(spec.seed, {kConfigNoiseStream, t, c, bag, s}));
        CounterRng fam_rng(CounterRng::Key(spec.seed, {kFamilyNoiseStream, t, plan.family, bag, s}));
        for (std::size_t r = 0; r < count; ++r) {
          Target(task, labels[first + r], spec.logit_scale, target.data());
          for (std::size_t k = 0; k < o; ++k) {
            const double e_own = own_rng.Normal();
            const double e_fam = fam_rng.Normal();
            z[k] = skill * target[k] + own * e_own + shared * e_fam;
          }
          InverseLink(task, z.data());
          for (std::size_t k = 0; k < o; ++k) out[(first + r) * o + k] = z[k];
        }
      };

      // Validation: contiguous slice per bag, predicted by that bag's model.
      std::vector<double> val(std::size_t{task.n_val} * o);
      for (std::size_t b = 0; b < bags; ++b) {
        const std::size_t lo = b * task.n_val / bags;
        const std::size_t hi = (b + 1) * task.n_val / bags;
        predict_rows(Split::kVal, b, lo, hi - lo, repo.labels_val[t], val);
      }
      // Test: every bag model predicts all rows; outputs are averaged.
      std::vector<Matrix> bag_test(bags, Matrix(task.n_test, o));
      for (std::size_t b = 0; b < bags; ++b) {
        predict_rows(Split::kTest, b, 0, task.n_test, repo.labels_test[t], bag_test[b].values);
      }
      const Matrix test = AggregateBagPredictions(bag_test);

      auto& val_f = repo.predictions[repo.PredictionSlot(t, c, Split::kVal)];
      auto& test_f = repo.predictions[repo.PredictionSlot(t, c, Split::kTest)];
      val_f.assign(val.begin(), val.end());
      test_f.assign(test.values.begin(), test.values.end());

      // Losses come from the stored float32 values.
      EvaluationRecord& rec = repo.evaluations[t * num_configs + c];
      const std::vector<double> val_d(val_f.begin(), val_f.end());
      const std::vector<double> test_d(test_f.begin(), test_f.end());
      rec.loss_val = TaskLoss(task, Split::kVal, val_d, repo.labels_val[t]);
      rec.loss_test = TaskLoss(task, Split::kTest, test_d, repo.labels_test[t]);
      CounterRng fit_rng(CounterRng::Key(spec.seed, {kFitTimeStream, t, c}));
      rec.time_fit = std::exp(family.fit_log_mean + family.fit_log_sd * fit_rng.Normal());
      CounterRng infer_rng(CounterRng::Key(spec.seed, {kInferTimeStream, t, c}));
      rec.time_infer = family.infer_per_row * std::exp(0.1 * infer_rng.Normal());
    }
  }
  return repo;
}

Repository GenerateRepo(const GeneratorSpec& spec) { return Repository::FromContents(GenerateContents(spec)); }

}  // namespace predrepo
