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

// Seeded synthetic repository generator.
//
// Each dataset draws a problem type and, per fold, labels for a validation
// and a test split. Every config produces predictions in link space
// (identity for regression, logit for binary, per-class logits for
// multiclass) as
//
//   z = skill * target + noise * (sqrt(1 - rho) * e_config + sqrt(rho) * e_family)
//
// where target is the label (regression), +-scale (binary) or scale times the
// one-hot label (multiclass), and e_config / e_family are standard normals
// drawn per row and output. e_family is shared by every config of a family,
// which correlates their errors. Validation rows are split into B
// contiguous slices and each slice is predicted by its own bag model; test
// predictions average the B bag models' outputs after the link inverse.
//
// Every random quantity comes from its own CounterRng stream keyed by
// (seed, purpose, coordinates), so the output depends only on the spec.
// Problem types, class counts, row counts and per-config skills use a fixed
// key instead of the seed: reseeding changes values, never shapes or
// metadata.

#ifndef PREDREPO_SYNTH_HPP_
#define PREDREPO_SYNTH_HPP_

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "predrepo/store.hpp"
#include "predrepo/types.hpp"

namespace predrepo {

class SpecError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct FamilySpec {
  std::string name;
  int count = 1;
  double skill = 0.5;        // in [0, 1]
  double noise = 1.0;        // > 0
  double correlation = 0.3;  // rho in [0, 1)
  // log(fit seconds) ~ Normal(fit_log_mean, fit_log_sd).
  double fit_log_mean = 4.0;
  double fit_log_sd = 0.5;
  double infer_per_row = 1e-4;
};

struct GeneratorSpec {
  std::uint64_t seed = 0;
  int n_datasets = 4;
  int folds = 3;
  std::vector<FamilySpec> families;
  int val_rows_min = 40;
  int val_rows_max = 80;
  int test_rows_min = 40;
  int test_rows_max = 80;
  // Relative weights of problem types.
  double binary_weight = 1.0;
  double multiclass_weight = 1.0;
  double regression_weight = 1.0;
  int max_classes = 4;
  int bag_folds = 8;
  // Std-dev of per-config skill around the family skill (the default config
  // keeps the family skill exactly) and of the per-(dataset, config)
  // interaction.
  double skill_spread = 0.1;
  double dataset_skill_spread = 0.05;
  // Logit magnitude of a perfectly confident classifier.
  double logit_scale = 3.0;

  // Throws SpecError naming the offending field.
  void Validate() const;
};

// Parses the JSON spec format. Syntax errors carry line and column;
// unknown keys and out-of-range values are rejected.
GeneratorSpec ParseGeneratorSpec(std::string_view text);
GeneratorSpec LoadGeneratorSpec(const std::string& path);
std::string GeneratorSpecToJson(const GeneratorSpec& spec);

RepositoryContents GenerateContents(const GeneratorSpec& spec);
Repository GenerateRepo(const GeneratorSpec& spec);

// Elementwise mean of B equally shaped matrices.
Matrix AggregateBagPredictions(std::span<const Matrix> fold_preds);

}  // namespace predrepo

#endif  // PREDREPO_SYNTH_HPP_
