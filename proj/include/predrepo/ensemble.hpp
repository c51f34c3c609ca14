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

// Greedy (Caruana) ensemble selection over stored validation predictions.

#ifndef PREDREPO_ENSEMBLE_HPP_
#define PREDREPO_ENSEMBLE_HPP_

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "predrepo/store.hpp"
#include "predrepo/types.hpp"

namespace predrepo {

inline constexpr int kDefaultCaruanaSteps = 40;

struct EnsembleStep {
  std::size_t config = 0;  // config ordinal picked at this step
  double val_loss = 0.0;   // validation loss of the running average after it
};

struct EnsembleWeights {
  // Config ordinal -> number of times picked within the returned prefix.
  std::map<std::size_t, int> counts;
  // Length of the returned prefix; equals the sum of counts.
  int steps = 0;
  // Every step of the full run, even past the returned prefix.
  std::vector<EnsembleStep> trajectory;
  double val_loss = 0.0;

  double Weight(std::size_t config) const;
  // Counts after the first `prefix` steps of the trajectory.
  std::map<std::size_t, int> CountsAtStep(int prefix) const;
};

// Runs `max_steps` greedy steps with replacement. Each step adds the
// candidate whose inclusion minimizes the validation loss of the running
// average; ties go to the lowest config ordinal. Returns the prefix with the
// lowest validation loss (earliest on ties). Duplicate candidates are
// ignored and candidate order does not matter.
EnsembleWeights CaruanaSelect(const Repository& repo, std::size_t task, std::span<const std::size_t> candidates,
                              int max_steps = kDefaultCaruanaSteps);

// Weighted average (counts / steps) of the members' stored predictions.
Matrix EnsemblePredict(const EnsembleWeights& weights, std::size_t task, Split split, const Repository& repo);

struct EnsembleEvaluation {
  std::string dataset;
  int fold = 0;
  double val_loss = 0.0;
  double test_loss = 0.0;
  EnsembleWeights weights;
};

// For every (dataset, fold) pair in input order: select an ensemble from
// `configs` on validation predictions and score it on both splits.
std::vector<EnsembleEvaluation> EvaluateEnsemble(const Repository& repo, const std::vector<std::string>& datasets,
                                                 const std::vector<int>& folds,
                                                 const std::vector<std::string>& configs,
                                                 int ensemble_size = kDefaultCaruanaSteps, int threads = 1);

}  // namespace predrepo

#endif  // PREDREPO_ENSEMBLE_HPP_
