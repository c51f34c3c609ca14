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

#include "predrepo/simulate.hpp"

#include <algorithm>
#include <limits>
#include <set>
#include <stdexcept>
#include <string>

#include "predrepo/metrics.hpp"
#include "predrepo/parallel.hpp"
#include "predrepo/rng.hpp"

namespace predrepo {
namespace {

// Stream tags for CounterRng keys.
constexpr std::uint64_t kTrainDatasetStream = 0x7472616964617461ULL;
constexpr std::uint64_t kFamilyOrderStream = 0x66616d6f72646572ULL;

SimResult FallbackResult(const Repository& repo, std::size_t task, const BudgetPolicy& policy) {
  const EvaluationRecord rec = repo.Evaluation(task, policy.fallback_config);
  SimResult result;
  result.task = task;
  result.included = {policy.fallback_config};
  result.used_fallback = true;
  result.val_loss = rec.loss_val;
  result.test_loss = rec.loss_test;
  result.sim_fit_time_s = rec.time_fit;
  result.sim_infer_time_s = rec.time_infer;
  result.members = {policy.fallback_config};
  return result;
}

double SumFitTimes(const Repository& repo, std::size_t task, std::span<const std::size_t> configs) {
  double total = 0.0;
  for (std::size_t c : configs) total += repo.Evaluation(task, c).time_fit;
  return total;
}

// Scores a Caruana ensemble built from `pool` on both splits.
void ScoreEnsemble(const Repository& repo, std::size_t task, std::span<const std::size_t> pool, int c_max,
                   SimResult& result) {
  const EnsembleWeights weights = CaruanaSelect(repo, task, pool, c_max);
  const TaskMeta& meta = repo.task(task);
  for (Split split : {Split::kVal, Split::kTest}) {
    const Matrix pred = EnsemblePredict(weights, task, split, repo);
    const double loss = TaskLoss(meta, split, pred.values, repo.Labels(task, split));
    (split == Split::kVal ? result.val_loss : result.test_loss) = loss;
  }
  result.members.clear();
  result.sim_infer_time_s = 0.0;
  for (const auto& [config, count] : weights.counts) {
    result.members.push_back(config);
    result.sim_infer_time_s += repo.Evaluation(task, config).time_infer;
  }
}

}  // namespace

BudgetPolicy BudgetPolicy::Create(const Repository& repo, double budget_s, std::size_t fallback_config) {
  if (!(budget_s > 0.0)) throw std::invalid_argument("budget must be positive");
  if (fallback_config >= repo.num_configs()) throw std::out_of_range("unknown fallback config ordinal");
  for (std::size_t t = 0; t < repo.num_tasks(); ++t) {
    const double fit = repo.Evaluation(t, fallback_config).time_fit;
    if (fit > kMaxFallbackFitSeconds) {
      throw std::invalid_argument("fallback config " + repo.config(fallback_config).config_id + " takes " +
                                  std::to_string(fit) + " s to fit on task " + repo.task(t).dataset_id + "/" +
                                  std::to_string(repo.task(t).fold) + "; the limit is 60 s");
    }
  }
  return BudgetPolicy{budget_s, fallback_config};
}

std::size_t PickFallbackConfig(const Repository& repo) {
  std::size_t best = repo.num_configs();
  double best_time = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < repo.num_configs(); ++c) {
    if (!repo.config(c).is_default) continue;
    double slowest = 0.0;
    for (std::size_t t = 0; t < repo.num_tasks(); ++t) slowest = std::max(slowest, repo.Evaluation(t, c).time_fit);
    if (slowest < best_time) {
      best = c;
      best_time = slowest;
    }
  }
  if (best == repo.num_configs()) throw std::invalid_argument("repository has no default config to fall back to");
  return best;
}

std::size_t AnytimePrefixLength(std::span<const double> fit_times, double budget_s) {
  double cumulative = 0.0;
  std::size_t n = 0;
  for (double t : fit_times) {
    cumulative += t;
    if (cumulative > budget_s) break;
    ++n;
  }
  return n;
}

AnytimeSelection AnytimeFilter(std::span<const std::size_t> order, std::size_t task, const BudgetPolicy& policy,
                               const Repository& repo) {
  std::vector<double> fit_times;
  fit_times.reserve(order.size());
  for (std::size_t c : order) fit_times.push_back(repo.Evaluation(task, c).time_fit);
  const std::size_t n = AnytimePrefixLength(fit_times, policy.budget_s);
  if (n == 0) return {{policy.fallback_config}, true};
  return {std::vector<std::size_t>(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n)), false};
}

PortfolioSimulation SimulatePortfolio(const Repository& repo, const BudgetPolicy& policy,
                                      const PortfolioSimOptions& options) {
  const auto& datasets = repo.datasets();
  if (datasets.size() < 2) throw std::invalid_argument("portfolio simulation needs at least two datasets");
  if (options.n_train_datasets < 0 || static_cast<std::size_t>(options.n_train_datasets) > datasets.size() - 1) {
    throw std::invalid_argument("n_train_datasets exceeds the " + std::to_string(datasets.size() - 1) +
                                " available training datasets");
  }
  std::vector<std::size_t> candidates = options.candidates;
  if (candidates.empty()) {
    candidates.resize(repo.num_configs());
    for (std::size_t c = 0; c < candidates.size(); ++c) candidates[c] = c;
  }

  PortfolioSimulation sim;
  sim.portfolios.resize(datasets.size());
  ParallelFor(datasets.size(), options.threads, [&](std::size_t d) {
    std::vector<std::size_t> train;
    if (options.n_train_datasets == 0) {
      train = LooTrainTasks(repo, datasets[d]);
    } else {
      CounterRng rng(CounterRng::Key(options.seed, {kTrainDatasetStream, d}));
      for (std::size_t pick : rng.SampleSorted(datasets.size() - 1, static_cast<std::size_t>(options.n_train_datasets))) {
        const std::size_t other = pick < d ? pick : pick + 1;
        for (std::size_t t : repo.TasksOfDataset(datasets[other])) train.push_back(t);
      }
    }
    sim.portfolios[d] = LearnPortfolio(repo, train, candidates, options.n_max, options.aggregation);
  });

  sim.results.resize(repo.num_tasks());
  ParallelFor(repo.num_tasks(), options.threads, [&](std::size_t t) {
    const Portfolio& portfolio = sim.portfolios[repo.FindDataset(repo.task(t).dataset_id)];
    const AnytimeSelection selection = AnytimeFilter(portfolio.configs, t, policy, repo);
    if (selection.used_fallback) {
      sim.results[t] = FallbackResult(repo, t, policy);
      return;
    }
    SimResult& result = sim.results[t];
    result.task = t;
    result.included = selection.included;
    result.sim_fit_time_s = SumFitTimes(repo, t, selection.included);
    ScoreEnsemble(repo, t, selection.included, options.c_max, result);
  });
  return sim;
}

std::string_view ToString(FamilyMode mode) {
  switch (mode) {
    case FamilyMode::kDefault:
      return "default";
    case FamilyMode::kTuned:
      return "tuned";
    case FamilyMode::kTunedEnsemble:
      return "tuned + ensemble";
  }
  return "unknown";
}

std::vector<std::string> Families(const Repository& repo) {
  std::vector<std::string> out;
  for (const auto& config : repo.configs()) {
    if (std::find(out.begin(), out.end(), config.family) == out.end()) out.push_back(config.family);
  }
  return out;
}

std::vector<SimResult> SimulateSingleFamily(const Repository& repo, std::string_view family, FamilyMode mode,
                                            const BudgetPolicy& policy, int c_max,
                                            std::optional<std::uint64_t> shuffle_seed, int threads) {
  std::vector<std::size_t> members;
  std::optional<std::size_t> default_config;
  for (std::size_t c = 0; c < repo.num_configs(); ++c) {
    if (repo.config(c).family != family) continue;
    members.push_back(c);
    if (repo.config(c).is_default && !default_config) default_config = c;
  }
  if (members.empty()) throw std::invalid_argument("unknown family: " + std::string(family));
  if (mode == FamilyMode::kDefault && !default_config) {
    throw std::invalid_argument("family " + std::string(family) + " has no default config");
  }
  const std::uint64_t family_hash = CounterRng::Key(0, {members.front(), members.size()});

  std::vector<SimResult> results(repo.num_tasks());
  ParallelFor(repo.num_tasks(), threads, [&](std::size_t t) {
    SimResult& result = results[t];
    result.task = t;
    if (mode == FamilyMode::kDefault) {
      const EvaluationRecord rec = repo.Evaluation(t, *default_config);
      result.included = {*default_config};
      result.members = {*default_config};
      result.val_loss = rec.loss_val;
      result.test_loss = rec.loss_test;
      result.sim_fit_time_s = rec.time_fit;
      result.sim_infer_time_s = rec.time_infer;
      return;
    }

    std::vector<std::size_t> order = members;
    if (shuffle_seed) {
      CounterRng rng(CounterRng::Key(*shuffle_seed, {kFamilyOrderStream, family_hash, t}));
      for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.Below(i)]);
    }
    const AnytimeSelection selection = AnytimeFilter(order, t, policy, repo);
    if (selection.used_fallback) {
      result = FallbackResult(repo, t, policy);
      return;
    }
    result.included = selection.included;
    result.sim_fit_time_s = SumFitTimes(repo, t, selection.included);

    // Fitted configs ranked by validation loss, ties by ordinal.
    std::vector<std::pair<double, std::size_t>> ranked;
    for (std::size_t c : selection.included) ranked.emplace_back(repo.Evaluation(t, c).loss_val, c);
    std::sort(ranked.begin(), ranked.end());

    if (mode == FamilyMode::kTuned) {
      const std::size_t best = ranked.front().second;
      const EvaluationRecord rec = repo.Evaluation(t, best);
      result.members = {best};
      result.val_loss = rec.loss_val;
      result.test_loss = rec.loss_test;
      result.sim_infer_time_s = rec.time_infer;
      return;
    }
    std::vector<std::size_t> pool;
    for (std::size_t i = 0; i < ranked.size() && i < kTunedEnsembleTopK; ++i) pool.push_back(ranked[i].second);
    ScoreEnsemble(repo, t, pool, c_max, result);
  });
  return results;
}

}  // namespace predrepo
