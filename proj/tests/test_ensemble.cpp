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


#include "predrepo/ensemble.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <limits>
#include <random>

#include "predrepo/metrics.hpp"
#include "predrepo/oracles.hpp"
#include "predrepo/synth.hpp"
#include "test_util.hpp"

namespace predrepo {
namespace {

using testing::RegressionContents;
using testing::SmallSpec;

// Straight-line greedy selection over eagerly loaded predictions.
struct ReferenceEnsemble {
  std::vector<std::size_t> picks;
  std::vector<double> losses;
};

ReferenceEnsemble ReferenceCaruana(const RepositoryContents& contents, std::size_t task,
                                   std::vector<std::size_t> candidates, int steps) {
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
  const auto& labels = contents.labels_val[task];
  ReferenceEnsemble out;
  for (int s = 0; s < steps; ++s) {
    double best_loss = std::numeric_limits<double>::infinity();
    std::size_t best = 0;
    for (std::size_t c : candidates) {
      const auto& first = contents.predictions[contents.PredictionSlot(task, c, Split::kVal)];
      std::vector<double> avg(first.size(), 0.0);
      for (std::size_t p : out.picks) {
        const auto& pred = contents.predictions[contents.PredictionSlot(task, p, Split::kVal)];
        for (std::size_t i = 0; i < avg.size(); ++i) avg[i] += pred[i];
      }
      for (std::size_t i = 0; i < avg.size(); ++i) avg[i] = (avg[i] + first[i]) / (out.picks.size() + 1);
      const double loss = TaskLoss(contents.tasks[task], Split::kVal, avg, labels);
      if (loss < best_loss) {
        best_loss = loss;
        best = c;
      }
    }
    out.picks.push_back(best);
    out.losses.push_back(best_loss);
  }
  return out;
}

TEST(Caruana, SingleCandidate) {
  const Repository repo = GenerateRepo(SmallSpec(1));
  const std::vector<std::size_t> cand = {3};
  const auto w = CaruanaSelect(repo, 0, cand, 5);
  EXPECT_EQ(w.counts, (std::map<std::size_t, int>{{3, 1}}));
  EXPECT_EQ(w.steps, 1);
  EXPECT_EQ(w.val_loss, repo.Evaluation(0, 3).loss_val);
  EXPECT_EQ(w.trajectory.size(), 5u);
}

TEST(Caruana, PerfectCandidateIsPickedFirst) {
  const std::vector<double> labels = {1, 2, 3, 4};
  const auto contents =
      RegressionContents({{{0, 0, 0, 0}, {1, 2, 3, 4}, {2, 2, 2, 2}}}, {labels});
  const Repository repo = Repository::FromContents(contents);
  const std::vector<std::size_t> cand = {0, 1, 2};
  const auto w = CaruanaSelect(repo, 0, cand, 4);
  EXPECT_EQ(w.trajectory[0].config, 1u);
  EXPECT_EQ(w.val_loss, 0.0);
  EXPECT_EQ(w.steps, 1);
}

TEST(Caruana, TiesGoToLowestOrdinal) {
  const auto contents = RegressionContents({{{1, 1}, {1, 1}, {1, 1}}}, {{0, 0}});
  const Repository repo = Repository::FromContents(contents);
  const std::vector<std::size_t> cand = {2, 1};
  EXPECT_EQ(CaruanaSelect(repo, 0, cand, 3).trajectory[0].config, 1u);
}

TEST(Caruana, ExhaustiveStepOracleOnSmallRegressionTask) {
  // M = 4 configs, n = 6 rows, C_max = 3.
  std::mt19937_64 gen(17);
  std::normal_distribution<float> noise(0.0f, 1.0f);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> labels(6);
    for (auto& y : labels) y = noise(gen);
    std::vector<std::vector<float>> preds(4, std::vector<float>(6));
    for (auto& p : preds) {
      for (std::size_t i = 0; i < 6; ++i) p[i] = static_cast<float>(labels[i]) + noise(gen);
    }
    const auto contents = RegressionContents({preds}, {labels});
    const Repository repo = Repository::FromContents(contents);
    const std::vector<std::size_t> cand = {0, 1, 2, 3};
    const auto w = CaruanaSelect(repo, 0, cand, 3);
    std::vector<std::size_t> picks;
    for (const auto& step : w.trajectory) {
      EXPECT_EQ(step.config, OracleEnsembleExtension(repo, 0, picks, cand));
      picks.push_back(step.config);
    }
    const auto ref = ReferenceCaruana(contents, 0, {0, 1, 2, 3}, 3);
    EXPECT_EQ(picks, ref.picks);
    EXPECT_EQ(w.val_loss, *std::min_element(ref.losses.begin(), ref.losses.end()));
  }
}

TEST(Caruana, ReturnsTrajectoryArgminPrefix) {
  const Repository repo = GenerateRepo(SmallSpec(2, 3, 2, 6));
  const std::vector<std::size_t> cand = {0, 1, 2, 3, 4, 5};
  for (std::size_t t = 0; t < repo.num_tasks(); ++t) {
    const auto w = CaruanaSelect(repo, t, cand, 10);
    ASSERT_EQ(w.trajectory.size(), 10u);
    double best = w.trajectory[0].val_loss;
    int best_steps = 1;
    for (int s = 1; s < 10; ++s) {
      if (w.trajectory[s].val_loss < best) {
        best = w.trajectory[s].val_loss;
        best_steps = s + 1;
      }
    }
    EXPECT_EQ(w.steps, best_steps);
    EXPECT_EQ(w.val_loss, best);
    int total = 0;
    for (const auto& [c, n] : w.counts) total += n;
    EXPECT_EQ(total, w.steps);
  }
}

TEST(Caruana, CandidateOrderAndDuplicatesDoNotMatter) {
  const Repository repo = GenerateRepo(SmallSpec(3));
  const std::vector<std::size_t> a = {0, 2, 4, 5};
  const std::vector<std::size_t> b = {5, 4, 4, 2, 0, 0};
  for (std::size_t t = 0; t < repo.num_tasks(); ++t) {
    const auto wa = CaruanaSelect(repo, t, a, 8);
    const auto wb = CaruanaSelect(repo, t, b, 8);
    EXPECT_EQ(wa.counts, wb.counts);
    EXPECT_EQ(wa.val_loss, wb.val_loss);
  }
}

TEST(Caruana, RejectsEmptyInput) {
  const Repository repo = GenerateRepo(SmallSpec(3));
  EXPECT_THROW(CaruanaSelect(repo, 0, std::vector<std::size_t>{}, 3), std::invalid_argument);
  EXPECT_THROW(CaruanaSelect(repo, 0, std::vector<std::size_t>{0}, 0), std::invalid_argument);
}

TEST(EnsemblePredict, WeightedAverage) {
  const auto contents = RegressionContents({{{0.9f, 0.3f}, {0.6f, 0.0f}}}, {{1, 0}});
  const Repository repo = Repository::FromContents(contents);
  EnsembleWeights w;
  w.counts = {{0, 2}, {1, 1}};
  w.steps = 3;
  const Matrix m = EnsemblePredict(w, 0, Split::kTest, repo);
  EXPECT_NEAR(m.at(0, 0), 0.8, 1e-7);
  EXPECT_NEAR(m.at(1, 0), 0.2, 1e-7);

  EnsembleWeights single;
  single.counts = {{1, 1}};
  single.steps = 1;
  const Matrix a = EnsemblePredict(single, 0, Split::kVal, repo);
  EXPECT_EQ(a.values, (std::vector<double>{0.6f, 0.0f}));
}

TEST(EnsemblePredict, IdenticalMembers) {
  const auto contents = RegressionContents({{{0.25f, 0.5f}, {0.25f, 0.5f}}}, {{1, 0}});
  const Repository repo = Repository::FromContents(contents);
  EnsembleWeights w;
  w.counts = {{0, 1}, {1, 1}};
  w.steps = 2;
  EXPECT_EQ(EnsemblePredict(w, 0, Split::kVal, repo).values, (std::vector<double>{0.25, 0.5}));
}

TEST(EvaluateEnsemble, BestSingleConfigMatchesStoredLosses) {
  const Repository repo = GenerateRepo(SmallSpec(4));
  const auto& cfg = repo.config(1).config_id;
  const auto evals = EvaluateEnsemble(repo, repo.datasets(), {0, 1}, {cfg}, 40);
  ASSERT_EQ(evals.size(), repo.num_tasks());
  for (const auto& e : evals) {
    const auto rec = repo.Evaluation(repo.FindTask(e.dataset, e.fold), 1);
    EXPECT_NEAR(e.val_loss, rec.loss_val, 1e-6);
    EXPECT_NEAR(e.test_loss, rec.loss_test, 1e-6);
  }
}

TEST(EvaluateEnsemble, DuplicateConfigsAreIgnored) {
  const Repository repo = GenerateRepo(SmallSpec(5));
  const std::vector<std::string> a = {repo.config(0).config_id, repo.config(3).config_id};
  const std::vector<std::string> b = {a[1], a[0], a[1]};
  const auto ea = EvaluateEnsemble(repo, repo.datasets(), {0, 1}, a, 6);
  const auto eb = EvaluateEnsemble(repo, repo.datasets(), {0, 1}, b, 6);
  for (std::size_t i = 0; i < ea.size(); ++i) {
    EXPECT_EQ(ea[i].val_loss, eb[i].val_loss);
    EXPECT_EQ(ea[i].test_loss, eb[i].test_loss);
  }
}

TEST(EvaluateEnsemble, MatchesEagerRecomputation) {
  // 2 datasets x 3 folds, 5 configs, C = 4.
  const RepositoryContents contents = GenerateContents(SmallSpec(6, 2, 3, 5));
  const Repository repo = Repository::FromContents(contents);
  std::vector<std::string> ids;
  for (const auto& c : contents.configs) ids.push_back(c.config_id);
  const auto evals = EvaluateEnsemble(repo, repo.datasets(), {0, 1, 2}, ids, 4, 3);
  ASSERT_EQ(evals.size(), 6u);
  for (const auto& e : evals) {
    const std::size_t t = repo.FindTask(e.dataset, e.fold);
    const auto ref = ReferenceCaruana(contents, t, {0, 1, 2, 3, 4}, 4);
    const std::size_t best = std::min_element(ref.losses.begin(), ref.losses.end()) - ref.losses.begin();
    std::vector<double> test(contents.predictions[contents.PredictionSlot(t, 0, Split::kTest)].size(), 0.0);
    for (std::size_t s = 0; s <= best; ++s) {
      const auto& p = contents.predictions[contents.PredictionSlot(t, ref.picks[s], Split::kTest)];
      for (std::size_t i = 0; i < test.size(); ++i) test[i] += p[i];
    }
    for (double& v : test) v /= static_cast<double>(best + 1);
    EXPECT_NEAR(e.val_loss, ref.losses[best], 1e-12);
    EXPECT_NEAR(e.test_loss, TaskLoss(contents.tasks[t], Split::kTest, test, contents.labels_test[t]), 1e-12);
  }
}

TEST(EvaluateEnsemble, ThreadCountDoesNotChangeResults) {
  const Repository repo = GenerateRepo(SmallSpec(7, 4, 2, 6));
  std::vector<std::string> ids;
  for (const auto& c : repo.configs()) ids.push_back(c.config_id);
  const auto a = EvaluateEnsemble(repo, repo.datasets(), {0, 1}, ids, 10, 1);
  const auto b = EvaluateEnsemble(repo, repo.datasets(), {0, 1}, ids, 10, 8);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].dataset, b[i].dataset);
    EXPECT_EQ(a[i].test_loss, b[i].test_loss);
    EXPECT_EQ(a[i].weights.counts, b[i].weights.counts);
  }
}

TEST(EvaluateEnsemble, UnknownConfigThrows) {
  const Repository repo = GenerateRepo(SmallSpec(8));
  EXPECT_THROW(EvaluateEnsemble(repo, repo.datasets(), {0}, {"xyz"}, 3), std::out_of_range);
}

}  // namespace
}  // namespace predrepo
