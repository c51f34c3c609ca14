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


#include "predrepo/metrics.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "predrepo/oracles.hpp"

namespace predrepo {
namespace {

// Pair counting, ties count one half.
double PairwiseAucLoss(const std::vector<double>& score, const std::vector<double>& label) {
  double wins = 0.0;
  double pairs = 0.0;
  for (std::size_t i = 0; i < score.size(); ++i) {
    if (label[i] != 1.0) continue;
    for (std::size_t j = 0; j < score.size(); ++j) {
      if (label[j] != 0.0) continue;
      pairs += 1.0;
      if (score[i] > score[j]) wins += 1.0;
      if (score[i] == score[j]) wins += 0.5;
    }
  }
  return 1.0 - wins / pairs;
}

TEST(Rmse, IdentityIsZero) {
  const std::vector<double> v = {1.5, -2.0, 3.25};
  EXPECT_EQ(Rmse(v, v), 0.0);
}

TEST(Rmse, HandArithmetic) {
  const std::vector<double> pred = {0.0, 0.0};
  const std::vector<double> target = {3.0, 4.0};
  EXPECT_NEAR(Rmse(pred, target), std::sqrt(12.5), 1e-15);
  EXPECT_NEAR(Rmse(pred, target), 3.5355339, 1e-7);
}

TEST(Rmse, MatchesLongDoubleReference) {
  std::mt19937_64 gen(11);
  std::normal_distribution<double> normal;
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> pred(100), target(100);
    for (auto& x : pred) x = normal(gen);
    for (auto& x : target) x = normal(gen);
    long double sum = 0.0L;
    for (std::size_t i = 0; i < pred.size(); ++i) {
      const long double d = static_cast<long double>(pred[i]) - target[i];
      sum += d * d;
    }
    const double expected = static_cast<double>(std::sqrt(sum / pred.size()));
    EXPECT_NEAR(Rmse(pred, target), expected, 1e-12);
  }
}

TEST(Rmse, RejectsBadInput) {
  const std::vector<double> a = {1.0, 2.0};
  const std::vector<double> b = {1.0};
  const std::vector<double> nan = {1.0, std::nan("")};
  EXPECT_THROW(Rmse(a, b), std::invalid_argument);
  EXPECT_THROW(Rmse({}, {}), std::invalid_argument);
  EXPECT_THROW(Rmse(nan, a), std::invalid_argument);
}

TEST(AucLoss, PerfectRanking) {
  EXPECT_EQ(AucLoss(std::vector<double>{0.9, 0.1}, std::vector<double>{1, 0}), 0.0);
  EXPECT_EQ(AucLoss(std::vector<double>{0.1, 0.9}, std::vector<double>{1, 0}), 1.0);
}

TEST(AucLoss, AllTiedIsHalf) {
  const std::vector<double> score(7, 0.3);
  const std::vector<double> label = {1, 0, 0, 1, 1, 0, 1};
  EXPECT_EQ(AucLoss(score, label), 0.5);
}

TEST(AucLoss, SingleClassIsAnError) {
  const std::vector<double> score = {0.1, 0.2};
  try {
    AucLoss(score, std::vector<double>{1, 1});
    FAIL() << "expected throw";
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("AUC undefined"), std::string::npos);
  }
}

TEST(AucLoss, RejectsNonBinaryLabels) {
  EXPECT_THROW(AucLoss(std::vector<double>{0.1, 0.2, 0.3}, std::vector<double>{0, 1, 2}), std::invalid_argument);
}

TEST(AucLoss, MatchesPairwiseOnRandomAndTieHeavyInput) {
  std::mt19937_64 gen(5);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 2 + static_cast<int>(gen() % 499);
    const int levels = trial % 3 == 0 ? 3 : (trial % 3 == 1 ? 20 : 1 << 30);
    std::vector<double> score(n), label(n);
    for (int i = 0; i < n; ++i) {
      score[i] = static_cast<double>(gen() % levels) / levels;
      label[i] = static_cast<double>(gen() % 2);
    }
    label[0] = 0.0;
    label[1] = 1.0;
    const double expected = PairwiseAucLoss(score, label);
    EXPECT_NEAR(AucLoss(score, label), expected, 1e-12);
    EXPECT_NEAR(OracleAucPairwise(score, label), expected, 1e-12);
  }
}

TEST(AucLoss, InvariantUnderMonotoneTransform) {
  std::mt19937_64 gen(9);
  std::uniform_real_distribution<double> u(-2, 2);
  std::vector<double> score(200), label(200), transformed(200);
  for (int i = 0; i < 200; ++i) {
    score[i] = u(gen);
    label[i] = i % 3 == 0 ? 1.0 : 0.0;
    transformed[i] = std::exp(3.0 * score[i]);
  }
  EXPECT_EQ(AucLoss(score, label), AucLoss(transformed, label));
}

TEST(LogLoss, OneHotCorrectIsZero) {
  const std::vector<double> probs = {1, 0, 0, 0, 1, 0, 0, 0, 1};
  const std::vector<double> label = {0, 1, 2};
  EXPECT_NEAR(LogLoss(probs, 3, label), 0.0, 1e-12);
}

TEST(LogLoss, UniformFourClasses) {
  const std::vector<double> probs(8, 0.25);
  const std::vector<double> label = {0, 3};
  EXPECT_NEAR(LogLoss(probs, 4, label), std::log(4.0), 1e-15);
  EXPECT_NEAR(LogLoss(probs, 4, label), 1.3862944, 1e-7);
}

TEST(LogLoss, ClipsZeroProbability) {
  const std::vector<double> probs = {0, 1};
  EXPECT_NEAR(LogLoss(probs, 2, std::vector<double>{0}), -std::log(1e-15), 1e-9);
}

TEST(LogLoss, MatchesDirectSummation) {
  std::mt19937_64 gen(21);
  std::uniform_real_distribution<double> u(0.01, 1.0);
  const int n = 200, k = 5;
  std::vector<double> probs(n * k), label(n);
  for (int i = 0; i < n; ++i) {
    double sum = 0.0;
    for (int j = 0; j < k; ++j) sum += probs[i * k + j] = u(gen);
    for (int j = 0; j < k; ++j) probs[i * k + j] /= sum;
    label[i] = static_cast<double>(gen() % k);
  }
  long double total = 0.0L;
  for (int i = 0; i < n; ++i) total -= std::log(static_cast<long double>(probs[i * k + static_cast<int>(label[i])]));
  EXPECT_NEAR(LogLoss(probs, k, label), static_cast<double>(total / n), 1e-12);
}

TEST(LogLoss, RejectsRowsThatDoNotSumToOne) {
  const std::vector<double> probs = {0.5, 0.3};
  EXPECT_THROW(LogLoss(probs, 2, std::vector<double>{0}), std::invalid_argument);
}

TEST(LogLoss, RejectsOutOfRangeLabel) {
  const std::vector<double> probs = {0.5, 0.5};
  EXPECT_THROW(LogLoss(probs, 2, std::vector<double>{2}), std::invalid_argument);
}

TEST(TaskLoss, DispatchesOnProblemType) {
  TaskMeta task;
  task.n_val = 2;
  task.n_test = 2;
  const std::vector<double> label = {0, 1};

  task.problem = ProblemType::kRegression;
  task.output_dim = 1;
  const std::vector<double> reg = {0.0, 0.0};
  EXPECT_EQ(TaskLoss(task, Split::kVal, reg, label), Rmse(reg, label));

  task.problem = ProblemType::kBinary;
  const std::vector<double> score = {0.2, 0.8};
  EXPECT_EQ(TaskLoss(task, Split::kVal, score, label), 0.0);

  task.problem = ProblemType::kMulticlass;
  task.output_dim = 3;
  const std::vector<double> probs = {0.5, 0.25, 0.25, 0.25, 0.5, 0.25};
  EXPECT_DOUBLE_EQ(TaskLoss(task, Split::kTest, probs, label), std::log(2.0));
}

TEST(TaskLoss, ShapeMismatchThrows) {
  TaskMeta task;
  task.n_val = 3;
  const std::vector<double> pred = {0.0, 0.0};
  const std::vector<double> label = {0.0, 0.0};
  EXPECT_THROW(TaskLoss(task, Split::kVal, pred, label), std::invalid_argument);
}

}  // namespace
}  // namespace predrepo
