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

#include <gtest/gtest.h>

#include <algorithm>
#include <cstring>
#include <numeric>
#include <random>

#include "predrepo/ensemble.hpp"
#include "predrepo/metrics.hpp"
#include "predrepo/oracles.hpp"
#include "predrepo/rng.hpp"
#include "test_util.hpp"

namespace predrepo {
namespace {

using testing::SmallSpec;
using testing::TempDir;

TEST(CounterRng, ReferenceValues) {
  // SplitMix64 with seed 0: first outputs of the standard generator.
  CounterRng rng(0);
  EXPECT_EQ(rng.NextU64(), 0xE220A8397B1DCDAFULL);
  EXPECT_EQ(rng.NextU64(), 0x6E789E6AA1B965F4ULL);
  EXPECT_EQ(rng.NextU64(), 0x06C45D188009454FULL);
}

TEST(CounterRng, RangesAndSamples) {
  CounterRng rng(CounterRng::Key(3, {1, 2}));
  for (int i = 0; i < 1000; ++i) {
    const double u = rng.Uniform();
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
    EXPECT_LT(rng.Below(7), 7u);
  }
  const auto sample = rng.SampleSorted(10, 4);
  EXPECT_EQ(sample.size(), 4u);
  EXPECT_TRUE(std::is_sorted(sample.begin(), sample.end()));
  EXPECT_EQ(std::adjacent_find(sample.begin(), sample.end()), sample.end());
  EXPECT_NE(CounterRng::Key(3, {1, 2}), CounterRng::Key(3, {2, 1}));
}

TEST(AggregateBag, SingleBagIsIdentity) {
  Matrix m(2, 2);
  m.values = {1, 2, 3, 4};
  const std::vector<Matrix> bags = {m};
  EXPECT_EQ(AggregateBagPredictions(bags).values, m.values);
}

TEST(AggregateBag, OppositesCancel) {
  Matrix f(3, 1), g(3, 1);
  f.values = {0.5, -1.25, 3.0};
  g.values = {-0.5, 1.25, -3.0};
  const std::vector<Matrix> bags = {f, g};
  EXPECT_EQ(AggregateBagPredictions(bags).values, (std::vector<double>{0, 0, 0}));
}

TEST(AggregateBag, MatchesDirectMean) {
  std::mt19937_64 gen(1);
  std::normal_distribution<double> normal;
  std::vector<Matrix> bags(8, Matrix(5, 3));
  for (auto& b : bags) {
    for (auto& v : b.values) v = normal(gen);
  }
  const Matrix mean = AggregateBagPredictions(bags);
  for (std::size_t i = 0; i < 15; ++i) {
    long double sum = 0.0L;
    for (const auto& b : bags) sum += b.values[i];
    EXPECT_NEAR(mean.values[i], static_cast<double>(sum / 8), 1e-12);
  }
}

TEST(AggregateBag, Errors) {
  EXPECT_THROW(AggregateBagPredictions(std::vector<Matrix>{}), std::invalid_argument);
  const std::vector<Matrix> bags = {Matrix(2, 1), Matrix(3, 1)};
  EXPECT_THROW(AggregateBagPredictions(bags), std::invalid_argument);
}

TEST(Generate, IsDeterministic) {
  const auto spec = SmallSpec(42, 3, 2, 7);
  TempDir a, b;
  WriteRepo(GenerateRepo(spec), a.path());
  WriteRepo(GenerateRepo(spec), b.path());
  for (const char* f : {kManifestFile, kLabelsFile, kEvalsFile, kIndexFile, kBlobFile}) {
    EXPECT_EQ(testing::ReadFile(a.path() / f), testing::ReadFile(b.path() / f)) << f;
  }
}

TEST(Generate, PassesValidation) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    EXPECT_TRUE(ValidateRepo(GenerateRepo(SmallSpec(seed, 4, 2, 6))).empty()) << "seed " << seed;
  }
}

TEST(Generate, ShapeAndNaming) {
  const auto contents = GenerateContents(SmallSpec(1, 4, 3, 7));
  EXPECT_EQ(contents.tasks.size(), 12u);
  EXPECT_EQ(contents.configs.size(), 7u);
  EXPECT_EQ(contents.tasks[4].dataset_id, "ds001");
  EXPECT_EQ(contents.tasks[4].fold, 1);
  EXPECT_EQ(contents.configs[0].config_id, "GBM_default");
  EXPECT_TRUE(contents.configs[0].is_default);
  EXPECT_EQ(contents.configs[1].config_id, "GBM_r1");
  EXPECT_FALSE(contents.configs[1].is_default);
  for (const auto& task : contents.tasks) {
    EXPECT_GE(task.n_val, 20u);
    EXPECT_LE(task.n_val, 50u);
    if (task.problem == ProblemType::kMulticlass) {
      EXPECT_GE(task.output_dim, 3u);
      EXPECT_LE(task.output_dim, 4u);
    } else {
      EXPECT_EQ(task.output_dim, 1u);
    }
  }
}

TEST(Generate, BinaryTasksHaveBothClasses) {
  GeneratorSpec spec = SmallSpec(5, 20, 2, 3);
  spec.multiclass_weight = spec.regression_weight = 0.0;
  spec.val_rows_min = spec.test_rows_min = 4;
  spec.val_rows_max = spec.test_rows_max = 6;
  spec.bag_folds = 2;
  const auto contents = GenerateContents(spec);
  for (std::size_t t = 0; t < contents.tasks.size(); ++t) {
    for (const auto* labels : {&contents.labels_val[t], &contents.labels_test[t]}) {
      EXPECT_NE(std::count(labels->begin(), labels->end(), 1.0), 0);
      EXPECT_NE(std::count(labels->begin(), labels->end(), 0.0), 0);
    }
  }
}

TEST(Generate, ReseedingKeepsShapesAndMetadata) {
  const auto a = GenerateContents(SmallSpec(1, 5, 2, 6));
  const auto b = GenerateContents(SmallSpec(2, 5, 2, 6));
  ASSERT_EQ(a.tasks.size(), b.tasks.size());
  for (std::size_t t = 0; t < a.tasks.size(); ++t) {
    EXPECT_EQ(a.tasks[t].problem, b.tasks[t].problem);
    EXPECT_EQ(a.tasks[t].n_val, b.tasks[t].n_val);
    EXPECT_EQ(a.tasks[t].n_test, b.tasks[t].n_test);
    EXPECT_EQ(a.tasks[t].output_dim, b.tasks[t].output_dim);
  }
  for (std::size_t c = 0; c < a.configs.size(); ++c) {
    EXPECT_EQ(a.configs[c].config_id, b.configs[c].config_id);
    EXPECT_EQ(a.configs[c].hyperparams, b.configs[c].hyperparams);
  }
  EXPECT_NE(a.predictions[0], b.predictions[0]);
}

TEST(Generate, NearPerfectConfigIsBest) {
  GeneratorSpec spec = SmallSpec(3, 4, 2, 6);
  FamilySpec oracle;
  oracle.name = "Oracle";
  oracle.count = 1;
  oracle.skill = 1.0;
  oracle.noise = 1e-6;
  spec.families.push_back(oracle);
  spec.dataset_skill_spread = 0.0;
  const Repository repo = GenerateRepo(spec);
  const std::size_t best = repo.FindConfig("Oracle_default");
  for (std::size_t t = 0; t < repo.num_tasks(); ++t) {
    for (std::size_t c = 0; c < repo.num_configs(); ++c) {
      EXPECT_LE(repo.Evaluation(t, best).loss_val, repo.Evaluation(t, c).loss_val);
    }
  }
}

TEST(Generate, EnsemblingHelpsWithDiverseFamilies) {
  int helped = 0;
  const int runs = 20;
  for (int seed = 0; seed < runs; ++seed) {
    const Repository repo = GenerateRepo(SmallSpec(seed, 3, 2, 6));
    std::vector<std::size_t> all(repo.num_configs());
    std::iota(all.begin(), all.end(), std::size_t{0});
    double ensemble = 0.0, single = 0.0;
    for (std::size_t t = 0; t < repo.num_tasks(); ++t) {
      ensemble += CaruanaSelect(repo, t, all, 20).val_loss;
      double best = repo.Evaluation(t, 0).loss_val;
      for (std::size_t c : all) best = std::min(best, repo.Evaluation(t, c).loss_val);
      single += best;
    }
    helped += ensemble <= single;
  }
  EXPECT_GE(helped, runs * 95 / 100);
}

TEST(Spec, ParsesAndRoundTrips) {
  const std::string text = R"({
    "seed": 9, "n_datasets": 5, "folds": 2,
    "families": [{"name": "A", "count": 3, "skill": 0.6, "noise": 0.8, "correlation": 0.2}],
    "val_rows": [10, 20], "test_rows": [15, 25],
    "problem_weights": {"binary": 1, "multiclass": 0, "regression": 2},
    "max_classes": 5, "bag_folds": 4
  })";
  const GeneratorSpec spec = ParseGeneratorSpec(text);
  EXPECT_EQ(spec.seed, 9u);
  EXPECT_EQ(spec.n_datasets, 5);
  ASSERT_EQ(spec.families.size(), 1u);
  EXPECT_EQ(spec.families[0].count, 3);
  EXPECT_EQ(spec.test_rows_max, 25);
  EXPECT_EQ(spec.multiclass_weight, 0.0);
  const GeneratorSpec again = ParseGeneratorSpec(GeneratorSpecToJson(spec));
  EXPECT_EQ(GeneratorSpecToJson(again), GeneratorSpecToJson(spec));
}

TEST(Spec, SyntaxErrorNamesLine) {
  try {
    ParseGeneratorSpec("{\n  \"seed\": 1,\n  \"folds\": ,\n}");
    FAIL() << "expected SpecError";
  } catch (const SpecError& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
}

TEST(Spec, RejectsUnknownKeysAndBadValues) {
  EXPECT_THROW(ParseGeneratorSpec(R"({"seeds": 1, "families": [{"name": "A"}]})"), SpecError);
  EXPECT_THROW(ParseGeneratorSpec(R"({"families": []})"), SpecError);
  EXPECT_THROW(ParseGeneratorSpec(R"({"families": [{"name": "A", "skill": 1.5}]})"), SpecError);
  EXPECT_THROW(ParseGeneratorSpec(R"({"families": [{"name": "A", "correlation": 1.0}]})"), SpecError);
  EXPECT_THROW(ParseGeneratorSpec(R"({"folds": "three", "families": [{"name": "A"}]})"), SpecError);
}

TEST(Oracles, SingleCandidate) {
  const Repository repo = GenerateRepo(SmallSpec(2));
  const std::vector<std::size_t> one = {4};
  EXPECT_EQ(OracleEnsembleExtension(repo, 0, {}, one), 4u);
  EXPECT_EQ(OraclePortfolioExtension(repo, std::vector<std::size_t>{0, 1}, one, {}, Aggregation::kRawLoss), 4u);
}

TEST(Oracles, RejectLargeCandidateSets) {
  const Repository repo = GenerateRepo(SmallSpec(2, 2, 1, 9));
  std::vector<std::size_t> all(9);
  std::iota(all.begin(), all.end(), std::size_t{0});
  EXPECT_THROW(OracleEnsembleExtension(repo, 0, {}, all), std::invalid_argument);
}

TEST(Oracles, AucPairwiseExamples) {
  EXPECT_EQ(OracleAucPairwise(std::vector<double>{0.9, 0.1}, std::vector<double>{1, 0}), 0.0);
  EXPECT_EQ(OracleAucPairwise(std::vector<double>{0.5, 0.5, 0.5}, std::vector<double>{1, 0, 1}), 0.5);
}

}  // namespace
}  // namespace predrepo
