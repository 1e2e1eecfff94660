/*
 * Copyright 2026 The etc-isotropic Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "etc/probe.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "etc/errors.hpp"
#include "test_util.hpp"

namespace etc {
namespace {

std::vector<std::size_t> AllRows(std::size_t n) {
  std::vector<std::size_t> rows(n);
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  return rows;
}

LinearProbe RandomProbe(std::mt19937_64& rng, int d, int k) {
  std::normal_distribution<double> normal(0.0, 0.5);
  LinearProbe p;
  p.weights = Matrix(d, k);
  p.bias = RowVector(k);
  for (Eigen::Index i = 0; i < p.weights.size(); ++i) p.weights.data()[i] = normal(rng);
  for (Eigen::Index i = 0; i < k; ++i) p.bias[i] = normal(rng);
  return p;
}

TEST(CrossEntropyGradientTest, MatchesCentralDifferences) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> normal;
  constexpr double kEps = 1e-5;
  for (int trial = 0; trial < 10; ++trial) {
    const int d = 5, k = 3, n = 12;
    Matrix x(n, d);
    for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = normal(rng);
    std::vector<int> labels(n);
    for (int& l : labels) l = static_cast<int>(rng() % k);
    const auto rows = AllRows(n);
    LinearProbe p = RandomProbe(rng, d, k);
    const ProbeGradient g = CrossEntropyGradient(p, x, labels, rows);
    for (Eigen::Index i = 0; i < p.weights.size(); ++i) {
      const double w = p.weights.data()[i];
      p.weights.data()[i] = w + kEps;
      const double up = CrossEntropy(p, x, labels, rows);
      p.weights.data()[i] = w - kEps;
      const double down = CrossEntropy(p, x, labels, rows);
      p.weights.data()[i] = w;
      const double fd = (up - down) / (2 * kEps);
      const double analytic = g.weights.data()[i];
      ASSERT_LT(std::abs(fd - analytic) / std::max(1.0, std::abs(fd)), 1e-4);
    }
    for (Eigen::Index j = 0; j < k; ++j) {
      const double b = p.bias[j];
      p.bias[j] = b + kEps;
      const double up = CrossEntropy(p, x, labels, rows);
      p.bias[j] = b - kEps;
      const double down = CrossEntropy(p, x, labels, rows);
      p.bias[j] = b;
      ASSERT_LT(std::abs((up - down) / (2 * kEps) - g.bias[j]), 1e-4);
    }
  }
}

TEST(TrainTest, SeparableDataIsFitPerfectly) {
  // Two Gaussian blobs far apart; a perceptron separates them, so the
  // probe must as well.
  std::mt19937_64 rng(2);
  std::normal_distribution<double> normal(0.0, 0.3);
  const int n = 200;
  Matrix x(n, 2);
  std::vector<int> labels(n);
  for (int i = 0; i < n; ++i) {
    labels[i] = i % 2;
    const double c = labels[i] ? 2.0 : -2.0;
    x(i, 0) = c + normal(rng);
    x(i, 1) = -c + normal(rng);
  }
  const auto rows = AllRows(n);
  const LinearProbe p = Train(x, labels, rows, 2, ProbeHyper{0.5, 50, 16, 3});
  EXPECT_EQ(Evaluate(p, x, labels, rows), 1.0);
  EXPECT_TRUE(p.IsFinite());
}

TEST(TrainTest, UntrainedProbeIsNearChance) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> normal;
  const int n = 4000, k = 4;
  Matrix x(n, 6);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = normal(rng);
  std::vector<int> labels(n);
  for (int& l : labels) l = static_cast<int>(rng() % k);
  const LinearProbe p = RandomProbe(rng, 6, k);
  const double acc = Evaluate(p, x, labels, AllRows(n));
  const double sigma = std::sqrt(0.25 * 0.75 / n);
  EXPECT_NEAR(acc, 0.25, 3 * sigma);
}

TEST(TrainTest, FullBatchLossDecreases) {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> normal;
  const int n = 64;
  Matrix x(n, 4);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = normal(rng);
  std::vector<int> labels(n);
  for (int i = 0; i < n; ++i) labels[i] = x(i, 0) + 0.5 * x(i, 1) > 0 ? 1 : 0;
  const auto rows = AllRows(n);
  double previous = std::log(2.0);
  for (int epochs = 1; epochs <= 20; ++epochs) {
    const LinearProbe p = Train(x, labels, rows, 2, ProbeHyper{0.1, epochs, 64, 0});
    const double loss = CrossEntropy(p, x, labels, rows);
    EXPECT_LT(loss, previous) << epochs;
    previous = loss;
  }
}

TEST(TrainTest, DeterministicForSeed) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> normal;
  Matrix x(50, 3);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = normal(rng);
  std::vector<int> labels(50);
  for (int i = 0; i < 50; ++i) labels[i] = i % 3;
  const auto rows = AllRows(50);
  const ProbeHyper hyper{0.3, 10, 8, 9};
  EXPECT_TRUE(Train(x, labels, rows, 3, hyper).weights ==
              Train(x, labels, rows, 3, hyper).weights);
}

TEST(TrainTest, UsageErrors) {
  const Matrix x = Matrix::Zero(4, 2);
  const std::vector<int> same = {1, 1, 1, 1};
  EXPECT_THROW(Train(x, same, AllRows(4), 2, ProbeHyper{}), UsageError);
  const std::vector<int> labels = {0, 1, 0, 1};
  EXPECT_THROW(Train(x, labels, {}, 2, ProbeHyper{}), UsageError);
}

TEST(SyntheticShapesTest, BalancedSplitAndDeterministic) {
  const LabeledDataset a = SyntheticShapes(200, 5, 4, 32);
  const LabeledDataset b = SyntheticShapes(200, 5, 4, 32);
  ASSERT_EQ(a.images.size(), 200U);
  EXPECT_EQ(a.num_classes, 4);
  EXPECT_EQ(a.train.size(), 160U);
  EXPECT_EQ(a.test.size(), 40U);
  std::set<std::size_t> all(a.train.begin(), a.train.end());
  all.insert(a.test.begin(), a.test.end());
  EXPECT_EQ(all.size(), 200U);
  std::vector<int> counts(4);
  for (int l : a.labels) ++counts[l];
  for (int c : counts) EXPECT_EQ(c, 50);
  for (std::size_t i = 0; i < 200; ++i) ASSERT_EQ(a.images[i], b.images[i]);
  EXPECT_EQ(a.train, b.train);
  EXPECT_NE(a.images[0], SyntheticShapes(200, 6, 4, 32).images[0]);
}

TEST(FeaturizeTest, MeanOfEmbeddingRows) {
  const EmbeddingParams p = RandomParams(16, 4, 4, 7);
  const RowVector f = Featurize(testing::FixtureImage(32, 32), p);
  // Reference values from tests/oracles/embedding_reference.py.
  const double expected[4] = {0.12730450154944126, -0.1263130541874979,
                              0.04102216626853868, -0.1426993604773714};
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(f[i], expected[i], 1e-12);
}

TEST(ParityExperimentTest, AdaptedArmMatchesPlainArm) {
  const LabeledDataset data = SyntheticShapes(240, 1);
  const ParityReport r = ParityExperiment(data, MasterKey{{1, 2, 3, 4}}, 32,
                                          ProbeHyper{0.5, 60, 32, 0}, 11);
  EXPECT_TRUE(r.predictions_identical);
  EXPECT_EQ(r.adapted_accuracy, r.plain_accuracy);
  EXPECT_LT(r.feature_deviation, 1e-9);
  EXPECT_GT(r.encrypted_accuracy, r.chance());
  EXPECT_EQ(r.test_count, 48U);
}

TEST(ParityExperimentTest, NoStepsMakesAllArmsEqual) {
  const LabeledDataset data = SyntheticShapes(120, 2);
  const ParityReport r = ParityExperiment(data, MasterKey{{1, 2, 3, 4}}, 16,
                                          ProbeHyper{0.5, 20, 16, 0}, 3, 16, 0);
  EXPECT_EQ(r.plain_accuracy, r.encrypted_accuracy);
  EXPECT_EQ(r.plain_accuracy, r.adapted_accuracy);
  EXPECT_EQ(r.feature_deviation, 0.0);
}

}  // namespace
}  // namespace etc
