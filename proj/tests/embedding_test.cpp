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

#include "etc/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>
#include <vector>

#include <gtest/gtest.h>

#include "etc/errors.hpp"
#include "test_util.hpp"

namespace etc {
namespace {

constexpr double kTolerance = 1e-9;

TEST(NormalizeTest, Endpoints) {
  EXPECT_EQ(NormalizePixel(0), -1.0);
  EXPECT_EQ(NormalizePixel(255), 1.0);
  EXPECT_DOUBLE_EQ(NormalizePixel(51), -0.6);
  EXPECT_DOUBLE_EQ(NormalizePixel(204), 0.6);
}

TEST(NormalizeTest, NegationIsExactForAllValues) {
  for (int v = 0; v < 256; ++v) {
    const auto p = static_cast<std::uint8_t>(v);
    ASSERT_EQ(NormalizePixel(static_cast<std::uint8_t>(255 - v)),
              -NormalizePixel(p))
        << v;
  }
}

TEST(NormalizeTest, MatchesMeanStdForm) {
  for (int v = 0; v < 256; ++v) {
    EXPECT_NEAR(NormalizePixel(static_cast<std::uint8_t>(v)),
                (v / 255.0 - 0.5) / 0.5, 1e-15);
  }
}

TEST(SignedPermutationTest, Validation) {
  EXPECT_THROW(SignedPermutation({0, 0}, {1, 1}), ShapeError);
  EXPECT_THROW(SignedPermutation({0, 1}, {1}), ShapeError);
  EXPECT_THROW(SignedPermutation({0, 1}, {1, 2}), RangeError);
  EXPECT_NO_THROW(SignedPermutation({1, 0}, {-1, 1}));
}

TEST(SignedPermutationTest, TransposeIsInverse) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 1 + rng() % 40;
    std::vector<std::uint32_t> src(n);
    std::iota(src.begin(), src.end(), 0U);
    std::shuffle(src.begin(), src.end(), rng);
    std::vector<std::int8_t> signs(n);
    for (auto& s : signs) s = rng() % 2 ? 1 : -1;
    const SignedPermutation m(src, signs);
    const Matrix product = m.Dense() * m.Transpose().Dense();
    ASSERT_TRUE(product == Matrix::Identity(n, n));
    ASSERT_EQ(m * m.Transpose(), SignedPermutation::Identity(n));
  }
}

TEST(SignedPermutationTest, ApplyMatchesDense) {
  const SignedPermutation m({2, 0, 1}, {1, -1, 1});
  RowVector x(3);
  x << 10, 20, 30;
  const RowVector y = m.Apply(x);
  const Eigen::VectorXd dense = m.Dense() * x.transpose();
  for (int i = 0; i < 3; ++i) EXPECT_EQ(y[i], dense[i]);
  EXPECT_EQ(y[0], 30);
  EXPECT_EQ(y[1], -10);
  Matrix a(3, 2);
  a << 1, 2, 3, 4, 5, 6;
  EXPECT_TRUE(m.ApplyRows(a) == m.Dense() * a);
}

TEST(SignedPermutationTest, ProductMatchesDense) {
  const SignedPermutation a({1, 2, 0}, {1, -1, -1});
  const SignedPermutation b({2, 1, 0}, {-1, 1, 1});
  EXPECT_TRUE((a * b).Dense() == a.Dense() * b.Dense());
}

// Reference values from tests/oracles/embedding_reference.py.
TEST(RandomParamsTest, GoldenEntries) {
  const EmbeddingParams p = RandomParams(16, 4, 4, 7);
  ASSERT_EQ(p.projection.rows(), 768);
  ASSERT_EQ(p.projection.cols(), 4);
  ASSERT_EQ(p.positions.rows(), 4);
  EXPECT_DOUBLE_EQ(p.projection(0, 0), -0.007950853052873526);
  EXPECT_DOUBLE_EQ(p.projection(767, 3), -0.011854460745760518);
  EXPECT_DOUBLE_EQ(p.positions(3, 3), -0.1210617313131227);
  EXPECT_EQ(p.dim(), 4U);
  EXPECT_EQ(p.num_patches(), 4U);
}

TEST(EmbedTest, GoldenEmbedding) {
  const EmbeddingParams p = RandomParams(16, 4, 4, 7);
  const Matrix z = Embed(testing::FixtureImage(32, 32), p);
  const double expected[4][4] = {
      {0.2516451103236179, 0.1674032046105418, 0.18626924890803045,
       0.35516399690427103},
      {-0.12077643252218051, 0.31099151161029126, -0.2136606860300117,
       -0.7228764776866576},
      {-0.11862153731257102, -0.8444388370993694, 0.09436098115200015,
       0.13870690373119762},
      {0.49697086570889865, -0.13920809587145516, 0.09711912104413584,
       -0.34179186485829655}};
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) EXPECT_NEAR(z(i, j), expected[i][j], 1e-12);
  }
}

TEST(EmbedTest, ZeroParamsGiveZeroEmbedding) {
  EmbeddingParams p;
  p.patch = 16;
  p.projection = Matrix::Zero(768, 8);
  p.positions = Matrix::Zero(4, 8);
  EXPECT_TRUE(Embed(testing::FixtureImage(32, 32), p).isZero(0.0));
}

TEST(EmbedTest, UnitColumnSelectsFirstValue) {
  EmbeddingParams p;
  p.patch = 1;
  p.projection = Matrix::Zero(3, 1);
  p.projection(0, 0) = 1.0;
  p.positions = Matrix::Constant(1, 1, 0.25);
  const RasterImage img(1, 1, {51, 9, 9});
  EXPECT_DOUBLE_EQ(Embed(img, p)(0, 0), NormalizePixel(51) + 0.25);
}

TEST(EmbedTest, ShapeErrors) {
  const EmbeddingParams p = RandomParams(16, 4, 4, 7);
  EXPECT_THROW(Embed(testing::FixtureImage(48, 32), p), ShapeError);
  EXPECT_THROW(Embed(testing::FixtureImage(40, 32), p), DimensionError);
}

TEST(PositionPermutationTest, SingleBlockIsIdentity) {
  EXPECT_EQ(PositionPermutation(MasterKey{{9, 9, 9, 9}}, CipherSpec{}, 1),
            SignedPermutation::Identity(1));
}

TEST(PositionPermutationTest, GoldenZeroSeed) {
  // Order [2, 1, 0, 3]: grid position 0 holds block 2.
  const SignedPermutation e1 = PositionPermutation(MasterKey{}, CipherSpec{}, 4);
  const Matrix d = e1.Dense();
  EXPECT_EQ(d(0, 2), 1.0);
  EXPECT_EQ(d(2, 0), 1.0);
  EXPECT_EQ(d(1, 1), 1.0);
  EXPECT_EQ(d(3, 3), 1.0);
  EXPECT_EQ(d.sum(), 4.0);
}

TEST(BlockTransformMatrixTest, IdentityAndNegation) {
  EXPECT_EQ(BlockTransformMatrix(BlockTransform{}, 4),
            SignedPermutation::Identity(48));
  const Matrix neg = BlockTransformMatrix(BlockTransform{0, true, 0}, 4).Dense();
  EXPECT_TRUE(neg == -Matrix::Identity(48, 48));
}

TEST(BlockTransformMatrixTest, MatchesPixelTransformForAll96) {
  std::mt19937_64 rng(2);
  for (std::size_t i = 0; i < kNumTransforms; ++i) {
    const BlockTransform t = TransformFromIndex(i);
    const SignedPermutation m = BlockTransformMatrix(t, 5);
    for (int trial = 0; trial < 3; ++trial) {
      const Block b = testing::RandomImage(rng, 5, 5);
      const RowVector lhs = Normalize(Flatten(ApplyTransform(b, t)));
      const RowVector rhs = m.Apply(Normalize(Flatten(b)));
      ASSERT_TRUE(lhs == rhs) << i;
    }
  }
}

TEST(BlockTransformMatrixTest, HomomorphismOnAllPairs) {
  std::vector<SignedPermutation> mats;
  for (std::size_t i = 0; i < kNumTransforms; ++i) {
    mats.push_back(BlockTransformMatrix(TransformFromIndex(i), 2));
  }
  for (std::size_t i = 0; i < kNumTransforms; ++i) {
    for (std::size_t j = 0; j < kNumTransforms; ++j) {
      const BlockTransform composed =
          Compose(TransformFromIndex(j), TransformFromIndex(i));
      ASSERT_EQ(BlockTransformMatrix(composed, 2), mats[j] * mats[i]);
    }
  }
}

TEST(BlockTransformMatrixTest, SignsUniformWithinBlock) {
  for (std::size_t i = 0; i < kNumTransforms; ++i) {
    const BlockTransform t = TransformFromIndex(i);
    const SignedPermutation m = BlockTransformMatrix(t, 3);
    for (std::size_t r = 0; r < m.size(); ++r) {
      ASSERT_EQ(m.sign(r), t.negate ? -1 : 1);
    }
  }
}

TEST(AdaptParamsTest, IdentityKeyEffectsLeaveParamsUnchanged) {
  const EmbeddingParams p = RandomParams(16, 4, 8, 3);
  const EmbeddingParams a =
      AdaptParams(p, MasterKey{{1, 2, 3, 4}}, {16, KeyMode::kUniform, 0});
  EXPECT_TRUE(a.projection == p.projection);
  EXPECT_TRUE(a.positions == p.positions);
}

TEST(AdaptParamsTest, NegPosOnlyFlipsProjection) {
  const EmbeddingParams p = RandomParams(16, 4, 8, 3);
  // Find a key whose single negation draw is set.
  for (std::uint64_t seed = 0;; ++seed) {
    const MasterKey key{{5, 0, seed, 0}};
    const CipherSpec spec{16, KeyMode::kUniform,
                          static_cast<std::uint8_t>(kNegPos | kScramble)};
    if (!DerivePlan(key, spec, 4).transforms[0].negate) continue;
    const EmbeddingParams a = AdaptParams(p, key, spec);
    EXPECT_TRUE(a.projection == -p.projection);
    EXPECT_TRUE(a.positions == PositionPermutation(key, spec, 4).ApplyRows(p.positions));
    break;
  }
}

TEST(AdaptParamsTest, Errors) {
  const EmbeddingParams p = RandomParams(16, 4, 8, 3);
  EXPECT_THROW(AdaptParams(p, MasterKey{}, CipherSpec{}), ModeError);
  EXPECT_THROW(AdaptParams(p, MasterKey{}, {8, KeyMode::kUniform, kAllSteps}),
               ShapeError);
}

TEST(EquivalenceTest, UniformKeyHolds) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    const RasterImage img = testing::RandomImage(rng, 48, 32);
    const EmbeddingParams p = RandomParams(16, 6, 16, rng());
    const MasterKey key = testing::RandomKey(rng);
    EXPECT_LT(VerifyEquivalence(img, p, key, {16, KeyMode::kUniform, kAllSteps}),
              kTolerance);
  }
}

TEST(EquivalenceTest, StepsDisabledIsExact) {
  const EmbeddingParams p = RandomParams(16, 4, 16, 1);
  EXPECT_EQ(VerifyEquivalence(testing::FixtureImage(32, 32), p,
                              MasterKey{{1, 2, 3, 4}}, {16, KeyMode::kUniform, 0}),
            0.0);
}

TEST(EquivalenceTest, PerBlockKeysAreRejectedAndBreakEquivalence) {
  std::mt19937_64 rng(5);
  const RasterImage img = testing::RandomImage(rng, 64, 64);
  const EmbeddingParams p = RandomParams(16, 16, 16, 2);
  const MasterKey key = testing::RandomKey(rng);
  EXPECT_THROW(VerifyEquivalence(img, p, key, CipherSpec{}), ModeError);
  EXPECT_GT(EquivalenceDeviation(img, p, key, CipherSpec{}), 1e-3);
}

TEST(MatrixDumpTest, RoundTripIsExact) {
  const EmbeddingParams p = RandomParams(4, 3, 5, 9);
  std::stringstream ss;
  WriteMatrix(ss, p.projection);
  EXPECT_EQ(ss.str().substr(0, 5), "48 5\n");
  EXPECT_TRUE(ReadMatrix(ss) == p.projection);
}

TEST(MatrixDumpTest, MalformedIsFormatError) {
  std::stringstream bad("2 2\n1 2\n3\n");
  EXPECT_THROW(ReadMatrix(bad), FormatError);
  std::stringstream junk("x y\n");
  EXPECT_THROW(ReadMatrix(junk), FormatError);
}

}  // namespace
}  // namespace etc
