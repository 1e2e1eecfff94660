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

#include "etc/evaluation.hpp"

#include <random>

#include <gtest/gtest.h>

#include "etc/errors.hpp"
#include "etc/image_io.hpp"
#include "test_util.hpp"

namespace etc {
namespace {

RasterImage Corpus(const std::string& name) {
  return LoadImage(testing::CorpusDir() / name);
}

std::vector<CorpusImage> SmallCorpus() {
  std::vector<CorpusImage> corpus;
  for (const char* name : {"astronaut_03.png", "coffee_05.png", "chelsea_07.png",
                           "rocket_11.png"}) {
    corpus.push_back({name, Corpus(name)});
  }
  return corpus;
}

TEST(SsimTest, IdenticalImagesScoreOne) {
  const RasterImage img = Corpus("coffee_00.png");
  EXPECT_DOUBLE_EQ(Ssim(img, img), 1.0);
}

// Reference values from tests/oracles/ssim_reference.py.
TEST(SsimTest, MatchesBruteForceReference) {
  const RasterImage a = Corpus("astronaut_00.png");
  EXPECT_NEAR(Ssim(a, Corpus("chelsea_00.png")), 0.11613607218614408, 1e-12);
  const RasterImage enc = Encrypt(a, MasterKey{{1, 2, 3, 4}}, CipherSpec{}).image;
  EXPECT_NEAR(Ssim(a, enc), 0.011247939938201883, 1e-12);
}

TEST(SsimTest, Symmetric) {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 5; ++i) {
    const RasterImage a = testing::RandomImage(rng, 24, 16);
    const RasterImage b = testing::RandomImage(rng, 24, 16);
    EXPECT_NEAR(Ssim(a, b), Ssim(b, a), 1e-12);
  }
}

TEST(SsimTest, ShapeErrors) {
  EXPECT_THROW(Ssim(RasterImage(16, 16), RasterImage(16, 24)), ShapeError);
  EXPECT_THROW(Ssim(RasterImage(4, 4), RasterImage(4, 4)), ShapeError);
}

TEST(SsimTest, WrongKeyDecryptionLeaksLittle) {
  const RasterImage img = Corpus("chelsea_02.png");
  const EncryptedImage enc = Encrypt(img, MasterKey{{1, 2, 3, 4}}, CipherSpec{});
  EXPECT_LT(Ssim(img, Decrypt(enc, MasterKey{{11, 12, 13, 14}})), 0.2);
}

TEST(JpegRoundTripTest, SmallerThanRawAndMonotone) {
  const RasterImage img = Corpus("astronaut_04.png");
  const std::size_t raw = std::size_t{img.width} * img.height * kChannels;
  const JpegRoundTrip rt = JpegRoundTripImage(img, 85);
  EXPECT_LT(rt.bytes, raw);
  EXPECT_EQ(rt.decoded.width, img.width);
  EXPECT_EQ(JpegRoundTripSize(img, 85), rt.bytes);
  EXPECT_LT(JpegRoundTripSize(img, 20), rt.bytes);
}

TEST(JpegRoundTripTest, SolidColourIsFarSmaller) {
  RasterImage solid(64, 64);
  for (std::size_t i = 0; i < solid.pixels.size(); ++i) {
    solid.pixels[i] = static_cast<std::uint8_t>(i % 3 == 0 ? 200 : 40);
  }
  EXPECT_LT(JpegRoundTripSize(solid, 85) * 2,
            JpegRoundTripSize(Corpus("coffee_01.png"), 85));
}

TEST(JpegRoundTripTest, EncryptedImageDecodes) {
  const RasterImage img = Corpus("rocket_02.png");
  const RasterImage enc = Encrypt(img, MasterKey{{7, 7, 7, 7}}, CipherSpec{}).image;
  const JpegRoundTrip rt = JpegRoundTripImage(enc, 85);
  EXPECT_EQ(rt.decoded.width, enc.width);
  EXPECT_EQ(rt.decoded.height, enc.height);
}

TEST(SummaryTest, QuartilesWhiskersOutliers) {
  const Summary s = Summarize({9, 1, 2, 3, 100, 4, 5, 6, 7, 8});
  EXPECT_EQ(s.count, 10U);
  EXPECT_DOUBLE_EQ(s.min, 1);
  EXPECT_DOUBLE_EQ(s.q1, 3.25);
  EXPECT_DOUBLE_EQ(s.median, 5.5);
  EXPECT_DOUBLE_EQ(s.q3, 7.75);
  EXPECT_DOUBLE_EQ(s.max, 100);
  EXPECT_DOUBLE_EQ(s.mean, 14.5);
  EXPECT_DOUBLE_EQ(s.whisker_low, 1);
  EXPECT_DOUBLE_EQ(s.whisker_high, 9);
  EXPECT_EQ(s.outliers, 1U);
}

TEST(SummaryTest, SingleValue) {
  const Summary s = Summarize({0.5});
  EXPECT_DOUBLE_EQ(s.q1, 0.5);
  EXPECT_DOUBLE_EQ(s.q3, 0.5);
  EXPECT_EQ(s.outliers, 0U);
}

TEST(CompressionReportTest, TotalsAreSums) {
  const auto corpus = SmallCorpus();
  const CompressionReport r =
      BuildCompressionReport(corpus, MasterKey{{1, 2, 3, 4}}, {85, 80});
  ASSERT_EQ(r.entries.size(), 4U);
  std::size_t raw = 0, png = 0, enc85 = 0, plain80 = 0;
  for (const CompressionEntry& e : r.entries) {
    raw += e.raw_bytes;
    png += e.plain_png;
    enc85 += e.encrypted_jpeg[0];
    plain80 += e.plain_jpeg[1];
  }
  EXPECT_EQ(r.raw_total, raw);
  EXPECT_EQ(r.plain_png_total, png);
  EXPECT_EQ(r.encrypted_jpeg_total[0], enc85);
  EXPECT_EQ(r.plain_jpeg_total[1], plain80);
  EXPECT_GT(r.JpegRatio(0), 0.0);
  EXPECT_GT(r.PngRatio(), 0.0);
  EXPECT_LE(r.plain_jpeg_total[1], r.plain_jpeg_total[0]);
}

TEST(CompressionReportTest, IdentityCipherRatioIsOne) {
  const CompressionReport r = BuildCompressionReport(
      SmallCorpus(), MasterKey{{1, 2, 3, 4}}, {85}, {16, KeyMode::kPerBlock, 0});
  EXPECT_EQ(r.JpegRatio(0), 1.0);
  EXPECT_EQ(r.PngRatio(), 1.0);
}

TEST(CompressionReportTest, DeterministicAndThreadIndependent) {
  const auto corpus = SmallCorpus();
  const MasterKey key{{1, 2, 3, 4}};
  const std::string a = BuildCompressionReport(corpus, key, {85}).Records();
  const std::string b = BuildCompressionReport(corpus, key, {85}, {}, 4).Records();
  EXPECT_EQ(a, b);
  EXPECT_NE(a.find("\"codec\""), std::string::npos);
}

TEST(CompressionReportTest, UsageErrors) {
  EXPECT_THROW(BuildCompressionReport({}, MasterKey{}, {85}), UsageError);
  EXPECT_THROW(BuildCompressionReport(SmallCorpus(), MasterKey{}, {0}),
               UsageError);
}

TEST(LeakageReportTest, IdentityCipherScoresOne) {
  const SsimReport r = BuildLeakageReport(SmallCorpus(), MasterKey{{1, 2, 3, 4}},
                                          {16, KeyMode::kPerBlock, 0});
  for (const LeakageEntry& e : r.entries) EXPECT_EQ(e.ssim, 1.0);
  EXPECT_EQ(r.summary.mean, 1.0);
}

TEST(LeakageReportTest, ScrambleOnlyLeaksMoreThanFullCipher) {
  const auto corpus = SmallCorpus();
  const MasterKey key{{1, 2, 3, 4}};
  const SsimReport full = BuildLeakageReport(corpus, key);
  const SsimReport scramble =
      BuildLeakageReport(corpus, key, {16, KeyMode::kPerBlock, kScramble});
  EXPECT_GT(scramble.summary.mean, full.summary.mean);
}

TEST(LeakageReportTest, Deterministic) {
  const auto corpus = SmallCorpus();
  const MasterKey key{{9, 8, 7, 6}};
  EXPECT_EQ(BuildLeakageReport(corpus, key).Records(),
            BuildLeakageReport(corpus, key, {}, 3).Records());
}

TEST(LoadCorpusTest, EmptyDirectoryIsUsageError) {
  testing::TempDir dir("empty");
  EXPECT_THROW(LoadCorpus(dir.path()), UsageError);
}

TEST(LoadCorpusTest, LoadsFixtureInOrder) {
  const auto corpus = LoadCorpus(testing::CorpusDir(), 16, 4);
  ASSERT_EQ(corpus.size(), 120U);
  EXPECT_EQ(corpus.front().path, "astronaut_00.png");
  EXPECT_EQ(corpus.front().image.width, 64U);
}

}  // namespace
}  // namespace etc
