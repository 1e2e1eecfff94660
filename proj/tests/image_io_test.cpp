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

#include "etc/image_io.hpp"

#include <fstream>
#include <random>

#include <gtest/gtest.h>

#include "etc/errors.hpp"
#include "test_util.hpp"

namespace etc {
namespace {

TEST(PngTest, RoundTripIsLossless) {
  std::mt19937_64 rng(1);
  const RasterImage img = testing::RandomImage(rng, 37, 21);
  EXPECT_EQ(DecodeImage(EncodePng(img)), img);
}

TEST(PngTest, EncodingIsReproducible) {
  const RasterImage img = testing::FixtureImage(64, 48);
  EXPECT_EQ(EncodePng(img), EncodePng(img));
}

TEST(PngTest, SaveAndLoad) {
  testing::TempDir dir("png");
  const RasterImage img = testing::FixtureImage(16, 32);
  SavePng(img, dir.path() / "a.png");
  EXPECT_EQ(LoadImage(dir.path() / "a.png"), img);
}

TEST(JpegTest, DecodesToSameSize) {
  const RasterImage img = testing::FixtureImage(48, 32);
  const RasterImage back = DecodeImage(EncodeJpeg(img, 85));
  EXPECT_EQ(back.width, 48U);
  EXPECT_EQ(back.height, 32U);
}

TEST(JpegTest, QualityRange) {
  const RasterImage img = testing::FixtureImage(16, 16);
  EXPECT_THROW(EncodeJpeg(img, 0), RangeError);
  EXPECT_THROW(EncodeJpeg(img, 101), RangeError);
  EXPECT_NO_THROW(EncodeJpeg(img, 1));
  EXPECT_NO_THROW(EncodeJpeg(img, 100));
}

TEST(DecodeTest, GarbageIsFormatError) {
  const std::vector<std::uint8_t> junk = {1, 2, 3, 4, 5, 6, 7, 8, 9};
  EXPECT_THROW(DecodeImage(junk), FormatError);
  std::vector<std::uint8_t> truncated = EncodePng(testing::FixtureImage(16, 16));
  truncated.resize(truncated.size() / 2);
  EXPECT_THROW(DecodeImage(truncated), FormatError);
}

TEST(LoadTest, MissingFileIsIoError) {
  EXPECT_THROW(LoadImage("/nonexistent/x.png"), IoError);
}

TEST(ListImagesTest, RecursiveSortedAndFiltered) {
  testing::TempDir dir("list");
  std::filesystem::create_directories(dir.path() / "b");
  const RasterImage img = testing::FixtureImage(16, 16);
  SavePng(img, dir.path() / "b" / "z.png");
  SavePng(img, dir.path() / "a.PNG");
  std::ofstream(dir.path() / "notes.txt") << "x";
  const auto files = ListImages(dir.path());
  ASSERT_EQ(files.size(), 2U);
  EXPECT_EQ(files[0].filename(), "a.PNG");
  EXPECT_EQ(files[1].filename(), "z.png");
}

TEST(ListImagesTest, FixtureCorpusPresent) {
  EXPECT_EQ(ListImages(testing::CorpusDir()).size(), 120U);
}

}  // namespace
}  // namespace etc
