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

#ifndef ETC_EVALUATION_HPP_
#define ETC_EVALUATION_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "etc/blocks.hpp"
#include "etc/cipher.hpp"
#include "etc/keying.hpp"

namespace etc {

struct CorpusImage {
  std::string path;  // relative to the corpus root, '/'-separated
  RasterImage image;
};

// Loads every image under `dir` in path order. With center_crop > 0 each
// image is cropped to multiples of that size. UsageError if nothing loads.
std::vector<CorpusImage> LoadCorpus(const std::filesystem::path& dir,
                                    std::uint32_t center_crop = 0,
                                    unsigned threads = 1);

struct JpegRoundTrip {
  std::size_t bytes = 0;
  RasterImage decoded;
};
JpegRoundTrip JpegRoundTripImage(const RasterImage& image, int quality);
std::size_t JpegRoundTripSize(const RasterImage& image, int quality);

// Mean SSIM over all 8x8 windows (stride 1, uniform weights, sample
// covariance), computed per channel and averaged over RGB, with
// C1 = (0.01 * 255)^2 and C2 = (0.03 * 255)^2. ShapeError if sizes differ or
// an image is smaller than the window.
double Ssim(const RasterImage& a, const RasterImage& b);

struct CompressionEntry {
  std::string path;
  std::size_t raw_bytes = 0;
  std::size_t plain_png = 0;
  std::size_t encrypted_png = 0;
  std::vector<std::size_t> plain_jpeg;      // one per quality factor
  std::vector<std::size_t> encrypted_jpeg;
};

struct CompressionReport {
  std::string codec;
  CipherSpec spec;
  std::vector<int> qualities;
  std::vector<CompressionEntry> entries;

  std::size_t raw_total = 0;
  std::size_t plain_png_total = 0;
  std::size_t encrypted_png_total = 0;
  std::vector<std::size_t> plain_jpeg_total;
  std::vector<std::size_t> encrypted_jpeg_total;

  double PngRatio() const;
  double JpegRatio(std::size_t qf_index) const;

  std::string Table() const;
  // One JSON object per line: a "header" record, one "image" record per
  // entry, then one "total" record per codec setting.
  std::string Records() const;
};

// Encrypts each image with `spec` (block 16, per-block keys, all steps by
// default) and sizes plain and encrypted versions with JPEG at every quality
// and with PNG. UsageError on an empty corpus or a bad quality factor.
CompressionReport BuildCompressionReport(const std::vector<CorpusImage>& corpus,
                                         const MasterKey& key,
                                         const std::vector<int>& qualities,
                                         const CipherSpec& spec = {},
                                         unsigned threads = 1);

// Box-plot statistics. Quartiles use linear interpolation between order
// statistics (rank q * (n - 1)); whiskers are the most extreme samples within
// [Q1 - 1.5 IQR, Q3 + 1.5 IQR]; samples outside are outliers.
struct Summary {
  std::size_t count = 0;
  double min = 0, q1 = 0, median = 0, q3 = 0, max = 0, mean = 0;
  double whisker_low = 0, whisker_high = 0;
  std::size_t outliers = 0;
};
Summary Summarize(std::vector<double> values);

struct LeakageEntry {
  std::string path;
  double ssim = 0;
};

struct SsimReport {
  CipherSpec spec;
  std::vector<LeakageEntry> entries;
  Summary summary;

  std::string Table() const;
  std::string Records() const;
};

SsimReport BuildLeakageReport(const std::vector<CorpusImage>& corpus,
                              const MasterKey& key, const CipherSpec& spec = {},
                              unsigned threads = 1);

}  // namespace etc

#endif  // ETC_EVALUATION_HPP_
