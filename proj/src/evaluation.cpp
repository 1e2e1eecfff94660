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

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "json.hpp"

#include "etc/errors.hpp"
#include "etc/image_io.hpp"
#include "parallel.hpp"

namespace etc {
namespace {

using Json = nlohmann::ordered_json;

constexpr std::uint32_t kSsimWindow = 8;
constexpr double kSsimC1 = (0.01 * 255) * (0.01 * 255);
constexpr double kSsimC2 = (0.03 * 255) * (0.03 * 255);

// Summed-area tables of x, y, x^2, y^2 and xy for one channel. All sums are
// exact in 64-bit integers.
struct Moments {
  std::size_t stride;
  std::vector<std::int64_t> sx, sy, sxx, syy, sxy;

  Moments(const RasterImage& a, const RasterImage& b, std::uint32_t channel)
      : stride(std::size_t{a.width} + 1) {
    const std::size_t size = stride * (std::size_t{a.height} + 1);
    for (auto* v : {&sx, &sy, &sxx, &syy, &sxy}) v->assign(size, 0);
    for (std::uint32_t y = 0; y < a.height; ++y) {
      for (std::uint32_t x = 0; x < a.width; ++x) {
        const std::int64_t p = a.at(x, y, channel);
        const std::int64_t q = b.at(x, y, channel);
        const std::size_t i = (std::size_t{y} + 1) * stride + x + 1;
        const std::size_t up = i - stride;
        auto acc = [&](std::vector<std::int64_t>& t, std::int64_t v) {
          t[i] = v + t[i - 1] + t[up] - t[up - 1];
        };
        acc(sx, p);
        acc(sy, q);
        acc(sxx, p * p);
        acc(syy, q * q);
        acc(sxy, p * q);
      }
    }
  }

  std::int64_t Box(const std::vector<std::int64_t>& t, std::size_t x0,
                   std::size_t y0, std::size_t n) const {
    const std::size_t a = y0 * stride + x0;
    const std::size_t b = (y0 + n) * stride + x0;
    return t[b + n] - t[b] - t[a + n] + t[a];
  }
};

double ChannelSsim(const RasterImage& a, const RasterImage& b,
                   std::uint32_t channel) {
  const Moments m(a, b, channel);
  const std::int64_t n = std::int64_t{kSsimWindow} * kSsimWindow;
  const double nn = static_cast<double>(n);
  const double norm = nn * (nn - 1.0);
  double total = 0.0;
  std::size_t windows = 0;
  for (std::size_t y = 0; y + kSsimWindow <= a.height; ++y) {
    for (std::size_t x = 0; x + kSsimWindow <= a.width; ++x) {
      const std::int64_t sx = m.Box(m.sx, x, y, kSsimWindow);
      const std::int64_t sy = m.Box(m.sy, x, y, kSsimWindow);
      const double mx = static_cast<double>(sx) / nn;
      const double my = static_cast<double>(sy) / nn;
      const double vx =
          static_cast<double>(n * m.Box(m.sxx, x, y, kSsimWindow) - sx * sx) / norm;
      const double vy =
          static_cast<double>(n * m.Box(m.syy, x, y, kSsimWindow) - sy * sy) / norm;
      const double cov =
          static_cast<double>(n * m.Box(m.sxy, x, y, kSsimWindow) - sx * sy) / norm;
      total += ((2.0 * mx * my + kSsimC1) * (2.0 * cov + kSsimC2)) /
               ((mx * mx + my * my + kSsimC1) * (vx + vy + kSsimC2));
      ++windows;
    }
  }
  return total / static_cast<double>(windows);
}

double Quantile(const std::vector<double>& sorted, double q) {
  const double rank = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(rank));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = rank - static_cast<double>(lo);
  return sorted[lo] + (sorted[hi] - sorted[lo]) * frac;
}

Json SpecJson(const CipherSpec& spec) {
  return Json{{"block", spec.block_size},
              {"mode", std::string(KeyModeName(spec.mode))},
              {"steps", FormatSteps(spec.steps)}};
}

std::string FormatDouble(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

}  // namespace

std::vector<CorpusImage> LoadCorpus(const std::filesystem::path& dir,
                                    std::uint32_t center_crop,
                                    unsigned threads) {
  const auto paths = ListImages(dir);
  if (paths.empty()) {
    throw UsageError("corpus " + dir.string() + " contains no PNG/JPEG images");
  }
  std::vector<CorpusImage> corpus(paths.size());
  internal::ParallelFor(paths.size(), threads, [&](std::size_t i) {
    corpus[i].path = paths[i].generic_string();
    RasterImage image = LoadImage(dir / paths[i]);
    corpus[i].image =
        center_crop > 0 ? CenterCrop(image, center_crop) : std::move(image);
  });
  return corpus;
}

JpegRoundTrip JpegRoundTripImage(const RasterImage& image, int quality) {
  const std::vector<std::uint8_t> bytes = EncodeJpeg(image, quality);
  return JpegRoundTrip{bytes.size(), DecodeImage(bytes)};
}

std::size_t JpegRoundTripSize(const RasterImage& image, int quality) {
  return EncodeJpeg(image, quality).size();
}

double Ssim(const RasterImage& a, const RasterImage& b) {
  if (a.width != b.width || a.height != b.height ||
      a.pixels.size() != b.pixels.size()) {
    throw ShapeError("SSIM needs equally sized images, got " +
                     std::to_string(a.width) + "x" + std::to_string(a.height) +
                     " and " + std::to_string(b.width) + "x" +
                     std::to_string(b.height));
  }
  if (a.width < kSsimWindow || a.height < kSsimWindow) {
    throw ShapeError("SSIM needs images of at least 8x8 pixels");
  }
  double sum = 0.0;
  for (std::uint32_t c = 0; c < kChannels; ++c) sum += ChannelSsim(a, b, c);
  return sum / kChannels;
}

double CompressionReport::PngRatio() const {
  return static_cast<double>(encrypted_png_total) /
         static_cast<double>(plain_png_total);
}

double CompressionReport::JpegRatio(std::size_t qf_index) const {
  return static_cast<double>(encrypted_jpeg_total.at(qf_index)) /
         static_cast<double>(plain_jpeg_total.at(qf_index));
}

std::string CompressionReport::Table() const {
  std::ostringstream out;
  out << "codec: " << codec << '\n'
      << "cipher: block=" << spec.block_size << " mode=" << KeyModeName(spec.mode)
      << " steps=" << FormatSteps(spec.steps) << '\n'
      << "images: " << entries.size() << "\n\n";
  char line[160];
  std::snprintf(line, sizeof line, "%-16s %14s %14s %8s\n", "setting",
                "plain_bytes", "etc_bytes", "ratio");
  out << line;
  auto row = [&](const std::string& name, std::size_t plain, std::size_t enc) {
    std::snprintf(line, sizeof line, "%-16s %14zu %14zu %8s\n", name.c_str(),
                  plain, enc,
                  FormatDouble(static_cast<double>(enc) / static_cast<double>(plain), 4)
                      .c_str());
    out << line;
  };
  row("uncompressed", raw_total, raw_total);
  for (std::size_t q = 0; q < qualities.size(); ++q) {
    row("jpeg qf=" + std::to_string(qualities[q]), plain_jpeg_total[q],
        encrypted_jpeg_total[q]);
  }
  row("png (lossless)", plain_png_total, encrypted_png_total);
  return out.str();
}

std::string CompressionReport::Records() const {
  std::ostringstream out;
  Json header{{"record", "header"}, {"codec", codec}};
  header.update(SpecJson(spec));
  header["qualities"] = qualities;
  header["images"] = entries.size();
  out << header.dump() << '\n';
  for (const auto& e : entries) {
    Json rec{{"record", "image"},
             {"path", e.path},
             {"raw", e.raw_bytes},
             {"png_plain", e.plain_png},
             {"png_encrypted", e.encrypted_png}};
    Json jpeg = Json::array();
    for (std::size_t q = 0; q < qualities.size(); ++q) {
      jpeg.push_back(Json{{"qf", qualities[q]},
                          {"plain", e.plain_jpeg[q]},
                          {"encrypted", e.encrypted_jpeg[q]}});
    }
    rec["jpeg"] = std::move(jpeg);
    out << rec.dump() << '\n';
  }
  auto total = [&](const std::string& setting, int qf, std::size_t plain,
                   std::size_t enc) {
    Json rec{{"record", "total"}, {"setting", setting}};
    if (qf > 0) rec["qf"] = qf;
    rec["plain"] = plain;
    rec["encrypted"] = enc;
    rec["ratio"] = static_cast<double>(enc) / static_cast<double>(plain);
    out << rec.dump() << '\n';
  };
  total("uncompressed", 0, raw_total, raw_total);
  for (std::size_t q = 0; q < qualities.size(); ++q) {
    total("jpeg", qualities[q], plain_jpeg_total[q], encrypted_jpeg_total[q]);
  }
  total("png", 0, plain_png_total, encrypted_png_total);
  return out.str();
}

CompressionReport BuildCompressionReport(const std::vector<CorpusImage>& corpus,
                                         const MasterKey& key,
                                         const std::vector<int>& qualities,
                                         const CipherSpec& spec,
                                         unsigned threads) {
  if (corpus.empty()) throw UsageError("compression report: empty corpus");
  if (qualities.empty()) {
    throw UsageError("compression report: no quality factors given");
  }
  for (int q : qualities) {
    if (q < 1 || q > 100) {
      throw UsageError("quality factor " + std::to_string(q) +
                       " is not in [1, 100]");
    }
  }
  CompressionReport report;
  report.codec = CodecDescription();
  report.spec = spec;
  report.qualities = qualities;
  report.entries.resize(corpus.size());
  internal::ParallelFor(corpus.size(), threads, [&](std::size_t i) {
    const RasterImage& plain = corpus[i].image;
    RasterImage encrypted;
    try {
      encrypted = Encrypt(plain, key, spec).image;
    } catch (const DimensionError& e) {
      throw DimensionError(corpus[i].path + ": " + e.what());
    }
    CompressionEntry& e = report.entries[i];
    e.path = corpus[i].path;
    e.raw_bytes = plain.pixels.size();
    e.plain_png = EncodePng(plain).size();
    e.encrypted_png = EncodePng(encrypted).size();
    for (int q : qualities) {
      e.plain_jpeg.push_back(JpegRoundTripSize(plain, q));
      e.encrypted_jpeg.push_back(JpegRoundTripSize(encrypted, q));
    }
  });
  report.plain_jpeg_total.assign(qualities.size(), 0);
  report.encrypted_jpeg_total.assign(qualities.size(), 0);
  for (const auto& e : report.entries) {
    report.raw_total += e.raw_bytes;
    report.plain_png_total += e.plain_png;
    report.encrypted_png_total += e.encrypted_png;
    for (std::size_t q = 0; q < qualities.size(); ++q) {
      report.plain_jpeg_total[q] += e.plain_jpeg[q];
      report.encrypted_jpeg_total[q] += e.encrypted_jpeg[q];
    }
  }
  return report;
}

Summary Summarize(std::vector<double> values) {
  Summary s;
  s.count = values.size();
  if (values.empty()) return s;
  std::sort(values.begin(), values.end());
  s.min = values.front();
  s.max = values.back();
  s.q1 = Quantile(values, 0.25);
  s.median = Quantile(values, 0.5);
  s.q3 = Quantile(values, 0.75);
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(values.size());
  const double iqr = s.q3 - s.q1;
  const double lo = s.q1 - 1.5 * iqr;
  const double hi = s.q3 + 1.5 * iqr;
  s.whisker_low = s.max;
  s.whisker_high = s.min;
  for (double v : values) {
    if (v < lo || v > hi) {
      ++s.outliers;
      continue;
    }
    s.whisker_low = std::min(s.whisker_low, v);
    s.whisker_high = std::max(s.whisker_high, v);
  }
  return s;
}

std::string SsimReport::Table() const {
  std::ostringstream out;
  out << "cipher: block=" << spec.block_size << " mode=" << KeyModeName(spec.mode)
      << " steps=" << FormatSteps(spec.steps) << '\n'
      << "images: " << summary.count << "\n\n"
      << "SSIM(plain, encrypted)\n";
  const std::pair<const char*, double> rows[] = {
      {"min", summary.min},       {"q1", summary.q1},
      {"median", summary.median}, {"q3", summary.q3},
      {"max", summary.max},       {"mean", summary.mean},
      {"whisker_low", summary.whisker_low},
      {"whisker_high", summary.whisker_high}};
  for (const auto& [name, value] : rows) {
    char line[80];
    std::snprintf(line, sizeof line, "  %-13s %9.6f\n", name, value);
    out << line;
  }
  out << "  outliers      " << summary.outliers << '\n';
  return out.str();
}

std::string SsimReport::Records() const {
  std::ostringstream out;
  Json header{{"record", "header"}};
  header.update(SpecJson(spec));
  header["window"] = kSsimWindow;
  header["images"] = entries.size();
  out << header.dump() << '\n';
  for (const auto& e : entries) {
    out << Json{{"record", "image"}, {"path", e.path}, {"ssim", e.ssim}}.dump()
        << '\n';
  }
  out << Json{{"record", "summary"},
              {"count", summary.count},
              {"min", summary.min},
              {"q1", summary.q1},
              {"median", summary.median},
              {"q3", summary.q3},
              {"max", summary.max},
              {"mean", summary.mean},
              {"whisker_low", summary.whisker_low},
              {"whisker_high", summary.whisker_high},
              {"outliers", summary.outliers}}
             .dump()
      << '\n';
  return out.str();
}

SsimReport BuildLeakageReport(const std::vector<CorpusImage>& corpus,
                              const MasterKey& key, const CipherSpec& spec,
                              unsigned threads) {
  if (corpus.empty()) throw UsageError("leakage report: empty corpus");
  SsimReport report;
  report.spec = spec;
  report.entries.resize(corpus.size());
  internal::ParallelFor(corpus.size(), threads, [&](std::size_t i) {
    const RasterImage& plain = corpus[i].image;
    RasterImage encrypted;
    try {
      encrypted = Encrypt(plain, key, spec).image;
    } catch (const DimensionError& e) {
      throw DimensionError(corpus[i].path + ": " + e.what());
    }
    report.entries[i] = {corpus[i].path, Ssim(plain, encrypted)};
  });
  std::vector<double> scores;
  scores.reserve(report.entries.size());
  for (const auto& e : report.entries) scores.push_back(e.ssim);
  report.summary = Summarize(std::move(scores));
  return report;
}

}  // namespace etc
