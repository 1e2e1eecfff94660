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

#include "etc/etc.h"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <map>
#include <new>
#include <string>
#include <vector>

#include "etc/cipher.hpp"
#include "etc/embedding.hpp"
#include "etc/errors.hpp"
#include "etc/evaluation.hpp"
#include "etc/image_io.hpp"
#include "etc/keying.hpp"
#include "etc/probe.hpp"

struct etc_key {
  etc::MasterKey key;
};

struct etc_image {
  etc::RasterImage image;
};

struct etc_report {
  std::string table;
  std::string records;
  std::map<std::string, double> values;
  bool passed = true;
};

namespace {

constexpr double kEquivalenceTolerance = 1e-9;
constexpr double kJpegRatioLow = 0.95;
constexpr double kJpegRatioHigh = 1.10;
constexpr int kContractQuality = 85;
constexpr double kLeakageCeiling = 0.2;

thread_local std::string last_error;

etc_status StatusFor(etc::ErrorKind kind) {
  switch (kind) {
    case etc::ErrorKind::kDimension: return ETC_ERR_DIMENSION;
    case etc::ErrorKind::kShape: return ETC_ERR_SHAPE;
    case etc::ErrorKind::kRange: return ETC_ERR_RANGE;
    case etc::ErrorKind::kMode: return ETC_ERR_MODE;
    case etc::ErrorKind::kUsage: return ETC_ERR_USAGE;
    case etc::ErrorKind::kIo: return ETC_ERR_IO;
    case etc::ErrorKind::kFormat: return ETC_ERR_FORMAT;
  }
  return ETC_ERR_INTERNAL;
}

template <typename Fn>
etc_status Guard(Fn&& fn) {
  try {
    last_error.clear();
    fn();
    return ETC_OK;
  } catch (const etc::Error& e) {
    last_error = std::string(etc::ErrorKindName(e.kind())) + ": " + e.what();
    return StatusFor(e.kind());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
  } catch (const std::exception& e) {
    last_error = e.what();
  } catch (...) {
    last_error = "unknown error";
  }
  return ETC_ERR_INTERNAL;
}

void Require(const void* p, const char* what) {
  if (p == nullptr) throw etc::UsageError(std::string(what) + " is NULL");
}

etc::CipherSpec ToSpec(const etc_cipher_spec* spec) {
  if (spec == nullptr) return etc::CipherSpec{};
  if (spec->steps > ETC_STEP_ALL) throw etc::UsageError("unknown step bits");
  if (spec->mode != ETC_MODE_PER_BLOCK && spec->mode != ETC_MODE_UNIFORM) {
    throw etc::UsageError("unknown key mode");
  }
  return etc::CipherSpec{spec->block_size,
                         spec->mode == ETC_MODE_UNIFORM ? etc::KeyMode::kUniform
                                                        : etc::KeyMode::kPerBlock,
                         static_cast<std::uint8_t>(spec->steps)};
}

void DumpMatrix(const std::string& dir, const char* name, const etc::Matrix& m) {
  const std::string path = dir + "/" + name;
  std::ofstream out(path);
  if (!out) throw etc::IoError("cannot write " + path);
  etc::WriteMatrix(out, m);
  if (!out.flush()) throw etc::IoError("write failed: " + path);
}

}  // namespace

extern "C" {

const char* etc_last_error(void) { return last_error.c_str(); }

const char* etc_status_name(etc_status status) {
  switch (status) {
    case ETC_OK: return "ok";
    case ETC_ERR_DIMENSION: return "DimensionError";
    case ETC_ERR_SHAPE: return "ShapeError";
    case ETC_ERR_RANGE: return "RangeError";
    case ETC_ERR_MODE: return "ModeError";
    case ETC_ERR_USAGE: return "UsageError";
    case ETC_ERR_IO: return "IoError";
    case ETC_ERR_FORMAT: return "FormatError";
    case ETC_ERR_INTERNAL: return "InternalError";
  }
  return "unknown";
}

const char* etc_version(void) { return "0.1.0"; }

etc_cipher_spec etc_cipher_spec_default(void) {
  return etc_cipher_spec{16, ETC_MODE_PER_BLOCK, ETC_STEP_ALL};
}

etc_status etc_parse_steps(const char* text, uint32_t* steps) {
  return Guard([&] {
    Require(text, "steps text");
    Require(steps, "steps");
    *steps = etc::ParseSteps(text);
  });
}

etc_status etc_parse_mode(const char* text, etc_key_mode* mode) {
  return Guard([&] {
    Require(text, "mode text");
    Require(mode, "mode");
    *mode = etc::ParseKeyMode(text) == etc::KeyMode::kUniform ? ETC_MODE_UNIFORM
                                                              : ETC_MODE_PER_BLOCK;
  });
}

etc_status etc_key_from_seeds(const uint64_t seeds[4], etc_key** out) {
  return Guard([&] {
    Require(seeds, "seeds");
    Require(out, "out");
    auto* k = new etc_key;
    std::memcpy(k->key.seeds.data(), seeds, sizeof(uint64_t) * 4);
    *out = k;
  });
}

etc_status etc_key_generate(etc_key** out) {
  return Guard([&] {
    Require(out, "out");
    *out = new etc_key{etc::GenerateMasterKey()};
  });
}

etc_status etc_key_load(const char* path, etc_key** out) {
  return Guard([&] {
    Require(path, "path");
    Require(out, "out");
    *out = new etc_key{etc::LoadKeyFile(path)};
  });
}

etc_status etc_key_save(const etc_key* key, const char* path, int force) {
  return Guard([&] {
    Require(key, "key");
    Require(path, "path");
    etc::SaveKeyFile(key->key, path, force != 0);
  });
}

void etc_key_seeds(const etc_key* key, uint64_t seeds[4]) {
  if (key == nullptr || seeds == nullptr) return;
  std::memcpy(seeds, key->key.seeds.data(), sizeof(uint64_t) * 4);
}

void etc_key_free(etc_key* key) { delete key; }

etc_status etc_image_create(uint32_t width, uint32_t height,
                            const uint8_t* pixels, etc_image** out) {
  return Guard([&] {
    Require(pixels, "pixels");
    Require(out, "out");
    const std::size_t n = std::size_t{width} * height * etc::kChannels;
    *out = new etc_image{
        etc::RasterImage(width, height, std::vector<std::uint8_t>(pixels, pixels + n))};
  });
}

etc_status etc_image_load(const char* path, etc_image** out) {
  return Guard([&] {
    Require(path, "path");
    Require(out, "out");
    *out = new etc_image{etc::LoadImage(path)};
  });
}

etc_status etc_image_save_png(const etc_image* image, const char* path) {
  return Guard([&] {
    Require(image, "image");
    Require(path, "path");
    etc::SavePng(image->image, path);
  });
}

etc_status etc_image_center_crop(const etc_image* image, uint32_t multiple,
                                 etc_image** out) {
  return Guard([&] {
    Require(image, "image");
    Require(out, "out");
    *out = new etc_image{etc::CenterCrop(image->image, multiple)};
  });
}

uint32_t etc_image_width(const etc_image* image) {
  return image ? image->image.width : 0;
}

uint32_t etc_image_height(const etc_image* image) {
  return image ? image->image.height : 0;
}

const uint8_t* etc_image_pixels(const etc_image* image) {
  return image ? image->image.pixels.data() : nullptr;
}

void etc_image_free(etc_image* image) { delete image; }

etc_status etc_encrypt(const etc_image* plain, const etc_key* key,
                       const etc_cipher_spec* spec, etc_image** out) {
  return Guard([&] {
    Require(plain, "image");
    Require(key, "key");
    Require(out, "out");
    *out = new etc_image{etc::Encrypt(plain->image, key->key, ToSpec(spec)).image};
  });
}

etc_status etc_decrypt(const etc_image* cipher, const etc_key* key,
                       const etc_cipher_spec* spec, etc_image** out) {
  return Guard([&] {
    Require(cipher, "image");
    Require(key, "key");
    Require(out, "out");
    *out = new etc_image{
        etc::Decrypt(etc::EncryptedImage{cipher->image, ToSpec(spec)}, key->key)};
  });
}

etc_status etc_embed_check(const etc_image* image, const etc_key* key,
                           const etc_cipher_spec* spec, uint32_t dim,
                           uint32_t trials, uint64_t seed, const char* dump_dir,
                           etc_embed_check_result* result) {
  return Guard([&] {
    Require(image, "image");
    Require(key, "key");
    Require(result, "result");
    if (dim == 0 || trials == 0) {
      throw etc::UsageError("dim and trials must be positive");
    }
    const etc::CipherSpec s = ToSpec(spec);
    if (s.mode != etc::KeyMode::kUniform) {
      throw etc::ModeError(
          "embedding equivalence is exact only with uniform block keys "
          "(--mode uniform)");
    }
    const etc::RasterImage& img = image->image;
    if (s.block_size == 0 || img.width % s.block_size || img.height % s.block_size) {
      throw etc::DimensionError("image does not tile into " +
                                std::to_string(s.block_size) + "-pixel patches");
    }
    const std::size_t n =
        std::size_t{img.width / s.block_size} * (img.height / s.block_size);
    double worst = 0.0;
    for (uint32_t t = 0; t < trials; ++t) {
      const etc::EmbeddingParams params =
          etc::RandomParams(s.block_size, n, dim, seed + t);
      const double dev = etc::VerifyEquivalence(img, params, key->key, s);
      worst = std::max(worst, dev);
      if (t == 0 && dump_dir != nullptr) {
        const etc::CipherPlan plan = etc::DerivePlan(key->key, s, n);
        const etc::EmbeddingParams adapted = etc::AdaptParams(params, plan);
        DumpMatrix(dump_dir, "E.txt", params.projection);
        DumpMatrix(dump_dir, "E_pos.txt", params.positions);
        DumpMatrix(dump_dir, "E1.txt", etc::PositionPermutation(plan).Dense());
        DumpMatrix(dump_dir, "E2.txt",
                   etc::BlockTransformMatrix(plan.transforms.front(), s.block_size)
                       .Dense());
        DumpMatrix(dump_dir, "E_adapted.txt", adapted.projection);
        DumpMatrix(dump_dir, "E_pos_adapted.txt", adapted.positions);
      }
    }
    result->max_deviation = worst;
    result->tolerance = kEquivalenceTolerance;
    result->trials = trials;
    result->passed = worst < kEquivalenceTolerance ? 1 : 0;
  });
}

etc_status etc_report_compression(const char* corpus_dir, const etc_key* key,
                                  const etc_cipher_spec* spec,
                                  const int* qualities, size_t count,
                                  uint32_t center_crop, unsigned threads,
                                  etc_report** out) {
  return Guard([&] {
    Require(corpus_dir, "corpus_dir");
    Require(key, "key");
    Require(out, "out");
    if (count > 0) Require(qualities, "qualities");
    const std::vector<int> qfs(qualities, qualities + count);
    const auto corpus = etc::LoadCorpus(corpus_dir, center_crop, threads);
    const etc::CompressionReport r =
        etc::BuildCompressionReport(corpus, key->key, qfs, ToSpec(spec), threads);
    auto* report = new etc_report;
    report->table = r.Table();
    report->records = r.Records();
    report->values["images"] = static_cast<double>(r.entries.size());
    report->values["ratio_png"] = r.PngRatio();
    for (std::size_t q = 0; q < qfs.size(); ++q) {
      const double ratio = r.JpegRatio(q);
      report->values["ratio_jpeg_" + std::to_string(qfs[q])] = ratio;
      if (qfs[q] == kContractQuality &&
          !(ratio > kJpegRatioLow && ratio < kJpegRatioHigh)) {
        report->passed = false;
      }
    }
    *out = report;
  });
}

etc_status etc_report_leakage(const char* corpus_dir, const etc_key* key,
                              const etc_cipher_spec* spec, uint32_t center_crop,
                              unsigned threads, etc_report** out) {
  return Guard([&] {
    Require(corpus_dir, "corpus_dir");
    Require(key, "key");
    Require(out, "out");
    const etc::CipherSpec s = ToSpec(spec);
    const auto corpus = etc::LoadCorpus(corpus_dir, center_crop, threads);
    const etc::SsimReport r = etc::BuildLeakageReport(corpus, key->key, s, threads);
    auto* report = new etc_report;
    report->table = r.Table();
    report->records = r.Records();
    report->values["images"] = static_cast<double>(r.summary.count);
    report->values["ssim_min"] = r.summary.min;
    report->values["ssim_q1"] = r.summary.q1;
    report->values["ssim_median"] = r.summary.median;
    report->values["ssim_q3"] = r.summary.q3;
    report->values["ssim_max"] = r.summary.max;
    report->values["ssim_mean"] = r.summary.mean;
    // The leakage ceiling applies to the full cipher only.
    if (s.steps == etc::kAllSteps) {
      report->passed = r.summary.mean < kLeakageCeiling &&
                       r.summary.median < kLeakageCeiling;
    }
    *out = report;
  });
}

etc_probe_config etc_probe_config_default(void) {
  etc_probe_config c{};
  c.corpus_dir = nullptr;
  c.synthetic = 800;
  c.classes = 4;
  c.block_size = 16;
  c.dim = 64;
  const etc::ProbeHyper hyper;
  c.epochs = hyper.epochs;
  c.learning_rate = hyper.learning_rate;
  c.batch_size = static_cast<uint32_t>(hyper.batch_size);
  c.seed = 0;
  c.steps = ETC_STEP_ALL;
  c.center_crop = 0;
  c.threads = 1;
  return c;
}

etc_status etc_probe_run(const etc_probe_config* config, const etc_key* key,
                         etc_report** out) {
  return Guard([&] {
    Require(config, "config");
    Require(key, "key");
    Require(out, "out");
    if (config->steps > ETC_STEP_ALL) throw etc::UsageError("unknown step bits");
    if (config->dim == 0) throw etc::UsageError("dim must be positive");
    const etc::LabeledDataset ds =
        config->corpus_dir != nullptr
            ? etc::LoadClassDirectories(config->corpus_dir, config->seed, 0.2,
                                        config->center_crop)
            : etc::SyntheticShapes(config->synthetic, config->seed,
                                   static_cast<int>(config->classes));
    etc::ProbeHyper hyper;
    hyper.learning_rate = config->learning_rate;
    hyper.epochs = config->epochs;
    hyper.batch_size = config->batch_size;
    hyper.seed = config->seed;
    const etc::ParityReport r = etc::ParityExperiment(
        ds, key->key, config->dim, hyper, config->seed, config->block_size,
        static_cast<std::uint8_t>(config->steps), config->threads);
    auto* report = new etc_report;
    report->table = r.Table();
    report->records = r.Records();
    report->values["acc_plain"] = r.plain_accuracy;
    report->values["acc_adapted"] = r.adapted_accuracy;
    report->values["acc_encrypted"] = r.encrypted_accuracy;
    report->values["chance"] = r.chance();
    report->values["feature_deviation"] = r.feature_deviation;
    report->values["predictions_identical"] = r.predictions_identical ? 1.0 : 0.0;
    report->passed = r.predictions_identical &&
                     r.adapted_accuracy == r.plain_accuracy &&
                     r.feature_deviation < kEquivalenceTolerance &&
                     r.encrypted_accuracy > r.chance();
    *out = report;
  });
}

const char* etc_report_table(const etc_report* report) {
  return report ? report->table.c_str() : "";
}

const char* etc_report_records(const etc_report* report) {
  return report ? report->records.c_str() : "";
}

etc_status etc_report_value(const etc_report* report, const char* name,
                            double* value) {
  return Guard([&] {
    Require(report, "report");
    Require(name, "name");
    Require(value, "value");
    const auto it = report->values.find(name);
    if (it == report->values.end()) {
      throw etc::UsageError(std::string("report has no value named ") + name);
    }
    *value = it->second;
  });
}

int etc_report_passed(const etc_report* report) {
  return report != nullptr && report->passed ? 1 : 0;
}

void etc_report_free(etc_report* report) { delete report; }

}  // extern "C"
