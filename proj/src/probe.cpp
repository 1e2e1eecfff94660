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
#include <cstdio>
#include <map>
#include <numeric>
#include <sstream>

#include "json.hpp"

#include "etc/errors.hpp"
#include "etc/evaluation.hpp"
#include "etc/image_io.hpp"
#include "parallel.hpp"

namespace etc {
namespace {

constexpr int kMaxShapeClasses = 6;

// Class tints, RGB.
constexpr std::uint8_t kTints[kMaxShapeClasses][3] = {
    {220, 40, 40}, {40, 200, 60}, {50, 80, 230},
    {230, 210, 40}, {200, 50, 200}, {40, 210, 210}};

double UnitDraw(KeyStream& s) {
  return static_cast<double>(s.Next() >> 11) * 0x1.0p-53;
}

int DrawInt(KeyStream& s, int lo, int hi) {  // inclusive range
  return lo + static_cast<int>(s.UniformBelow(static_cast<std::uint64_t>(hi - lo + 1)));
}

bool InsideShape(int shape, double dx, double dy, double r) {
  const double ax = std::abs(dx);
  const double ay = std::abs(dy);
  switch (shape) {
    case 0:  // disc
      return dx * dx + dy * dy <= r * r;
    case 1:  // square
      return ax <= r * 0.8 && ay <= r * 0.8;
    case 2:  // triangle, apex up
      return dy <= r * 0.8 && dy >= -r && ax <= (dy + r) * 0.6;
    case 3:  // cross
      return (ax <= r * 0.3 && ay <= r) || (ay <= r * 0.3 && ax <= r);
    case 4: {  // ring
      const double d2 = dx * dx + dy * dy;
      return d2 <= r * r && d2 >= 0.36 * r * r;
    }
    default:  // horizontal bar
      return ax <= r && ay <= r * 0.35;
  }
}

std::uint8_t Clamp8(double v) {
  return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
}

void SplitIndices(LabeledDataset& ds, double test_fraction) {
  KeyStream stream(Subkey::kK1, ds.split_seed);
  const std::vector<std::uint32_t> order = ScrambleOrder(stream, ds.images.size());
  const auto test_count = static_cast<std::size_t>(
      std::llround(test_fraction * static_cast<double>(order.size())));
  ds.train.clear();
  ds.test.clear();
  for (std::size_t i = 0; i < order.size(); ++i) {
    (i < test_count ? ds.test : ds.train).push_back(order[i]);
  }
  std::sort(ds.train.begin(), ds.train.end());
  std::sort(ds.test.begin(), ds.test.end());
}

Matrix Softmax(const Matrix& logits) {
  Matrix p(logits.rows(), logits.cols());
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    const double top = logits.row(i).maxCoeff();
    p.row(i) = (logits.row(i).array() - top).exp().matrix();
    p.row(i) /= p.row(i).sum();
  }
  return p;
}

Matrix Rows(const Matrix& m, const std::vector<std::size_t>& rows) {
  Matrix out(static_cast<Eigen::Index>(rows.size()), m.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.row(static_cast<Eigen::Index>(i)) = m.row(static_cast<Eigen::Index>(rows[i]));
  }
  return out;
}

void CheckRows(const Matrix& features, const std::vector<int>& labels,
               const std::vector<std::size_t>& rows) {
  if (static_cast<std::size_t>(features.rows()) != labels.size()) {
    throw ShapeError("feature rows and labels differ in count");
  }
  for (std::size_t r : rows) {
    if (r >= labels.size()) throw ShapeError("row index out of range");
  }
}

}  // namespace

LabeledDataset SyntheticShapes(std::size_t count, std::uint64_t seed,
                               int num_classes, std::uint32_t side) {
  if (num_classes < 2 || num_classes > kMaxShapeClasses) {
    throw UsageError("synthetic shapes: num_classes must be in [2, 6]");
  }
  if (side < 16) throw UsageError("synthetic shapes: side must be at least 16");
  LabeledDataset ds;
  ds.num_classes = num_classes;
  ds.split_seed = seed;
  ds.images.reserve(count);
  KeyStream rng(Subkey::kK2, seed);
  const double s = static_cast<double>(side);
  for (std::size_t n = 0; n < count; ++n) {
    const int label = static_cast<int>(n % static_cast<std::size_t>(num_classes));
    RasterImage img(side, side);
    const double bg = 60.0 + 80.0 * UnitDraw(rng);
    const double cx = s * (0.35 + 0.3 * UnitDraw(rng));
    const double cy = s * (0.35 + 0.3 * UnitDraw(rng));
    const double r = s * (0.22 + 0.12 * UnitDraw(rng));
    double color[3];
    for (int c = 0; c < 3; ++c) color[c] = kTints[label][c] + DrawInt(rng, -30, 30);
    for (std::uint32_t y = 0; y < side; ++y) {
      for (std::uint32_t x = 0; x < side; ++x) {
        const bool in = InsideShape(label, x + 0.5 - cx, y + 0.5 - cy, r);
        for (std::uint32_t c = 0; c < kChannels; ++c) {
          const double noise = DrawInt(rng, -20, 20);
          img.at(x, y, c) = Clamp8((in ? color[c] : bg) + noise);
        }
      }
    }
    ds.images.push_back(std::move(img));
    ds.labels.push_back(label);
  }
  SplitIndices(ds, 0.2);
  return ds;
}

LabeledDataset LoadClassDirectories(const std::filesystem::path& dir,
                                    std::uint64_t split_seed,
                                    double test_fraction,
                                    std::uint32_t center_crop) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) throw IoError(dir.string() + " is not a directory");
  std::vector<fs::path> classes;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_directory()) classes.push_back(entry.path());
  }
  std::sort(classes.begin(), classes.end());
  LabeledDataset ds;
  ds.split_seed = split_seed;
  ds.num_classes = static_cast<int>(classes.size());
  for (std::size_t label = 0; label < classes.size(); ++label) {
    for (const fs::path& rel : ListImages(classes[label])) {
      RasterImage img = LoadImage(classes[label] / rel);
      ds.images.push_back(center_crop > 0 ? CenterCrop(img, center_crop)
                                          : std::move(img));
      ds.labels.push_back(static_cast<int>(label));
    }
  }
  if (ds.num_classes < 2) {
    throw UsageError(dir.string() + ": need at least two class directories");
  }
  for (const auto& img : ds.images) {
    if (img.width != ds.images.front().width ||
        img.height != ds.images.front().height) {
      throw DimensionError(dir.string() +
                           ": images differ in size (use --center-crop and "
                           "equally sized inputs)");
    }
  }
  SplitIndices(ds, test_fraction);
  return ds;
}

RowVector Featurize(const RasterImage& image, const EmbeddingParams& params) {
  return Embed(image, params).colwise().mean();
}

Matrix FeaturizeAll(const std::vector<RasterImage>& images,
                    const EmbeddingParams& params, unsigned threads) {
  Matrix out(static_cast<Eigen::Index>(images.size()),
             static_cast<Eigen::Index>(params.dim()));
  internal::ParallelFor(images.size(), threads, [&](std::size_t i) {
    out.row(static_cast<Eigen::Index>(i)) = Featurize(images[i], params);
  });
  return out;
}

Matrix LinearProbe::Logits(const Matrix& features) const {
  Matrix logits = features * weights;
  logits.rowwise() += bias;
  return logits;
}

std::vector<int> LinearProbe::Predict(const Matrix& features) const {
  const Matrix logits = Logits(features);
  std::vector<int> out(static_cast<std::size_t>(logits.rows()));
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    Eigen::Index best = 0;
    logits.row(i).maxCoeff(&best);
    out[static_cast<std::size_t>(i)] = static_cast<int>(best);
  }
  return out;
}

bool LinearProbe::IsFinite() const {
  return weights.allFinite() && bias.allFinite();
}

double CrossEntropy(const LinearProbe& probe, const Matrix& features,
                    const std::vector<int>& labels,
                    const std::vector<std::size_t>& rows) {
  CheckRows(features, labels, rows);
  if (rows.empty()) return 0.0;
  const Matrix logits = probe.Logits(Rows(features, rows));
  double loss = 0.0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    const double top = logits.row(r).maxCoeff();
    const double lse = top + std::log((logits.row(r).array() - top).exp().sum());
    loss += lse - logits(r, labels[rows[i]]);
  }
  return loss / static_cast<double>(rows.size());
}

ProbeGradient CrossEntropyGradient(const LinearProbe& probe,
                                   const Matrix& features,
                                   const std::vector<int>& labels,
                                   const std::vector<std::size_t>& rows) {
  CheckRows(features, labels, rows);
  ProbeGradient g{Matrix::Zero(probe.weights.rows(), probe.weights.cols()),
                  RowVector::Zero(probe.bias.size())};
  if (rows.empty()) return g;
  const Matrix x = Rows(features, rows);
  Matrix delta = Softmax(probe.Logits(x));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    delta(static_cast<Eigen::Index>(i), labels[rows[i]]) -= 1.0;
  }
  const double scale = 1.0 / static_cast<double>(rows.size());
  g.weights = x.transpose() * delta * scale;
  g.bias = delta.colwise().sum() * scale;
  return g;
}

LinearProbe Train(const Matrix& features, const std::vector<int>& labels,
                  const std::vector<std::size_t>& rows, int num_classes,
                  const ProbeHyper& hyper) {
  CheckRows(features, labels, rows);
  if (rows.empty()) throw UsageError("probe training: empty training split");
  std::vector<bool> present(static_cast<std::size_t>(std::max(num_classes, 0)), false);
  for (std::size_t r : rows) {
    if (labels[r] < 0 || labels[r] >= num_classes) {
      throw RangeError("label " + std::to_string(labels[r]) + " outside [0, " +
                       std::to_string(num_classes) + ")");
    }
    present[static_cast<std::size_t>(labels[r])] = true;
  }
  if (std::count(present.begin(), present.end(), true) < 2) {
    throw UsageError("probe training needs at least two classes in the training split");
  }
  if (hyper.batch_size == 0) throw UsageError("probe training: batch size must be positive");

  LinearProbe probe;
  probe.hyper = hyper;
  probe.weights = Matrix::Zero(features.cols(), num_classes);
  probe.bias = RowVector::Zero(num_classes);
  KeyStream shuffle(Subkey::kK1, hyper.seed);
  std::vector<std::size_t> batch;
  for (int epoch = 0; epoch < hyper.epochs; ++epoch) {
    const std::vector<std::uint32_t> order = ScrambleOrder(shuffle, rows.size());
    for (std::size_t start = 0; start < order.size(); start += hyper.batch_size) {
      const std::size_t end = std::min(order.size(), start + hyper.batch_size);
      batch.clear();
      for (std::size_t i = start; i < end; ++i) batch.push_back(rows[order[i]]);
      const ProbeGradient g = CrossEntropyGradient(probe, features, labels, batch);
      probe.weights -= hyper.learning_rate * g.weights;
      probe.bias -= hyper.learning_rate * g.bias;
    }
  }
  return probe;
}

LinearProbe Train(const LabeledDataset& dataset, const EmbeddingParams& params,
                  const ProbeHyper& hyper, unsigned threads) {
  return Train(FeaturizeAll(dataset.images, params, threads), dataset.labels,
               dataset.train, dataset.num_classes, hyper);
}

double Evaluate(const LinearProbe& probe, const Matrix& features,
                const std::vector<int>& labels,
                const std::vector<std::size_t>& rows) {
  CheckRows(features, labels, rows);
  if (rows.empty()) return 0.0;
  const std::vector<int> predicted = probe.Predict(Rows(features, rows));
  std::size_t correct = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (predicted[i] == labels[rows[i]]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(rows.size());
}

double Evaluate(const LinearProbe& probe, const LabeledDataset& dataset,
                const EmbeddingParams& params, unsigned threads) {
  return Evaluate(probe, FeaturizeAll(dataset.images, params, threads),
                  dataset.labels, dataset.test);
}

std::string ParityReport::Table() const {
  std::ostringstream out;
  out << "classes: " << num_classes << "  train: " << train_count
      << "  test: " << test_count << "  dim: " << dim
      << "  steps: " << FormatSteps(steps) << "\n\n";
  char line[128];
  auto row = [&](const char* arm, const char* what, double acc) {
    std::snprintf(line, sizeof line, "%-4s %-44s %8.4f\n", arm, what, acc);
    out << line;
  };
  std::snprintf(line, sizeof line, "%-4s %-44s %8s\n", "arm", "setting",
                "accuracy");
  out << line;
  row("1", "plain train / plain test", plain_accuracy);
  row("2", "uniform-key ciphertext, adapted params", adapted_accuracy);
  row("3", "per-block-key ciphertext, trained directly", encrypted_accuracy);
  std::snprintf(line, sizeof line,
                "\nchance: %.4f  feature deviation (arm 2 vs 1): %.3e  "
                "predictions identical: %s\n",
                chance(), feature_deviation, predictions_identical ? "yes" : "no");
  out << line;
  return out.str();
}

std::string ParityReport::Records() const {
  using Json = nlohmann::ordered_json;
  std::ostringstream out;
  out << Json{{"record", "header"},
              {"classes", num_classes},
              {"train", train_count},
              {"test", test_count},
              {"dim", dim},
              {"steps", FormatSteps(steps)}}
             .dump()
      << '\n';
  const std::pair<const char*, double> arms[] = {
      {"plain", plain_accuracy},
      {"adapted", adapted_accuracy},
      {"encrypted", encrypted_accuracy}};
  for (std::size_t i = 0; i < 3; ++i) {
    out << Json{{"record", "arm"},
                {"arm", i + 1},
                {"name", arms[i].first},
                {"accuracy", arms[i].second}}
               .dump()
        << '\n';
  }
  out << Json{{"record", "parity"},
              {"chance", chance()},
              {"feature_deviation", feature_deviation},
              {"predictions_identical", predictions_identical}}
             .dump()
      << '\n';
  return out.str();
}

ParityReport ParityExperiment(const LabeledDataset& dataset,
                              const MasterKey& key, std::size_t dim,
                              const ProbeHyper& hyper, std::uint64_t param_seed,
                              std::uint32_t block_size, std::uint8_t steps,
                              unsigned threads) {
  if (dataset.images.empty()) throw UsageError("parity experiment: empty dataset");
  const RasterImage& first = dataset.images.front();
  if (first.width % block_size != 0 || first.height % block_size != 0) {
    throw DimensionError("dataset images are not divisible into " +
                         std::to_string(block_size) + "-pixel blocks");
  }
  const std::size_t num_patches =
      std::size_t{first.width / block_size} * (first.height / block_size);
  const EmbeddingParams params =
      RandomParams(block_size, num_patches, dim, param_seed);

  auto encrypt_all = [&](const CipherSpec& spec) {
    std::vector<RasterImage> out(dataset.images.size());
    internal::ParallelFor(out.size(), threads, [&](std::size_t i) {
      out[i] = Encrypt(dataset.images[i], key, spec).image;
    });
    return out;
  };

  ParityReport report;
  report.num_classes = dataset.num_classes;
  report.train_count = dataset.train.size();
  report.test_count = dataset.test.size();
  report.dim = dim;
  report.steps = steps;

  // Arm 1.
  const Matrix plain = FeaturizeAll(dataset.images, params, threads);
  const LinearProbe probe =
      Train(plain, dataset.labels, dataset.train, dataset.num_classes, hyper);
  report.plain_accuracy = Evaluate(probe, plain, dataset.labels, dataset.test);

  // Arm 2: the plain-trained probe, unchanged, on ciphertext features computed
  // with key-adapted embedding parameters.
  const CipherSpec uniform{block_size, KeyMode::kUniform, steps};
  const Matrix adapted = FeaturizeAll(encrypt_all(uniform),
                                      AdaptParams(params, key, uniform), threads);
  report.adapted_accuracy = Evaluate(probe, adapted, dataset.labels, dataset.test);
  report.feature_deviation = (adapted - plain).cwiseAbs().maxCoeff();
  report.predictions_identical = probe.Predict(adapted) == probe.Predict(plain);

  // Arm 3: per-block keys; a new probe trained on ciphertext features with
  // the same key-independent random params.
  const CipherSpec per_block{block_size, KeyMode::kPerBlock, steps};
  const Matrix encrypted = FeaturizeAll(encrypt_all(per_block), params, threads);
  const LinearProbe cipher_probe =
      Train(encrypted, dataset.labels, dataset.train, dataset.num_classes, hyper);
  report.encrypted_accuracy =
      Evaluate(cipher_probe, encrypted, dataset.labels, dataset.test);
  return report;
}

}  // namespace etc
