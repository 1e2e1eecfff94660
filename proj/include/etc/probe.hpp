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

#ifndef ETC_PROBE_HPP_
#define ETC_PROBE_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "etc/blocks.hpp"
#include "etc/cipher.hpp"
#include "etc/embedding.hpp"
#include "etc/keying.hpp"

namespace etc {

struct LabeledDataset {
  std::vector<RasterImage> images;
  std::vector<int> labels;
  int num_classes = 0;
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
  std::uint64_t split_seed = 0;
};

// Filled geometric shapes on a noisy background. Each class pairs one shape
// (disc, square, triangle, cross, ring, bar) with one tint; position, size
// and colour are jittered. Classes are balanced; 80/20 split.
LabeledDataset SyntheticShapes(std::size_t count, std::uint64_t seed,
                               int num_classes = 4, std::uint32_t side = 32);

// One sub-directory per class under `dir` (class index = sorted name order).
LabeledDataset LoadClassDirectories(const std::filesystem::path& dir,
                                    std::uint64_t split_seed,
                                    double test_fraction = 0.2,
                                    std::uint32_t center_crop = 0);

// Mean over the N patch embeddings.
RowVector Featurize(const RasterImage& image, const EmbeddingParams& params);
Matrix FeaturizeAll(const std::vector<RasterImage>& images,
                    const EmbeddingParams& params, unsigned threads = 1);

struct ProbeHyper {
  double learning_rate = 0.5;
  int epochs = 200;
  std::size_t batch_size = 32;
  std::uint64_t seed = 0;
};

// Softmax classifier: logits = x W + b, W is D x K.
struct LinearProbe {
  Matrix weights;
  RowVector bias;
  ProbeHyper hyper;

  Matrix Logits(const Matrix& features) const;
  std::vector<int> Predict(const Matrix& features) const;
  bool IsFinite() const;
};

struct ProbeGradient {
  Matrix weights;
  RowVector bias;
};

// Mean cross-entropy over the selected rows.
double CrossEntropy(const LinearProbe& probe, const Matrix& features,
                    const std::vector<int>& labels,
                    const std::vector<std::size_t>& rows);
ProbeGradient CrossEntropyGradient(const LinearProbe& probe,
                                   const Matrix& features,
                                   const std::vector<int>& labels,
                                   const std::vector<std::size_t>& rows);

// Mini-batch gradient descent from zero weights; batches follow a
// Fisher-Yates shuffle of `rows` per epoch drawn from hyper.seed.
// UsageError when fewer than two classes are present or `rows` is empty.
LinearProbe Train(const Matrix& features, const std::vector<int>& labels,
                  const std::vector<std::size_t>& rows, int num_classes,
                  const ProbeHyper& hyper);
LinearProbe Train(const LabeledDataset& dataset, const EmbeddingParams& params,
                  const ProbeHyper& hyper, unsigned threads = 1);

double Evaluate(const LinearProbe& probe, const Matrix& features,
                const std::vector<int>& labels,
                const std::vector<std::size_t>& rows);
// Accuracy on the dataset's test split.
double Evaluate(const LinearProbe& probe, const LabeledDataset& dataset,
                const EmbeddingParams& params, unsigned threads = 1);

struct ParityReport {
  int num_classes = 0;
  std::size_t train_count = 0;
  std::size_t test_count = 0;
  std::size_t dim = 0;
  std::uint8_t steps = kAllSteps;
  double plain_accuracy = 0;        // arm 1: plain train, plain test
  double adapted_accuracy = 0;      // arm 2: uniform-key ciphertext, adapted params
  double encrypted_accuracy = 0;    // arm 3: per-block ciphertext, trained directly
  double feature_deviation = 0;     // max |feature(arm 2) - feature(arm 1)|
  bool predictions_identical = false;  // arm 2 argmax == arm 1 argmax everywhere

  double chance() const { return 1.0 / num_classes; }
  std::string Table() const;
  std::string Records() const;
};

// All arms use the same random params drawn from `param_seed`, independent
// of the key. Arm 2 evaluates the arm 1 probe on uniform-key ciphertexts with
// key-adapted params; arm 3 trains a new probe on per-block-key ciphertexts.
// `steps` applies to both cipher arms.
ParityReport ParityExperiment(const LabeledDataset& dataset,
                              const MasterKey& key, std::size_t dim,
                              const ProbeHyper& hyper, std::uint64_t param_seed,
                              std::uint32_t block_size = 16,
                              std::uint8_t steps = kAllSteps,
                              unsigned threads = 1);

}  // namespace etc

#endif  // ETC_PROBE_HPP_
