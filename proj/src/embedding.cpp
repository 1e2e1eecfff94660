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

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "etc/errors.hpp"

namespace etc {
namespace {

void CheckCompatible(const RasterImage& image, const EmbeddingParams& params) {
  const std::size_t flat = std::size_t{params.patch} * params.patch * kChannels;
  if (params.patch == 0 || static_cast<std::size_t>(params.projection.rows()) != flat) {
    throw ShapeError("projection has " +
                     std::to_string(params.projection.rows()) +
                     " rows, expected P*P*C = " + std::to_string(flat));
  }
  if (params.positions.cols() != params.projection.cols()) {
    throw ShapeError("positional table width differs from the embedding width");
  }
  if (image.width % params.patch != 0 || image.height % params.patch != 0) {
    throw DimensionError("image does not tile into " +
                         std::to_string(params.patch) + "-pixel patches");
  }
  const std::size_t n = std::size_t{image.width / params.patch} *
                        (image.height / params.patch);
  if (static_cast<std::size_t>(params.positions.rows()) != n) {
    throw ShapeError("positional table has " +
                     std::to_string(params.positions.rows()) + " rows, image has " +
                     std::to_string(n) + " patches");
  }
}

}  // namespace

RowVector Normalize(std::span<const std::uint8_t> values) {
  RowVector out(static_cast<Eigen::Index>(values.size()));
  for (std::size_t i = 0; i < values.size(); ++i) {
    out[static_cast<Eigen::Index>(i)] = NormalizePixel(values[i]);
  }
  return out;
}

SignedPermutation::SignedPermutation(std::vector<std::uint32_t> source,
                                     std::vector<std::int8_t> signs)
    : source_(std::move(source)), signs_(std::move(signs)) {
  if (source_.size() != signs_.size()) {
    throw ShapeError("signed permutation: source and sign lengths differ");
  }
  std::vector<bool> hit(source_.size(), false);
  for (std::uint32_t s : source_) {
    if (s >= source_.size() || hit[s]) {
      throw ShapeError("signed permutation: source indices are not a permutation");
    }
    hit[s] = true;
  }
  for (std::int8_t s : signs_) {
    if (s != 1 && s != -1) throw RangeError("signed permutation: sign must be +-1");
  }
}

SignedPermutation SignedPermutation::Identity(std::size_t n) {
  SignedPermutation out;
  out.source_.resize(n);
  out.signs_.assign(n, 1);
  for (std::size_t i = 0; i < n; ++i) out.source_[i] = static_cast<std::uint32_t>(i);
  return out;
}

Matrix SignedPermutation::Dense() const {
  const auto n = static_cast<Eigen::Index>(size());
  Matrix m = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    m(i, source_[static_cast<std::size_t>(i)]) = signs_[static_cast<std::size_t>(i)];
  }
  return m;
}

SignedPermutation SignedPermutation::Transpose() const {
  SignedPermutation out;
  out.source_.resize(size());
  out.signs_.resize(size());
  for (std::size_t i = 0; i < size(); ++i) {
    out.source_[source_[i]] = static_cast<std::uint32_t>(i);
    out.signs_[source_[i]] = signs_[i];
  }
  return out;
}

SignedPermutation SignedPermutation::operator*(
    const SignedPermutation& other) const {
  if (size() != other.size()) throw ShapeError("signed permutation size mismatch");
  // (A B)[i, :] = a_i * B[source_a(i), :]
  SignedPermutation out;
  out.source_.resize(size());
  out.signs_.resize(size());
  for (std::size_t i = 0; i < size(); ++i) {
    out.source_[i] = other.source_[source_[i]];
    out.signs_[i] = static_cast<std::int8_t>(signs_[i] * other.signs_[source_[i]]);
  }
  return out;
}

RowVector SignedPermutation::Apply(const RowVector& x) const {
  if (static_cast<std::size_t>(x.size()) != size()) {
    throw ShapeError("signed permutation applied to a vector of the wrong size");
  }
  RowVector out(x.size());
  for (std::size_t i = 0; i < size(); ++i) {
    out[static_cast<Eigen::Index>(i)] = signs_[i] * x[source_[i]];
  }
  return out;
}

Matrix SignedPermutation::ApplyRows(const Matrix& a) const {
  if (static_cast<std::size_t>(a.rows()) != size()) {
    throw ShapeError("signed permutation applied to a matrix of the wrong height");
  }
  Matrix out(a.rows(), a.cols());
  for (std::size_t i = 0; i < size(); ++i) {
    out.row(static_cast<Eigen::Index>(i)) =
        static_cast<double>(signs_[i]) * a.row(source_[i]);
  }
  return out;
}

EmbeddingParams RandomParams(std::uint32_t patch, std::size_t num_patches,
                             std::size_t dim, std::uint64_t seed) {
  KeyStream stream(Subkey::kK1, seed);
  auto uniform = [&stream] {
    return static_cast<double>(stream.Next() >> 11) * 0x1.0p-52 - 1.0;
  };
  const std::size_t flat = std::size_t{patch} * patch * kChannels;
  EmbeddingParams params;
  params.patch = patch;
  params.projection.resize(static_cast<Eigen::Index>(flat),
                           static_cast<Eigen::Index>(dim));
  params.positions.resize(static_cast<Eigen::Index>(num_patches),
                          static_cast<Eigen::Index>(dim));
  const double proj_scale = 1.0 / std::sqrt(static_cast<double>(flat));
  const double pos_scale = 1.0 / std::sqrt(static_cast<double>(dim));
  for (Eigen::Index i = 0; i < params.projection.size(); ++i) {
    params.projection.data()[i] = uniform() * proj_scale;
  }
  for (Eigen::Index i = 0; i < params.positions.size(); ++i) {
    params.positions.data()[i] = uniform() * pos_scale;
  }
  return params;
}

SignedPermutation PositionPermutation(const CipherPlan& plan) {
  return SignedPermutation(plan.order,
                           std::vector<std::int8_t>(plan.order.size(), 1));
}

SignedPermutation PositionPermutation(const MasterKey& key,
                                      const CipherSpec& spec,
                                      std::size_t num_blocks) {
  return PositionPermutation(DerivePlan(key, spec, num_blocks));
}

SignedPermutation BlockTransformMatrix(const BlockTransform& t,
                                       std::uint32_t patch) {
  const std::uint32_t n = patch;
  const std::size_t flat = std::size_t{n} * n * kChannels;
  if (n == 0 || n > 256) {
    throw ShapeError("patch size must be in [1, 256]");
  }
  // Trace the spatial map on a block whose channels 0 and 1 carry each
  // pixel's row and column.
  Block coords(n, n);
  for (std::uint32_t y = 0; y < n; ++y) {
    for (std::uint32_t x = 0; x < n; ++x) {
      coords.at(x, y, 0) = static_cast<std::uint8_t>(y);
      coords.at(x, y, 1) = static_cast<std::uint8_t>(x);
    }
  }
  const Block moved = ApplyDihedral(coords, t.dihedral);
  const auto& table = kColorPermutations.at(t.color_perm);
  std::vector<std::uint32_t> source(flat);
  for (std::uint32_t c = 0; c < kChannels; ++c) {
    for (std::uint32_t y = 0; y < n; ++y) {
      for (std::uint32_t x = 0; x < n; ++x) {
        source[FlatIndex(c, y, x, n, n)] = static_cast<std::uint32_t>(
            FlatIndex(table[c], moved.at(x, y, 0), moved.at(x, y, 1), n, n));
      }
    }
  }
  return SignedPermutation(std::move(source),
                           std::vector<std::int8_t>(flat, t.negate ? -1 : 1));
}

EmbeddingParams AdaptParams(const EmbeddingParams& params,
                            const CipherPlan& plan) {
  if (static_cast<std::size_t>(params.positions.rows()) != plan.order.size()) {
    throw ShapeError("positional table has " +
                     std::to_string(params.positions.rows()) +
                     " rows, cipher plan covers " +
                     std::to_string(plan.order.size()) + " blocks");
  }
  const BlockTransform t =
      plan.transforms.empty() ? BlockTransform{} : plan.transforms.front();
  EmbeddingParams out;
  out.patch = params.patch;
  out.projection = BlockTransformMatrix(t, params.patch).ApplyRows(params.projection);
  out.positions = PositionPermutation(plan).ApplyRows(params.positions);
  return out;
}

EmbeddingParams AdaptParams(const EmbeddingParams& params, const MasterKey& key,
                            const CipherSpec& spec) {
  if (spec.mode != KeyMode::kUniform) {
    throw ModeError(
        "parameter adaptation is exact only with uniform block keys "
        "(--mode uniform)");
  }
  if (spec.block_size != params.patch) {
    throw ShapeError("patch size " + std::to_string(params.patch) +
                     " differs from block size " + std::to_string(spec.block_size));
  }
  return AdaptParams(params, DerivePlan(key, spec, params.num_patches()));
}

Matrix PatchMatrix(const RasterImage& image, std::uint32_t patch) {
  const BlockGrid grid = Split(image, patch, patch);
  const auto flat = static_cast<Eigen::Index>(std::size_t{patch} * patch * kChannels);
  Matrix out(static_cast<Eigen::Index>(grid.size()), flat);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    out.row(static_cast<Eigen::Index>(i)) = Normalize(Flatten(grid.blocks[i]));
  }
  return out;
}

Matrix Embed(const RasterImage& image, const EmbeddingParams& params) {
  CheckCompatible(image, params);
  Matrix z = PatchMatrix(image, params.patch) * params.projection;
  z += params.positions;
  return z;
}

double EquivalenceDeviation(const RasterImage& image,
                            const EmbeddingParams& params, const MasterKey& key,
                            const CipherSpec& spec) {
  if (spec.block_size != params.patch) {
    throw ShapeError("patch size " + std::to_string(params.patch) +
                     " differs from block size " + std::to_string(spec.block_size));
  }
  CheckCompatible(image, params);
  const CipherPlan plan = DerivePlan(key, spec, params.num_patches());
  const Matrix plain = Embed(image, params);
  const Matrix cipher =
      Embed(Encrypt(image, key, spec).image, AdaptParams(params, plan));
  const Matrix expected = PositionPermutation(plan).ApplyRows(plain);
  return (cipher - expected).cwiseAbs().maxCoeff();
}

double VerifyEquivalence(const RasterImage& image, const EmbeddingParams& params,
                         const MasterKey& key, const CipherSpec& spec) {
  if (spec.mode != KeyMode::kUniform) {
    throw ModeError(
        "the embedding equivalence holds only with uniform block keys "
        "(--mode uniform)");
  }
  return EquivalenceDeviation(image, params, key, spec);
}

void WriteMatrix(std::ostream& out, const Matrix& m) {
  out << m.rows() << ' ' << m.cols() << '\n';
  char buf[32];
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      std::snprintf(buf, sizeof buf, "%.17g", m(r, c));
      if (c > 0) out << ' ';
      out << buf;
    }
    out << '\n';
  }
}

Matrix ReadMatrix(std::istream& in) {
  Eigen::Index rows = -1;
  Eigen::Index cols = -1;
  if (!(in >> rows >> cols) || rows < 0 || cols < 0) {
    throw FormatError("matrix dump: bad header");
  }
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    if (!(in >> m.data()[i])) {
      throw FormatError("matrix dump: expected " + std::to_string(m.size()) +
                        " values");
    }
  }
  return m;
}

}  // namespace etc
