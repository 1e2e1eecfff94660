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

#ifndef ETC_EMBEDDING_HPP_
#define ETC_EMBEDDING_HPP_

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "etc/blocks.hpp"
#include "etc/cipher.hpp"
#include "etc/keying.hpp"

namespace etc {

using Matrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RowVector = Eigen::RowVectorXd;

// Maps an 8-bit value onto [-1, 1] with mean = std = 0.5 on the [0, 1] scale,
// i.e. (v / 255 - 0.5) / 0.5, evaluated as (2v - 255) / 255 so that
// NormalizePixel(255 - v) == -NormalizePixel(v) holds bit-exactly.
inline double NormalizePixel(std::uint8_t v) {
  return (2.0 * v - 255.0) / 255.0;
}

RowVector Normalize(std::span<const std::uint8_t> values);

// A square matrix with exactly one +-1 per row and column. Row i holds
// sign(i) in column source(i), so (M x)[i] = sign(i) * x[source(i)].
class SignedPermutation {
 public:
  SignedPermutation() = default;
  // Throws ShapeError if `source` is not a permutation or sizes differ, and
  // RangeError if a sign is not +-1.
  SignedPermutation(std::vector<std::uint32_t> source,
                    std::vector<std::int8_t> signs);

  static SignedPermutation Identity(std::size_t n);

  std::size_t size() const { return source_.size(); }
  std::uint32_t source(std::size_t row) const { return source_[row]; }
  std::int8_t sign(std::size_t row) const { return signs_[row]; }

  Matrix Dense() const;
  SignedPermutation Transpose() const;  // equals the inverse
  // (this * other) as matrices.
  SignedPermutation operator*(const SignedPermutation& other) const;

  // M x for a column vector given as a row vector of values.
  RowVector Apply(const RowVector& x) const;
  // M A: row i of the result is sign(i) * row source(i) of A.
  Matrix ApplyRows(const Matrix& a) const;

  friend bool operator==(const SignedPermutation&,
                         const SignedPermutation&) = default;

 private:
  std::vector<std::uint32_t> source_;
  std::vector<std::int8_t> signs_;
};

// Patch embedding E ((P^2 C) x D) and positional table E_pos (N x D).
struct EmbeddingParams {
  std::uint32_t patch = 16;
  Matrix projection;
  Matrix positions;

  std::size_t dim() const { return static_cast<std::size_t>(projection.cols()); }
  std::size_t num_patches() const {
    return static_cast<std::size_t>(positions.rows());
  }
};

// Entries uniform in [-1, 1) scaled by 1/sqrt(P^2 C) for E and 1/sqrt(D) for
// E_pos, drawn from a SplitMix64 stream so instances are reproducible
// everywhere.
EmbeddingParams RandomParams(std::uint32_t patch, std::size_t num_patches,
                             std::size_t dim, std::uint64_t seed);

// E1: the row permutation of the positional table that matches the block
// scramble drawn from K1 (E1[pos, order[pos]] = 1).
SignedPermutation PositionPermutation(const MasterKey& key,
                                      const CipherSpec& spec,
                                      std::size_t num_blocks);
SignedPermutation PositionPermutation(const CipherPlan& plan);

// E2 of size P^2 C: for every P x P block b,
//   Normalize(Flatten(ApplyTransform(b, t))) == E2 * Normalize(Flatten(b)).
SignedPermutation BlockTransformMatrix(const BlockTransform& t,
                                       std::uint32_t patch);

// Parameters for a model that consumes ciphertexts: E' = E2 E and
// E'_pos = E1 E_pos. Only exact in uniform-key mode; throws ModeError for
// per-block keys.
EmbeddingParams AdaptParams(const EmbeddingParams& params, const MasterKey& key,
                            const CipherSpec& spec);
// Same adaptation from an already derived plan, using the transform at grid
// position 0. No mode check.
EmbeddingParams AdaptParams(const EmbeddingParams& params,
                            const CipherPlan& plan);

// N x (P^2 C) matrix of normalized flattened patches, row-major over the grid.
Matrix PatchMatrix(const RasterImage& image, std::uint32_t patch);

// z_i = Normalize(x_i) E + e_pos_i for every patch; N x D. ShapeError on
// mismatched sizes, DimensionError if the image does not tile.
Matrix Embed(const RasterImage& image, const EmbeddingParams& params);

// max |Embed(Encrypt(x), Adapt(params)) - E1 Embed(x, params)|.
// ModeError unless spec.mode is uniform; block size must equal params.patch.
double VerifyEquivalence(const RasterImage& image, const EmbeddingParams& params,
                         const MasterKey& key, const CipherSpec& spec);
// The same deviation without the mode restriction. In per-block mode the
// adaptation uses the transform of grid position 0, which is what the
// uniform-key draw would have produced from the same key.
double EquivalenceDeviation(const RasterImage& image,
                            const EmbeddingParams& params, const MasterKey& key,
                            const CipherSpec& spec);

// Plain-text matrix dump: a "rows cols" header line, then one line per row of
// space-separated values printed with 17 significant digits.
void WriteMatrix(std::ostream& out, const Matrix& m);
Matrix ReadMatrix(std::istream& in);  // FormatError on malformed input

}  // namespace etc

#endif  // ETC_EMBEDDING_HPP_
