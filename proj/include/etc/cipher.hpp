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

#ifndef ETC_CIPHER_HPP_
#define ETC_CIPHER_HPP_

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "etc/blocks.hpp"
#include "etc/keying.hpp"

namespace etc {

enum class KeyMode : std::uint8_t {
  kPerBlock,  // every block draws its own transform
  kUniform,   // one transform shared by all blocks
};

// Bit set of enabled encryption steps.
enum Step : std::uint8_t {
  kScramble = 1U << 0,
  kDihedral = 1U << 1,
  kNegPos = 1U << 2,
  kColorShuffle = 1U << 3,
};
inline constexpr std::uint8_t kAllSteps =
    kScramble | kDihedral | kNegPos | kColorShuffle;

struct CipherSpec {
  std::uint32_t block_size = 16;
  KeyMode mode = KeyMode::kPerBlock;
  std::uint8_t steps = kAllSteps;

  bool has(Step s) const { return (steps & s) != 0; }
  friend bool operator==(const CipherSpec&, const CipherSpec&) = default;
};

// Comma-separated subset of "scramble,dihedral,negpos,colorshuffle"; "all"
// and "none" are accepted. Throws UsageError on unknown names.
std::uint8_t ParseSteps(std::string_view text);
std::string FormatSteps(std::uint8_t steps);
KeyMode ParseKeyMode(std::string_view text);  // "per-block" | "uniform"
std::string_view KeyModeName(KeyMode mode);

// Dihedral state s in [0, 8): optional horizontal flip (s >= 4) followed by
// (s % 4) clockwise quarter turns.
struct BlockTransform {
  std::uint8_t dihedral = 0;
  bool negate = false;
  std::uint8_t color_perm = 0;  // index into kColorPermutations

  friend bool operator==(const BlockTransform&, const BlockTransform&) = default;
};

inline constexpr std::size_t kNumDihedral = 8;
inline constexpr std::size_t kNumColorPerms = 6;
inline constexpr std::size_t kNumTransforms = kNumDihedral * 2 * kNumColorPerms;

// Output channel c takes input channel kColorPermutations[i][c].
// 0:RGB 1:RBG 2:GRB 3:GBR 4:BRG 5:BGR
inline constexpr std::array<std::array<std::uint8_t, 3>, kNumColorPerms>
    kColorPermutations = {{{0, 1, 2},
                           {0, 2, 1},
                           {1, 0, 2},
                           {1, 2, 0},
                           {2, 0, 1},
                           {2, 1, 0}}};

// Enumerates all 96 transforms; index = (dihedral * 2 + negate) * 6 + color.
BlockTransform TransformFromIndex(std::size_t index);

// The transform equal to applying `first` and then `second`.
BlockTransform Compose(const BlockTransform& second, const BlockTransform& first);

Block ApplyDihedral(const Block& block, std::uint8_t state);   // ShapeError if not square
Block InvertDihedral(const Block& block, std::uint8_t state);
Block NegPos(const Block& block, bool flip);                   // v -> 255 - v
Block ShuffleColors(const Block& block, std::uint8_t perm);    // RangeError if perm >= 6
Block UnshuffleColors(const Block& block, std::uint8_t perm);

// Steps 2-4 in encryption order, and their inverse.
Block ApplyTransform(const Block& block, const BlockTransform& t);
Block InvertTransform(const Block& block, const BlockTransform& t);

// Fisher-Yates over [0, n): for i = n-1 down to 1, swap(i, UniformBelow(i+1)).
// order[pos] is the source block placed at grid position pos.
std::vector<std::uint32_t> ScrambleOrder(KeyStream& k1, std::size_t n);
BlockGrid ScrambleBlocks(const BlockGrid& grid, KeyStream& k1);
BlockGrid PermuteBlocks(const BlockGrid& grid,
                        const std::vector<std::uint32_t>& order);
BlockGrid UnpermuteBlocks(const BlockGrid& grid,
                          const std::vector<std::uint32_t>& order);

// The materialized key tape for one image. Transforms attach to grid
// positions after scrambling: transforms[pos] acts on the block at pos.
struct CipherPlan {
  std::vector<std::uint32_t> order;
  std::vector<BlockTransform> transforms;
};

// Draws the scramble from K1, then per position (or once in uniform mode)
// uniform_below(8) from K2, bernoulli_half from K3 and uniform_below(6) from
// K4. Disabled steps consume nothing from their stream.
CipherPlan DerivePlan(const MasterKey& key, const CipherSpec& spec,
                      std::size_t num_blocks);

struct EncryptedImage {
  RasterImage image;
  CipherSpec spec;
};

// Throws DimensionError if the image is not divisible by spec.block_size.
EncryptedImage Encrypt(const RasterImage& image, const MasterKey& key,
                       const CipherSpec& spec);
// A wrong key or spec is not detected; the output is deterministic garbage.
RasterImage Decrypt(const EncryptedImage& encrypted, const MasterKey& key);

}  // namespace etc

#endif  // ETC_CIPHER_HPP_
