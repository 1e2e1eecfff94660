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

#include "etc/cipher.hpp"

#include <algorithm>
#include <numeric>
#include <utility>

#include "etc/errors.hpp"

namespace etc {
namespace {

struct Coord {
  std::uint32_t y;
  std::uint32_t x;
};

// Source coordinate in the input block of output pixel (y, x) after
// flip-then-rotate state `s` on an n x n block.
Coord DihedralSource(std::uint8_t s, std::uint32_t n, std::uint32_t y,
                     std::uint32_t x) {
  for (int k = 0; k < s % 4; ++k) {
    const std::uint32_t ny = n - 1 - x;
    x = y;
    y = ny;
  }
  if (s >= 4) x = n - 1 - x;
  return {y, x};
}

void CheckSquare(const Block& block) {
  if (block.width != block.height) {
    throw ShapeError("dihedral transform needs a square block, got " +
                     std::to_string(block.width) + "x" +
                     std::to_string(block.height));
  }
}

void CheckColorPerm(std::uint8_t perm) {
  if (perm >= kNumColorPerms) {
    throw RangeError("colour permutation index " + std::to_string(perm) +
                     " is not in [0, 6)");
  }
}

void CheckTransform(const BlockTransform& t) {
  if (t.dihedral >= kNumDihedral) {
    throw RangeError("dihedral state " + std::to_string(t.dihedral) +
                     " is not in [0, 8)");
  }
  CheckColorPerm(t.color_perm);
}

}  // namespace

std::uint8_t ParseSteps(std::string_view text) {
  if (text == "all") return kAllSteps;
  if (text == "none" || text.empty()) return 0;
  std::uint8_t steps = 0;
  while (!text.empty()) {
    const std::size_t comma = text.find(',');
    const std::string_view name = text.substr(0, comma);
    if (name == "scramble") {
      steps |= kScramble;
    } else if (name == "dihedral") {
      steps |= kDihedral;
    } else if (name == "negpos") {
      steps |= kNegPos;
    } else if (name == "colorshuffle") {
      steps |= kColorShuffle;
    } else {
      throw UsageError("unknown encryption step '" + std::string(name) +
                       "' (expected scramble, dihedral, negpos, colorshuffle)");
    }
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return steps;
}

std::string FormatSteps(std::uint8_t steps) {
  std::string out;
  const std::pair<Step, const char*> names[] = {{kScramble, "scramble"},
                                                {kDihedral, "dihedral"},
                                                {kNegPos, "negpos"},
                                                {kColorShuffle, "colorshuffle"}};
  for (const auto& [step, name] : names) {
    if ((steps & step) == 0) continue;
    if (!out.empty()) out += ',';
    out += name;
  }
  return out.empty() ? "none" : out;
}

KeyMode ParseKeyMode(std::string_view text) {
  if (text == "per-block") return KeyMode::kPerBlock;
  if (text == "uniform") return KeyMode::kUniform;
  throw UsageError("unknown key mode '" + std::string(text) +
                   "' (expected per-block or uniform)");
}

std::string_view KeyModeName(KeyMode mode) {
  return mode == KeyMode::kUniform ? "uniform" : "per-block";
}

BlockTransform TransformFromIndex(std::size_t index) {
  if (index >= kNumTransforms) throw RangeError("transform index out of range");
  BlockTransform t;
  t.color_perm = static_cast<std::uint8_t>(index % kNumColorPerms);
  index /= kNumColorPerms;
  t.negate = (index % 2) != 0;
  t.dihedral = static_cast<std::uint8_t>(index / 2);
  return t;
}

BlockTransform Compose(const BlockTransform& second,
                       const BlockTransform& first) {
  CheckTransform(first);
  CheckTransform(second);
  // The dihedral group acts faithfully on the corners of a 2x2 block, so the
  // composite state is the one that reproduces that action.
  Block probe(2, 2);
  for (std::uint8_t i = 0; i < 4; ++i) probe.pixels[i * kChannels] = i;
  const Block target =
      ApplyDihedral(ApplyDihedral(probe, first.dihedral), second.dihedral);
  BlockTransform out;
  for (std::uint8_t s = 0; s < kNumDihedral; ++s) {
    if (ApplyDihedral(probe, s) == target) {
      out.dihedral = s;
      break;
    }
  }
  out.negate = first.negate != second.negate;
  // Applying `first` then `second` takes output channel c from input channel
  // first[second[c]].
  const auto& p1 = kColorPermutations[first.color_perm];
  const auto& p2 = kColorPermutations[second.color_perm];
  const std::array<std::uint8_t, 3> composed = {p1[p2[0]], p1[p2[1]], p1[p2[2]]};
  out.color_perm = static_cast<std::uint8_t>(
      std::find(kColorPermutations.begin(), kColorPermutations.end(), composed) -
      kColorPermutations.begin());
  return out;
}

Block ApplyDihedral(const Block& block, std::uint8_t state) {
  CheckSquare(block);
  CheckTransform({state, false, 0});
  Block out(block.width, block.height);
  const std::uint32_t n = block.width;
  for (std::uint32_t y = 0; y < n; ++y) {
    for (std::uint32_t x = 0; x < n; ++x) {
      const Coord src = DihedralSource(state, n, y, x);
      for (std::uint32_t c = 0; c < kChannels; ++c) {
        out.at(x, y, c) = block.at(src.x, src.y, c);
      }
    }
  }
  return out;
}

Block InvertDihedral(const Block& block, std::uint8_t state) {
  CheckSquare(block);
  CheckTransform({state, false, 0});
  Block out(block.width, block.height);
  const std::uint32_t n = block.width;
  for (std::uint32_t y = 0; y < n; ++y) {
    for (std::uint32_t x = 0; x < n; ++x) {
      const Coord src = DihedralSource(state, n, y, x);
      for (std::uint32_t c = 0; c < kChannels; ++c) {
        out.at(src.x, src.y, c) = block.at(x, y, c);
      }
    }
  }
  return out;
}

Block NegPos(const Block& block, bool flip) {
  Block out = block;
  if (flip) {
    for (auto& v : out.pixels) v = static_cast<std::uint8_t>(v ^ 0xFF);
  }
  return out;
}

Block ShuffleColors(const Block& block, std::uint8_t perm) {
  CheckColorPerm(perm);
  const auto& table = kColorPermutations[perm];
  Block out(block.width, block.height);
  for (std::size_t p = 0; p < block.pixels.size(); p += kChannels) {
    for (std::uint32_t c = 0; c < kChannels; ++c) {
      out.pixels[p + c] = block.pixels[p + table[c]];
    }
  }
  return out;
}

Block UnshuffleColors(const Block& block, std::uint8_t perm) {
  CheckColorPerm(perm);
  const auto& table = kColorPermutations[perm];
  Block out(block.width, block.height);
  for (std::size_t p = 0; p < block.pixels.size(); p += kChannels) {
    for (std::uint32_t c = 0; c < kChannels; ++c) {
      out.pixels[p + table[c]] = block.pixels[p + c];
    }
  }
  return out;
}

Block ApplyTransform(const Block& block, const BlockTransform& t) {
  CheckSquare(block);
  CheckTransform(t);
  const auto& table = kColorPermutations[t.color_perm];
  const std::uint8_t mask = t.negate ? 0xFF : 0x00;
  const std::uint32_t n = block.width;
  Block out(n, n);
  for (std::uint32_t y = 0; y < n; ++y) {
    for (std::uint32_t x = 0; x < n; ++x) {
      const Coord src = DihedralSource(t.dihedral, n, y, x);
      for (std::uint32_t c = 0; c < kChannels; ++c) {
        out.at(x, y, c) =
            static_cast<std::uint8_t>(block.at(src.x, src.y, table[c]) ^ mask);
      }
    }
  }
  return out;
}

Block InvertTransform(const Block& block, const BlockTransform& t) {
  CheckSquare(block);
  CheckTransform(t);
  const auto& table = kColorPermutations[t.color_perm];
  const std::uint8_t mask = t.negate ? 0xFF : 0x00;
  const std::uint32_t n = block.width;
  Block out(n, n);
  for (std::uint32_t y = 0; y < n; ++y) {
    for (std::uint32_t x = 0; x < n; ++x) {
      const Coord src = DihedralSource(t.dihedral, n, y, x);
      for (std::uint32_t c = 0; c < kChannels; ++c) {
        out.at(src.x, src.y, table[c]) =
            static_cast<std::uint8_t>(block.at(x, y, c) ^ mask);
      }
    }
  }
  return out;
}

std::vector<std::uint32_t> ScrambleOrder(KeyStream& k1, std::size_t n) {
  std::vector<std::uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0U);
  for (std::size_t i = n; i-- > 1;) {
    const std::size_t j = k1.UniformBelow(i + 1);
    std::swap(order[i], order[j]);
  }
  return order;
}

BlockGrid PermuteBlocks(const BlockGrid& grid,
                        const std::vector<std::uint32_t>& order) {
  if (order.size() != grid.size()) {
    throw ShapeError("block order does not match the grid size");
  }
  BlockGrid out = grid;
  for (std::size_t pos = 0; pos < order.size(); ++pos) {
    out.blocks[pos] = grid.blocks[order[pos]];
  }
  return out;
}

BlockGrid UnpermuteBlocks(const BlockGrid& grid,
                          const std::vector<std::uint32_t>& order) {
  if (order.size() != grid.size()) {
    throw ShapeError("block order does not match the grid size");
  }
  BlockGrid out = grid;
  for (std::size_t pos = 0; pos < order.size(); ++pos) {
    out.blocks[order[pos]] = grid.blocks[pos];
  }
  return out;
}

BlockGrid ScrambleBlocks(const BlockGrid& grid, KeyStream& k1) {
  return PermuteBlocks(grid, ScrambleOrder(k1, grid.size()));
}

CipherPlan DerivePlan(const MasterKey& key, const CipherSpec& spec,
                      std::size_t num_blocks) {
  KeyStreams streams = DeriveStreams(key);
  CipherPlan plan;
  if (spec.has(kScramble)) {
    plan.order = ScrambleOrder(streams.k1, num_blocks);
  } else {
    plan.order.resize(num_blocks);
    std::iota(plan.order.begin(), plan.order.end(), 0U);
  }
  auto draw = [&] {
    BlockTransform t;
    if (spec.has(kDihedral)) {
      t.dihedral = static_cast<std::uint8_t>(streams.k2.UniformBelow(kNumDihedral));
    }
    if (spec.has(kNegPos)) t.negate = streams.k3.BernoulliHalf();
    if (spec.has(kColorShuffle)) {
      t.color_perm =
          static_cast<std::uint8_t>(streams.k4.UniformBelow(kNumColorPerms));
    }
    return t;
  };
  if (spec.mode == KeyMode::kUniform) {
    plan.transforms.assign(num_blocks, num_blocks > 0 ? draw() : BlockTransform{});
  } else {
    plan.transforms.reserve(num_blocks);
    for (std::size_t pos = 0; pos < num_blocks; ++pos) {
      plan.transforms.push_back(draw());
    }
  }
  return plan;
}

EncryptedImage Encrypt(const RasterImage& image, const MasterKey& key,
                       const CipherSpec& spec) {
  const BlockGrid grid = Split(image, spec.block_size, spec.block_size);
  const CipherPlan plan = DerivePlan(key, spec, grid.size());
  BlockGrid scrambled = PermuteBlocks(grid, plan.order);
  if ((spec.steps & ~kScramble) != 0) {
    for (std::size_t pos = 0; pos < scrambled.size(); ++pos) {
      scrambled.blocks[pos] =
          ApplyTransform(scrambled.blocks[pos], plan.transforms[pos]);
    }
  }
  return EncryptedImage{Merge(scrambled), spec};
}

RasterImage Decrypt(const EncryptedImage& encrypted, const MasterKey& key) {
  const CipherSpec& spec = encrypted.spec;
  BlockGrid grid = Split(encrypted.image, spec.block_size, spec.block_size);
  const CipherPlan plan = DerivePlan(key, spec, grid.size());
  if ((spec.steps & ~kScramble) != 0) {
    for (std::size_t pos = 0; pos < grid.size(); ++pos) {
      grid.blocks[pos] = InvertTransform(grid.blocks[pos], plan.transforms[pos]);
    }
  }
  return Merge(UnpermuteBlocks(grid, plan.order));
}

}  // namespace etc
