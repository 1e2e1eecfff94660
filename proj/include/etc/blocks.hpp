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

#ifndef ETC_BLOCKS_HPP_
#define ETC_BLOCKS_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace etc {

inline constexpr std::uint32_t kChannels = 3;  // RGB, 8 bits per sample

// Row-major, channel-interleaved RGB raster.
struct RasterImage {
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  std::vector<std::uint8_t> pixels;

  RasterImage() = default;
  RasterImage(std::uint32_t w, std::uint32_t h)
      : width(w), height(h), pixels(std::size_t{w} * h * kChannels, 0) {}
  // Throws ShapeError if data.size() != w * h * 3.
  RasterImage(std::uint32_t w, std::uint32_t h, std::vector<std::uint8_t> data);

  std::size_t index(std::uint32_t x, std::uint32_t y, std::uint32_t c) const {
    return (std::size_t{y} * width + x) * kChannels + c;
  }
  std::uint8_t& at(std::uint32_t x, std::uint32_t y, std::uint32_t c) {
    return pixels[index(x, y, c)];
  }
  std::uint8_t at(std::uint32_t x, std::uint32_t y, std::uint32_t c) const {
    return pixels[index(x, y, c)];
  }

  friend bool operator==(const RasterImage&, const RasterImage&) = default;
};

// One block, stored with the same interleaved layout as RasterImage.
using Block = RasterImage;

struct BlockGrid {
  std::uint32_t block_w = 0;
  std::uint32_t block_h = 0;
  std::uint32_t cols = 0;
  std::uint32_t rows = 0;
  std::vector<Block> blocks;  // row-major over the grid

  std::size_t size() const { return blocks.size(); }
};

// Throws DimensionError unless width % block_w == 0 and height % block_h == 0.
// There is no implicit padding.
BlockGrid Split(const RasterImage& image, std::uint32_t block_w,
                std::uint32_t block_h);
// Throws ShapeError on an inconsistent grid.
RasterImage Merge(const BlockGrid& grid);

// Flattened patch order: channel-major, then row, then column, i.e. element
// c * (w * h) + y * w + x. The embedding algebra depends on this order.
inline std::size_t FlatIndex(std::uint32_t c, std::uint32_t y, std::uint32_t x,
                             std::uint32_t block_w, std::uint32_t block_h) {
  return (std::size_t{c} * block_h + y) * block_w + x;
}

std::vector<std::uint8_t> Flatten(const Block& block);
// Throws ShapeError when values.size() != block_w * block_h * 3.
Block Unflatten(std::span<const std::uint8_t> values, std::uint32_t block_w,
                std::uint32_t block_h);

// Largest centred crop whose sides are multiples of `multiple`. Throws
// DimensionError if a side is smaller than `multiple`.
RasterImage CenterCrop(const RasterImage& image, std::uint32_t multiple);

}  // namespace etc

#endif  // ETC_BLOCKS_HPP_
