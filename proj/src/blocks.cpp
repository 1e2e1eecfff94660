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

#include "etc/blocks.hpp"

#include <algorithm>
#include <string>

#include "etc/errors.hpp"

namespace etc {

RasterImage::RasterImage(std::uint32_t w, std::uint32_t h,
                         std::vector<std::uint8_t> data)
    : width(w), height(h), pixels(std::move(data)) {
  if (pixels.size() != std::size_t{w} * h * kChannels) {
    throw ShapeError("pixel buffer holds " + std::to_string(pixels.size()) +
                     " values, expected " +
                     std::to_string(std::size_t{w} * h * kChannels));
  }
}

BlockGrid Split(const RasterImage& image, std::uint32_t block_w,
                std::uint32_t block_h) {
  if (block_w == 0 || block_h == 0) {
    throw DimensionError("block size must be positive");
  }
  if (image.width % block_w != 0 || image.height % block_h != 0) {
    throw DimensionError(std::to_string(image.width) + "x" +
                         std::to_string(image.height) +
                         " image is not divisible into " +
                         std::to_string(block_w) + "x" +
                         std::to_string(block_h) + " blocks");
  }
  BlockGrid grid;
  grid.block_w = block_w;
  grid.block_h = block_h;
  grid.cols = image.width / block_w;
  grid.rows = image.height / block_h;
  grid.blocks.reserve(std::size_t{grid.cols} * grid.rows);
  const std::size_t row_bytes = std::size_t{block_w} * kChannels;
  for (std::uint32_t by = 0; by < grid.rows; ++by) {
    for (std::uint32_t bx = 0; bx < grid.cols; ++bx) {
      Block block(block_w, block_h);
      for (std::uint32_t y = 0; y < block_h; ++y) {
        const auto src = image.pixels.begin() +
                         image.index(bx * block_w, by * block_h + y, 0);
        std::copy(src, src + row_bytes, block.pixels.begin() + y * row_bytes);
      }
      grid.blocks.push_back(std::move(block));
    }
  }
  return grid;
}

RasterImage Merge(const BlockGrid& grid) {
  if (grid.blocks.size() != std::size_t{grid.cols} * grid.rows) {
    throw ShapeError("grid holds " + std::to_string(grid.blocks.size()) +
                     " blocks, expected cols * rows");
  }
  RasterImage image(grid.cols * grid.block_w, grid.rows * grid.block_h);
  const std::size_t row_bytes = std::size_t{grid.block_w} * kChannels;
  for (std::uint32_t by = 0; by < grid.rows; ++by) {
    for (std::uint32_t bx = 0; bx < grid.cols; ++bx) {
      const Block& block = grid.blocks[std::size_t{by} * grid.cols + bx];
      if (block.width != grid.block_w || block.height != grid.block_h ||
          block.pixels.size() != row_bytes * grid.block_h) {
        throw ShapeError("block size does not match the grid");
      }
      for (std::uint32_t y = 0; y < grid.block_h; ++y) {
        const auto src = block.pixels.begin() + y * row_bytes;
        std::copy(src, src + row_bytes,
                  image.pixels.begin() +
                      image.index(bx * grid.block_w, by * grid.block_h + y, 0));
      }
    }
  }
  return image;
}

std::vector<std::uint8_t> Flatten(const Block& block) {
  std::vector<std::uint8_t> out(block.pixels.size());
  for (std::uint32_t y = 0; y < block.height; ++y) {
    for (std::uint32_t x = 0; x < block.width; ++x) {
      for (std::uint32_t c = 0; c < kChannels; ++c) {
        out[FlatIndex(c, y, x, block.width, block.height)] = block.at(x, y, c);
      }
    }
  }
  return out;
}

Block Unflatten(std::span<const std::uint8_t> values, std::uint32_t block_w,
                std::uint32_t block_h) {
  if (values.size() != std::size_t{block_w} * block_h * kChannels) {
    throw ShapeError("flat patch has " + std::to_string(values.size()) +
                     " values, expected " +
                     std::to_string(std::size_t{block_w} * block_h * kChannels));
  }
  Block block(block_w, block_h);
  for (std::uint32_t y = 0; y < block_h; ++y) {
    for (std::uint32_t x = 0; x < block_w; ++x) {
      for (std::uint32_t c = 0; c < kChannels; ++c) {
        block.at(x, y, c) = values[FlatIndex(c, y, x, block_w, block_h)];
      }
    }
  }
  return block;
}

RasterImage CenterCrop(const RasterImage& image, std::uint32_t multiple) {
  if (multiple == 0) throw DimensionError("crop multiple must be positive");
  const std::uint32_t w = image.width / multiple * multiple;
  const std::uint32_t h = image.height / multiple * multiple;
  if (w == 0 || h == 0) {
    throw DimensionError(std::to_string(image.width) + "x" +
                         std::to_string(image.height) +
                         " image is smaller than one " +
                         std::to_string(multiple) + "-pixel block");
  }
  const std::uint32_t x0 = (image.width - w) / 2;
  const std::uint32_t y0 = (image.height - h) / 2;
  RasterImage out(w, h);
  for (std::uint32_t y = 0; y < h; ++y) {
    const auto src = image.pixels.begin() + image.index(x0, y0 + y, 0);
    std::copy(src, src + std::size_t{w} * kChannels,
              out.pixels.begin() + out.index(0, y, 0));
  }
  return out;
}

}  // namespace etc
