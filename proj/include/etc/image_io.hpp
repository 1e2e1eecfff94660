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

#ifndef ETC_IMAGE_IO_HPP_
#define ETC_IMAGE_IO_HPP_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "etc/blocks.hpp"

namespace etc {

// PNG or JPEG, detected from the file signature. Grey and alpha inputs are
// converted to RGB. Throws IoError / FormatError.
RasterImage LoadImage(const std::filesystem::path& path);
RasterImage DecodeImage(std::span<const std::uint8_t> bytes);

// PNG encoder settings are fixed (zlib level 9, default filters, no
// ancillary chunks) so that output bytes are reproducible.
std::vector<std::uint8_t> EncodePng(const RasterImage& image);
void SavePng(const RasterImage& image, const std::filesystem::path& path);

// Baseline JPEG, 4:2:0 chroma subsampling, standard Huffman tables (no
// optimization), ISLOW DCT. RangeError unless 1 <= quality <= 100.
std::vector<std::uint8_t> EncodeJpeg(const RasterImage& image, int quality);

// Describes the codec configuration for report headers.
std::string CodecDescription();

// Regular files under `dir` with a .png/.jpg/.jpeg extension (any case),
// sorted by relative path.
std::vector<std::filesystem::path> ListImages(const std::filesystem::path& dir);

}  // namespace etc

#endif  // ETC_IMAGE_IO_HPP_
