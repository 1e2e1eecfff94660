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

#include "test_util.hpp"

#include <atomic>
#include <cstdio>

#include <openssl/evp.h>
#include <unistd.h>

namespace etc::testing {

RasterImage FixtureImage(std::uint32_t w, std::uint32_t h) {
  RasterImage img(w, h);
  for (std::uint32_t y = 0; y < h; ++y) {
    for (std::uint32_t x = 0; x < w; ++x) {
      for (std::uint32_t c = 0; c < kChannels; ++c) {
        img.at(x, y, c) = static_cast<std::uint8_t>((x * 7 + y * 13 + c * 61 + x * y) & 255);
      }
    }
  }
  return img;
}

RasterImage RandomImage(std::mt19937_64& rng, std::uint32_t w, std::uint32_t h) {
  RasterImage img(w, h);
  std::uniform_int_distribution<int> byte(0, 255);
  for (auto& v : img.pixels) v = static_cast<std::uint8_t>(byte(rng));
  return img;
}

MasterKey RandomKey(std::mt19937_64& rng) {
  MasterKey key;
  for (auto& s : key.seeds) s = rng();
  return key;
}

std::string Sha256Hex(std::span<const std::uint8_t> bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr);
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 0xF];
  }
  return out;
}

std::filesystem::path DataDir() { return ETC_TEST_DATA_DIR; }
std::filesystem::path CorpusDir() { return DataDir() / "corpus"; }

TempDir::TempDir(const std::string& tag) {
  static std::atomic<int> counter{0};
  path_ = std::filesystem::temp_directory_path() /
          ("etc-" + tag + "-" + std::to_string(::getpid()) + "-" +
           std::to_string(counter++));
  std::filesystem::remove_all(path_);
  std::filesystem::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

}  // namespace etc::testing
