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

#ifndef ETC_KEYING_HPP_
#define ETC_KEYING_HPP_

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace etc {

enum class Subkey : std::uint8_t { kK1 = 0, kK2 = 1, kK3 = 2, kK4 = 3 };

// Four independent 64-bit seeds, one per subkey. K1 drives block scrambling,
// K2 the dihedral transform, K3 negative-positive inversion and K4 the
// colour-channel shuffle.
struct MasterKey {
  std::array<std::uint64_t, 4> seeds{};

  std::uint64_t seed(Subkey id) const {
    return seeds[static_cast<std::size_t>(id)];
  }
  friend bool operator==(const MasterKey&, const MasterKey&) = default;
};

// SplitMix64 generator. The raw 64-bit output sequence is the "tape": every
// sampling helper below is defined in terms of it, so a stream is bit-exact
// across platforms. Not a cryptographic generator.
class KeyStream {
 public:
  KeyStream(Subkey id, std::uint64_t seed) : id_(id), state_(seed) {}

  std::uint64_t Next() {
    state_ += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    ++draw_count_;
    return z ^ (z >> 31);
  }

  // Uniform integer in [0, n) by bitmask rejection. Rejected draws stay on
  // the tape (draw_count advances for each).
  std::uint64_t UniformBelow(std::uint64_t n);

  // Least significant bit of one raw draw.
  bool BernoulliHalf() { return (Next() & 1U) != 0; }

  Subkey subkey() const { return id_; }
  std::uint64_t state() const { return state_; }
  std::uint64_t draw_count() const { return draw_count_; }

 private:
  Subkey id_;
  std::uint64_t state_;
  std::uint64_t draw_count_ = 0;
};

struct KeyStreams {
  KeyStream k1;
  KeyStream k2;
  KeyStream k3;
  KeyStream k4;
};

KeyStreams DeriveStreams(const MasterKey& master);

// Key file: four lines "K<i>=<16 lowercase hex digits>\n", i = 1..4.
std::string FormatKeyFile(const MasterKey& key);
MasterKey ParseKeyFile(std::string_view text);  // throws FormatError

MasterKey LoadKeyFile(const std::filesystem::path& path);
// Refuses to replace an existing file unless `force` is set (UsageError).
void SaveKeyFile(const MasterKey& key, const std::filesystem::path& path,
                 bool force);

// Four seeds from the operating system entropy source; never all zero.
MasterKey GenerateMasterKey();

}  // namespace etc

#endif  // ETC_KEYING_HPP_
