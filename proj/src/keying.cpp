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

#include "etc/keying.hpp"

#include <bit>
#include <charconv>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include "etc/errors.hpp"

namespace etc {

const char* ErrorKindName(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kDimension: return "DimensionError";
    case ErrorKind::kShape: return "ShapeError";
    case ErrorKind::kRange: return "RangeError";
    case ErrorKind::kMode: return "ModeError";
    case ErrorKind::kUsage: return "UsageError";
    case ErrorKind::kIo: return "IoError";
    case ErrorKind::kFormat: return "FormatError";
  }
  return "Error";
}

std::uint64_t KeyStream::UniformBelow(std::uint64_t n) {
  if (n == 0) throw RangeError("uniform_below: n must be positive");
  const std::uint64_t mask =
      n > (std::uint64_t{1} << 63) ? std::numeric_limits<std::uint64_t>::max()
                                   : std::bit_ceil(n) - 1;
  for (;;) {
    const std::uint64_t v = Next() & mask;
    if (v < n) return v;
  }
}

KeyStreams DeriveStreams(const MasterKey& master) {
  return KeyStreams{KeyStream(Subkey::kK1, master.seeds[0]),
                    KeyStream(Subkey::kK2, master.seeds[1]),
                    KeyStream(Subkey::kK3, master.seeds[2]),
                    KeyStream(Subkey::kK4, master.seeds[3])};
}

std::string FormatKeyFile(const MasterKey& key) {
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (int i = 0; i < 4; ++i) {
    out += 'K';
    out += static_cast<char>('1' + i);
    out += '=';
    for (int shift = 60; shift >= 0; shift -= 4) {
      out += kHex[(key.seeds[i] >> shift) & 0xF];
    }
    out += '\n';
  }
  return out;
}

MasterKey ParseKeyFile(std::string_view text) {
  MasterKey key;
  bool seen[4] = {false, false, false, false};
  std::size_t line_no = 0;
  while (!text.empty()) {
    const std::size_t eol = text.find('\n');
    if (eol == std::string_view::npos) {
      throw FormatError("key file: missing newline after line " +
                        std::to_string(line_no + 1));
    }
    std::string_view line = text.substr(0, eol);
    text.remove_prefix(eol + 1);
    ++line_no;
    if (line.size() != 19 || line[0] != 'K' || line[2] != '=' ||
        line[1] < '1' || line[1] > '4') {
      throw FormatError("key file: line " + std::to_string(line_no) +
                        " is not of the form K<i>=<16 hex digits>");
    }
    const int slot = line[1] - '1';
    if (seen[slot]) {
      throw FormatError("key file: duplicate K" + std::string(1, line[1]));
    }
    const std::string_view hex = line.substr(3);
    for (char c : hex) {
      if (!((c >= '0' && c <= '9') || (c >= 'a' && c <= 'f'))) {
        throw FormatError("key file: K" + std::string(1, line[1]) +
                          " must be 16 lowercase hex digits");
      }
    }
    std::uint64_t value = 0;
    std::from_chars(hex.data(), hex.data() + hex.size(), value, 16);
    key.seeds[slot] = value;
    seen[slot] = true;
  }
  for (int i = 0; i < 4; ++i) {
    if (!seen[i]) {
      throw FormatError("key file: missing K" + std::to_string(i + 1));
    }
  }
  return key;
}

MasterKey LoadKeyFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open key file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return ParseKeyFile(buf.str());
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void SaveKeyFile(const MasterKey& key, const std::filesystem::path& path,
                 bool force) {
  std::error_code ec;
  if (!force && std::filesystem::exists(path, ec)) {
    throw UsageError(path.string() + " exists (use --force to overwrite)");
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write key file " + path.string());
  out << FormatKeyFile(key);
  if (!out.flush()) throw IoError("write failed: " + path.string());
}

MasterKey GenerateMasterKey() {
  std::random_device entropy;  // getrandom(2) / /dev/urandom on Linux
  MasterKey key;
  do {
    for (auto& seed : key.seeds) {
      seed = (std::uint64_t{entropy()} << 32) | entropy();
    }
  } while (key == MasterKey{});
  return key;
}

}  // namespace etc
