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

#ifndef ETC_ERRORS_HPP_
#define ETC_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace etc {

enum class ErrorKind {
  kDimension,  // image dimensions not divisible by the block size
  kShape,      // mismatched array / matrix shapes
  kRange,      // argument outside its allowed range
  kMode,       // operation not defined for the requested key mode
  kUsage,      // bad user input (empty corpus, single-class dataset, ...)
  kIo,
  kFormat,     // malformed key file or undecodable image
};

const char* ErrorKindName(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

#define ETC_DEFINE_ERROR(Name, Kind)                  \
  class Name : public Error {                         \
   public:                                            \
    explicit Name(const std::string& message)         \
        : Error(ErrorKind::Kind, message) {}          \
  };

ETC_DEFINE_ERROR(DimensionError, kDimension)
ETC_DEFINE_ERROR(ShapeError, kShape)
ETC_DEFINE_ERROR(RangeError, kRange)
ETC_DEFINE_ERROR(ModeError, kMode)
ETC_DEFINE_ERROR(UsageError, kUsage)
ETC_DEFINE_ERROR(IoError, kIo)
ETC_DEFINE_ERROR(FormatError, kFormat)

#undef ETC_DEFINE_ERROR

}  // namespace etc

#endif  // ETC_ERRORS_HPP_
