// Copyright 2026 The IQDZ Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef IQDZ_COMMON_ERROR_H_
#define IQDZ_COMMON_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace iqdz {

// Failure categories. The CLI maps these onto exit codes and the single-line
// machine-parsable error message.
enum class ErrorKind {
  kConfiguration,
  kNumeric,
  kState,
  kFormat,
  kEncoding,
  kDecode,
  kModelMismatch,
  kIo,
};

std::string_view ErrorKindName(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void Fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

}  // namespace iqdz

#endif  // IQDZ_COMMON_ERROR_H_
