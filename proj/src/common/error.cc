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

#include "iqdz/common/error.h"

namespace iqdz {

std::string_view ErrorKindName(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kConfiguration:
      return "configuration";
    case ErrorKind::kNumeric:
      return "numeric";
    case ErrorKind::kState:
      return "state";
    case ErrorKind::kFormat:
      return "format";
    case ErrorKind::kEncoding:
      return "encoding";
    case ErrorKind::kDecode:
      return "decode";
    case ErrorKind::kModelMismatch:
      return "model-mismatch";
    case ErrorKind::kIo:
      return "io";
  }
  return "unknown";
}

}  // namespace iqdz
