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

#ifndef IQDZ_CLI_SELFTEST_H_
#define IQDZ_CLI_SELFTEST_H_

#include <cstdint>
#include <ostream>

namespace iqdz::cli {

// Reduced quantizer, coder, bitstream and metric property suites. Writes one
// "<suite>: PASS|FAIL <detail>" line per suite and returns true when all pass.
bool RunSelfTest(uint64_t seed, std::ostream& log);

}  // namespace iqdz::cli

#endif  // IQDZ_CLI_SELFTEST_H_
