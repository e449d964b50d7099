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

#ifndef IQDZ_CLI_CLI_H_
#define IQDZ_CLI_CLI_H_

#include <ostream>

namespace iqdz::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

// Subcommands: train, encode, decode, rdsweep, isometry-check, gradcheck,
// selftest. Data goes to --out files or out; logs and the single-line error
// "iqdz: error[<kind>]: <message>" go to err. Usage and invalid settings exit
// 2, every other failure exits 1.
int Run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace iqdz::cli

#endif  // IQDZ_CLI_CLI_H_
