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

#ifndef IQDZ_GRAD_GRAD_CHECK_H_
#define IQDZ_GRAD_GRAD_CHECK_H_

#include <span>
#include <string>
#include <vector>

#include "iqdz/grad/graph.h"

namespace iqdz::grad {

struct ParameterCheck {
  std::string name;
  size_t elements = 0;
  // max_k |analytic_k - numeric_k| / max(max_k |analytic_k|, max_k |numeric_k|)
  double relative_error = 0.0;
};

struct GradCheckReport {
  std::vector<ParameterCheck> parameters;
  // Labels of non-differentiable nodes (floor); they contribute zero gradient
  // and are not checked.
  std::vector<std::string> excluded_nodes;
  double max_relative_error = 0.0;
  double tolerance = 0.0;
  bool passed = false;
};

// Compares reverse-mode gradients of sum(output) against central differences
// with the given step. Parameter values and gradient slots are restored.
// Roundoff in the difference grows like eps * |output| / step, so the default
// step stays usable for outputs up to about 1e5.
GradCheckReport GradCheck(Graph& graph, std::span<const Tensor> inputs,
                          double tolerance, double step = 1e-4);

}  // namespace iqdz::grad

#endif  // IQDZ_GRAD_GRAD_CHECK_H_
