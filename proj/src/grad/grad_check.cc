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

#include "iqdz/grad/grad_check.h"

#include <algorithm>
#include <cmath>

namespace iqdz::grad {
namespace {

double SumOutput(Graph& graph, std::span<const Tensor> inputs) {
  const Tensor& out = graph.Forward(inputs);
  double s = 0;
  for (double v : out.values()) s += v;
  return s;
}

}  // namespace

GradCheckReport GradCheck(Graph& graph, std::span<const Tensor> inputs,
                          double tolerance, double step) {
  GradCheckReport report;
  report.tolerance = tolerance;
  for (size_t i = 0; i < graph.num_nodes(); ++i) {
    const NodeId id{static_cast<uint32_t>(i)};
    if (!IsDifferentiable(graph.Op(id))) report.excluded_nodes.push_back(graph.Label(id));
  }

  const std::vector<Tensor*> params = graph.Parameters();
  const std::vector<std::string> names = graph.ParameterNames();
  std::vector<std::vector<double>> saved(params.size());
  for (size_t p = 0; p < params.size(); ++p) {
    Tensor* t = params[p];
    if (t->has_grad()) saved[p].assign(t->grad().begin(), t->grad().end());
    t->EnableGrad();
    t->ZeroGrad();
  }

  const Tensor& out = graph.Forward(inputs);
  graph.Backward(Tensor(out.shape(), 1.0));

  for (size_t p = 0; p < params.size(); ++p) {
    Tensor* t = params[p];
    const std::vector<double> analytic(t->grad().begin(), t->grad().end());
    double max_diff = 0, max_mag = 0;
    for (size_t k = 0; k < t->size(); ++k) {
      const double orig = (*t)[k];
      (*t)[k] = orig + step;
      const double plus = SumOutput(graph, inputs);
      (*t)[k] = orig - step;
      const double minus = SumOutput(graph, inputs);
      (*t)[k] = orig;
      const double numeric = (plus - minus) / (2 * step);
      max_diff = std::max(max_diff, std::abs(analytic[k] - numeric));
      max_mag = std::max({max_mag, std::abs(analytic[k]), std::abs(numeric)});
    }
    const double rel = max_mag > 0 ? max_diff / max_mag : 0.0;
    report.parameters.push_back({names[p], t->size(), rel});
    report.max_relative_error = std::max(report.max_relative_error, rel);
  }

  for (size_t p = 0; p < params.size(); ++p) {
    Tensor* t = params[p];
    if (saved[p].empty()) {
      t->DropGrad();
    } else {
      std::copy(saved[p].begin(), saved[p].end(), t->grad().begin());
    }
  }
  // Leave the graph holding values for the unperturbed parameters.
  graph.Forward(inputs);
  report.passed = report.max_relative_error < tolerance;
  return report;
}

}  // namespace iqdz::grad
