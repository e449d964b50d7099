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

#ifndef IQDZ_GRAD_GRAPH_H_
#define IQDZ_GRAD_GRAPH_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "iqdz/grad/tensor.h"

namespace iqdz::grad {

struct NodeId {
  uint32_t index = 0;
  friend bool operator==(NodeId a, NodeId b) { return a.index == b.index; }
};

enum class OpKind : uint8_t {
  kInput,
  kParameter,
  kConstant,
  kAffine,
  kAdd,
  kMultiply,
  kSoftplus,
  kSigmoid,
  kTanh,
  kLog,
  kSquare,
  kReciprocal,
  kFloor,
  kMean,
  kSum,
  kConcat,
  kSlice,
};

std::string_view OpName(OpKind op);
// Floor is the only op without a usable derivative; its backward is zero.
bool IsDifferentiable(OpKind op);

// Static reverse-mode graph. Nodes are appended in topological order; the graph
// is built once and then evaluated repeatedly with Forward/Backward. Parameter
// nodes reference externally owned tensors, which must outlive the graph and
// keep their shape. Backward accumulates into those tensors' gradient slots.
//
// Add and Multiply broadcast the smaller operand when it is a scalar or its
// shape is a suffix of the larger operand's shape ([N] against [B, N]).
class Graph {
 public:
  Graph() = default;
  Graph(const Graph&) = delete;
  Graph& operator=(const Graph&) = delete;
  Graph(Graph&&) = default;
  Graph& operator=(Graph&&) = default;

  NodeId Input(Shape shape, std::string name = {});
  NodeId Parameter(Tensor* param, std::string name = {});
  NodeId Constant(Tensor value, std::string name = {});

  // x: [in] or [B, in]; weight: [out, in]; bias: [out].
  NodeId Affine(NodeId x, NodeId weight, NodeId bias);
  NodeId Add(NodeId a, NodeId b);
  NodeId Multiply(NodeId a, NodeId b);
  NodeId Softplus(NodeId a);
  NodeId Sigmoid(NodeId a);
  NodeId Tanh(NodeId a);
  NodeId Log(NodeId a);
  NodeId Square(NodeId a);
  NodeId Reciprocal(NodeId a);
  NodeId Floor(NodeId a);
  NodeId Mean(NodeId a);
  NodeId Sum(NodeId a);
  // Last-axis concatenation and slicing.
  NodeId Concat(NodeId a, NodeId b);
  NodeId Slice(NodeId a, size_t begin, size_t end);

  // Compositions of the primitives above.
  NodeId Scale(NodeId a, double factor);
  NodeId AddScalar(NodeId a, double value);
  NodeId Subtract(NodeId a, NodeId b);

  void SetName(NodeId id, std::string name);
  // Defaults to the most recently added node.
  void SetOutput(NodeId id) { output_ = id; }
  NodeId output() const;

  // Evaluates every node; inputs bind to Input nodes in declaration order.
  const Tensor& Forward(std::span<const Tensor> inputs);
  // Propagates output_grad back through the graph, accumulating into each
  // parameter's gradient slot (allocated on first use).
  void Backward(const Tensor& output_grad);

  const Tensor& Value(NodeId id) const;
  // Gradient w.r.t. the node's value from the most recent Backward.
  std::span<const double> Gradient(NodeId id) const;
  const Shape& ShapeOf(NodeId id) const { return nodes_[id.index].shape; }
  OpKind Op(NodeId id) const { return nodes_[id.index].op; }
  std::string Label(NodeId id) const;

  size_t num_nodes() const { return nodes_.size(); }
  size_t num_inputs() const { return inputs_.size(); }
  const Shape& InputShape(size_t i) const { return nodes_[inputs_[i].index].shape; }
  std::span<const NodeId> parents(NodeId id) const { return nodes_[id.index].parents; }
  // Distinct parameter tensors in first-use order.
  std::vector<Tensor*> Parameters() const;
  std::vector<std::string> ParameterNames() const;

 private:
  struct Node {
    OpKind op = OpKind::kInput;
    std::vector<NodeId> parents;
    Shape shape;
    std::string name;
    Tensor* param = nullptr;
    Tensor constant;
    size_t slice_begin = 0;
    size_t slice_end = 0;
  };

  static Node MakeNode(OpKind op, std::vector<NodeId> parents, Shape shape,
                       std::string name);
  NodeId Append(Node node);
  NodeId Unary(OpKind op, NodeId a);
  NodeId Broadcasting(OpKind op, NodeId a, NodeId b);
  void CheckId(NodeId id) const;
  void EvaluateNode(size_t i);
  void BackwardNode(size_t i);

  std::vector<Node> nodes_;
  std::vector<NodeId> inputs_;
  std::optional<NodeId> output_;
  std::vector<Tensor> values_;
  std::vector<std::vector<double>> grads_;
  bool forward_done_ = false;
};

}  // namespace iqdz::grad

#endif  // IQDZ_GRAD_GRAPH_H_
