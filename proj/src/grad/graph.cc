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

#include "iqdz/grad/graph.h"

#include <algorithm>
#include <cmath>

#include "iqdz/common/error.h"
#include "iqdz/grad/kernels.h"

namespace iqdz::grad {
namespace {

bool IsSuffix(const Shape& small, const Shape& big) {
  if (small.size() > big.size()) return false;
  return std::equal(small.rbegin(), small.rend(), big.rbegin());
}

}  // namespace

std::string_view OpName(OpKind op) {
  switch (op) {
    case OpKind::kInput: return "input";
    case OpKind::kParameter: return "parameter";
    case OpKind::kConstant: return "constant";
    case OpKind::kAffine: return "affine";
    case OpKind::kAdd: return "add";
    case OpKind::kMultiply: return "multiply";
    case OpKind::kSoftplus: return "softplus";
    case OpKind::kSigmoid: return "sigmoid";
    case OpKind::kTanh: return "tanh";
    case OpKind::kLog: return "log";
    case OpKind::kSquare: return "square";
    case OpKind::kReciprocal: return "reciprocal";
    case OpKind::kFloor: return "floor";
    case OpKind::kMean: return "mean";
    case OpKind::kSum: return "sum";
    case OpKind::kConcat: return "concat";
    case OpKind::kSlice: return "slice";
  }
  return "unknown";
}

bool IsDifferentiable(OpKind op) { return op != OpKind::kFloor; }

Graph::Node Graph::MakeNode(OpKind op, std::vector<NodeId> parents, Shape shape,
                           std::string name) {
  Node n;
  n.op = op;
  n.parents = std::move(parents);
  n.shape = std::move(shape);
  n.name = std::move(name);
  return n;
}

void Graph::CheckId(NodeId id) const {
  if (id.index >= nodes_.size()) {
    Fail(ErrorKind::kConfiguration, "unknown graph node #" + std::to_string(id.index));
  }
}

NodeId Graph::Append(Node node) {
  const NodeId id{static_cast<uint32_t>(nodes_.size())};
  if (node.op != OpKind::kParameter && node.op != OpKind::kConstant) {
    values_.emplace_back(node.shape);
  } else {
    values_.emplace_back();
  }
  grads_.emplace_back(NumElements(node.shape), 0.0);
  nodes_.push_back(std::move(node));
  forward_done_ = false;
  return id;
}

NodeId Graph::Input(Shape shape, std::string name) {
  Node n = MakeNode(OpKind::kInput, {}, std::move(shape), std::move(name));
  const NodeId id = Append(std::move(n));
  inputs_.push_back(id);
  return id;
}

NodeId Graph::Parameter(Tensor* param, std::string name) {
  if (param == nullptr || param->size() == 0) {
    Fail(ErrorKind::kConfiguration, "parameter node needs a non-empty tensor");
  }
  Node n = MakeNode(OpKind::kParameter, {}, param->shape(), std::move(name));
  n.param = param;
  return Append(std::move(n));
}

NodeId Graph::Constant(Tensor value, std::string name) {
  Node n = MakeNode(OpKind::kConstant, {}, value.shape(), std::move(name));
  n.constant = std::move(value);
  return Append(std::move(n));
}

NodeId Graph::Affine(NodeId x, NodeId weight, NodeId bias) {
  CheckId(x);
  CheckId(weight);
  CheckId(bias);
  const Shape& xs = ShapeOf(x);
  const Shape& ws = ShapeOf(weight);
  const Shape& bs = ShapeOf(bias);
  if (ws.size() != 2 || bs.size() != 1 || bs[0] != ws[0] || xs.empty() ||
      xs.size() > 2 || xs.back() != ws[1]) {
    Fail(ErrorKind::kConfiguration, "affine shape mismatch: x" + ShapeString(xs) +
                                        " W" + ShapeString(ws) + " b" +
                                        ShapeString(bs));
  }
  Shape out = xs;
  out.back() = ws[0];
  return Append(MakeNode(OpKind::kAffine, {x, weight, bias}, out, {}));
}

NodeId Graph::Broadcasting(OpKind op, NodeId a, NodeId b) {
  CheckId(a);
  CheckId(b);
  const Shape& as = ShapeOf(a);
  const Shape& bs = ShapeOf(b);
  const size_t na = NumElements(as);
  const size_t nb = NumElements(bs);
  const Shape& big = na >= nb ? as : bs;
  const Shape& small = na >= nb ? bs : as;
  if (NumElements(small) != 1 && !IsSuffix(small, big)) {
    Fail(ErrorKind::kConfiguration, std::string(OpName(op)) +
                                        " cannot broadcast " + ShapeString(as) +
                                        " with " + ShapeString(bs));
  }
  return Append(MakeNode(op, {a, b}, big, {}));
}

NodeId Graph::Add(NodeId a, NodeId b) { return Broadcasting(OpKind::kAdd, a, b); }
NodeId Graph::Multiply(NodeId a, NodeId b) {
  return Broadcasting(OpKind::kMultiply, a, b);
}

NodeId Graph::Unary(OpKind op, NodeId a) {
  CheckId(a);
  return Append(MakeNode(op, {a}, ShapeOf(a), {}));
}

NodeId Graph::Softplus(NodeId a) { return Unary(OpKind::kSoftplus, a); }
NodeId Graph::Sigmoid(NodeId a) { return Unary(OpKind::kSigmoid, a); }
NodeId Graph::Tanh(NodeId a) { return Unary(OpKind::kTanh, a); }
NodeId Graph::Log(NodeId a) { return Unary(OpKind::kLog, a); }
NodeId Graph::Square(NodeId a) { return Unary(OpKind::kSquare, a); }
NodeId Graph::Reciprocal(NodeId a) { return Unary(OpKind::kReciprocal, a); }
NodeId Graph::Floor(NodeId a) { return Unary(OpKind::kFloor, a); }

NodeId Graph::Mean(NodeId a) {
  CheckId(a);
  return Append(MakeNode(OpKind::kMean, {a}, Shape{1}, {}));
}

NodeId Graph::Sum(NodeId a) {
  CheckId(a);
  return Append(MakeNode(OpKind::kSum, {a}, Shape{1}, {}));
}

NodeId Graph::Concat(NodeId a, NodeId b) {
  CheckId(a);
  CheckId(b);
  const Shape& as = ShapeOf(a);
  const Shape& bs = ShapeOf(b);
  if (as.size() != bs.size() ||
      !std::equal(as.begin(), as.end() - 1, bs.begin())) {
    Fail(ErrorKind::kConfiguration,
         "concat shape mismatch: " + ShapeString(as) + " vs " + ShapeString(bs));
  }
  Shape out = as;
  out.back() += bs.back();
  return Append(MakeNode(OpKind::kConcat, {a, b}, out, {}));
}

NodeId Graph::Slice(NodeId a, size_t begin, size_t end) {
  CheckId(a);
  const Shape& as = ShapeOf(a);
  if (begin >= end || end > as.back()) {
    Fail(ErrorKind::kConfiguration, "slice [" + std::to_string(begin) + "," +
                                        std::to_string(end) + ") out of range for " +
                                        ShapeString(as));
  }
  Shape out = as;
  out.back() = end - begin;
  Node n = MakeNode(OpKind::kSlice, {a}, out, {});
  n.slice_begin = begin;
  n.slice_end = end;
  return Append(std::move(n));
}

NodeId Graph::Scale(NodeId a, double factor) {
  return Multiply(a, Constant(Tensor::Scalar(factor)));
}

NodeId Graph::AddScalar(NodeId a, double value) {
  return Add(a, Constant(Tensor::Scalar(value)));
}

NodeId Graph::Subtract(NodeId a, NodeId b) { return Add(a, Scale(b, -1.0)); }

void Graph::SetName(NodeId id, std::string name) {
  CheckId(id);
  nodes_[id.index].name = std::move(name);
}

NodeId Graph::output() const {
  if (output_) return *output_;
  if (nodes_.empty()) Fail(ErrorKind::kState, "graph is empty");
  return NodeId{static_cast<uint32_t>(nodes_.size() - 1)};
}

std::string Graph::Label(NodeId id) const {
  const Node& n = nodes_[id.index];
  std::string label = "#" + std::to_string(id.index) + " " + std::string(OpName(n.op));
  if (!n.name.empty()) label += " '" + n.name + "'";
  return label;
}

const Tensor& Graph::Value(NodeId id) const {
  CheckId(id);
  const Node& n = nodes_[id.index];
  if (n.op == OpKind::kParameter) return *n.param;
  if (n.op == OpKind::kConstant) return n.constant;
  if (!forward_done_) Fail(ErrorKind::kState, "node value read before forward");
  return values_[id.index];
}

std::span<const double> Graph::Gradient(NodeId id) const {
  CheckId(id);
  return grads_[id.index];
}

std::vector<Tensor*> Graph::Parameters() const {
  std::vector<Tensor*> out;
  for (const Node& n : nodes_) {
    if (n.op == OpKind::kParameter &&
        std::find(out.begin(), out.end(), n.param) == out.end()) {
      out.push_back(n.param);
    }
  }
  return out;
}

std::vector<std::string> Graph::ParameterNames() const {
  std::vector<std::string> names;
  std::vector<Tensor*> seen;
  for (size_t i = 0; i < nodes_.size(); ++i) {
    const Node& n = nodes_[i];
    if (n.op == OpKind::kParameter &&
        std::find(seen.begin(), seen.end(), n.param) == seen.end()) {
      seen.push_back(n.param);
      names.push_back(n.name.empty() ? Label(NodeId{static_cast<uint32_t>(i)}) : n.name);
    }
  }
  return names;
}

const Tensor& Graph::Forward(std::span<const Tensor> inputs) {
  if (inputs.size() != inputs_.size()) {
    Fail(ErrorKind::kConfiguration, "graph expects " + std::to_string(inputs_.size()) +
                                        " inputs, got " + std::to_string(inputs.size()));
  }
  for (size_t i = 0; i < inputs.size(); ++i) {
    const Node& n = nodes_[inputs_[i].index];
    if (inputs[i].shape() != n.shape) {
      Fail(ErrorKind::kConfiguration, "input " + std::to_string(i) + " has shape " +
                                          ShapeString(inputs[i].shape()) + ", expected " +
                                          ShapeString(n.shape));
    }
    auto dst = values_[inputs_[i].index].values();
    std::copy(inputs[i].values().begin(), inputs[i].values().end(), dst.begin());
  }
  forward_done_ = false;
  for (size_t i = 0; i < nodes_.size(); ++i) {
    EvaluateNode(i);
    const NodeId id{static_cast<uint32_t>(i)};
    const Node& n = nodes_[i];
    const Tensor& v = n.op == OpKind::kParameter  ? *n.param
                      : n.op == OpKind::kConstant ? n.constant
                                                  : values_[i];
    if (!v.AllFinite()) {
      Fail(ErrorKind::kNumeric, "non-finite value in node " + Label(id));
    }
  }
  forward_done_ = true;
  return Value(output());
}

void Graph::EvaluateNode(size_t i) {
  const Node& n = nodes_[i];
  auto value_of = [&](NodeId p) -> const Tensor& {
    const Node& pn = nodes_[p.index];
    if (pn.op == OpKind::kParameter) return *pn.param;
    if (pn.op == OpKind::kConstant) return pn.constant;
    return values_[p.index];
  };
  switch (n.op) {
    case OpKind::kInput:
    case OpKind::kParameter:
    case OpKind::kConstant:
      return;
    default:
      break;
  }
  Tensor& out = values_[i];
  auto y = out.values();
  const Tensor& a = value_of(n.parents[0]);
  auto av = a.values();
  switch (n.op) {
    case OpKind::kAffine: {
      const Tensor& w = value_of(n.parents[1]);
      const Tensor& b = value_of(n.parents[2]);
      const size_t in = w.shape()[1];
      const size_t outs = w.shape()[0];
      const size_t rows = a.size() / in;
      for (size_t r = 0; r < rows; ++r) {
        const double* x = av.data() + r * in;
        for (size_t o = 0; o < outs; ++o) {
          y[r * outs + o] = Dot(x, w.values().data() + o * in, in) + b[o];
        }
      }
      return;
    }
    case OpKind::kAdd:
    case OpKind::kMultiply: {
      const Tensor& b = value_of(n.parents[1]);
      const size_t na = a.size(), nb = b.size();
      if (n.op == OpKind::kAdd) {
        for (size_t k = 0; k < y.size(); ++k) y[k] = av[k % na] + b[k % nb];
      } else {
        for (size_t k = 0; k < y.size(); ++k) y[k] = av[k % na] * b[k % nb];
      }
      return;
    }
    case OpKind::kSoftplus:
      for (size_t k = 0; k < y.size(); ++k) y[k] = StableSoftplus(av[k]);
      return;
    case OpKind::kSigmoid:
      for (size_t k = 0; k < y.size(); ++k) y[k] = StableSigmoid(av[k]);
      return;
    case OpKind::kTanh:
      for (size_t k = 0; k < y.size(); ++k) y[k] = std::tanh(av[k]);
      return;
    case OpKind::kLog:
      for (size_t k = 0; k < y.size(); ++k) y[k] = std::log(av[k]);
      return;
    case OpKind::kSquare:
      for (size_t k = 0; k < y.size(); ++k) y[k] = av[k] * av[k];
      return;
    case OpKind::kReciprocal:
      for (size_t k = 0; k < y.size(); ++k) y[k] = 1.0 / av[k];
      return;
    case OpKind::kFloor:
      for (size_t k = 0; k < y.size(); ++k) y[k] = std::floor(av[k]);
      return;
    case OpKind::kSum:
    case OpKind::kMean: {
      double s = 0;
      for (double v : av) s += v;
      y[0] = n.op == OpKind::kMean ? s / static_cast<double>(av.size()) : s;
      return;
    }
    case OpKind::kConcat: {
      const Tensor& b = value_of(n.parents[1]);
      const size_t wa = a.shape().back(), wb = b.shape().back();
      const size_t rows = a.size() / wa;
      for (size_t r = 0; r < rows; ++r) {
        std::copy_n(av.data() + r * wa, wa, y.data() + r * (wa + wb));
        std::copy_n(b.values().data() + r * wb, wb, y.data() + r * (wa + wb) + wa);
      }
      return;
    }
    case OpKind::kSlice: {
      const size_t wa = a.shape().back();
      const size_t w = n.slice_end - n.slice_begin;
      const size_t rows = a.size() / wa;
      for (size_t r = 0; r < rows; ++r) {
        std::copy_n(av.data() + r * wa + n.slice_begin, w, y.data() + r * w);
      }
      return;
    }
    default:
      return;
  }
}

void Graph::Backward(const Tensor& output_grad) {
  if (!forward_done_) Fail(ErrorKind::kState, "backward called before forward");
  const NodeId out = output();
  if (output_grad.shape() != ShapeOf(out)) {
    Fail(ErrorKind::kConfiguration, "output gradient shape " +
                                        ShapeString(output_grad.shape()) +
                                        " does not match output " +
                                        ShapeString(ShapeOf(out)));
  }
  for (auto& g : grads_) std::fill(g.begin(), g.end(), 0.0);
  std::copy(output_grad.values().begin(), output_grad.values().end(),
            grads_[out.index].begin());
  for (size_t i = out.index + 1; i-- > 0;) BackwardNode(i);
}

void Graph::BackwardNode(size_t i) {
  const Node& n = nodes_[i];
  const std::vector<double>& g = grads_[i];
  auto value_of = [&](NodeId p) -> const Tensor& {
    const Node& pn = nodes_[p.index];
    if (pn.op == OpKind::kParameter) return *pn.param;
    if (pn.op == OpKind::kConstant) return pn.constant;
    return values_[p.index];
  };
  switch (n.op) {
    case OpKind::kInput:
    case OpKind::kConstant:
      return;
    case OpKind::kParameter: {
      n.param->EnableGrad();
      auto pg = n.param->grad();
      for (size_t k = 0; k < g.size(); ++k) pg[k] += g[k];
      return;
    }
    default:
      break;
  }
  const NodeId pa = n.parents[0];
  const Tensor& a = value_of(pa);
  auto av = a.values();
  std::vector<double>& ga = grads_[pa.index];
  const Tensor& y = values_[i];
  switch (n.op) {
    case OpKind::kAffine: {
      const Tensor& w = value_of(n.parents[1]);
      std::vector<double>& gw = grads_[n.parents[1].index];
      std::vector<double>& gb = grads_[n.parents[2].index];
      const size_t in = w.shape()[1];
      const size_t outs = w.shape()[0];
      const size_t rows = a.size() / in;
      const double* wv = w.values().data();
      for (size_t r = 0; r < rows; ++r) {
        const double* x = av.data() + r * in;
        double* gx = ga.data() + r * in;
        for (size_t o = 0; o < outs; ++o) {
          const double go = g[r * outs + o];
          if (go == 0.0) continue;
          const double* wrow = wv + o * in;
          double* gwrow = gw.data() + o * in;
          for (size_t k = 0; k < in; ++k) {
            gx[k] += go * wrow[k];
            gwrow[k] += go * x[k];
          }
          gb[o] += go;
        }
      }
      return;
    }
    case OpKind::kAdd:
    case OpKind::kMultiply: {
      const NodeId pb = n.parents[1];
      const Tensor& b = value_of(pb);
      std::vector<double>& gbv = grads_[pb.index];
      const size_t na = a.size(), nb = b.size();
      if (n.op == OpKind::kAdd) {
        for (size_t k = 0; k < g.size(); ++k) {
          ga[k % na] += g[k];
          gbv[k % nb] += g[k];
        }
      } else {
        for (size_t k = 0; k < g.size(); ++k) {
          ga[k % na] += g[k] * b[k % nb];
          gbv[k % nb] += g[k] * av[k % na];
        }
      }
      return;
    }
    case OpKind::kSoftplus:
      for (size_t k = 0; k < g.size(); ++k) ga[k] += g[k] * StableSigmoid(av[k]);
      return;
    case OpKind::kSigmoid:
      for (size_t k = 0; k < g.size(); ++k) ga[k] += g[k] * y[k] * (1.0 - y[k]);
      return;
    case OpKind::kTanh:
      for (size_t k = 0; k < g.size(); ++k) ga[k] += g[k] * (1.0 - y[k] * y[k]);
      return;
    case OpKind::kLog:
      for (size_t k = 0; k < g.size(); ++k) ga[k] += g[k] / av[k];
      return;
    case OpKind::kSquare:
      for (size_t k = 0; k < g.size(); ++k) ga[k] += g[k] * 2.0 * av[k];
      return;
    case OpKind::kReciprocal:
      for (size_t k = 0; k < g.size(); ++k) ga[k] -= g[k] * y[k] * y[k];
      return;
    case OpKind::kFloor:
      return;
    case OpKind::kSum:
      for (double& v : ga) v += g[0];
      return;
    case OpKind::kMean: {
      const double s = g[0] / static_cast<double>(ga.size());
      for (double& v : ga) v += s;
      return;
    }
    case OpKind::kConcat: {
      std::vector<double>& gbv = grads_[n.parents[1].index];
      const size_t wa = a.shape().back();
      const size_t wb = value_of(n.parents[1]).shape().back();
      const size_t rows = a.size() / wa;
      for (size_t r = 0; r < rows; ++r) {
        for (size_t k = 0; k < wa; ++k) ga[r * wa + k] += g[r * (wa + wb) + k];
        for (size_t k = 0; k < wb; ++k) gbv[r * wb + k] += g[r * (wa + wb) + wa + k];
      }
      return;
    }
    case OpKind::kSlice: {
      const size_t wa = a.shape().back();
      const size_t w = n.slice_end - n.slice_begin;
      const size_t rows = a.size() / wa;
      for (size_t r = 0; r < rows; ++r) {
        for (size_t k = 0; k < w; ++k) ga[r * wa + n.slice_begin + k] += g[r * w + k];
      }
      return;
    }
    default:
      return;
  }
}

}  // namespace iqdz::grad
