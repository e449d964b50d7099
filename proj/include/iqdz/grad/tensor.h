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

#ifndef IQDZ_GRAD_TENSOR_H_
#define IQDZ_GRAD_TENSOR_H_

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace iqdz::grad {

using Shape = std::vector<size_t>;

size_t NumElements(const Shape& shape);
std::string ShapeString(const Shape& shape);

// Shaped row-major array of doubles with an optional same-shape gradient slot.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(Shape shape, double fill = 0.0);
  Tensor(Shape shape, std::vector<double> values);

  static Tensor Vector(std::vector<double> values);
  static Tensor Scalar(double value);

  const Shape& shape() const { return shape_; }
  size_t size() const { return data_.size(); }
  size_t rank() const { return shape_.size(); }

  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }
  double& operator[](size_t i) { return data_[i]; }
  double operator[](size_t i) const { return data_[i]; }
  // Row-major access for rank-2 tensors.
  double& at(size_t row, size_t col) { return data_[row * shape_.back() + col]; }
  double at(size_t row, size_t col) const { return data_[row * shape_.back() + col]; }

  bool has_grad() const { return has_grad_; }
  // Allocates a zeroed gradient buffer if absent.
  void EnableGrad();
  void ZeroGrad();
  void DropGrad();
  std::span<double> grad() { return grad_; }
  std::span<const double> grad() const { return grad_; }

  bool AllFinite() const;

 private:
  Shape shape_;
  std::vector<double> data_;
  std::vector<double> grad_;
  bool has_grad_ = false;
};

}  // namespace iqdz::grad

#endif  // IQDZ_GRAD_TENSOR_H_
