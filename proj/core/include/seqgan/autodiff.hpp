// Copyright 2026 The seqgan Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "seqgan/tensor.hpp"

namespace seqgan {

class Tape;

/// Handle to a node recorded on a Tape. Cheap to copy; valid while the tape lives.
class Var {
 public:
  Var() = default;

  const Tensor& value() const;
  // Gradient accumulated by the last backward pass (zeros if none reached it).
  Tensor grad() const;
  const Shape& shape() const { return value().shape(); }
  std::size_t id() const noexcept { return id_; }
  Tape* tape() const noexcept { return tape_; }
  bool valid() const noexcept { return tape_ != nullptr; }

 private:
  friend class Tape;
  Var(Tape* tape, std::size_t id) : tape_(tape), id_(id) {}

  Tape* tape_ = nullptr;
  std::size_t id_ = 0;
};

/// Reverse-mode tape. Nodes are appended in evaluation order, so parents
/// always precede children and a single reverse sweep visits each node once.
class Tape {
 public:
  using Backward = std::function<void(Tape&, std::size_t node)>;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var leaf(Tensor value);
  Var constant(Tensor value);
  // Appends an op node. `backward` reads grad(node) and accumulates into parents.
  Var record(Tensor value, std::vector<std::size_t> parents, Backward backward);

  // Seeds d(root)/d(root) = 1 and propagates to every node. The root must be
  // a single-element tensor. A second call requires zero_grad() first.
  void backward(Var root);
  void zero_grad();

  std::size_t size() const noexcept { return nodes_.size(); }
  const Tensor& value(std::size_t node) const { return nodes_[node].value; }
  bool requires_grad(std::size_t node) const { return nodes_[node].requires_grad; }
  bool has_grad(std::size_t node) const { return !nodes_[node].grad.empty(); }
  const Tensor& grad(std::size_t node) const { return nodes_[node].grad; }
  // Zero-initialized on first access.
  Tensor& grad_buffer(std::size_t node);

 private:
  struct Node {
    Tensor value;
    Tensor grad;
    std::vector<std::size_t> parents;
    Backward backward;
    bool requires_grad = false;
  };

  std::vector<Node> nodes_;
  bool backward_done_ = false;
};

// ---- Linear algebra ------------------------------------------------------

Var matmul(Var a, Var b);
Var transpose(Var x);

// ---- Elementwise ---------------------------------------------------------
// Binary ops need equal shapes; either operand may also be a single element,
// which broadcasts.

Var add(Var a, Var b);
Var sub(Var a, Var b);
Var mul(Var a, Var b);
Var scale(Var x, double factor);
Var tanh(Var x);
Var sigmoid(Var x);
// Throws DomainError if any entry is <= 0.
Var log(Var x);
Var exp(Var x);
// Identity gradient inside [lo, hi], zero outside.
Var clamp(Var x, double lo, double hi);

// x (R x N) + row (1 x N) broadcast over rows.
Var add_row(Var x, Var row);

// ---- Normalization -------------------------------------------------------

// softmax(x / temperature) over the last axis, with max subtraction.
Var softmax(Var x, double temperature = 1.0);
Var log_softmax(Var x, double temperature = 1.0);

// ---- Reductions ----------------------------------------------------------

Var sum(Var x);
Var sum(Var x, std::size_t axis, bool keepdims = false);
Var mean(Var x, std::size_t axis, bool keepdims = false);
// Max along an axis; the gradient goes to the first maximal entry.
Var max_pool(Var x, std::size_t axis, bool keepdims = false);

// ---- Structure -----------------------------------------------------------

Var concat_cols(Var a, Var b);
Var concat_rows(const std::vector<Var>& parts);
Var slice_cols(Var x, std::size_t begin, std::size_t end);
Var row(Var x, std::size_t index);
Var gather_rows(Var table, const std::vector<std::size_t>& indices);
// Single entry at a flat index, as a one-element tensor.
Var pick(Var x, std::size_t flat_index);

// Forward value is `hard`; backward passes the incoming gradient to `soft`
// unchanged (straight-through estimator).
Var straight_through(Var soft, const Tensor& hard);

}  // namespace seqgan
