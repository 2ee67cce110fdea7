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
#include <string>
#include <vector>

#include "seqgan/autodiff.hpp"
#include "seqgan/rng.hpp"
#include "seqgan/tensor.hpp"

namespace seqgan {

struct NamedTensor {
  std::string name;
  Tensor value;

  friend bool operator==(const NamedTensor&, const NamedTensor&) = default;
};

/// Ordered collection of named tensors: model weights, gradients, or
/// optimizer moments. Order is insertion order and is part of the identity
/// (serialization and gradient reduction both walk it).
class ParamSet {
 public:
  ParamSet() = default;

  Tensor& add(std::string name, Tensor value);
  Tensor& operator[](const std::string& name);
  const Tensor& operator[](const std::string& name) const;
  bool contains(const std::string& name) const;

  std::size_t size() const noexcept { return entries_.size(); }
  std::vector<NamedTensor>& entries() noexcept { return entries_; }
  const std::vector<NamedTensor>& entries() const noexcept { return entries_; }

  // Same names and shapes, all zeros.
  ParamSet zeros_like() const;
  // Throws DimensionError unless names and shapes match entry by entry.
  void check_compatible(const ParamSet& other) const;
  void axpy(double scale, const ParamSet& other);
  void scale(double factor);
  double squared_norm() const;
  std::size_t num_values() const;
  bool all_finite() const;

  friend bool operator==(const ParamSet&, const ParamSet&) = default;

 private:
  std::size_t index_of(const std::string& name) const;

  std::vector<NamedTensor> entries_;
};

double max_abs_diff(const ParamSet& a, const ParamSet& b);

// Fills a tensor of `shape` with U(-bound, bound) draws.
Tensor uniform_tensor(const Shape& shape, double bound, Rng& rng);

/// Params placed on a tape as leaves (or constants when frozen).
class BoundParams {
 public:
  BoundParams(Tape& tape, const ParamSet& params, bool requires_grad);

  Var operator[](const std::string& name) const;
  const std::vector<Var>& vars() const noexcept { return vars_; }
  // Gradients after tape.backward(), laid out like the source ParamSet.
  ParamSet gradients() const;

 private:
  const ParamSet* source_;
  std::vector<Var> vars_;
};

}  // namespace seqgan
