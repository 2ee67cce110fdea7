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

#include "seqgan/params.hpp"

#include <algorithm>
#include <cmath>

#include "seqgan/errors.hpp"

namespace seqgan {

Tensor& ParamSet::add(std::string name, Tensor value) {
  if (contains(name)) throw InputError("duplicate parameter name '" + name + "'");
  entries_.push_back({std::move(name), std::move(value)});
  return entries_.back().value;
}

std::size_t ParamSet::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (entries_[i].name == name) return i;
  }
  return entries_.size();
}

Tensor& ParamSet::operator[](const std::string& name) {
  const std::size_t i = index_of(name);
  if (i == entries_.size()) throw InputError("no parameter named '" + name + "'");
  return entries_[i].value;
}

const Tensor& ParamSet::operator[](const std::string& name) const {
  const std::size_t i = index_of(name);
  if (i == entries_.size()) throw InputError("no parameter named '" + name + "'");
  return entries_[i].value;
}

bool ParamSet::contains(const std::string& name) const {
  return index_of(name) != entries_.size();
}

ParamSet ParamSet::zeros_like() const {
  ParamSet out;
  for (const auto& e : entries_) out.add(e.name, Tensor::zeros_like(e.value));
  return out;
}

void ParamSet::check_compatible(const ParamSet& other) const {
  if (other.entries_.size() != entries_.size()) {
    throw DimensionError("parameter sets differ in size: " + std::to_string(entries_.size()) +
                         " vs " + std::to_string(other.entries_.size()));
  }
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const auto& a = entries_[i];
    const auto& b = other.entries_[i];
    if (a.name != b.name || a.value.shape() != b.value.shape()) {
      throw DimensionError("parameter mismatch at '" + a.name + "' " + to_string(a.value.shape()) +
                           " vs '" + b.name + "' " + to_string(b.value.shape()));
    }
  }
}

void ParamSet::axpy(double scale, const ParamSet& other) {
  check_compatible(other);
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    entries_[i].value.axpy(scale, other.entries_[i].value);
  }
}

void ParamSet::scale(double factor) {
  for (auto& e : entries_) {
    for (double& v : e.value.data()) v *= factor;
  }
}

double ParamSet::squared_norm() const {
  double s = 0.0;
  for (const auto& e : entries_) s += e.value.squared_norm();
  return s;
}

std::size_t ParamSet::num_values() const {
  std::size_t n = 0;
  for (const auto& e : entries_) n += e.value.size();
  return n;
}

bool ParamSet::all_finite() const {
  return std::all_of(entries_.begin(), entries_.end(),
                     [](const NamedTensor& e) { return e.value.all_finite(); });
}

double max_abs_diff(const ParamSet& a, const ParamSet& b) {
  a.check_compatible(b);
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    m = std::max(m, max_abs_diff(a.entries()[i].value, b.entries()[i].value));
  }
  return m;
}

Tensor uniform_tensor(const Shape& shape, double bound, Rng& rng) {
  Tensor t(shape);
  for (double& v : t.data()) v = rng.uniform(-bound, bound);
  return t;
}

BoundParams::BoundParams(Tape& tape, const ParamSet& params, bool requires_grad)
    : source_(&params) {
  vars_.reserve(params.size());
  for (const auto& e : params.entries()) {
    vars_.push_back(requires_grad ? tape.leaf(e.value) : tape.constant(e.value));
  }
}

Var BoundParams::operator[](const std::string& name) const {
  const auto& entries = source_->entries();
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (entries[i].name == name) return vars_[i];
  }
  throw InputError("no bound parameter named '" + name + "'");
}

ParamSet BoundParams::gradients() const {
  ParamSet out;
  const auto& entries = source_->entries();
  for (std::size_t i = 0; i < entries.size(); ++i) out.add(entries[i].name, vars_[i].grad());
  return out;
}

}  // namespace seqgan
