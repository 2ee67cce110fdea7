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

#include "gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace seqgan::testing {

double relative_error(const std::vector<double>& analytic, const std::vector<double>& numeric) {
  double diff = 0.0, na = 0.0, nn = 0.0;
  for (std::size_t i = 0; i < analytic.size(); ++i) {
    diff += (analytic[i] - numeric[i]) * (analytic[i] - numeric[i]);
    na += analytic[i] * analytic[i];
    nn += numeric[i] * numeric[i];
  }
  const double denom = std::sqrt(na) + std::sqrt(nn);
  if (denom == 0.0) return 0.0;
  return std::sqrt(diff) / std::max(denom, std::numeric_limits<double>::min());
}

namespace {

std::vector<double> flatten(const ParamSet& p) {
  std::vector<double> out;
  for (const auto& e : p.entries()) out.insert(out.end(), e.value.values().begin(), e.value.values().end());
  return out;
}

}  // namespace

double relative_error(const ParamSet& analytic, const ParamSet& numeric) {
  analytic.check_compatible(numeric);
  return relative_error(flatten(analytic), flatten(numeric));
}

GradCheck check_graph(const GraphFn& f, const std::vector<Tensor>& inputs, double h) {
  GradCheck out;
  {
    Tape tape;
    std::vector<Var> leaves;
    for (const Tensor& t : inputs) leaves.push_back(tape.leaf(t));
    tape.backward(f(tape, leaves));
    for (const Var& v : leaves) {
      const Tensor g = v.grad();
      out.analytic.insert(out.analytic.end(), g.values().begin(), g.values().end());
    }
  }
  auto eval = [&](const std::vector<Tensor>& xs) {
    Tape tape;
    std::vector<Var> leaves;
    for (const Tensor& t : xs) leaves.push_back(tape.leaf(t));
    return f(tape, leaves).value().item();
  };
  std::vector<Tensor> xs = inputs;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    for (std::size_t i = 0; i < xs[k].size(); ++i) {
      const double x0 = xs[k][i];
      xs[k][i] = x0 + h;
      const double up = eval(xs);
      xs[k][i] = x0 - h;
      const double down = eval(xs);
      xs[k][i] = x0;
      out.numeric.push_back((up - down) / (2.0 * h));
    }
  }
  out.relative_error = relative_error(out.analytic, out.numeric);
  return out;
}

ParamSet numeric_gradient(ParamSet& params, const std::function<double()>& f, double h) {
  ParamSet grad = params.zeros_like();
  for (std::size_t k = 0; k < params.size(); ++k) {
    Tensor& value = params.entries()[k].value;
    Tensor& g = grad.entries()[k].value;
    for (std::size_t i = 0; i < value.size(); ++i) {
      const double x0 = value[i];
      value[i] = x0 + h;
      const double up = f();
      value[i] = x0 - h;
      const double down = f();
      value[i] = x0;
      g[i] = (up - down) / (2.0 * h);
    }
  }
  return grad;
}

Tensor random_tensor(const Shape& shape, Rng& rng, double lo, double hi) {
  Tensor t(shape);
  for (double& v : t.data()) v = rng.uniform(lo, hi);
  return t;
}

}  // namespace seqgan::testing
