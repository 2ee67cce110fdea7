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

#include "seqgan/autodiff.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "seqgan/errors.hpp"

namespace seqgan {

namespace {

Tape& tape_of(Var v) {
  if (!v.valid()) throw ContractError("operation on an unbound Var");
  return *v.tape();
}

Tape& common_tape(Var a, Var b) {
  Tape& t = tape_of(a);
  if (&tape_of(b) != &t) throw ContractError("operands recorded on different tapes");
  return t;
}

void require_rank2(const Tensor& t, const char* op) {
  if (t.rank() != 2) {
    throw DimensionError(std::string(op) + " expects a rank-2 tensor, got " +
                         to_string(t.shape()));
  }
}

template <typename F, typename DF>
Var unary(Var x, F f, DF df) {
  Tape& t = tape_of(x);
  const Tensor& in = x.value();
  Tensor out(in.shape());
  for (std::size_t i = 0; i < in.size(); ++i) out[i] = f(in[i]);
  const std::size_t xi = x.id();
  return t.record(std::move(out), {xi}, [xi, df](Tape& tape, std::size_t self) {
    if (!tape.requires_grad(xi)) return;
    const Tensor& g = tape.grad(self);
    const Tensor& in = tape.value(xi);
    const Tensor& out = tape.value(self);
    Tensor& gx = tape.grad_buffer(xi);
    for (std::size_t i = 0; i < g.size(); ++i) gx[i] += g[i] * df(in[i], out[i]);
  });
}

enum class BinaryKind { kAdd, kSub, kMul };

Var binary(Var a, Var b, BinaryKind kind) {
  Tape& t = common_tape(a, b);
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  const bool same = av.shape() == bv.shape();
  const bool a_scalar = !same && av.size() == 1;
  const bool b_scalar = !same && !a_scalar && bv.size() == 1;
  if (!same && !a_scalar && !b_scalar) {
    throw DimensionError("elementwise shape mismatch " + to_string(av.shape()) + " vs " +
                         to_string(bv.shape()));
  }
  const Shape& shape = a_scalar ? bv.shape() : av.shape();
  Tensor out(shape);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double x = a_scalar ? av[0] : av[i];
    const double y = b_scalar ? bv[0] : bv[i];
    switch (kind) {
      case BinaryKind::kAdd: out[i] = x + y; break;
      case BinaryKind::kSub: out[i] = x - y; break;
      case BinaryKind::kMul: out[i] = x * y; break;
    }
  }
  const std::size_t ai = a.id();
  const std::size_t bi = b.id();
  return t.record(std::move(out), {ai, bi},
                  [ai, bi, a_scalar, b_scalar, kind](Tape& tape, std::size_t self) {
    const Tensor& g = tape.grad(self);
    const Tensor& av = tape.value(ai);
    const Tensor& bv = tape.value(bi);
    if (tape.requires_grad(ai)) {
      Tensor& ga = tape.grad_buffer(ai);
      for (std::size_t i = 0; i < g.size(); ++i) {
        double d = g[i];
        if (kind == BinaryKind::kMul) d *= b_scalar ? bv[0] : bv[i];
        ga[a_scalar ? 0 : i] += d;
      }
    }
    if (tape.requires_grad(bi)) {
      Tensor& gb = tape.grad_buffer(bi);
      for (std::size_t i = 0; i < g.size(); ++i) {
        double d = g[i];
        if (kind == BinaryKind::kSub) d = -d;
        if (kind == BinaryKind::kMul) d *= a_scalar ? av[0] : av[i];
        gb[b_scalar ? 0 : i] += d;
      }
    }
  });
}

// Splits a shape around `axis` into (outer, extent, inner) for strided loops.
struct AxisSplit {
  std::size_t outer = 1;
  std::size_t extent = 1;
  std::size_t inner = 1;
  Shape reduced;
};

AxisSplit split_axis(const Shape& shape, std::size_t axis, bool keepdims) {
  if (axis >= shape.size()) {
    throw DimensionError("axis " + std::to_string(axis) + " invalid for shape " +
                         to_string(shape));
  }
  AxisSplit s;
  for (std::size_t i = 0; i < axis; ++i) s.outer *= shape[i];
  s.extent = shape[axis];
  for (std::size_t i = axis + 1; i < shape.size(); ++i) s.inner *= shape[i];
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i != axis) {
      s.reduced.push_back(shape[i]);
    } else if (keepdims) {
      s.reduced.push_back(1);
    }
  }
  if (s.reduced.empty()) s.reduced.push_back(1);
  return s;
}

}  // namespace

// ---- Var / Tape ------------------------------------------------------------

const Tensor& Var::value() const {
  if (!tape_) throw ContractError("value() on an unbound Var");
  return tape_->value(id_);
}

Tensor Var::grad() const {
  if (!tape_) throw ContractError("grad() on an unbound Var");
  if (tape_->has_grad(id_)) return tape_->grad(id_);
  return Tensor::zeros_like(tape_->value(id_));
}

Var Tape::leaf(Tensor value) {
  nodes_.push_back(Node{std::move(value), {}, {}, {}, true});
  return Var(this, nodes_.size() - 1);
}

Var Tape::constant(Tensor value) {
  nodes_.push_back(Node{std::move(value), {}, {}, {}, false});
  return Var(this, nodes_.size() - 1);
}

Var Tape::record(Tensor value, std::vector<std::size_t> parents, Backward backward) {
  bool needs = false;
  for (std::size_t p : parents) needs = needs || nodes_[p].requires_grad;
  nodes_.push_back(Node{std::move(value), {}, std::move(parents),
                        needs ? std::move(backward) : Backward{}, needs});
  return Var(this, nodes_.size() - 1);
}

Tensor& Tape::grad_buffer(std::size_t node) {
  Node& n = nodes_[node];
  if (n.grad.empty()) n.grad = Tensor::zeros_like(n.value);
  return n.grad;
}

void Tape::backward(Var root) {
  if (root.tape() != this) throw ContractError("backward root belongs to another tape");
  if (backward_done_) {
    throw ContractError("backward already ran on this tape; call zero_grad() first");
  }
  if (nodes_[root.id()].value.size() != 1) {
    throw ContractError("backward root must be scalar, got shape " +
                        to_string(nodes_[root.id()].value.shape()));
  }
  backward_done_ = true;
  grad_buffer(root.id())[0] = 1.0;
  for (std::size_t i = root.id() + 1; i-- > 0;) {
    Node& n = nodes_[i];
    if (n.backward && !n.grad.empty()) n.backward(*this, i);
  }
}

void Tape::zero_grad() {
  for (Node& n : nodes_) n.grad = Tensor();
  backward_done_ = false;
}

// ---- Linear algebra --------------------------------------------------------

Var matmul(Var a, Var b) {
  Tape& t = common_tape(a, b);
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  require_rank2(av, "matmul");
  require_rank2(bv, "matmul");
  const std::size_t m = av.rows(), k = av.cols(), n = bv.cols();
  if (bv.rows() != k) {
    throw DimensionError("matmul inner dimensions disagree: " + to_string(av.shape()) + " * " +
                         to_string(bv.shape()));
  }
  Tensor out({m, n});
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t p = 0; p < k; ++p) {
      const double aip = av[i * k + p];
      if (aip == 0.0) continue;
      for (std::size_t j = 0; j < n; ++j) out[i * n + j] += aip * bv[p * n + j];
    }
  }
  const std::size_t ai = a.id(), bi = b.id();
  return t.record(std::move(out), {ai, bi}, [ai, bi, m, k, n](Tape& tape, std::size_t self) {
    const Tensor& g = tape.grad(self);
    const Tensor& av = tape.value(ai);
    const Tensor& bv = tape.value(bi);
    if (tape.requires_grad(ai)) {
      Tensor& ga = tape.grad_buffer(ai);
      for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t p = 0; p < k; ++p) {
          double s = 0.0;
          for (std::size_t j = 0; j < n; ++j) s += g[i * n + j] * bv[p * n + j];
          ga[i * k + p] += s;
        }
      }
    }
    if (tape.requires_grad(bi)) {
      Tensor& gb = tape.grad_buffer(bi);
      for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t p = 0; p < k; ++p) {
          const double aip = av[i * k + p];
          if (aip == 0.0) continue;
          for (std::size_t j = 0; j < n; ++j) gb[p * n + j] += aip * g[i * n + j];
        }
      }
    }
  });
}

Var transpose(Var x) {
  Tape& t = tape_of(x);
  const Tensor& xv = x.value();
  const std::size_t r = xv.rows(), c = xv.cols();
  Tensor out({c, r});
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) out[j * r + i] = xv[i * c + j];
  const std::size_t xi = x.id();
  return t.record(std::move(out), {xi}, [xi, r, c](Tape& tape, std::size_t self) {
    const Tensor& g = tape.grad(self);
    Tensor& gx = tape.grad_buffer(xi);
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < c; ++j) gx[i * c + j] += g[j * r + i];
  });
}

// ---- Elementwise -----------------------------------------------------------

Var add(Var a, Var b) { return binary(a, b, BinaryKind::kAdd); }
Var sub(Var a, Var b) { return binary(a, b, BinaryKind::kSub); }
Var mul(Var a, Var b) { return binary(a, b, BinaryKind::kMul); }

Var scale(Var x, double factor) {
  return unary(
      x, [factor](double v) { return factor * v; },
      [factor](double, double) { return factor; });
}

Var tanh(Var x) {
  return unary(
      x, [](double v) { return std::tanh(v); },
      [](double, double y) { return 1.0 - y * y; });
}

Var sigmoid(Var x) {
  return unary(
      x,
      [](double v) {
        if (v >= 0) return 1.0 / (1.0 + std::exp(-v));
        const double e = std::exp(v);
        return e / (1.0 + e);
      },
      [](double, double y) { return y * (1.0 - y); });
}

Var log(Var x) {
  for (double v : x.value().data()) {
    if (!(v > 0.0)) throw DomainError("log of non-positive value " + std::to_string(v));
  }
  return unary(
      x, [](double v) { return std::log(v); }, [](double v, double) { return 1.0 / v; });
}

Var exp(Var x) {
  return unary(
      x, [](double v) { return std::exp(v); }, [](double, double y) { return y; });
}

Var clamp(Var x, double lo, double hi) {
  if (!(lo <= hi)) throw ParameterError("clamp requires lo <= hi");
  return unary(
      x, [lo, hi](double v) { return v < lo ? lo : (v > hi ? hi : v); },
      [lo, hi](double v, double) { return (v < lo || v > hi) ? 0.0 : 1.0; });
}

Var add_row(Var x, Var r) {
  Tape& t = common_tape(x, r);
  const Tensor& xv = x.value();
  const Tensor& rv = r.value();
  require_rank2(xv, "add_row");
  const std::size_t rows = xv.rows(), cols = xv.cols();
  if (rv.size() != cols) {
    throw DimensionError("add_row: row of shape " + to_string(rv.shape()) +
                         " does not match " + to_string(xv.shape()));
  }
  Tensor out = xv;
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) out[i * cols + j] += rv[j];
  const std::size_t xi = x.id(), ri = r.id();
  return t.record(std::move(out), {xi, ri}, [xi, ri, rows, cols](Tape& tape, std::size_t self) {
    const Tensor& g = tape.grad(self);
    if (tape.requires_grad(xi)) tape.grad_buffer(xi).axpy(1.0, g);
    if (tape.requires_grad(ri)) {
      Tensor& gr = tape.grad_buffer(ri);
      for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) gr[j] += g[i * cols + j];
    }
  });
}

// ---- Normalization ---------------------------------------------------------

Var softmax(Var x, double temperature) {
  if (!(temperature > 0.0)) throw ParameterError("softmax temperature must be positive");
  Tape& t = tape_of(x);
  const Tensor& xv = x.value();
  if (xv.rank() == 0 || xv.empty()) throw DimensionError("softmax of empty tensor");
  const std::size_t k = xv.shape().back();
  const std::size_t groups = xv.size() / k;
  Tensor out(xv.shape());
  for (std::size_t gi = 0; gi < groups; ++gi) {
    const double* in = xv.data().data() + gi * k;
    double* o = &out[gi * k];
    double mx = in[0];
    for (std::size_t j = 1; j < k; ++j) mx = std::max(mx, in[j]);
    double z = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      o[j] = std::exp((in[j] - mx) / temperature);
      z += o[j];
    }
    for (std::size_t j = 0; j < k; ++j) o[j] /= z;
  }
  const std::size_t xi = x.id();
  return t.record(std::move(out), {xi},
                  [xi, k, groups, temperature](Tape& tape, std::size_t self) {
    const Tensor& g = tape.grad(self);
    const Tensor& y = tape.value(self);
    Tensor& gx = tape.grad_buffer(xi);
    for (std::size_t gi = 0; gi < groups; ++gi) {
      double dot = 0.0;
      for (std::size_t j = 0; j < k; ++j) dot += g[gi * k + j] * y[gi * k + j];
      for (std::size_t j = 0; j < k; ++j) {
        gx[gi * k + j] += y[gi * k + j] * (g[gi * k + j] - dot) / temperature;
      }
    }
  });
}

Var log_softmax(Var x, double temperature) {
  if (!(temperature > 0.0)) throw ParameterError("softmax temperature must be positive");
  Tape& t = tape_of(x);
  const Tensor& xv = x.value();
  if (xv.rank() == 0 || xv.empty()) throw DimensionError("log_softmax of empty tensor");
  const std::size_t k = xv.shape().back();
  const std::size_t groups = xv.size() / k;
  Tensor out(xv.shape());
  for (std::size_t gi = 0; gi < groups; ++gi) {
    const double* in = xv.data().data() + gi * k;
    double* o = &out[gi * k];
    double mx = in[0];
    for (std::size_t j = 1; j < k; ++j) mx = std::max(mx, in[j]);
    double z = 0.0;
    for (std::size_t j = 0; j < k; ++j) z += std::exp((in[j] - mx) / temperature);
    const double lz = std::log(z);
    for (std::size_t j = 0; j < k; ++j) o[j] = (in[j] - mx) / temperature - lz;
  }
  const std::size_t xi = x.id();
  return t.record(std::move(out), {xi},
                  [xi, k, groups, temperature](Tape& tape, std::size_t self) {
    const Tensor& g = tape.grad(self);
    const Tensor& y = tape.value(self);
    Tensor& gx = tape.grad_buffer(xi);
    for (std::size_t gi = 0; gi < groups; ++gi) {
      double total = 0.0;
      for (std::size_t j = 0; j < k; ++j) total += g[gi * k + j];
      for (std::size_t j = 0; j < k; ++j) {
        gx[gi * k + j] += (g[gi * k + j] - std::exp(y[gi * k + j]) * total) / temperature;
      }
    }
  });
}

// ---- Reductions ------------------------------------------------------------

Var sum(Var x) {
  Tape& t = tape_of(x);
  double s = 0.0;
  for (double v : x.value().data()) s += v;
  const std::size_t xi = x.id();
  return t.record(Tensor::scalar(s), {xi}, [xi](Tape& tape, std::size_t self) {
    const double g = tape.grad(self)[0];
    Tensor& gx = tape.grad_buffer(xi);
    for (std::size_t i = 0; i < gx.size(); ++i) gx[i] += g;
  });
}

namespace {

Var sum_or_mean(Var x, std::size_t axis, bool keepdims, bool average) {
  Tape& t = tape_of(x);
  const Tensor& xv = x.value();
  const AxisSplit s = split_axis(xv.shape(), axis, keepdims);
  const double factor = average ? 1.0 / static_cast<double>(s.extent) : 1.0;
  Tensor out(s.reduced);
  for (std::size_t o = 0; o < s.outer; ++o)
    for (std::size_t e = 0; e < s.extent; ++e)
      for (std::size_t i = 0; i < s.inner; ++i)
        out[o * s.inner + i] += xv[(o * s.extent + e) * s.inner + i];
  if (average) {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] *= factor;
  }
  const std::size_t xi = x.id();
  return t.record(std::move(out), {xi}, [xi, s, factor](Tape& tape, std::size_t self) {
    const Tensor& g = tape.grad(self);
    Tensor& gx = tape.grad_buffer(xi);
    for (std::size_t o = 0; o < s.outer; ++o)
      for (std::size_t e = 0; e < s.extent; ++e)
        for (std::size_t i = 0; i < s.inner; ++i)
          gx[(o * s.extent + e) * s.inner + i] += factor * g[o * s.inner + i];
  });
}

}  // namespace

Var sum(Var x, std::size_t axis, bool keepdims) { return sum_or_mean(x, axis, keepdims, false); }

Var mean(Var x, std::size_t axis, bool keepdims) { return sum_or_mean(x, axis, keepdims, true); }

Var max_pool(Var x, std::size_t axis, bool keepdims) {
  Tape& t = tape_of(x);
  const Tensor& xv = x.value();
  const AxisSplit s = split_axis(xv.shape(), axis, keepdims);
  Tensor out(s.reduced);
  std::vector<std::size_t> winners(s.outer * s.inner);
  for (std::size_t o = 0; o < s.outer; ++o) {
    for (std::size_t i = 0; i < s.inner; ++i) {
      std::size_t best = (o * s.extent) * s.inner + i;
      for (std::size_t e = 1; e < s.extent; ++e) {
        const std::size_t idx = (o * s.extent + e) * s.inner + i;
        if (xv[idx] > xv[best]) best = idx;
      }
      winners[o * s.inner + i] = best;
      out[o * s.inner + i] = xv[best];
    }
  }
  const std::size_t xi = x.id();
  return t.record(std::move(out), {xi},
                  [xi, winners = std::move(winners)](Tape& tape, std::size_t self) {
    const Tensor& g = tape.grad(self);
    Tensor& gx = tape.grad_buffer(xi);
    for (std::size_t j = 0; j < winners.size(); ++j) gx[winners[j]] += g[j];
  });
}

// ---- Structure -------------------------------------------------------------

Var concat_cols(Var a, Var b) {
  Tape& t = common_tape(a, b);
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  if (av.rows() != bv.rows()) {
    throw DimensionError("concat_cols row mismatch " + to_string(av.shape()) + " vs " +
                         to_string(bv.shape()));
  }
  const std::size_t rows = av.rows(), ca = av.cols(), cb = bv.cols();
  Tensor out({rows, ca + cb});
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < ca; ++j) out[i * (ca + cb) + j] = av[i * ca + j];
    for (std::size_t j = 0; j < cb; ++j) out[i * (ca + cb) + ca + j] = bv[i * cb + j];
  }
  const std::size_t ai = a.id(), bi = b.id();
  return t.record(std::move(out), {ai, bi}, [ai, bi, rows, ca, cb](Tape& tape, std::size_t self) {
    const Tensor& g = tape.grad(self);
    if (tape.requires_grad(ai)) {
      Tensor& ga = tape.grad_buffer(ai);
      for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < ca; ++j) ga[i * ca + j] += g[i * (ca + cb) + j];
    }
    if (tape.requires_grad(bi)) {
      Tensor& gb = tape.grad_buffer(bi);
      for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cb; ++j) gb[i * cb + j] += g[i * (ca + cb) + ca + j];
    }
  });
}

Var concat_rows(const std::vector<Var>& parts) {
  if (parts.empty()) throw DimensionError("concat_rows of no tensors");
  Tape& t = tape_of(parts.front());
  const std::size_t cols = parts.front().value().cols();
  std::size_t rows = 0;
  std::vector<std::size_t> ids;
  for (const Var& p : parts) {
    if (&tape_of(p) != &t) throw ContractError("operands recorded on different tapes");
    if (p.value().cols() != cols) {
      throw DimensionError("concat_rows column mismatch: " + to_string(p.value().shape()));
    }
    rows += p.value().rows();
    ids.push_back(p.id());
  }
  std::vector<double> data;
  data.reserve(rows * cols);
  for (const Var& p : parts) {
    const auto d = p.value().data();
    data.insert(data.end(), d.begin(), d.end());
  }
  return t.record(Tensor({rows, cols}, std::move(data)), ids, [ids](Tape& tape, std::size_t self) {
    const Tensor& g = tape.grad(self);
    std::size_t offset = 0;
    for (std::size_t id : ids) {
      const std::size_t n = tape.value(id).size();
      if (tape.requires_grad(id)) {
        Tensor& gp = tape.grad_buffer(id);
        for (std::size_t i = 0; i < n; ++i) gp[i] += g[offset + i];
      }
      offset += n;
    }
  });
}

Var slice_cols(Var x, std::size_t begin, std::size_t end) {
  Tape& t = tape_of(x);
  const Tensor& xv = x.value();
  const std::size_t rows = xv.rows(), cols = xv.cols();
  if (begin > end || end > cols) {
    throw DimensionError("slice_cols [" + std::to_string(begin) + ", " + std::to_string(end) +
                         ") out of range for " + to_string(xv.shape()));
  }
  const std::size_t w = end - begin;
  Tensor out({rows, w});
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < w; ++j) out[i * w + j] = xv[i * cols + begin + j];
  const std::size_t xi = x.id();
  return t.record(std::move(out), {xi}, [xi, rows, cols, begin, w](Tape& tape, std::size_t self) {
    const Tensor& g = tape.grad(self);
    Tensor& gx = tape.grad_buffer(xi);
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t j = 0; j < w; ++j) gx[i * cols + begin + j] += g[i * w + j];
  });
}

Var row(Var x, std::size_t index) { return gather_rows(x, {index}); }

Var gather_rows(Var table, const std::vector<std::size_t>& indices) {
  Tape& t = tape_of(table);
  const Tensor& tv = table.value();
  require_rank2(tv, "gather_rows");
  const std::size_t rows = tv.rows(), cols = tv.cols();
  Tensor out({indices.size(), cols});
  for (std::size_t r = 0; r < indices.size(); ++r) {
    if (indices[r] >= rows) {
      throw DimensionError("row index " + std::to_string(indices[r]) + " out of range for " +
                           to_string(tv.shape()));
    }
    for (std::size_t j = 0; j < cols; ++j) out[r * cols + j] = tv[indices[r] * cols + j];
  }
  const std::size_t ti = table.id();
  return t.record(std::move(out), {ti}, [ti, indices, cols](Tape& tape, std::size_t self) {
    const Tensor& g = tape.grad(self);
    Tensor& gt = tape.grad_buffer(ti);
    for (std::size_t r = 0; r < indices.size(); ++r)
      for (std::size_t j = 0; j < cols; ++j) gt[indices[r] * cols + j] += g[r * cols + j];
  });
}

Var pick(Var x, std::size_t flat_index) {
  Tape& t = tape_of(x);
  const Tensor& xv = x.value();
  if (flat_index >= xv.size()) {
    throw DimensionError("pick index " + std::to_string(flat_index) + " out of range for " +
                         to_string(xv.shape()));
  }
  const std::size_t xi = x.id();
  return t.record(Tensor::scalar(xv[flat_index]), {xi},
                  [xi, flat_index](Tape& tape, std::size_t self) {
    tape.grad_buffer(xi)[flat_index] += tape.grad(self)[0];
  });
}

Var straight_through(Var soft, const Tensor& hard) {
  Tape& t = tape_of(soft);
  if (hard.shape() != soft.value().shape()) {
    throw DimensionError("straight_through shape mismatch " + to_string(soft.value().shape()) +
                         " vs " + to_string(hard.shape()));
  }
  const std::size_t si = soft.id();
  return t.record(hard, {si}, [si](Tape& tape, std::size_t self) {
    tape.grad_buffer(si).axpy(1.0, tape.grad(self));
  });
}

}  // namespace seqgan
