// Copyright 2026 The HPQS Authors.
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

#include "hpqs/tensor.hpp"

#include "hpqs/error.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <sstream>

namespace hpqs {

namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapRow = Eigen::Map<RowMat>;
using ConstMapRow = Eigen::Map<const RowMat>;

std::uint64_t next_tensor_id() {
  static std::atomic<std::uint64_t> counter{1};
  return counter.fetch_add(1, std::memory_order_relaxed);
}

[[noreturn]] void shape_fail(const char* op, const std::string& what) {
  throw ShapeError(std::string(op) + ": " + what);
}

ConstMapRow as_matrix(const Tensor& t) {
  return ConstMapRow(t.data().data(), static_cast<Eigen::Index>(t.dim(0)),
                     static_cast<Eigen::Index>(t.dim(1)));
}

// Rows x last-axis view used by softmax and broadcasting ops.
std::pair<std::size_t, std::size_t> rows_cols(const Tensor& t) {
  const std::size_t cols = t.rank() == 0 ? 1 : t.shape().back();
  return {cols == 0 ? 0 : t.numel() / cols, cols};
}

Tensor make_output(Shape shape) { return Tensor::zeros(std::move(shape)); }

enum class Broadcast { Same, Row };

Broadcast check_binary(const char* op, const Tensor& a, const Tensor& b) {
  if (a.shape() == b.shape()) return Broadcast::Same;
  if (b.rank() == 1 && a.rank() >= 1 && a.shape().back() == b.dim(0))
    return Broadcast::Row;
  shape_fail(op, "incompatible extents " + shape_string(a.shape()) + " and " +
                     shape_string(b.shape()));
}

}  // namespace

std::size_t shape_numel(const Shape& shape) {
  std::size_t n = 1;
  for (auto e : shape) n *= e;
  return n;
}

std::string shape_string(const Shape& shape) {
  std::ostringstream out;
  out << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) out << (i ? "x" : "") << shape[i];
  out << ']';
  return out.str();
}

void require_finite(const char* op, const Tensor& t) {
  if (!t.data().allFinite())
    throw NumericError(std::string(op) + ": non-finite output of shape " +
                       shape_string(t.shape()));
}

// ---------------------------------------------------------------- Tensor

Tensor Tensor::zeros(Shape shape, bool requires_grad) {
  return full(std::move(shape), 0.0, requires_grad);
}

Tensor Tensor::full(Shape shape, double value, bool requires_grad) {
  for (auto e : shape)
    if (e == 0) throw ShapeError("tensor: zero extent in " + shape_string(shape));
  auto s = std::make_shared<detail::TensorStorage>();
  s->data = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(shape_numel(shape)), value);
  s->shape = std::move(shape);
  s->requires_grad = requires_grad;
  s->id = next_tensor_id();
  return Tensor(std::move(s));
}

Tensor Tensor::from(Shape shape, Eigen::VectorXd values, bool requires_grad) {
  if (shape_numel(shape) != static_cast<std::size_t>(values.size()))
    throw ShapeError("tensor: " + std::to_string(values.size()) +
                     " values do not fill shape " + shape_string(shape));
  Tensor t = zeros(std::move(shape), requires_grad);
  t.data() = std::move(values);
  return t;
}

Tensor Tensor::from(Shape shape, std::span<const double> values, bool requires_grad) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(values.size()));
  std::copy(values.begin(), values.end(), v.data());
  return from(std::move(shape), std::move(v), requires_grad);
}

Tensor Tensor::scalar(double value, bool requires_grad) {
  return full(Shape{}, value, requires_grad);
}

double Tensor::item() const {
  if (numel() != 1)
    throw ShapeError("item: tensor of shape " + shape_string(shape()) + " is not scalar");
  return storage_->data[0];
}

Eigen::VectorXd& Tensor::grad() const {
  if (storage_->grad.size() == 0) storage_->grad = Eigen::VectorXd::Zero(storage_->data.size());
  return storage_->grad;
}

void Tensor::zero_grad() const {
  if (has_grad()) storage_->grad.setZero();
}

Tensor Tensor::clone() const {
  return from(shape(), data(), requires_grad());
}

// ------------------------------------------------------------------ Tape

bool Tape::record(std::string op, std::vector<Tensor> inputs, Tensor& output,
                  std::function<void()> rule) {
  const bool any = std::any_of(inputs.begin(), inputs.end(),
                               [](const Tensor& t) { return t.requires_grad(); });
  output.set_requires_grad(any);
  if (!any) return false;
  entries_.push_back(Entry{std::move(op), std::move(inputs), output, std::move(rule)});
  return true;
}

void Tape::backward(const Tensor& loss) {
  if (loss.numel() != 1)
    throw ShapeError("backward: loss must be scalar, got " + shape_string(loss.shape()));
  if (!loss.requires_grad()) return;
  // Intermediate buffers restart from zero on every sweep; leaves accumulate.
  for (auto& e : entries_) e.output.clear_grad();
  Tensor seed = loss;
  seed.grad()[0] += 1.0;
  for (auto it = entries_.rbegin(); it != entries_.rend(); ++it) {
    if (it->output.has_grad()) it->rule();
  }
}

void backward(Tape& tape, const Tensor& loss) { tape.backward(loss); }

// ------------------------------------------------------------------- ops

namespace ad {

Tensor matmul(Tape& tape, const Tensor& a, const Tensor& b) {
  if (a.rank() != 2 || b.rank() != 2 || a.dim(1) != b.dim(0))
    shape_fail("matmul", "cannot multiply " + shape_string(a.shape()) + " by " +
                             shape_string(b.shape()));
  Tensor out = make_output({a.dim(0), b.dim(1)});
  MapRow(out.data().data(), a.dim(0), b.dim(1)).noalias() = as_matrix(a) * as_matrix(b);
  require_finite("matmul", out);
  tape.record("matmul", {a, b}, out, [a, b, out]() mutable {
    ConstMapRow g(out.grad().data(), a.dim(0), b.dim(1));
    if (a.requires_grad())
      MapRow(a.grad().data(), a.dim(0), a.dim(1)).noalias() += g * as_matrix(b).transpose();
    if (b.requires_grad())
      MapRow(b.grad().data(), b.dim(0), b.dim(1)).noalias() += as_matrix(a).transpose() * g;
  });
  return out;
}

Tensor transpose(Tape& tape, const Tensor& a) {
  if (a.rank() != 2) shape_fail("transpose", "expected rank 2, got " + shape_string(a.shape()));
  Tensor out = make_output({a.dim(1), a.dim(0)});
  MapRow(out.data().data(), a.dim(1), a.dim(0)) = as_matrix(a).transpose();
  tape.record("transpose", {a}, out, [a, out]() mutable {
    if (a.requires_grad())
      MapRow(a.grad().data(), a.dim(0), a.dim(1)) +=
          ConstMapRow(out.grad().data(), a.dim(1), a.dim(0)).transpose();
  });
  return out;
}

namespace {

Tensor binary(Tape& tape, const char* op, const Tensor& a, const Tensor& b, int kind) {
  const Broadcast mode = check_binary(op, a, b);
  Tensor out = make_output(a.shape());
  const auto [rows, cols] = rows_cols(a);
  auto av = ConstMapRow(a.data().data(), rows, cols);
  auto ov = MapRow(out.data().data(), rows, cols);
  if (mode == Broadcast::Same) {
    auto bv = ConstMapRow(b.data().data(), rows, cols);
    if (kind == 0) ov = av + bv;
    else if (kind == 1) ov = av - bv;
    else ov = av.cwiseProduct(bv);
  } else {
    auto brow = b.data().transpose();
    if (kind == 0) ov = av.rowwise() + brow;
    else if (kind == 1) ov = av.rowwise() - brow;
    else ov = av.array().rowwise() * brow.array();
  }
  require_finite(op, out);
  tape.record(op, {a, b}, out, [a, b, out, mode, kind, rows, cols]() mutable {
    ConstMapRow g(out.grad().data(), rows, cols);
    const double sign = kind == 1 ? -1.0 : 1.0;
    if (a.requires_grad()) {
      MapRow ga(a.grad().data(), rows, cols);
      if (kind == 2) {
        if (mode == Broadcast::Same) ga += g.cwiseProduct(ConstMapRow(b.data().data(), rows, cols));
        else ga += (g.array().rowwise() * b.data().transpose().array()).matrix();
      } else {
        ga += g;
      }
    }
    if (b.requires_grad()) {
      RowMat local;
      if (kind == 2) local = g.cwiseProduct(ConstMapRow(a.data().data(), rows, cols));
      else local = sign * g;
      if (mode == Broadcast::Same) MapRow(b.grad().data(), rows, cols) += local;
      else b.grad() += local.colwise().sum().transpose();
    }
  });
  return out;
}

template <typename F, typename D>
Tensor unary(Tape& tape, const char* op, const Tensor& a, F f, D dfdx) {
  Tensor out = make_output(a.shape());
  out.data() = a.data().unaryExpr(f);
  require_finite(op, out);
  tape.record(op, {a}, out, [a, out, dfdx]() mutable {
    if (!a.requires_grad()) return;
    auto& ga = a.grad();
    const auto& g = out.grad();
    for (Eigen::Index i = 0; i < ga.size(); ++i) ga[i] += g[i] * dfdx(a.data()[i], out.data()[i]);
  });
  return out;
}

double stable_sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

Tensor add(Tape& tape, const Tensor& a, const Tensor& b) { return binary(tape, "add", a, b, 0); }
Tensor sub(Tape& tape, const Tensor& a, const Tensor& b) { return binary(tape, "sub", a, b, 1); }
Tensor mul(Tape& tape, const Tensor& a, const Tensor& b) { return binary(tape, "mul", a, b, 2); }

Tensor scale(Tape& tape, const Tensor& a, double factor) {
  return unary(tape, "scale", a, [factor](double x) { return factor * x; },
               [factor](double, double) { return factor; });
}

Tensor relu(Tape& tape, const Tensor& a) {
  return unary(tape, "relu", a, [](double x) { return x > 0 ? x : 0.0; },
               [](double x, double) { return x > 0 ? 1.0 : 0.0; });
}

Tensor softplus(Tape& tape, const Tensor& a) {
  return unary(
      tape, "softplus", a,
      [](double x) { return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); },
      [](double x, double) { return stable_sigmoid(x); });
}

Tensor sigmoid(Tape& tape, const Tensor& a) {
  return unary(tape, "sigmoid", a, stable_sigmoid,
               [](double, double y) { return y * (1.0 - y); });
}

Tensor log(Tape& tape, const Tensor& a) {
  return unary(tape, "log", a, [](double x) { return std::log(std::max(x, kLogFloor)); },
               [](double x, double) { return x > kLogFloor ? 1.0 / x : 0.0; });
}

Tensor softmax(Tape& tape, const Tensor& a) {
  if (a.rank() == 0) shape_fail("softmax", "needs at least one axis");
  const auto [rows, cols] = rows_cols(a);
  Tensor out = make_output(a.shape());
  ConstMapRow x(a.data().data(), rows, cols);
  MapRow y(out.data().data(), rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    const double m = x.row(r).maxCoeff();
    y.row(r) = (x.row(r).array() - m).exp().matrix();
    y.row(r) /= y.row(r).sum();
  }
  require_finite("softmax", out);
  tape.record("softmax", {a}, out, [a, out, rows, cols]() mutable {
    if (!a.requires_grad()) return;
    ConstMapRow s(out.data().data(), rows, cols);
    ConstMapRow g(out.grad().data(), rows, cols);
    MapRow ga(a.grad().data(), rows, cols);
    for (std::size_t r = 0; r < rows; ++r) {
      const double dot = g.row(r).dot(s.row(r));
      ga.row(r) += (s.row(r).array() * (g.row(r).array() - dot)).matrix();
    }
  });
  return out;
}

Tensor sum(Tape& tape, const Tensor& a) {
  Tensor out = Tensor::scalar(a.data().sum());
  require_finite("sum", out);
  tape.record("sum", {a}, out, [a, out]() mutable {
    if (a.requires_grad()) a.grad().array() += out.grad()[0];
  });
  return out;
}

Tensor mean(Tape& tape, const Tensor& a) {
  const double n = static_cast<double>(a.numel());
  Tensor out = Tensor::scalar(a.data().sum() / n);
  require_finite("mean", out);
  tape.record("mean", {a}, out, [a, out, n]() mutable {
    if (a.requires_grad()) a.grad().array() += out.grad()[0] / n;
  });
  return out;
}

Tensor conv2d(Tape& tape, const Tensor& input, const Tensor& weight, const Tensor& bias) {
  if (input.rank() != 4 || weight.rank() != 4 || bias.rank() != 1)
    shape_fail("conv2d", "expected input [N,C,H,W], weight [O,C,kh,kw], bias [O]; got " +
                             shape_string(input.shape()) + ", " + shape_string(weight.shape()) +
                             ", " + shape_string(bias.shape()));
  const std::size_t N = input.dim(0), C = input.dim(1), H = input.dim(2), W = input.dim(3);
  const std::size_t O = weight.dim(0), KH = weight.dim(2), KW = weight.dim(3);
  if (weight.dim(1) != C || bias.dim(0) != O || KH > H || KW > W)
    shape_fail("conv2d", "input " + shape_string(input.shape()) + " incompatible with weight " +
                             shape_string(weight.shape()) + " and bias " +
                             shape_string(bias.shape()));
  const std::size_t OH = H - KH + 1, OW = W - KW + 1;
  Tensor out = make_output({N, O, OH, OW});
  const double* x = input.data().data();
  const double* w = weight.data().data();
  double* y = out.data().data();
  for (std::size_t n = 0; n < N; ++n)
    for (std::size_t o = 0; o < O; ++o) {
      double* yo = y + ((n * O + o) * OH) * OW;
      for (std::size_t i = 0; i < OH * OW; ++i) yo[i] = bias[o];
      for (std::size_t c = 0; c < C; ++c) {
        const double* xc = x + ((n * C + c) * H) * W;
        const double* wk = w + ((o * C + c) * KH) * KW;
        for (std::size_t ki = 0; ki < KH; ++ki)
          for (std::size_t kj = 0; kj < KW; ++kj) {
            const double wv = wk[ki * KW + kj];
            for (std::size_t i = 0; i < OH; ++i) {
              const double* xr = xc + (i + ki) * W + kj;
              double* yr = yo + i * OW;
              for (std::size_t j = 0; j < OW; ++j) yr[j] += wv * xr[j];
            }
          }
      }
    }
  require_finite("conv2d", out);
  tape.record("conv2d", {input, weight, bias}, out,
              [input, weight, bias, out, N, C, H, W, O, KH, KW, OH, OW]() mutable {
    const double* g = out.grad().data();
    const double* x = input.data().data();
    const double* w = weight.data().data();
    double* gx = input.requires_grad() ? input.grad().data() : nullptr;
    double* gw = weight.requires_grad() ? weight.grad().data() : nullptr;
    double* gb = bias.requires_grad() ? bias.grad().data() : nullptr;
    for (std::size_t n = 0; n < N; ++n)
      for (std::size_t o = 0; o < O; ++o) {
        const double* go = g + ((n * O + o) * OH) * OW;
        if (gb)
          for (std::size_t i = 0; i < OH * OW; ++i) gb[o] += go[i];
        for (std::size_t c = 0; c < C; ++c) {
          const double* xc = x + ((n * C + c) * H) * W;
          const std::size_t wbase = ((o * C + c) * KH) * KW;
          for (std::size_t ki = 0; ki < KH; ++ki)
            for (std::size_t kj = 0; kj < KW; ++kj) {
              double acc = 0.0;
              const double wv = w[wbase + ki * KW + kj];
              for (std::size_t i = 0; i < OH; ++i) {
                const double* gr = go + i * OW;
                const double* xr = xc + (i + ki) * W + kj;
                if (gw)
                  for (std::size_t j = 0; j < OW; ++j) acc += gr[j] * xr[j];
                if (gx) {
                  double* gxr = gx + ((n * C + c) * H + i + ki) * W + kj;
                  for (std::size_t j = 0; j < OW; ++j) gxr[j] += wv * gr[j];
                }
              }
              if (gw) gw[wbase + ki * KW + kj] += acc;
            }
        }
      }
  });
  return out;
}

Tensor avgpool2d(Tape& tape, const Tensor& input, std::size_t kernel) {
  if (input.rank() != 4 || kernel == 0 || kernel > input.dim(2) || kernel > input.dim(3))
    shape_fail("avgpool2d", "kernel " + std::to_string(kernel) + " invalid for input " +
                                shape_string(input.shape()));
  const std::size_t N = input.dim(0), C = input.dim(1), H = input.dim(2), W = input.dim(3);
  const std::size_t OH = H / kernel, OW = W / kernel;
  const double inv = 1.0 / static_cast<double>(kernel * kernel);
  Tensor out = make_output({N, C, OH, OW});
  const double* x = input.data().data();
  double* y = out.data().data();
  for (std::size_t p = 0; p < N * C; ++p)
    for (std::size_t i = 0; i < OH; ++i)
      for (std::size_t j = 0; j < OW; ++j) {
        double acc = 0.0;
        for (std::size_t a = 0; a < kernel; ++a)
          for (std::size_t b = 0; b < kernel; ++b)
            acc += x[(p * H + i * kernel + a) * W + j * kernel + b];
        y[(p * OH + i) * OW + j] = acc * inv;
      }
  require_finite("avgpool2d", out);
  tape.record("avgpool2d", {input}, out, [input, out, N, C, H, W, OH, OW, kernel, inv]() mutable {
    if (!input.requires_grad()) return;
    double* gx = input.grad().data();
    const double* g = out.grad().data();
    for (std::size_t p = 0; p < N * C; ++p)
      for (std::size_t i = 0; i < OH; ++i)
        for (std::size_t j = 0; j < OW; ++j) {
          const double v = g[(p * OH + i) * OW + j] * inv;
          for (std::size_t a = 0; a < kernel; ++a)
            for (std::size_t b = 0; b < kernel; ++b)
              gx[(p * H + i * kernel + a) * W + j * kernel + b] += v;
        }
  });
  return out;
}

Tensor reshape(Tape& tape, const Tensor& a, Shape shape) {
  if (shape_numel(shape) != a.numel())
    shape_fail("reshape", "cannot view " + shape_string(a.shape()) + " as " + shape_string(shape));
  Tensor out = Tensor::from(std::move(shape), a.data());
  tape.record("reshape", {a}, out, [a, out]() mutable {
    if (a.requires_grad()) a.grad() += out.grad();
  });
  return out;
}

Tensor concat(Tape& tape, const std::vector<Tensor>& parts, std::size_t axis) {
  if (parts.empty()) shape_fail("concat", "no inputs");
  if (axis > 1) shape_fail("concat", "axis must be 0 or 1");
  const Tensor& first = parts.front();
  if (axis == 1 && first.rank() != 2) shape_fail("concat", "axis 1 needs rank-2 inputs");
  Shape shape = first.shape();
  if (shape.empty()) shape = {1};
  shape[axis] = 0;
  for (const auto& p : parts) {
    Shape ps = p.shape().empty() ? Shape{1} : p.shape();
    if (ps.size() != shape.size()) shape_fail("concat", "rank mismatch at " + shape_string(ps));
    for (std::size_t d = 0; d < ps.size(); ++d)
      if (d != axis && ps[d] != shape[d])
        shape_fail("concat", "extent mismatch " + shape_string(ps) + " vs " +
                                 shape_string(first.shape()));
    shape[axis] += ps[axis];
  }
  Tensor out = make_output(shape);
  if (axis == 0) {
    Eigen::Index off = 0;
    for (const auto& p : parts) {
      out.data().segment(off, p.data().size()) = p.data();
      off += p.data().size();
    }
  } else {
    const std::size_t rows = shape[0], cols = shape[1];
    MapRow o(out.data().data(), rows, cols);
    std::size_t col = 0;
    for (const auto& p : parts) {
      o.middleCols(col, p.dim(1)) = as_matrix(p);
      col += p.dim(1);
    }
  }
  tape.record("concat", parts, out, [parts, out, axis]() mutable {
    if (axis == 0) {
      Eigen::Index off = 0;
      for (auto& p : parts) {
        if (p.requires_grad()) p.grad() += out.grad().segment(off, p.data().size());
        off += p.data().size();
      }
    } else {
      ConstMapRow g(out.grad().data(), out.dim(0), out.dim(1));
      std::size_t col = 0;
      for (auto& p : parts) {
        if (p.requires_grad())
          MapRow(p.grad().data(), p.dim(0), p.dim(1)) += g.middleCols(col, p.dim(1));
        col += p.dim(1);
      }
    }
  });
  return out;
}

Tensor slice(Tape& tape, const Tensor& a, std::size_t offset, Shape shape) {
  const std::size_t n = shape_numel(shape);
  if (offset + n > a.numel())
    shape_fail("slice", "window [" + std::to_string(offset) + ", " + std::to_string(offset + n) +
                            ") exceeds " + std::to_string(a.numel()) + " elements");
  Tensor out = Tensor::from(std::move(shape), Eigen::VectorXd(a.data().segment(offset, n)));
  tape.record("slice", {a}, out, [a, out, offset, n]() mutable {
    if (a.requires_grad()) a.grad().segment(offset, n) += out.grad();
  });
  return out;
}

Tensor gather(Tape& tape, const Tensor& a, std::span<const std::size_t> indices) {
  if (indices.empty()) shape_fail("gather", "empty index list");
  Eigen::VectorXd v(static_cast<Eigen::Index>(indices.size()));
  for (std::size_t k = 0; k < indices.size(); ++k) {
    if (indices[k] >= a.numel())
      shape_fail("gather", "index " + std::to_string(indices[k]) + " out of range for " +
                               shape_string(a.shape()));
    v[k] = a[indices[k]];
  }
  std::vector<std::size_t> idx(indices.begin(), indices.end());
  Tensor out = Tensor::from({idx.size()}, std::move(v));
  tape.record("gather", {a}, out, [a, out, idx]() mutable {
    if (!a.requires_grad()) return;
    for (std::size_t k = 0; k < idx.size(); ++k) a.grad()[idx[k]] += out.grad()[k];
  });
  return out;
}

Tensor nll_loss(Tape& tape, const Tensor& log_probs, std::span<const int> labels) {
  if (log_probs.rank() != 2 || log_probs.dim(0) != labels.size())
    shape_fail("nll_loss", "log_probs " + shape_string(log_probs.shape()) + " vs " +
                               std::to_string(labels.size()) + " labels");
  const std::size_t B = log_probs.dim(0), C = log_probs.dim(1);
  std::vector<int> y(labels.begin(), labels.end());
  double acc = 0.0;
  for (std::size_t b = 0; b < B; ++b) {
    if (y[b] < 0 || static_cast<std::size_t>(y[b]) >= C)
      shape_fail("nll_loss", "label " + std::to_string(y[b]) + " outside [0, " +
                                 std::to_string(C) + ")");
    acc -= log_probs[b * C + y[b]];
  }
  Tensor out = Tensor::scalar(acc / static_cast<double>(B));
  require_finite("nll_loss", out);
  tape.record("nll_loss", {log_probs}, out, [log_probs, out, y, B, C]() mutable {
    if (!log_probs.requires_grad()) return;
    const double g = out.grad()[0] / static_cast<double>(B);
    for (std::size_t b = 0; b < B; ++b) log_probs.grad()[b * C + y[b]] -= g;
  });
  return out;
}

Tensor mse_loss(Tape& tape, const Tensor& prediction, const Tensor& target) {
  if (prediction.shape() != target.shape())
    shape_fail("mse_loss", shape_string(prediction.shape()) + " vs " +
                               shape_string(target.shape()));
  const double n = static_cast<double>(prediction.numel());
  Eigen::VectorXd diff = prediction.data() - target.data();
  Tensor out = Tensor::scalar(diff.squaredNorm() / n);
  require_finite("mse_loss", out);
  tape.record("mse_loss", {prediction, target}, out, [prediction, target, out, diff, n]() mutable {
    const double g = 2.0 * out.grad()[0] / n;
    if (prediction.requires_grad()) prediction.grad() += g * diff;
    if (target.requires_grad()) target.grad() -= g * diff;
  });
  return out;
}

}  // namespace ad
}  // namespace hpqs
