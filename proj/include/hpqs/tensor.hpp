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

#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace hpqs {

using Shape = std::vector<std::size_t>;

std::size_t shape_numel(const Shape& shape);
std::string shape_string(const Shape& shape);

namespace detail {
struct TensorStorage {
  Shape shape;
  Eigen::VectorXd data;
  Eigen::VectorXd grad;  // empty until first accumulation
  bool requires_grad = false;
  std::uint64_t id = 0;
};
}  // namespace detail

/// Dense row-major tensor of doubles with an optional gradient buffer.
///
/// Tensor is a handle: copies share storage. Parameters are held as
/// Tensors by their owners and referenced by the tape during a pass.
class Tensor {
 public:
  Tensor() = default;

  static Tensor zeros(Shape shape, bool requires_grad = false);
  static Tensor full(Shape shape, double value, bool requires_grad = false);
  static Tensor from(Shape shape, Eigen::VectorXd values,
                     bool requires_grad = false);
  static Tensor from(Shape shape, std::span<const double> values,
                     bool requires_grad = false);
  static Tensor scalar(double value, bool requires_grad = false);

  bool defined() const { return static_cast<bool>(storage_); }
  std::uint64_t id() const { return storage_->id; }

  const Shape& shape() const { return storage_->shape; }
  std::size_t rank() const { return storage_->shape.size(); }
  std::size_t dim(std::size_t axis) const { return storage_->shape.at(axis); }
  std::size_t numel() const { return static_cast<std::size_t>(storage_->data.size()); }

  /// Handle semantics: constness of the handle does not extend to storage.
  Eigen::VectorXd& data() const { return storage_->data; }
  double operator[](std::size_t i) const { return storage_->data[static_cast<Eigen::Index>(i)]; }
  double item() const;

  bool requires_grad() const { return storage_->requires_grad; }
  void set_requires_grad(bool flag) const { storage_->requires_grad = flag; }

  bool has_grad() const { return storage_->grad.size() != 0; }
  /// Gradient buffer, allocated (zero) on first access.
  Eigen::VectorXd& grad() const;
  void zero_grad() const;
  void clear_grad() const { storage_->grad.resize(0); }

  /// Deep copy without gradient or tape history.
  Tensor clone() const;

  friend bool same_storage(const Tensor& a, const Tensor& b) {
    return a.storage_ == b.storage_;
  }

 private:
  explicit Tensor(std::shared_ptr<detail::TensorStorage> s) : storage_(std::move(s)) {}
  std::shared_ptr<detail::TensorStorage> storage_;
};

/// Define-by-run record of differentiable operations.
///
/// One tape per forward pass; not shared across threads. `backward` visits
/// the recorded entries once each, newest first, accumulating into the
/// gradient buffers of every input that requires a gradient.
class Tape {
 public:
  struct Entry {
    std::string op;
    std::vector<Tensor> inputs;
    Tensor output;
    std::function<void()> rule;
  };

  /// Records `output` when at least one input requires a gradient; sets the
  /// output's requires_grad flag accordingly. Returns true when recorded.
  bool record(std::string op, std::vector<Tensor> inputs, Tensor& output,
              std::function<void()> rule);

  void backward(const Tensor& loss);

  std::size_t size() const { return entries_.size(); }
  const std::vector<Entry>& entries() const { return entries_; }
  void clear() { entries_.clear(); }

 private:
  std::vector<Entry> entries_;
};

/// Reverse-mode sweep; `loss` must hold exactly one element.
void backward(Tape& tape, const Tensor& loss);

/// Differentiable operations. Every op validates shapes (ShapeError naming
/// the op and extents) and rejects non-finite results (NumericError).
namespace ad {

Tensor matmul(Tape& tape, const Tensor& a, const Tensor& b);
Tensor transpose(Tape& tape, const Tensor& a);
/// `b` may match `a` exactly or be 1-D with the extent of a's last axis.
Tensor add(Tape& tape, const Tensor& a, const Tensor& b);
Tensor sub(Tape& tape, const Tensor& a, const Tensor& b);
Tensor mul(Tape& tape, const Tensor& a, const Tensor& b);
Tensor scale(Tape& tape, const Tensor& a, double factor);
Tensor relu(Tape& tape, const Tensor& a);
Tensor softplus(Tape& tape, const Tensor& a);
Tensor sigmoid(Tape& tape, const Tensor& a);
/// Softmax over the last axis with max subtraction.
Tensor softmax(Tape& tape, const Tensor& a);
/// Natural log with the argument clamped below at `kLogFloor`.
Tensor log(Tape& tape, const Tensor& a);
Tensor sum(Tape& tape, const Tensor& a);
Tensor mean(Tape& tape, const Tensor& a);
/// [N, C, H, W] * [O, C, kh, kw] + [O] -> [N, O, H-kh+1, W-kw+1]; stride 1.
Tensor conv2d(Tape& tape, const Tensor& input, const Tensor& weight,
              const Tensor& bias);
/// Non-overlapping average pooling; trailing rows/cols that do not fill a
/// window are dropped.
Tensor avgpool2d(Tape& tape, const Tensor& input, std::size_t kernel);
Tensor reshape(Tape& tape, const Tensor& a, Shape shape);
/// Concatenate along `axis` (0 or 1); other extents must agree.
Tensor concat(Tape& tape, const std::vector<Tensor>& parts, std::size_t axis = 0);
/// Contiguous flat window [offset, offset + numel(shape)) viewed as `shape`.
Tensor slice(Tape& tape, const Tensor& a, std::size_t offset, Shape shape);
/// 1-D gather a[indices[k]].
Tensor gather(Tape& tape, const Tensor& a, std::span<const std::size_t> indices);
/// Mean of -log_probs[b, labels[b]] over the batch.
Tensor nll_loss(Tape& tape, const Tensor& log_probs, std::span<const int> labels);
Tensor mse_loss(Tape& tape, const Tensor& prediction, const Tensor& target);

inline constexpr double kLogFloor = 1e-300;

}  // namespace ad

void require_finite(const char* op, const Tensor& t);

}  // namespace hpqs
