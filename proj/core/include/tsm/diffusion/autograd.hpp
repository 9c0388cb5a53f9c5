// Copyright 2026 The text-scene-motion Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Core>
#include <functional>
#include <string>
#include <vector>

namespace tsm::nn {

using Matrix = Eigen::MatrixXd;

/// Trainable tensor with its accumulated gradient.
struct Parameter {
  std::string name;
  Matrix value;
  Matrix grad;

  void zero_grad() { grad.setZero(value.rows(), value.cols()); }
};

/// Handle to a node on a Tape.
class Var {
 public:
  Var() = default;
  int id() const noexcept { return id_; }
  bool valid() const noexcept { return id_ >= 0; }

 private:
  friend class Tape;
  explicit Var(int id) : id_(id) {}
  int id_ = -1;
};

/// Reverse-mode differentiation over dense matrices. A tape records one
/// forward pass; backward() pushes gradients into the Parameters it used.
/// With `record == false` no backward closures are stored (inference).
class Tape {
 public:
  explicit Tape(bool record = true) : record_(record) {}

  Var constant(Matrix value);
  Var param(Parameter& p);

  const Matrix& value(Var v) const { return nodes_.at(v.id_).value; }
  /// Gradient of the last backward() target with respect to `v`.
  const Matrix& grad(Var v) const { return nodes_.at(v.id_).grad; }

  Var matmul(Var a, Var b);     // a * b
  Var matmul_nt(Var a, Var b);  // a * b^T
  Var add(Var a, Var b);
  Var add_rowwise(Var a, Var row);  // a + broadcast row vector
  Var scale(Var a, double s);
  Var silu(Var a);
  Var layer_norm(Var x, Var gain, Var bias, double eps = 1e-5);  // per row
  Var softmax_rows(Var a);
  Var cols(Var a, Eigen::Index start, Eigen::Index count);
  Var hcat(const std::vector<Var>& parts);
  Var vcat(const std::vector<Var>& parts);
  /// mean((pred - target)^2) as a 1x1 node.
  Var mse(Var pred, const Matrix& target);

  /// Seeds d(root)/d(root) = seed and accumulates into Parameter::grad.
  void backward(Var root, double seed = 1.0);

  std::size_t size() const noexcept { return nodes_.size(); }

 private:
  struct Node {
    Matrix value;
    Matrix grad;
    std::function<void()> back;
    Parameter* param = nullptr;
  };

  Var push(Matrix value);
  Matrix& g(int id);  // lazily zero-initialized gradient
  bool has_grad(int id) const { return nodes_[id].grad.size() != 0; }

  std::vector<Node> nodes_;
  bool record_;
};

}  // namespace tsm::nn
