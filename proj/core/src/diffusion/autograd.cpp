// Copyright 2026 The text-scene-motion Authors
// SPDX-License-Identifier: Apache-2.0

#include "tsm/diffusion/autograd.hpp"

#include <cmath>

#include "tsm/common/error.hpp"

namespace tsm::nn {

Var Tape::push(Matrix value) {
  nodes_.push_back({std::move(value), {}, {}, nullptr});
  return Var(static_cast<int>(nodes_.size() - 1));
}

Matrix& Tape::g(int id) {
  Node& n = nodes_[id];
  if (n.grad.size() == 0) n.grad.setZero(n.value.rows(), n.value.cols());
  return n.grad;
}

Var Tape::constant(Matrix value) { return push(std::move(value)); }

Var Tape::param(Parameter& p) {
  Var v = push(p.value);
  nodes_[v.id_].param = &p;
  return v;
}

Var Tape::matmul(Var a, Var b) {
  if (value(a).cols() != value(b).rows()) throw ValidationError("matmul shape mismatch");
  Var out = push(value(a) * value(b));
  if (record_) {
    const int ia = a.id_, ib = b.id_, io = out.id_;
    nodes_[io].back = [this, ia, ib, io] {
      const Matrix& go = nodes_[io].grad;
      g(ia).noalias() += go * nodes_[ib].value.transpose();
      g(ib).noalias() += nodes_[ia].value.transpose() * go;
    };
  }
  return out;
}

Var Tape::matmul_nt(Var a, Var b) {
  if (value(a).cols() != value(b).cols()) throw ValidationError("matmul_nt shape mismatch");
  Var out = push(value(a) * value(b).transpose());
  if (record_) {
    const int ia = a.id_, ib = b.id_, io = out.id_;
    nodes_[io].back = [this, ia, ib, io] {
      const Matrix& go = nodes_[io].grad;
      g(ia).noalias() += go * nodes_[ib].value;
      g(ib).noalias() += go.transpose() * nodes_[ia].value;
    };
  }
  return out;
}

Var Tape::add(Var a, Var b) {
  if (value(a).rows() != value(b).rows() || value(a).cols() != value(b).cols()) {
    throw ValidationError("add shape mismatch");
  }
  Var out = push(value(a) + value(b));
  if (record_) {
    const int ia = a.id_, ib = b.id_, io = out.id_;
    nodes_[io].back = [this, ia, ib, io] {
      g(ia) += nodes_[io].grad;
      g(ib) += nodes_[io].grad;
    };
  }
  return out;
}

Var Tape::add_rowwise(Var a, Var row) {
  if (value(row).rows() != 1 || value(row).cols() != value(a).cols()) {
    throw ValidationError("add_rowwise shape mismatch");
  }
  Matrix v = value(a);
  v.rowwise() += value(row).row(0);
  Var out = push(std::move(v));
  if (record_) {
    const int ia = a.id_, ir = row.id_, io = out.id_;
    nodes_[io].back = [this, ia, ir, io] {
      g(ia) += nodes_[io].grad;
      g(ir) += nodes_[io].grad.colwise().sum();
    };
  }
  return out;
}

Var Tape::scale(Var a, double s) {
  Var out = push(value(a) * s);
  if (record_) {
    const int ia = a.id_, io = out.id_;
    nodes_[io].back = [this, ia, io, s] { g(ia) += s * nodes_[io].grad; };
  }
  return out;
}

Var Tape::silu(Var a) {
  const Matrix& x = value(a);
  const Eigen::ArrayXXd sig = 1.0 / (1.0 + (-x.array()).exp());
  Var out = push((x.array() * sig).matrix());
  if (record_) {
    const int ia = a.id_, io = out.id_;
    nodes_[io].back = [this, ia, io] {
      const Eigen::ArrayXXd xv = nodes_[ia].value.array();
      const Eigen::ArrayXXd s = 1.0 / (1.0 + (-xv).exp());
      g(ia).array() += nodes_[io].grad.array() * s * (1.0 + xv * (1.0 - s));
    };
  }
  return out;
}

Var Tape::layer_norm(Var x, Var gain, Var bias, double eps) {
  const Matrix& xv = value(x);
  const Eigen::Index n = xv.cols();
  if (value(gain).cols() != n || value(bias).cols() != n) {
    throw ValidationError("layer_norm shape mismatch");
  }
  const Eigen::VectorXd mean = xv.rowwise().mean();
  Matrix centered = xv.colwise() - mean;
  const Eigen::VectorXd inv_std =
      ((centered.array().square().rowwise().sum() / static_cast<double>(n)) + eps).rsqrt();
  Matrix xhat = centered.array().colwise() * inv_std.array();
  Matrix y = xhat.array().rowwise() * value(gain).row(0).array();
  y.rowwise() += value(bias).row(0);
  Var out = push(std::move(y));
  if (record_) {
    const int ix = x.id_, ig = gain.id_, ib = bias.id_, io = out.id_;
    nodes_[io].back = [this, ix, ig, ib, io, xhat = std::move(xhat), inv_std, n] {
      const Matrix& go = nodes_[io].grad;
      g(ib) += go.colwise().sum();
      g(ig) += (go.array() * xhat.array()).matrix().colwise().sum();
      const Eigen::ArrayXXd gx = go.array().rowwise() * nodes_[ig].value.row(0).array();
      const Eigen::VectorXd mean_gx = gx.rowwise().sum() / static_cast<double>(n);
      const Eigen::VectorXd mean_gx_xhat =
          (gx * xhat.array()).rowwise().sum() / static_cast<double>(n);
      Eigen::ArrayXXd dx = gx.colwise() - mean_gx.array();
      dx -= xhat.array().colwise() * mean_gx_xhat.array();
      dx.colwise() *= inv_std.array();
      g(ix) += dx.matrix();
    };
  }
  return out;
}

Var Tape::softmax_rows(Var a) {
  const Matrix& x = value(a);
  Matrix y = (x.colwise() - x.rowwise().maxCoeff()).array().exp().matrix();
  y.array().colwise() /= y.rowwise().sum().array();
  Var out = push(std::move(y));
  if (record_) {
    const int ia = a.id_, io = out.id_;
    nodes_[io].back = [this, ia, io] {
      const Matrix& yv = nodes_[io].value;
      const Matrix& go = nodes_[io].grad;
      const Eigen::VectorXd dot = (go.array() * yv.array()).rowwise().sum();
      g(ia).array() += yv.array() * (go.colwise() - dot).array();
    };
  }
  return out;
}

Var Tape::cols(Var a, Eigen::Index start, Eigen::Index count) {
  if (start < 0 || start + count > value(a).cols()) throw ValidationError("column slice out of range");
  Var out = push(value(a).middleCols(start, count));
  if (record_) {
    const int ia = a.id_, io = out.id_;
    nodes_[io].back = [this, ia, io, start, count] {
      g(ia).middleCols(start, count) += nodes_[io].grad;
    };
  }
  return out;
}

Var Tape::hcat(const std::vector<Var>& parts) {
  if (parts.empty()) throw ValidationError("hcat of nothing");
  const Eigen::Index rows = value(parts[0]).rows();
  Eigen::Index cols = 0;
  for (Var p : parts) {
    if (value(p).rows() != rows) throw ValidationError("hcat row mismatch");
    cols += value(p).cols();
  }
  Matrix v(rows, cols);
  Eigen::Index c = 0;
  for (Var p : parts) {
    v.middleCols(c, value(p).cols()) = value(p);
    c += value(p).cols();
  }
  Var out = push(std::move(v));
  if (record_) {
    std::vector<int> ids;
    for (Var p : parts) ids.push_back(p.id_);
    const int io = out.id_;
    nodes_[io].back = [this, ids, io] {
      Eigen::Index c0 = 0;
      for (int id : ids) {
        const Eigen::Index w = nodes_[id].value.cols();
        g(id) += nodes_[io].grad.middleCols(c0, w);
        c0 += w;
      }
    };
  }
  return out;
}

Var Tape::vcat(const std::vector<Var>& parts) {
  if (parts.empty()) throw ValidationError("vcat of nothing");
  const Eigen::Index cols = value(parts[0]).cols();
  Eigen::Index rows = 0;
  for (Var p : parts) {
    if (value(p).cols() != cols) throw ValidationError("vcat column mismatch");
    rows += value(p).rows();
  }
  Matrix v(rows, cols);
  Eigen::Index r = 0;
  for (Var p : parts) {
    v.middleRows(r, value(p).rows()) = value(p);
    r += value(p).rows();
  }
  Var out = push(std::move(v));
  if (record_) {
    std::vector<int> ids;
    for (Var p : parts) ids.push_back(p.id_);
    const int io = out.id_;
    nodes_[io].back = [this, ids, io] {
      Eigen::Index r0 = 0;
      for (int id : ids) {
        const Eigen::Index h = nodes_[id].value.rows();
        g(id) += nodes_[io].grad.middleRows(r0, h);
        r0 += h;
      }
    };
  }
  return out;
}

Var Tape::mse(Var pred, const Matrix& target) {
  const Matrix& p = value(pred);
  if (p.rows() != target.rows() || p.cols() != target.cols()) {
    throw ValidationError("mse shape mismatch");
  }
  const double n = static_cast<double>(p.size());
  Matrix loss(1, 1);
  loss(0, 0) = (p - target).squaredNorm() / n;
  Var out = push(std::move(loss));
  if (record_) {
    const int ip = pred.id_, io = out.id_;
    nodes_[io].back = [this, ip, io, target, n] {
      g(ip) += (2.0 * nodes_[io].grad(0, 0) / n) * (nodes_[ip].value - target);
    };
  }
  return out;
}

void Tape::backward(Var root, double seed) {
  if (!record_) throw Error("backward() on a tape that did not record");
  if (value(root).size() != 1) throw ValidationError("backward() needs a scalar root");
  g(root.id_)(0, 0) += seed;
  for (int i = root.id_; i >= 0; --i) {
    Node& n = nodes_[i];
    if (!has_grad(i)) continue;
    if (n.back) n.back();
    if (n.param) {
      if (n.param->grad.size() == 0) n.param->zero_grad();
      n.param->grad += n.grad;
    }
  }
}

}  // namespace tsm::nn
