// Copyright 2026 The text-scene-motion Authors
// SPDX-License-Identifier: Apache-2.0

#include "tsm/motion/rot6d.hpp"

#include <Eigen/Geometry>
#include <cmath>

#include "tsm/common/error.hpp"

namespace tsm::motion {

namespace {
constexpr double kDegenerateEps = 1e-12;
}

Eigen::Matrix3d rot6d_to_matrix(const Rot6d& r) {
  const Eigen::Vector3d a = r.first();
  const Eigen::Vector3d b = r.second();
  const double na = a.norm();
  if (!(na > kDegenerateEps) || !std::isfinite(na)) {
    throw DegenerateRotationError("6D rotation has a zero first column");
  }
  const Eigen::Vector3d c1 = a / na;
  const Eigen::Vector3d residual = b - b.dot(c1) * c1;
  const double nr = residual.norm();
  if (!(nr > kDegenerateEps * std::max(1.0, b.norm())) || !std::isfinite(nr)) {
    throw DegenerateRotationError("6D rotation columns are parallel");
  }
  const Eigen::Vector3d c2 = residual / nr;
  Eigen::Matrix3d R;
  R.col(0) = c1;
  R.col(1) = c2;
  R.col(2) = c1.cross(c2);
  return R;
}

Rot6d matrix_to_rot6d(const Eigen::Matrix3d& R) {
  constexpr double kTol = 1e-4;
  if (!R.allFinite() || (R.transpose() * R - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() > kTol ||
      std::abs(R.determinant() - 1.0) > kTol) {
    throw ValidationError("matrix is not a proper rotation");
  }
  return {{R(0, 0), R(1, 0), R(2, 0), R(0, 1), R(1, 1), R(2, 1)}};
}

Eigen::Matrix3d yaw_matrix(double yaw) {
  return Eigen::AngleAxisd(yaw, Eigen::Vector3d::UnitZ()).toRotationMatrix();
}

}  // namespace tsm::motion
