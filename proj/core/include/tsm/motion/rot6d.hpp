// Copyright 2026 The text-scene-motion Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Core>
#include <array>

namespace tsm::motion {

/// Continuous 6D rotation: the first two columns of a rotation matrix,
/// not necessarily orthonormal.
struct Rot6d {
  std::array<double, 6> v{1, 0, 0, 0, 1, 0};

  static Rot6d identity() { return {}; }
  Eigen::Vector3d first() const { return {v[0], v[1], v[2]}; }
  Eigen::Vector3d second() const { return {v[3], v[4], v[5]}; }
  bool operator==(const Rot6d&) const = default;
};

/// Gram-Schmidt: c1 = a/|a|, c2 = normalized (b - (b.c1) c1), c3 = c1 x c2.
/// Throws DegenerateRotationError for zero or parallel inputs.
Eigen::Matrix3d rot6d_to_matrix(const Rot6d& r);

/// First two columns. Throws ValidationError unless R is a rotation (1e-4).
Rot6d matrix_to_rot6d(const Eigen::Matrix3d& R);

/// Rotation about +z by `yaw` radians.
Eigen::Matrix3d yaw_matrix(double yaw);

}  // namespace tsm::motion
