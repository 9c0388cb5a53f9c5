// Copyright 2026 The text-scene-motion Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Core>

namespace tsm::scene {

/// Axis-aligned box in meters, z up.
struct Aabb {
  Eigen::Vector3d center = Eigen::Vector3d::Zero();
  Eigen::Vector3d half_extents = Eigen::Vector3d::Constant(0.5);

  /// Throws ValidationError unless every size component is positive.
  static Aabb from_center_size(const Eigen::Vector3d& center, const Eigen::Vector3d& size);

  Eigen::Vector3d min() const { return center - half_extents; }
  Eigen::Vector3d max() const { return center + half_extents; }
  Eigen::Vector3d size() const { return 2.0 * half_extents; }
  double volume() const { return size().prod(); }
  bool contains(const Eigen::Vector3d& p) const;
  Aabb translated(const Eigen::Vector3d& offset) const { return {center + offset, half_extents}; }
  Aabb inflated(double factor) const { return {center, half_extents * factor}; }
};

/// Volume IoU; 0 for disjoint boxes.
double iou(const Aabb& a, const Aabb& b);

/// IoU of the xy footprints.
double footprint_iou(const Aabb& a, const Aabb& b);

/// Footprint intersection area over the smaller footprint area, in [0, 1].
double footprint_overlap(const Aabb& a, const Aabb& b);

/// Euclidean distance from `p` to the box, 0 inside.
double distance_to_box(const Eigen::Vector3d& p, const Aabb& box);

}  // namespace tsm::scene
