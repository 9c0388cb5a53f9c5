// Copyright 2026 The text-scene-motion Authors
// SPDX-License-Identifier: Apache-2.0

#include "tsm/scene/aabb.hpp"

#include <algorithm>

#include "tsm/common/error.hpp"

namespace tsm::scene {

Aabb Aabb::from_center_size(const Eigen::Vector3d& center, const Eigen::Vector3d& size) {
  if (!(size.array() > 0.0).all() || !size.allFinite() || !center.allFinite()) {
    throw ValidationError("box size components must be positive and finite");
  }
  return {center, size / 2.0};
}

bool Aabb::contains(const Eigen::Vector3d& p) const {
  return ((p - center).cwiseAbs().array() <= half_extents.array()).all();
}

namespace {

double overlap_1d(double amin, double amax, double bmin, double bmax) {
  return std::max(0.0, std::min(amax, bmax) - std::max(amin, bmin));
}

}  // namespace

double iou(const Aabb& a, const Aabb& b) {
  const Eigen::Vector3d amin = a.min(), amax = a.max(), bmin = b.min(), bmax = b.max();
  double inter = 1.0;
  for (int k = 0; k < 3; ++k) inter *= overlap_1d(amin[k], amax[k], bmin[k], bmax[k]);
  const double uni = a.volume() + b.volume() - inter;
  return uni > 0.0 ? inter / uni : 0.0;
}

double footprint_iou(const Aabb& a, const Aabb& b) {
  const Eigen::Vector3d amin = a.min(), amax = a.max(), bmin = b.min(), bmax = b.max();
  const double inter = overlap_1d(amin.x(), amax.x(), bmin.x(), bmax.x()) *
                       overlap_1d(amin.y(), amax.y(), bmin.y(), bmax.y());
  const double area_a = a.size().x() * a.size().y();
  const double area_b = b.size().x() * b.size().y();
  const double uni = area_a + area_b - inter;
  return uni > 0.0 ? inter / uni : 0.0;
}

double footprint_overlap(const Aabb& a, const Aabb& b) {
  const Eigen::Vector3d amin = a.min(), amax = a.max(), bmin = b.min(), bmax = b.max();
  const double inter = overlap_1d(amin.x(), amax.x(), bmin.x(), bmax.x()) *
                       overlap_1d(amin.y(), amax.y(), bmin.y(), bmax.y());
  const double smaller = std::min(a.size().x() * a.size().y(), b.size().x() * b.size().y());
  return smaller > 0.0 ? inter / smaller : 0.0;
}

double distance_to_box(const Eigen::Vector3d& p, const Aabb& box) {
  const Eigen::Vector3d excess =
      ((p - box.center).cwiseAbs() - box.half_extents).cwiseMax(0.0);
  return excess.norm();
}

}  // namespace tsm::scene
