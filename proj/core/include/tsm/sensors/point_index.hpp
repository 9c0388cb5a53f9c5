// Copyright 2026 The text-scene-motion Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <unordered_map>
#include <vector>

#include "tsm/scene/point_cloud.hpp"

namespace tsm::sensors {

/// Uniform hash grid over a point cloud for radius-bounded nearest-neighbor
/// queries. Read-only after construction; concurrent queries are safe.
class PointIndex {
 public:
  /// `cell` is the bucket edge length; queries are cheapest when the search
  /// radius is close to it. The cloud must outlive the index.
  explicit PointIndex(const scene::PointCloud& cloud, double cell = 1.0);

  /// Index of the closest point within `radius` (inclusive). Exact ties go to
  /// the lowest point index.
  std::optional<std::size_t> nearest(const Eigen::Vector3d& query, double radius) const;

  const scene::PointCloud& cloud() const noexcept { return *cloud_; }

 private:
  using Key = std::int64_t;
  Key key(std::int64_t x, std::int64_t y, std::int64_t z) const;
  std::int64_t coord(double v) const;

  const scene::PointCloud* cloud_;
  double cell_;
  std::unordered_map<Key, std::vector<std::uint32_t>> buckets_;
};

}  // namespace tsm::sensors
