// Copyright 2026 The text-scene-motion Authors
// SPDX-License-Identifier: Apache-2.0

#include "tsm/sensors/point_index.hpp"

#include <cmath>
#include <limits>

#include "tsm/common/error.hpp"

namespace tsm::sensors {

PointIndex::PointIndex(const scene::PointCloud& cloud, double cell) : cloud_(&cloud), cell_(cell) {
  if (!(cell > 0.0)) throw ValidationError("index cell size must be positive");
  if (cloud.size() > std::numeric_limits<std::uint32_t>::max()) {
    throw ValidationError("point cloud too large for index");
  }
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const auto& p = cloud.position(i);
    buckets_[key(coord(p.x()), coord(p.y()), coord(p.z()))].push_back(
        static_cast<std::uint32_t>(i));
  }
}

std::int64_t PointIndex::coord(double v) const {
  return static_cast<std::int64_t>(std::floor(v / cell_));
}

PointIndex::Key PointIndex::key(std::int64_t x, std::int64_t y, std::int64_t z) const {
  // 21 bits per axis, wrapping; collisions only merge buckets, never lose points.
  constexpr std::int64_t kMask = (1 << 21) - 1;
  return ((x & kMask) << 42) | ((y & kMask) << 21) | (z & kMask);
}

std::optional<std::size_t> PointIndex::nearest(const Eigen::Vector3d& query, double radius) const {
  if (cloud_->empty()) throw EmptyInputError("nearest-neighbor query on an empty cloud");
  const double r2 = radius * radius;
  const std::int64_t span = static_cast<std::int64_t>(std::ceil(radius / cell_));
  const std::int64_t cx = coord(query.x()), cy = coord(query.y()), cz = coord(query.z());
  std::optional<std::size_t> best;
  double best_d2 = std::numeric_limits<double>::infinity();
  for (std::int64_t x = cx - span; x <= cx + span; ++x) {
    for (std::int64_t y = cy - span; y <= cy + span; ++y) {
      for (std::int64_t z = cz - span; z <= cz + span; ++z) {
        auto it = buckets_.find(key(x, y, z));
        if (it == buckets_.end()) continue;
        for (std::uint32_t i : it->second) {
          const double d2 = (cloud_->position(i) - query).squaredNorm();
          if (d2 > r2) continue;
          if (d2 < best_d2 || (d2 == best_d2 && i < *best)) {
            best_d2 = d2;
            best = i;
          }
        }
      }
    }
  }
  return best;
}

}  // namespace tsm::sensors
