// Copyright 2026 The text-scene-motion Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <filesystem>
#include <istream>
#include <vector>

namespace tsm::scene {

/// Oriented points (position + unit normal), meters.
class PointCloud {
 public:
  PointCloud() = default;

  /// Appends a point. The normal is renormalized; a zero-length normal becomes +z.
  void add(const Eigen::Vector3d& position, const Eigen::Vector3d& normal);

  std::size_t size() const noexcept { return positions_.size(); }
  bool empty() const noexcept { return positions_.empty(); }
  void reserve(std::size_t n);

  /// Shifts every position by `offset`; normals are untouched.
  void translate(const Eigen::Vector3d& offset);

  const Eigen::Vector3d& position(std::size_t i) const { return positions_[i]; }
  const Eigen::Vector3d& normal(std::size_t i) const { return normals_[i]; }
  const std::vector<Eigen::Vector3d>& positions() const noexcept { return positions_; }
  const std::vector<Eigen::Vector3d>& normals() const noexcept { return normals_; }

 private:
  std::vector<Eigen::Vector3d> positions_;
  std::vector<Eigen::Vector3d> normals_;
};

/// Reads ASCII PLY (x y z nx ny nz vertex properties) or 6-column text.
/// Throws ParseError naming the offending line, EmptyInputError for no points.
PointCloud load_point_cloud(const std::filesystem::path& path);
PointCloud parse_point_cloud(std::istream& in);

/// Writes 6-column ".xyzn" text with round-trip precision.
void save_point_cloud(const std::filesystem::path& path, const PointCloud& cloud);

/// Positions shifted by -origin, normals unchanged.
PointCloud to_object_frame(const PointCloud& cloud, const Eigen::Vector3d& origin);

}  // namespace tsm::scene
