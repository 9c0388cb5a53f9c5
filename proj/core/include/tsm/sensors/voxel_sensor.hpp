// Copyright 2026 The text-scene-motion Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Core>
#include <array>
#include <filesystem>
#include <limits>
#include <string>
#include <vector>

#include "tsm/scene/aabb.hpp"
#include "tsm/scene/point_cloud.hpp"
#include "tsm/sensors/point_index.hpp"

namespace tsm::sensors {

inline constexpr int kGridDim = 8;
inline constexpr int kCellCount = kGridDim * kGridDim * kGridDim;  // 512
inline constexpr int kCellFeatures = 7;                             // o_s, c_v, n_v
inline constexpr int kVolumeFeatureSize = kCellCount * kCellFeatures;  // 3584

/// Marks "no surface within the search radius".
inline constexpr double kNoSurface = std::numeric_limits<double>::infinity();

struct SensorParams {
  double search_radius = 1.0;       // m, nearest-point radius for d_s
  double environment_side = 4.0;    // m
  double target_inflation = 1.1;    // box scale before cropping
  double trajectory_side = 2.0;     // m
};

/// (q - p*) . n* for the nearest point p* within `radius`, else kNoSurface.
double signed_distance(const PointIndex& index, const Eigen::Vector3d& query, double radius);
double signed_distance(const scene::PointCloud& cloud, const Eigen::Vector3d& query,
                       double radius);

/// Piecewise occupancy: 1 behind the surface, 0 beyond one cell edge, linear between.
double occupancy(double signed_dist, double cell_edge);

/// 8x8x8 grid centered at `origin`, rotated by `yaw` about +z.
struct VoxelGrid {
  Eigen::Vector3d origin = Eigen::Vector3d::Zero();
  double yaw = 0.0;
  Eigen::Vector3d cell_edge = Eigen::Vector3d::Constant(0.5);

  /// Flat cell index, z fastest: (ix * 8 + iy) * 8 + iz.
  static int flat(int ix, int iy, int iz) { return (ix * kGridDim + iy) * kGridDim + iz; }
  /// Cell center in the sensor frame (relative to origin, before yaw).
  Eigen::Vector3d local_center(int ix, int iy, int iz) const;
  Eigen::Vector3d world_center(int ix, int iy, int iz) const;
};

struct VoxelCell {
  double occupancy = 0.0;
  Eigen::Vector3d center = Eigen::Vector3d::Zero();  // sensor frame
  Eigen::Vector3d normal = Eigen::Vector3d::UnitZ();
};

/// Occupancy, centers and normals of every cell (environment and target sensors).
struct VolumeSensor {
  VoxelGrid grid;
  std::array<VoxelCell, kCellCount> cells;

  /// Block layout: 512 occupancies, then 512 x 3 centers, then 512 x 3 normals.
  Eigen::VectorXd features() const;
  Eigen::VectorXd occupancies() const;
};

using EnvironmentSensor = VolumeSensor;
using TargetSensor = VolumeSensor;

/// Occupancy-only ego-centric grid.
struct TrajectorySensor {
  VoxelGrid grid;
  Eigen::VectorXd occupancy = Eigen::VectorXd::Zero(kCellCount);
};

/// 4 m cube of 0.5 m cells around `center`, world-axis aligned.
EnvironmentSensor build_environment_sensor(const PointIndex& index, const Eigen::Vector3d& center,
                                           const SensorParams& params = {});
EnvironmentSensor build_environment_sensor(const scene::PointCloud& cloud,
                                           const Eigen::Vector3d& center,
                                           const SensorParams& params = {});

/// Grid fitted to the inflated box over the points inside it. The occupancy
/// edge length per cell is the cell edge along the dominant axis of q - p*.
TargetSensor build_target_sensor(const scene::PointCloud& cloud, const scene::Aabb& box,
                                 const SensorParams& params = {});

/// 2 m cube of 0.25 m cells centered at `root`, facing `heading` (radians about +z).
TrajectorySensor build_trajectory_sensor(const PointIndex& index, const Eigen::Vector3d& root,
                                         double heading, const SensorParams& params = {});
TrajectorySensor build_trajectory_sensor(const scene::PointCloud& cloud,
                                         const Eigen::Vector3d& root, double heading,
                                         const SensorParams& params = {});

/// Writes `<stem>.f32` (little-endian float32) and `<stem>.json` sidecar.
void dump_sensor(const std::filesystem::path& stem, const std::string& kind,
                 const VolumeSensor& sensor);
void dump_sensor(const std::filesystem::path& stem, const TrajectorySensor& sensor);

}  // namespace tsm::sensors
