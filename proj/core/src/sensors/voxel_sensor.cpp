// Copyright 2026 The text-scene-motion Authors
// SPDX-License-Identifier: Apache-2.0

#include "tsm/sensors/voxel_sensor.hpp"

#include <Eigen/Geometry>
#include <cmath>
#include <nlohmann/json.hpp>

#include "tsm/common/error.hpp"
#include "tsm/common/io.hpp"

namespace tsm::sensors {

double signed_distance(const PointIndex& index, const Eigen::Vector3d& query, double radius) {
  const auto nearest = index.nearest(query, radius);
  if (!nearest) return kNoSurface;
  const auto& cloud = index.cloud();
  return (query - cloud.position(*nearest)).dot(cloud.normal(*nearest));
}

double signed_distance(const scene::PointCloud& cloud, const Eigen::Vector3d& query,
                       double radius) {
  if (cloud.empty()) throw EmptyInputError("signed distance against an empty cloud");
  return signed_distance(PointIndex(cloud, radius), query, radius);
}

double occupancy(double d, double a) {
  if (d < 0.0) return 1.0;
  if (d > a) return 0.0;
  return 1.0 - d / a;
}

Eigen::Vector3d VoxelGrid::local_center(int ix, int iy, int iz) const {
  const Eigen::Vector3d idx(ix, iy, iz);
  return ((idx.array() + 0.5 - kGridDim / 2.0) * cell_edge.array()).matrix();
}

Eigen::Vector3d VoxelGrid::world_center(int ix, int iy, int iz) const {
  const Eigen::Vector3d local = local_center(ix, iy, iz);
  if (yaw == 0.0) return origin + local;
  return origin + Eigen::AngleAxisd(yaw, Eigen::Vector3d::UnitZ()) * local;
}

Eigen::VectorXd VolumeSensor::features() const {
  Eigen::VectorXd f(kVolumeFeatureSize);
  for (int i = 0; i < kCellCount; ++i) {
    f[i] = cells[i].occupancy;
    f.segment<3>(kCellCount + 3 * i) = cells[i].center;
    f.segment<3>(4 * kCellCount + 3 * i) = cells[i].normal;
  }
  return f;
}

Eigen::VectorXd VolumeSensor::occupancies() const {
  Eigen::VectorXd f(kCellCount);
  for (int i = 0; i < kCellCount; ++i) f[i] = cells[i].occupancy;
  return f;
}

namespace {

// Fills every cell. `edge_for` maps (cell center, nearest point) to the
// occupancy edge length.
template <typename EdgeFor>
VolumeSensor fill_volume(const PointIndex* index, const VoxelGrid& grid, double radius,
                         EdgeFor edge_for) {
  VolumeSensor s;
  s.grid = grid;
  for (int ix = 0; ix < kGridDim; ++ix) {
    for (int iy = 0; iy < kGridDim; ++iy) {
      for (int iz = 0; iz < kGridDim; ++iz) {
        VoxelCell& cell = s.cells[VoxelGrid::flat(ix, iy, iz)];
        cell.center = grid.local_center(ix, iy, iz);
        if (!index) continue;
        const Eigen::Vector3d q = grid.world_center(ix, iy, iz);
        const auto nearest = index->nearest(q, radius);
        if (!nearest) continue;
        const auto& cloud = index->cloud();
        const Eigen::Vector3d diff = q - cloud.position(*nearest);
        const double d = diff.dot(cloud.normal(*nearest));
        cell.occupancy = occupancy(d, edge_for(diff));
        cell.normal = cloud.normal(*nearest);
      }
    }
  }
  return s;
}

}  // namespace

EnvironmentSensor build_environment_sensor(const PointIndex& index, const Eigen::Vector3d& center,
                                           const SensorParams& params) {
  if (index.cloud().empty()) throw EmptyInputError("environment sensor needs a non-empty cloud");
  VoxelGrid grid;
  grid.origin = center;
  grid.cell_edge = Eigen::Vector3d::Constant(params.environment_side / kGridDim);
  const double a = grid.cell_edge.x();
  return fill_volume(&index, grid, params.search_radius, [a](const Eigen::Vector3d&) { return a; });
}

EnvironmentSensor build_environment_sensor(const scene::PointCloud& cloud,
                                           const Eigen::Vector3d& center,
                                           const SensorParams& params) {
  if (cloud.empty()) throw EmptyInputError("environment sensor needs a non-empty cloud");
  return build_environment_sensor(PointIndex(cloud, params.search_radius), center, params);
}

TargetSensor build_target_sensor(const scene::PointCloud& cloud, const scene::Aabb& box,
                                 const SensorParams& params) {
  if (!(box.half_extents.array() > 0.0).all()) throw ValidationError("target box is degenerate");
  const scene::Aabb region = box.inflated(params.target_inflation);
  scene::PointCloud cropped;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (region.contains(cloud.position(i))) cropped.add(cloud.position(i), cloud.normal(i));
  }
  VoxelGrid grid;
  grid.origin = region.center;
  grid.cell_edge = region.size() / kGridDim;
  const Eigen::Vector3d edge = grid.cell_edge;
  auto edge_for = [edge](const Eigen::Vector3d& diff) {
    Eigen::Index axis = 0;
    diff.cwiseAbs().maxCoeff(&axis);
    return edge[axis];
  };
  if (cropped.empty()) return fill_volume(nullptr, grid, params.search_radius, edge_for);
  const PointIndex index(cropped, params.search_radius);
  return fill_volume(&index, grid, params.search_radius, edge_for);
}

TrajectorySensor build_trajectory_sensor(const PointIndex& index, const Eigen::Vector3d& root,
                                         double heading, const SensorParams& params) {
  if (index.cloud().empty()) throw EmptyInputError("trajectory sensor needs a non-empty cloud");
  TrajectorySensor s;
  s.grid.origin = root;
  s.grid.yaw = heading;
  s.grid.cell_edge = Eigen::Vector3d::Constant(params.trajectory_side / kGridDim);
  const double a = s.grid.cell_edge.x();
  const Eigen::Matrix3d rot = Eigen::AngleAxisd(heading, Eigen::Vector3d::UnitZ()).toRotationMatrix();
  for (int ix = 0; ix < kGridDim; ++ix) {
    for (int iy = 0; iy < kGridDim; ++iy) {
      for (int iz = 0; iz < kGridDim; ++iz) {
        const Eigen::Vector3d q = root + rot * s.grid.local_center(ix, iy, iz);
        s.occupancy[VoxelGrid::flat(ix, iy, iz)] =
            occupancy(signed_distance(index, q, params.search_radius), a);
      }
    }
  }
  return s;
}

TrajectorySensor build_trajectory_sensor(const scene::PointCloud& cloud,
                                         const Eigen::Vector3d& root, double heading,
                                         const SensorParams& params) {
  if (cloud.empty()) throw EmptyInputError("trajectory sensor needs a non-empty cloud");
  return build_trajectory_sensor(PointIndex(cloud, params.search_radius), root, heading, params);
}

namespace {

void write_dump(const std::filesystem::path& stem, const std::string& kind, const VoxelGrid& grid,
                const Eigen::VectorXd& values, const std::string& layout) {
  std::string bytes;
  io::append_f32(bytes, std::span<const double>(values.data(), values.size()));
  io::write_file(std::filesystem::path(stem).replace_extension(".f32"), bytes);
  const nlohmann::json side = {
      {"kind", kind},
      {"origin", {grid.origin.x(), grid.origin.y(), grid.origin.z()}},
      {"yaw", grid.yaw},
      {"cell_edge", {grid.cell_edge.x(), grid.cell_edge.y(), grid.cell_edge.z()}},
      {"dims", {kGridDim, kGridDim, kGridDim}},
      {"count", values.size()},
      {"layout", layout}};
  io::write_file(std::filesystem::path(stem).replace_extension(".json"), side.dump(2) + "\n");
}

}  // namespace

void dump_sensor(const std::filesystem::path& stem, const std::string& kind,
                 const VolumeSensor& sensor) {
  write_dump(stem, kind, sensor.grid, sensor.features(), "o_s|c_v|n_v row-major z-fastest");
}

void dump_sensor(const std::filesystem::path& stem, const TrajectorySensor& sensor) {
  write_dump(stem, "trajectory", sensor.grid, sensor.occupancy, "o_s row-major z-fastest");
}

}  // namespace tsm::sensors
