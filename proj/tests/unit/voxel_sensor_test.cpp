// Copyright 2026 The text-scene-motion Authors
// SPDX-License-Identifier: Apache-2.0

#include "tsm/sensors/voxel_sensor.hpp"

#include <gtest/gtest.h>

#include <cstring>
#include <nlohmann/json.hpp>
#include <numbers>
#include <random>

#include "test_support.hpp"
#include "tsm/common/error.hpp"
#include "tsm/common/io.hpp"

namespace tsm::sensors {
namespace {

scene::PointCloud plane(double half, double spacing, double z = 0.0) {
  scene::PointCloud c;
  for (double x = -half; x <= half + 1e-9; x += spacing) {
    for (double y = -half; y <= half + 1e-9; y += spacing) c.add({x, y, z}, {0, 0, 1});
  }
  return c;
}

scene::PointCloud random_scene(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> u(-2.5, 2.5);
  std::normal_distribution<double> g;
  scene::PointCloud c;
  for (int i = 0; i < n; ++i) c.add({u(rng), u(rng), u(rng) * 0.5 + 1.0}, {g(rng), g(rng), g(rng)});
  return c;
}

TEST(SignedDistance, SinglePoint) {
  scene::PointCloud c;
  c.add({0, 0, 0}, {0, 0, 1});
  EXPECT_DOUBLE_EQ(signed_distance(c, {0, 0, 0.2}, 1.0), 0.2);
  EXPECT_DOUBLE_EQ(signed_distance(c, {0, 0, -0.2}, 1.0), -0.2);
  EXPECT_EQ(signed_distance(c, {0, 0, 5}, 1.0), kNoSurface);
  EXPECT_THROW(signed_distance(scene::PointCloud{}, {0, 0, 0}, 1.0), EmptyInputError);
}

TEST(SignedDistance, PlaneMatchesHeight) {
  const auto c = plane(2.0, 0.05);
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> xy(-1.5, 1.5), z(-0.8, 0.8);
  for (int i = 0; i < 100; ++i) {
    const Eigen::Vector3d q(xy(rng), xy(rng), z(rng));
    EXPECT_NEAR(signed_distance(c, q, 1.0), q.z(), 1e-6);
  }
}

TEST(Occupancy, Branches) {
  EXPECT_EQ(occupancy(-0.1, 0.5), 1.0);
  EXPECT_EQ(occupancy(0.25, 0.5), 0.5);
  EXPECT_EQ(occupancy(0.6, 0.5), 0.0);
  EXPECT_EQ(occupancy(kNoSurface, 0.5), 0.0);
  EXPECT_EQ(occupancy(0.0, 0.5), 1.0);
  EXPECT_EQ(occupancy(0.5, 0.5), 0.0);
}

TEST(Occupancy, BoundedMonotoneContinuous) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> d(-1.0, 1.5), a(0.05, 1.0);
  for (int i = 0; i < 10000; ++i) {
    const double edge = a(rng);
    double d1 = d(rng), d2 = d(rng);
    if (d1 > d2) std::swap(d1, d2);
    const double o1 = occupancy(d1, edge), o2 = occupancy(d2, edge);
    EXPECT_GE(o1, o2);
    EXPECT_GE(o1, 0.0);
    EXPECT_LE(o1, 1.0);
  }
  const double eps = 1e-9;
  EXPECT_LE(occupancy(0.5 - eps, 0.5), eps / 0.5 + 1e-15);
  EXPECT_NEAR(occupancy(eps, 0.5), 1.0, eps / 0.5 + 1e-15);
}

TEST(VoxelGrid, FlatIndexAndCenters) {
  EXPECT_EQ(VoxelGrid::flat(0, 0, 1), 1);
  EXPECT_EQ(VoxelGrid::flat(0, 1, 0), 8);
  EXPECT_EQ(VoxelGrid::flat(1, 0, 0), 64);
  VoxelGrid g;
  EXPECT_TRUE(g.local_center(0, 0, 0).isApprox(Eigen::Vector3d::Constant(-1.75)));
  g.yaw = std::numbers::pi / 2;
  g.origin = {1, 0, 0};
  EXPECT_TRUE(g.world_center(7, 0, 4).isApprox(Eigen::Vector3d(1 + 1.75, 1.75, 0.25)));
}

TEST(EnvironmentSensor, FloorPlane) {
  const auto c = plane(3.0, 0.1);
  const auto e = build_environment_sensor(c, {0, 0, 2});
  EXPECT_EQ(e.grid.cell_edge, Eigen::Vector3d::Constant(0.5));
  EXPECT_EQ(e.features().size(), kVolumeFeatureSize);
  for (int ix = 0; ix < kGridDim; ++ix) {
    for (int iy = 0; iy < kGridDim; ++iy) {
      for (int iz = 0; iz < kGridDim; ++iz) {
        const auto& cell = e.cells[VoxelGrid::flat(ix, iy, iz)];
        EXPECT_NEAR(cell.occupancy, iz == 0 ? 0.5 : 0.0, 1e-12);
        EXPECT_NEAR(cell.normal.norm(), 1.0, 1e-4);
      }
    }
  }
}

TEST(EnvironmentSensor, FarAwayIsEmpty) {
  scene::PointCloud c;
  c.add({100, 0, 0}, {0, 0, 1});
  const auto e = build_environment_sensor(c, {0, 0, 0});
  EXPECT_EQ(e.occupancies(), Eigen::VectorXd::Zero(kCellCount));
  EXPECT_THROW(build_environment_sensor(scene::PointCloud{}, {0, 0, 0}), EmptyInputError);
}

TEST(EnvironmentSensor, TranslationInvariance) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-50.0, 50.0);
  const auto c = random_scene(rng, 3000);
  const Eigen::Vector3d center(0.3, -0.2, 1.0);
  const auto base = build_environment_sensor(c, center).features();
  for (int i = 0; i < 10; ++i) {
    const Eigen::Vector3d v(u(rng), u(rng), u(rng));
    auto moved = c;
    moved.translate(v);
    const auto f = build_environment_sensor(moved, center + v).features();
    EXPECT_LE((f - base).cwiseAbs().maxCoeff(), 1e-6);
  }
}

TEST(TargetSensor, CellEdgeAndEmptyCrop) {
  scene::PointCloud c;
  c.add({10, 10, 10}, {0, 0, 1});
  const auto box = scene::Aabb::from_center_size({0, 0, 0.5}, {1, 1, 1});
  const auto t = build_target_sensor(c, box);
  EXPECT_TRUE(t.grid.cell_edge.isApprox(Eigen::Vector3d::Constant(1.1 / 8)));
  EXPECT_EQ(t.occupancies(), Eigen::VectorXd::Zero(kCellCount));
}

TEST(TargetSensor, MiddlePlaneDominates) {
  const auto c = plane(0.6, 0.02, 0.5);
  const auto box = scene::Aabb::from_center_size({0, 0, 0.5}, {1, 1, 1});
  const auto t = build_target_sensor(c, box);
  auto layer_mean = [&](int iz) {
    double s = 0;
    for (int ix = 0; ix < kGridDim; ++ix) {
      for (int iy = 0; iy < kGridDim; ++iy) s += t.cells[VoxelGrid::flat(ix, iy, iz)].occupancy;
    }
    return s / 64.0;
  };
  // The plane sits between layers 3 and 4; layer 4 is just above it.
  for (int far : {6, 7}) EXPECT_GE(layer_mean(4), layer_mean(far));
  EXPECT_EQ(layer_mean(3), 1.0);
  EXPECT_GT(layer_mean(4), 0.0);
}

TEST(TrajectorySensor, HeadingPeriodicity) {
  std::mt19937_64 rng(5);
  const auto c = random_scene(rng, 2000);
  const Eigen::Vector3d root(0.2, 0.1, 1.0);
  const auto a = build_trajectory_sensor(c, root, 0.0);
  const auto b = build_trajectory_sensor(c, root, 2 * std::numbers::pi);
  EXPECT_LE((a.occupancy - b.occupancy).cwiseAbs().maxCoeff(), 1e-6);
  EXPECT_GT(a.occupancy.sum(), 0.0);
}

TEST(TrajectorySensor, EgoInvariance) {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> yaw(-std::numbers::pi, std::numbers::pi);
  const auto c = random_scene(rng, 2000);
  const Eigen::Vector3d root(0.4, -0.3, 1.0);
  const double heading = 0.7;
  const auto base = build_trajectory_sensor(c, root, heading).occupancy;
  for (int i = 0; i < 10; ++i) {
    const double w = yaw(rng);
    const Eigen::Matrix3d r = Eigen::AngleAxisd(w, Eigen::Vector3d::UnitZ()).toRotationMatrix();
    scene::PointCloud rotated;
    for (std::size_t k = 0; k < c.size(); ++k) {
      rotated.add(root + r * (c.position(k) - root), r * c.normal(k));
    }
    const auto o = build_trajectory_sensor(rotated, root, heading + w).occupancy;
    EXPECT_LE((o - base).cwiseAbs().maxCoeff(), 1e-5);
  }
}

TEST(TrajectorySensor, EmptySurroundings) {
  scene::PointCloud c;
  c.add({50, 50, 0}, {0, 0, 1});
  EXPECT_EQ(build_trajectory_sensor(c, {0, 0, 0}, 1.0).occupancy, Eigen::VectorXd::Zero(kCellCount));
}

TEST(SensorDump, WritesFloatsAndSidecar) {
  testing::TempDir dir;
  const auto c = plane(3.0, 0.1);
  const auto e = build_environment_sensor(c, {0, 0, 2});
  dump_sensor(dir / "env", "environment", e);
  const std::string bytes = io::read_file(dir / "env.f32");
  EXPECT_EQ(bytes.size(), kVolumeFeatureSize * 4u);
  float first = 0;
  std::memcpy(&first, bytes.data(), 4);
  EXPECT_EQ(first, static_cast<float>(e.cells[0].occupancy));
  const auto side = nlohmann::json::parse(io::read_file(dir / "env.json"));
  EXPECT_EQ(side["kind"], "environment");
  EXPECT_EQ(side["layout"], "o_s|c_v|n_v row-major z-fastest");
  EXPECT_EQ(side["cell_edge"][0], 0.5);

  dump_sensor(dir / "traj", build_trajectory_sensor(c, {0, 0, 0.5}, 0.3));
  EXPECT_EQ(io::read_file(dir / "traj.f32").size(), kCellCount * 4u);
}

}  // namespace
}  // namespace tsm::sensors
