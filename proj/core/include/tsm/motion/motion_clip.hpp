// Copyright 2026 The text-scene-motion Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Core>
#include <filesystem>
#include <string>
#include <vector>

#include "tsm/motion/rot6d.hpp"
#include "tsm/scene/aabb.hpp"

namespace tsm::motion {

struct TrajectoryFrame {
  Eigen::Vector3d root = Eigen::Vector3d::Zero();     // m
  Eigen::Vector2d heading = Eigen::Vector2d::UnitX(); // planar unit vector

  double yaw() const;
};

using Trajectory = std::vector<TrajectoryFrame>;

/// Root trajectory plus per-frame global orientation and J local rotations.
struct MotionClip {
  Trajectory trajectory;
  std::vector<Rot6d> global_orient;            // N
  std::vector<std::vector<Rot6d>> local_pose;  // N x J
  int joints = 0;
  double fps = 30.0;

  std::size_t frames() const noexcept { return trajectory.size(); }
  /// Throws ValidationError when per-frame arrays disagree in length.
  void validate() const;
};

/// Kinematic tree: parent[0] == -1, parent[j] < j, offsets in parent frame.
struct Skeleton {
  std::vector<int> parent;
  std::vector<Eigen::Vector3d> offset;  // offset[0] unused (root)
  std::vector<std::string> names;

  int joints() const noexcept { return static_cast<int>(parent.size()); }
  /// Throws ValidationError unless the parent list is a tree rooted at 0.
  void validate() const;

  /// 22-joint pelvis-rooted body, z up, facing +x.
  static Skeleton canonical();
  /// Straight chain of `n` joints with `bone` offsets.
  static Skeleton chain(int n, const Eigen::Vector3d& bone);
};

/// Joint positions at `frame`. Root at trajectory root with orientation
/// R(global_orient) * R(local_pose[0]); children follow
/// p_j = p_parent + G_parent * offset_j, G_j = G_parent * R(local_pose[j]).
std::vector<Eigen::Vector3d> forward_kinematics(const Skeleton& skel, const MotionClip& clip,
                                                std::size_t frame);

/// Distance from the final-frame pelvis (root joint) to the box; 0 inside.
double goal_distance(const MotionClip& clip, const Skeleton& skel, const scene::Aabb& target);

/// Binary clip file: u32 header length, JSON header {N, J, fps, layout},
/// then float32 blocks r (N x 3) | heading (N x 2) | gamma (N x 6) | theta (N x J x 6).
std::string encode_clip(const MotionClip& clip);
MotionClip decode_clip(std::string_view bytes);
void save_clip(const std::filesystem::path& path, const MotionClip& clip);
MotionClip load_clip(const std::filesystem::path& path);

}  // namespace tsm::motion
