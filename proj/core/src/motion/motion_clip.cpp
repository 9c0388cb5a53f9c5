// Copyright 2026 The text-scene-motion Authors
// SPDX-License-Identifier: Apache-2.0

#include "tsm/motion/motion_clip.hpp"

#include <cmath>
#include <nlohmann/json.hpp>

#include "tsm/common/error.hpp"
#include "tsm/common/io.hpp"

namespace tsm::motion {

double TrajectoryFrame::yaw() const { return std::atan2(heading.y(), heading.x()); }

void MotionClip::validate() const {
  const std::size_t n = trajectory.size();
  if (n == 0) throw ValidationError("motion clip has no frames");
  if (global_orient.size() != n || local_pose.size() != n) {
    throw ValidationError("motion clip per-frame arrays differ in length");
  }
  for (const auto& pose : local_pose) {
    if (static_cast<int>(pose.size()) != joints) {
      throw ValidationError("motion clip pose has " + std::to_string(pose.size()) +
                            " joints, expected " + std::to_string(joints));
    }
  }
}

void Skeleton::validate() const {
  if (parent.empty() || parent[0] != -1) throw ValidationError("skeleton root must be joint 0");
  if (offset.size() != parent.size()) throw ValidationError("skeleton offset count mismatch");
  for (std::size_t j = 1; j < parent.size(); ++j) {
    if (parent[j] < 0 || parent[j] >= static_cast<int>(j)) {
      throw ValidationError("joint " + std::to_string(j) + " has an invalid parent");
    }
    if (!offset[j].allFinite()) throw ValidationError("non-finite bone offset");
  }
}

Skeleton Skeleton::canonical() {
  struct J {
    const char* name;
    int parent;
    double x, y, z;
  };
  // Approximate adult proportions; +x forward, +y left, +z up.
  static constexpr J kJoints[] = {
      {"pelvis", -1, 0, 0, 0},           {"left_hip", 0, 0, 0.06, -0.09},
      {"right_hip", 0, 0, -0.06, -0.09}, {"spine1", 0, -0.01, 0, 0.11},
      {"left_knee", 1, 0, 0, -0.38},     {"right_knee", 2, 0, 0, -0.38},
      {"spine2", 3, 0, 0, 0.13},         {"left_ankle", 4, 0, 0, -0.40},
      {"right_ankle", 5, 0, 0, -0.40},   {"spine3", 6, 0, 0, 0.05},
      {"left_foot", 7, 0.12, 0, -0.06},  {"right_foot", 8, 0.12, 0, -0.06},
      {"neck", 9, 0, 0, 0.21},           {"left_collar", 9, 0, 0.07, 0.11},
      {"right_collar", 9, 0, -0.07, 0.11}, {"head", 12, 0.02, 0, 0.09},
      {"left_shoulder", 13, 0, 0.11, 0.03}, {"right_shoulder", 14, 0, -0.11, 0.03},
      {"left_elbow", 16, 0, 0.26, 0},    {"right_elbow", 17, 0, -0.26, 0},
      {"left_wrist", 18, 0, 0.25, 0},    {"right_wrist", 19, 0, -0.25, 0},
  };
  Skeleton s;
  for (const auto& j : kJoints) {
    s.parent.push_back(j.parent);
    s.offset.emplace_back(j.x, j.y, j.z);
    s.names.emplace_back(j.name);
  }
  return s;
}

Skeleton Skeleton::chain(int n, const Eigen::Vector3d& bone) {
  if (n < 1) throw ValidationError("chain needs at least one joint");
  Skeleton s;
  for (int j = 0; j < n; ++j) {
    s.parent.push_back(j - 1);
    s.offset.push_back(j == 0 ? Eigen::Vector3d::Zero() : bone);
    s.names.push_back("joint" + std::to_string(j));
  }
  return s;
}

std::vector<Eigen::Vector3d> forward_kinematics(const Skeleton& skel, const MotionClip& clip,
                                                std::size_t frame) {
  if (frame >= clip.frames()) throw ValidationError("frame index out of range");
  if (clip.joints != skel.joints()) throw ValidationError("clip and skeleton joint counts differ");
  const auto& pose = clip.local_pose.at(frame);
  const int nj = skel.joints();
  std::vector<Eigen::Vector3d> pos(nj);
  std::vector<Eigen::Matrix3d> rot(nj);
  rot[0] = rot6d_to_matrix(clip.global_orient.at(frame)) * rot6d_to_matrix(pose[0]);
  pos[0] = clip.trajectory[frame].root;
  for (int j = 1; j < nj; ++j) {
    const int p = skel.parent[j];
    pos[j] = pos[p] + rot[p] * skel.offset[j];
    rot[j] = rot[p] * rot6d_to_matrix(pose[j]);
  }
  return pos;
}

double goal_distance(const MotionClip& clip, const Skeleton& skel, const scene::Aabb& target) {
  if (clip.frames() == 0) throw ValidationError("goal distance of an empty clip");
  const auto joints = forward_kinematics(skel, clip, clip.frames() - 1);
  return scene::distance_to_box(joints[0], target);
}

std::string encode_clip(const MotionClip& clip) {
  clip.validate();
  const std::size_t n = clip.frames();
  const nlohmann::json header = {{"N", n},
                                 {"J", clip.joints},
                                 {"fps", clip.fps},
                                 {"layout", "r|heading|gamma|theta float32le"}};
  const std::string h = header.dump();
  std::string out;
  io::append_u32(out, static_cast<std::uint32_t>(h.size()));
  out += h;
  std::vector<double> block;
  block.reserve(n * 3);
  for (const auto& f : clip.trajectory) block.insert(block.end(), f.root.data(), f.root.data() + 3);
  io::append_f32(out, block);
  block.clear();
  for (const auto& f : clip.trajectory) {
    block.insert(block.end(), f.heading.data(), f.heading.data() + 2);
  }
  io::append_f32(out, block);
  block.clear();
  for (const auto& g : clip.global_orient) block.insert(block.end(), g.v.begin(), g.v.end());
  io::append_f32(out, block);
  block.clear();
  for (const auto& pose : clip.local_pose) {
    for (const auto& r : pose) block.insert(block.end(), r.v.begin(), r.v.end());
  }
  io::append_f32(out, block);
  return out;
}

MotionClip decode_clip(std::string_view bytes) {
  io::ByteReader rd(bytes);
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(rd.take(rd.u32()));
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("motion clip header: ") + e.what());
  }
  MotionClip clip;
  const auto n = header.at("N").get<std::size_t>();
  clip.joints = header.at("J").get<int>();
  clip.fps = header.value("fps", 30.0);
  const auto j = static_cast<std::size_t>(clip.joints);
  const auto r = rd.f32(n * 3);
  const auto h = rd.f32(n * 2);
  const auto g = rd.f32(n * 6);
  const auto t = rd.f32(n * j * 6);
  if (rd.remaining() != 0) throw ParseError("trailing bytes after motion clip");
  clip.trajectory.resize(n);
  clip.global_orient.resize(n);
  clip.local_pose.assign(n, std::vector<Rot6d>(j));
  for (std::size_t i = 0; i < n; ++i) {
    clip.trajectory[i].root = {r[3 * i], r[3 * i + 1], r[3 * i + 2]};
    clip.trajectory[i].heading = {h[2 * i], h[2 * i + 1]};
    for (int k = 0; k < 6; ++k) clip.global_orient[i].v[k] = g[6 * i + k];
    for (std::size_t q = 0; q < j; ++q) {
      for (int k = 0; k < 6; ++k) clip.local_pose[i][q].v[k] = t[(i * j + q) * 6 + k];
    }
  }
  return clip;
}

void save_clip(const std::filesystem::path& path, const MotionClip& clip) {
  io::write_file(path, encode_clip(clip));
}

MotionClip load_clip(const std::filesystem::path& path) { return decode_clip(io::read_file(path)); }

}  // namespace tsm::motion
