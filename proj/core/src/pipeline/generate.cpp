// Copyright 2026 The text-scene-motion Authors
// SPDX-License-Identifier: Apache-2.0

#include "tsm/pipeline/generate.hpp"

#include "tsm/common/error.hpp"
#include "tsm/grounding/instruction.hpp"
#include "tsm/scene/scene_graph.hpp"

namespace tsm::pipeline {

using diffusion::ConditionSet;
using diffusion::TrainingItem;

Eigen::MatrixXd trajectory_features(const motion::Trajectory& trajectory,
                                    const Eigen::Vector3d& origin) {
  Eigen::MatrixXd x(static_cast<Eigen::Index>(trajectory.size()), 5);
  for (std::size_t i = 0; i < trajectory.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    x.block<1, 3>(r, 0) = (trajectory[i].root - origin).transpose();
    x.block<1, 2>(r, 3) = trajectory[i].heading.transpose();
  }
  return x;
}

motion::Trajectory trajectory_from_features(const Eigen::MatrixXd& features,
                                            const Eigen::Vector3d& origin) {
  if (features.cols() != 5) throw ValidationError("trajectory features need 5 columns");
  motion::Trajectory out(static_cast<std::size_t>(features.rows()));
  for (Eigen::Index i = 0; i < features.rows(); ++i) {
    auto& f = out[static_cast<std::size_t>(i)];
    f.root = origin + features.block<1, 3>(i, 0).transpose();
    const Eigen::Vector2d h = features.block<1, 2>(i, 3).transpose();
    f.heading = h.norm() > 1e-12 ? Eigen::Vector2d(h.normalized()) : Eigen::Vector2d::UnitX();
  }
  return out;
}

Eigen::MatrixXd pose_features(const motion::MotionClip& clip) {
  clip.validate();
  const auto n = static_cast<Eigen::Index>(clip.frames());
  Eigen::MatrixXd x(n, 6 + 6 * clip.joints);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto fi = static_cast<std::size_t>(i);
    for (int k = 0; k < 6; ++k) x(i, k) = clip.global_orient[fi].v[k];
    for (int j = 0; j < clip.joints; ++j) {
      for (int k = 0; k < 6; ++k) x(i, 6 + 6 * j + k) = clip.local_pose[fi][static_cast<std::size_t>(j)].v[k];
    }
  }
  return x;
}

void apply_pose_features(motion::MotionClip& clip, const Eigen::MatrixXd& features) {
  if (static_cast<std::size_t>(features.rows()) != clip.frames() ||
      features.cols() != 6 + 6 * clip.joints) {
    throw ValidationError("pose features do not match the clip layout");
  }
  auto block = [&](Eigen::Index row, Eigen::Index col) {
    motion::Rot6d r;
    for (int k = 0; k < 6; ++k) r.v[k] = features(row, col + k);
    return motion::matrix_to_rot6d(motion::rot6d_to_matrix(r));
  };
  clip.global_orient.clear();
  clip.local_pose.clear();
  for (Eigen::Index i = 0; i < features.rows(); ++i) {
    clip.global_orient.push_back(block(i, 0));
    std::vector<motion::Rot6d> pose;
    for (int j = 0; j < clip.joints; ++j) pose.push_back(block(i, 6 + 6 * j));
    clip.local_pose.push_back(std::move(pose));
  }
}

Eigen::MatrixXd trajectory_sensor_features(const sensors::PointIndex& index,
                                           const motion::Trajectory& trajectory,
                                           const sensors::SensorParams& params) {
  Eigen::MatrixXd o(static_cast<Eigen::Index>(trajectory.size()), sensors::kCellCount);
  for (std::size_t i = 0; i < trajectory.size(); ++i) {
    o.row(static_cast<Eigen::Index>(i)) =
        sensors::build_trajectory_sensor(index, trajectory[i].root, trajectory[i].yaw(), params)
            .occupancy.transpose();
  }
  return o;
}

ConditionSet scene_conditions(const scene::PointCloud& cloud, const sensors::PointIndex& index,
                              const scene::Aabb& target, const Eigen::VectorXd& text,
                              const sensors::SensorParams& params) {
  ConditionSet c;
  c.text = text;
  c.environment = sensors::build_environment_sensor(index, target.center, params).features();
  c.target = sensors::build_target_sensor(cloud, target, params).features();
  return c;
}

std::vector<TrainingItem> trajectory_training_set(const std::vector<DatasetItem>& data,
                                                  const diffusion::TextEncoder& text,
                                                  const sensors::SensorParams& params) {
  std::vector<TrainingItem> items;
  for (const auto& d : data) {
    const sensors::PointIndex index(d.cloud);
    const auto& box = d.target().box;
    items.push_back({trajectory_features(d.clip.trajectory, box.center),
                     scene_conditions(d.cloud, index, box, text.embed(d.utterance), params)});
  }
  return items;
}

std::vector<TrainingItem> motion_training_set(const std::vector<DatasetItem>& data,
                                              const diffusion::TextEncoder& text,
                                              const sensors::SensorParams& params) {
  std::vector<TrainingItem> items;
  for (const auto& d : data) {
    const sensors::PointIndex index(d.cloud);
    const auto& box = d.target().box;
    TrainingItem item{pose_features(d.clip),
                      scene_conditions(d.cloud, index, box, text.embed(d.utterance), params)};
    item.conditions.trajectory = trajectory_sensor_features(index, d.clip.trajectory, params);
    items.push_back(std::move(item));
  }
  return items;
}

std::uint64_t motion_stage_seed(std::uint64_t seed) {
  // splitmix64 finalizer
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

GenerationResult generate(const GenerationRequest& request,
                          const diffusion::DiffusionModel& trajectory_model,
                          const diffusion::DiffusionModel& motion_model,
                          const diffusion::TextEncoder& text) {
  if (request.frames < 1) throw ValidationError("frame count must be positive");
  if (trajectory_model.mode() != diffusion::ModelMode::Trajectory) {
    throw ValidationError("trajectory checkpoint holds a motion model");
  }
  if (motion_model.mode() != diffusion::ModelMode::Motion) {
    throw ValidationError("motion checkpoint holds a trajectory model");
  }
  const auto skeleton = motion::Skeleton::canonical();
  if (motion_model.denoiser.frame_dim() != 6 + 6 * skeleton.joints()) {
    throw ValidationError("motion model output does not match the skeleton");
  }
  if (request.cloud.empty()) throw EmptyInputError("scene point cloud is empty");

  GenerationResult out;
  const auto graph = scene::build_scene_graph(request.objects, request.relations);
  try {
    if (request.method == grounding::GroundingMethod::Symbolic) {
      out.grounding = grounding::ground_symbolic(graph, grounding::parse_instruction(request.utterance));
    } else {
      if (request.llm == nullptr) throw ValidationError("LLM grounding needs a client");
      out.grounding = grounding::ground_llm(graph, request.utterance, *request.llm, request.retry,
                                            request.prompts);
    }
  } catch (const GroundingError& e) {
    throw GroundingError(std::string("grounding stage: ") + e.what());
  }

  const sensors::PointIndex index(request.cloud);
  ConditionSet c = scene_conditions(request.cloud, index, out.grounding.box,
                                    text.embed(request.utterance), request.sensors);

  Eigen::MatrixXd traj;
  try {
    traj = trajectory_model.sample(c, request.frames, request.seed);
  } catch (const NumericError& e) {
    throw NumericError(std::string("trajectory stage: ") + e.what());
  }
  out.clip.fps = request.fps;
  out.clip.joints = skeleton.joints();
  out.clip.trajectory = trajectory_from_features(traj, out.grounding.center);

  c.trajectory = trajectory_sensor_features(index, out.clip.trajectory, request.sensors);
  Eigen::MatrixXd pose;
  try {
    pose = motion_model.sample(c, request.frames, motion_stage_seed(request.seed));
  } catch (const NumericError& e) {
    throw NumericError(std::string("motion stage: ") + e.what());
  }
  out.clip.global_orient.resize(out.clip.frames());
  out.clip.local_pose.resize(out.clip.frames());
  apply_pose_features(out.clip, pose);
  out.clip.validate();

  out.report = {{"utterance", request.utterance},
                {"label", request.utterance},
                {"seed", request.seed},
                {"frames", request.frames},
                {"grounding", grounding::grounding_report(request.utterance, out.grounding, std::nullopt)},
                {"target_box", box_to_json(out.grounding.box)},
                {"goal_dist", motion::goal_distance(out.clip, skeleton, out.grounding.box)}};
  return out;
}

}  // namespace tsm::pipeline
