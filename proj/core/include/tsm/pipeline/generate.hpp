// Copyright 2026 The text-scene-motion Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "tsm/diffusion/diffusion.hpp"
#include "tsm/diffusion/text_embed.hpp"
#include "tsm/diffusion/trainer.hpp"
#include "tsm/grounding/grounder.hpp"
#include "tsm/grounding/llm_client.hpp"
#include "tsm/motion/motion_clip.hpp"
#include "tsm/pipeline/dataset.hpp"
#include "tsm/sensors/voxel_sensor.hpp"

namespace tsm::pipeline {

/// Trajectory rows in the object frame: [r - c_o (3), heading (2)].
Eigen::MatrixXd trajectory_features(const motion::Trajectory& trajectory,
                                    const Eigen::Vector3d& origin);
/// Inverse of trajectory_features. Headings are renormalized; a zero heading becomes +x.
motion::Trajectory trajectory_from_features(const Eigen::MatrixXd& features,
                                            const Eigen::Vector3d& origin);

/// Pose rows: [gamma (6), theta_0 (6), ..., theta_{J-1} (6)].
Eigen::MatrixXd pose_features(const motion::MotionClip& clip);
/// Writes gamma and theta from `features` into `clip`, orthonormalizing each 6D block.
void apply_pose_features(motion::MotionClip& clip, const Eigen::MatrixXd& features);

/// One occupancy row per frame, sensor centered at the root and yawed to the heading.
Eigen::MatrixXd trajectory_sensor_features(const sensors::PointIndex& index,
                                           const motion::Trajectory& trajectory,
                                           const sensors::SensorParams& params);

/// {L, E, T} for a target box.
diffusion::ConditionSet scene_conditions(const scene::PointCloud& cloud,
                                         const sensors::PointIndex& index,
                                         const scene::Aabb& target, const Eigen::VectorXd& text,
                                         const sensors::SensorParams& params);

/// Items for the trajectory and motion models, using reference targets and
/// reference trajectories.
std::vector<diffusion::TrainingItem> trajectory_training_set(
    const std::vector<DatasetItem>& data, const diffusion::TextEncoder& text,
    const sensors::SensorParams& params);
std::vector<diffusion::TrainingItem> motion_training_set(const std::vector<DatasetItem>& data,
                                                         const diffusion::TextEncoder& text,
                                                         const sensors::SensorParams& params);

struct GenerationRequest {
  scene::PointCloud cloud;
  std::vector<scene::DetectedObject> objects;
  std::string utterance;
  grounding::GroundingMethod method = grounding::GroundingMethod::Symbolic;
  grounding::LlmClient* llm = nullptr;  // required for the LLM method
  grounding::RetryPolicy retry;
  grounding::PromptOptions prompts;
  scene::RelationParams relations;
  sensors::SensorParams sensors;
  int frames = 16;
  double fps = 30.0;
  std::uint64_t seed = 0;
};

struct GenerationResult {
  motion::MotionClip clip;
  grounding::GroundingResult grounding;
  nlohmann::json report;
};

/// Ground, build E and T, sample the trajectory, build O_1..O_N along it,
/// then sample gamma and theta. Grounding failures rethrow as GroundingError
/// and sampler failures as NumericError, both prefixed with the stage name.
GenerationResult generate(const GenerationRequest& request,
                          const diffusion::DiffusionModel& trajectory_model,
                          const diffusion::DiffusionModel& motion_model,
                          const diffusion::TextEncoder& text);

/// Seed of the motion stage, derived from the request seed.
std::uint64_t motion_stage_seed(std::uint64_t seed);

}  // namespace tsm::pipeline
