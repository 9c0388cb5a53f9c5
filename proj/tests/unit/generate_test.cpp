// Copyright 2026 The text-scene-motion Authors
// SPDX-License-Identifier: Apache-2.0

#include "tsm/pipeline/generate.hpp"

#include <gtest/gtest.h>

#include "test_support.hpp"
#include "tsm/common/error.hpp"
#include "tsm/pipeline/config.hpp"
#include "tsm/pipeline/synthetic.hpp"

namespace tsm::pipeline {
namespace {

using diffusion::DiffusionModel;
using diffusion::ModelMode;

nlohmann::json small_config() {
  auto c = default_config();
  for (const char* o : {"diffusion.d_model=16", "diffusion.layers=1", "diffusion.heads=2",
                        "diffusion.ff_dim=32", "diffusion.steps=5", "diffusion.text_dim=16"}) {
    apply_override(c, o);
  }
  return c;
}

struct Models {
  nlohmann::json config = small_config();
  DiffusionModel traj{denoiser_config(config, ModelMode::Trajectory, 22), noise_schedule(config), 1};
  DiffusionModel motion{denoiser_config(config, ModelMode::Motion, 22), noise_schedule(config), 2};
  diffusion::TextEncoder text = text_encoder(config);
};

GenerationRequest request_for(const WalkScene& s, std::uint64_t seed) {
  GenerationRequest r;
  r.cloud = s.cloud;
  r.objects = s.objects;
  r.utterance = s.utterance;
  r.frames = 6;
  r.seed = seed;
  return r;
}

TEST(Generate, ShapesReportAndDeterminism) {
  const Models m;
  const auto scene = make_walk_scene(3);
  const auto a = generate(request_for(scene, 11), m.traj, m.motion, m.text);
  EXPECT_NO_THROW(a.clip.validate());
  EXPECT_EQ(a.clip.frames(), 6u);
  EXPECT_EQ(a.clip.joints, 22);
  EXPECT_EQ(a.grounding.object_id, scene.target_id);
  EXPECT_EQ(a.report["frames"], 6);
  EXPECT_EQ(a.report["utterance"], scene.utterance);
  EXPECT_GE(a.report["goal_dist"].get<double>(), 0.0);
  for (const auto& f : a.clip.trajectory) EXPECT_NEAR(f.heading.norm(), 1.0, 1e-9);

  const auto b = generate(request_for(scene, 11), m.traj, m.motion, m.text);
  EXPECT_EQ(motion::encode_clip(a.clip), motion::encode_clip(b.clip));
  const auto c = generate(request_for(scene, 12), m.traj, m.motion, m.text);
  EXPECT_NE(motion::encode_clip(a.clip), motion::encode_clip(c.clip));
}

TEST(Generate, RejectsMismatchedModelsAndInputs) {
  const Models m;
  const auto scene = make_walk_scene(4);
  auto req = request_for(scene, 0);
  EXPECT_THROW(generate(req, m.motion, m.motion, m.text), ValidationError);
  EXPECT_THROW(generate(req, m.traj, m.traj, m.text), ValidationError);
  req.frames = 0;
  EXPECT_THROW(generate(req, m.traj, m.motion, m.text), ValidationError);
  req.frames = 4;
  req.method = grounding::GroundingMethod::Llm;
  EXPECT_THROW(generate(req, m.traj, m.motion, m.text), ValidationError);
  req.method = grounding::GroundingMethod::Symbolic;
  req.cloud = {};
  EXPECT_THROW(generate(req, m.traj, m.motion, m.text), EmptyInputError);
}

TEST(Generate, GroundingFailureNamesStage) {
  const Models m;
  auto req = request_for(make_walk_scene(5), 0);
  req.utterance = "walk to the piano";
  try {
    generate(req, m.traj, m.motion, m.text);
    FAIL();
  } catch (const GroundingError& e) {
    EXPECT_EQ(std::string(e.what()).rfind("grounding stage: ", 0), 0u) << e.what();
  }
}

TEST(Features, TrajectoryRoundTrip) {
  std::mt19937_64 rng(6);
  std::normal_distribution<double> n;
  motion::Trajectory t(9);
  for (auto& f : t) {
    f.root = Eigen::Vector3d(n(rng), n(rng), n(rng));
    f.heading = Eigen::Vector2d(n(rng), n(rng)).normalized();
  }
  const Eigen::Vector3d origin(1, -2, 0.5);
  const auto x = trajectory_features(t, origin);
  ASSERT_EQ(x.rows(), 9);
  ASSERT_EQ(x.cols(), 5);
  EXPECT_TRUE(x.row(0).head<3>().transpose().isApprox(t[0].root - origin));
  const auto back = trajectory_from_features(x, origin);
  for (std::size_t i = 0; i < t.size(); ++i) {
    EXPECT_TRUE(back[i].root.isApprox(t[i].root, 1e-12));
    EXPECT_TRUE(back[i].heading.isApprox(t[i].heading, 1e-12));
  }
  Eigen::MatrixXd z = Eigen::MatrixXd::Zero(1, 5);
  z(0, 3) = 0.0;
  EXPECT_EQ(trajectory_from_features(z, origin)[0].heading, Eigen::Vector2d::UnitX());
  z(0, 3) = 3.0;
  z(0, 4) = 4.0;
  EXPECT_TRUE(trajectory_from_features(z, origin)[0].heading.isApprox(Eigen::Vector2d(0.6, 0.8)));
  EXPECT_THROW(trajectory_from_features(Eigen::MatrixXd::Zero(2, 4), origin), ValidationError);
}

TEST(Features, PoseRoundTripAndOrthonormalization) {
  const auto scene = make_walk_scene(7);
  const auto clip = make_walk_clip(scene, 5, 7);
  const auto x = pose_features(clip);
  ASSERT_EQ(x.rows(), 5);
  ASSERT_EQ(x.cols(), 6 + 6 * 22);
  auto copy = clip;
  apply_pose_features(copy, x);
  for (std::size_t i = 0; i < 5; ++i) {
    for (int k = 0; k < 6; ++k) {
      EXPECT_NEAR(copy.global_orient[i].v[k], clip.global_orient[i].v[k], 1e-12);
    }
  }
  // Scaled blocks come back orthonormal.
  apply_pose_features(copy, 3.0 * x);
  const auto r = motion::rot6d_to_matrix(copy.local_pose[2][4]);
  EXPECT_TRUE((r.transpose() * r).isApprox(Eigen::Matrix3d::Identity(), 1e-12));
  EXPECT_NEAR(copy.local_pose[2][4].first().norm(), 1.0, 1e-12);
  EXPECT_THROW(apply_pose_features(copy, x.leftCols(12)), ValidationError);
}

TEST(Generate, MotionSeedDiffersFromRequestSeed) {
  EXPECT_NE(motion_stage_seed(0), 0u);
  EXPECT_NE(motion_stage_seed(1), motion_stage_seed(2));
  EXPECT_EQ(motion_stage_seed(5), motion_stage_seed(5));
}

}  // namespace
}  // namespace tsm::pipeline
