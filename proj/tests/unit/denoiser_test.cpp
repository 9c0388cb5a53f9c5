// Copyright 2026 The text-scene-motion Authors
// SPDX-License-Identifier: Apache-2.0

#include "tsm/diffusion/denoiser.hpp"

#include <gtest/gtest.h>

#include <set>

#include "test_support.hpp"
#include "tsm/common/error.hpp"

namespace tsm::diffusion {
namespace {

DenoiserConfig small_config() {
  DenoiserConfig c;
  c.d_model = 16;
  c.layers = 2;
  c.heads = 4;
  c.ff_dim = 32;
  c.max_frames = 60;
  c.frame_dim = 5;
  c.text_dim = 8;
  c.env_dim = 12;
  c.target_dim = 10;
  return c;
}

ConditionSet conditions(std::mt19937_64& rng, const DenoiserConfig& cfg, Eigen::Index frames) {
  ConditionSet c;
  c.text = testing::gaussian_matrix(rng, cfg.text_dim, 1);
  c.environment = testing::gaussian_matrix(rng, cfg.env_dim, 1);
  c.target = testing::gaussian_matrix(rng, cfg.target_dim, 1);
  if (cfg.mode == ModelMode::Motion) c.trajectory = testing::gaussian_matrix(rng, frames, cfg.traj_sensor_dim);
  return c;
}

TEST(Sinusoid, Values) {
  const auto e = sinusoidal_embedding(3.0, 8);
  ASSERT_EQ(e.size(), 8);
  EXPECT_NEAR(e[0], std::sin(3.0), 1e-15);
  EXPECT_NEAR(e[1], std::cos(3.0), 1e-15);
  EXPECT_NEAR(e[2], std::sin(3.0 * std::pow(10000.0, -2.0 / 8)), 1e-15);
  const auto z = sinusoidal_embedding(0.0, 8);
  for (int i = 0; i < 4; ++i) {
    EXPECT_EQ(z[2 * i], 0.0);
    EXPECT_EQ(z[2 * i + 1], 1.0);
  }
}

TEST(DenoiserConfig, Validation) {
  auto c = small_config();
  EXPECT_NO_THROW(c.validate());
  c.heads = 3;
  EXPECT_THROW(c.validate(), ValidationError);
  c = small_config();
  c.traj_sensor_dim = 512;
  EXPECT_THROW(c.validate(), ValidationError);
  c.mode = ModelMode::Motion;
  EXPECT_NO_THROW(c.validate());
  EXPECT_EQ(DenoiserConfig::from_json(c.to_json()).to_json(), c.to_json());
  EXPECT_EQ(model_mode_from_string("motion"), ModelMode::Motion);
  EXPECT_THROW(model_mode_from_string("pose"), ValidationError);
}

TEST(Denoiser, ShapeAcrossLengths) {
  const auto cfg = small_config();
  const TransformerDenoiser g(cfg, 1);
  std::mt19937_64 rng(2);
  for (int n : {1, 7, 60}) {
    const auto c = conditions(rng, cfg, n);
    const auto out = g.predict(testing::gaussian_matrix(rng, n, 5), 10, c);
    EXPECT_EQ(out.rows(), n);
    EXPECT_EQ(out.cols(), 5);
    EXPECT_TRUE(out.allFinite());
  }
  const auto c = conditions(rng, cfg, 61);
  EXPECT_THROW(g.predict(Eigen::MatrixXd::Zero(61, 5), 1, c), ValidationError);
  EXPECT_THROW(g.predict(Eigen::MatrixXd::Zero(0, 5), 1, c), ValidationError);
  EXPECT_THROW(g.predict(Eigen::MatrixXd::Zero(3, 4), 1, c), ValidationError);
}

TEST(Denoiser, DeterministicAndSeeded) {
  const auto cfg = small_config();
  std::mt19937_64 rng(3);
  const auto c = conditions(rng, cfg, 4);
  const auto x = testing::gaussian_matrix(rng, 4, 5);
  const TransformerDenoiser a(cfg, 7), b(cfg, 7), other(cfg, 8);
  EXPECT_EQ(a.predict(x, 5, c), a.predict(x, 5, c));
  EXPECT_EQ(a.predict(x, 5, c), b.predict(x, 5, c));
  EXPECT_NE(a.predict(x, 5, c), other.predict(x, 5, c));
}

TEST(Denoiser, MemoryLayoutIsOrderSensitive) {
  const auto cfg = small_config();
  std::mt19937_64 rng(4);
  const auto c = conditions(rng, cfg, 3);
  const auto x = testing::gaussian_matrix(rng, 3, 5);
  const TransformerDenoiser g(cfg, 1);
  DenoiserForwardOptions swapped;
  swapped.memory_order = {0, 2, 1, 3};
  EXPECT_EQ(g.predict(x, 5, c, {}), g.predict(x, 5, c));
  EXPECT_GT((g.predict(x, 5, c, swapped) - g.predict(x, 5, c)).norm(), 1e-6);
}

TEST(Denoiser, ConditionsAffectOutput) {
  const auto cfg = small_config();
  std::mt19937_64 rng(5);
  auto c = conditions(rng, cfg, 3);
  const auto x = testing::gaussian_matrix(rng, 3, 5);
  const TransformerDenoiser g(cfg, 1);
  const auto base = g.predict(x, 5, c);
  EXPECT_GT((g.predict(x, 6, c) - base).norm(), 0.0);
  c.text.setZero();
  EXPECT_GT((g.predict(x, 5, c) - base).norm(), 0.0);
}

TEST(Denoiser, ConditionChecks) {
  const auto cfg = small_config();
  const TransformerDenoiser g(cfg, 1);
  std::mt19937_64 rng(6);
  auto c = conditions(rng, cfg, 2);
  c.text.resize(3);
  EXPECT_THROW(g.check_conditions(c, 2), ValidationError);
  c = conditions(rng, cfg, 2);
  c.trajectory = Eigen::MatrixXd::Zero(2, 512);
  EXPECT_THROW(g.check_conditions(c, 2), ValidationError);
}

TEST(Denoiser, MotionModeUsesPerFrameSensor) {
  auto cfg = small_config();
  cfg.mode = ModelMode::Motion;
  cfg.traj_sensor_dim = 6;
  cfg.frame_dim = 12;
  const TransformerDenoiser g(cfg, 1);
  std::mt19937_64 rng(7);
  auto c = conditions(rng, cfg, 4);
  const auto x = testing::gaussian_matrix(rng, 4, 12);
  const auto base = g.predict(x, 3, c);
  c.trajectory->row(2).setZero();
  EXPECT_GT((g.predict(x, 3, c) - base).norm(), 0.0);
  c.trajectory.reset();
  EXPECT_THROW(g.predict(x, 3, c), ValidationError);
}

TEST(Denoiser, ParametersAreNamedAndStable) {
  const auto cfg = small_config();
  TransformerDenoiser g(cfg, 1);
  const auto params = g.parameters();
  std::set<std::string> names;
  std::size_t count = 0;
  for (const auto* p : params) {
    names.insert(p->name);
    count += static_cast<std::size_t>(p->value.size());
  }
  EXPECT_EQ(names.size(), params.size());
  EXPECT_EQ(count, g.parameter_count());
  EXPECT_EQ(params.front()->name, "input.weight");
  EXPECT_EQ(params.back()->name, "head.bias");
  TransformerDenoiser h(cfg, 1);
  const auto again = h.parameters();
  for (std::size_t i = 0; i < params.size(); ++i) EXPECT_EQ(params[i]->name, again[i]->name);
}

TEST(Denoiser, TapeForwardMatchesPredict) {
  const auto cfg = small_config();
  TransformerDenoiser g(cfg, 1);
  std::mt19937_64 rng(8);
  const auto c = conditions(rng, cfg, 5);
  const auto x = testing::gaussian_matrix(rng, 5, 5);
  nn::Tape tape;
  EXPECT_EQ(tape.value(g.forward(tape, x, 9, c)), g.predict(x, 9, c));
}

}  // namespace
}  // namespace tsm::diffusion
