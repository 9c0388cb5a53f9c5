// Copyright 2026 The text-scene-motion Authors
// SPDX-License-Identifier: Apache-2.0

#include "tsm/diffusion/trainer.hpp"

#include <gtest/gtest.h>

#include <numeric>

#include "test_support.hpp"
#include "tsm/common/error.hpp"

namespace tsm::diffusion {
namespace {

DenoiserConfig toy_config(int text_dim = 0) {
  DenoiserConfig c;
  c.d_model = 16;
  c.layers = 1;
  c.heads = 2;
  c.ff_dim = 32;
  c.max_frames = 4;
  c.frame_dim = 3;
  c.text_dim = text_dim;
  c.env_dim = 0;
  c.target_dim = 0;
  return c;
}

std::vector<nn::Matrix> snapshot(const DiffusionModel& m) {
  std::vector<nn::Matrix> out;
  for (const auto* p : m.denoiser.parameters()) out.push_back(p->value);
  return out;
}

std::vector<TrainingItem> constant_items(int n, int text_dim = 0) {
  TrainingItem item;
  item.x0 = nn::Matrix(2, 3);
  item.x0 << 0.5, -1.0, 0.25, 0.5, -1.0, 0.25;
  item.conditions.text = Eigen::VectorXd::Ones(text_dim);
  return std::vector<TrainingItem>(n, item);
}

TEST(Train, ZeroEpochsLeavesParametersUnchanged) {
  DiffusionModel m(toy_config(), make_schedule(10), 1);
  const auto before = snapshot(m);
  TrainConfig cfg;
  cfg.epochs = 0;
  const auto r = train(m, constant_items(4), cfg);
  EXPECT_EQ(r.steps, 0);
  EXPECT_EQ(snapshot(m), before);
}

TEST(Train, ConstantTargetIsLearned) {
  DiffusionModel m(toy_config(), make_schedule(10), 2);
  TrainConfig cfg;
  cfg.epochs = 200;
  cfg.batch_size = 8;
  cfg.lr = 1e-2;
  cfg.seed = 3;
  const auto r = train(m, constant_items(8), cfg);
  ASSERT_EQ(r.steps, 200);
  const double first = r.loss_curve.front();
  const double last = std::accumulate(r.loss_curve.end() - 10, r.loss_curve.end(), 0.0) / 10.0;
  EXPECT_LT(last, 0.01 * first) << first << " -> " << last;
}

TEST(Train, SeededRunsAreIdentical) {
  TrainConfig cfg;
  cfg.epochs = 3;
  cfg.batch_size = 2;
  cfg.lr = 1e-3;
  cfg.seed = 4;
  DiffusionModel a(toy_config(), make_schedule(10), 5), b(toy_config(), make_schedule(10), 5);
  const auto ra = train(a, constant_items(5), cfg);
  const auto rb = train(b, constant_items(5), cfg);
  EXPECT_EQ(ra.loss_curve, rb.loss_curve);
  EXPECT_EQ(snapshot(a), snapshot(b));
  EXPECT_EQ(ra.steps, 9);
}

TEST(Train, PretrainZeroesText) {
  DiffusionModel m(toy_config(4), make_schedule(10), 6);
  TrainConfig cfg;
  cfg.epochs = 2;
  cfg.batch_size = 3;
  cfg.pretrain = true;
  int seen = 0;
  cfg.on_forward = [&](const ConditionSet& c) {
    ++seen;
    EXPECT_EQ(c.text, Eigen::VectorXd::Zero(4));
  };
  train(m, constant_items(6, 4), cfg);
  EXPECT_EQ(seen, 12);
  cfg.pretrain = false;
  cfg.epochs = 1;
  cfg.on_forward = [](const ConditionSet& c) { EXPECT_EQ(c.text, Eigen::VectorXd::Ones(4)); };
  train(m, constant_items(6, 4), cfg);
}

TEST(Train, NonFiniteLossKeepsLastCheckpoint) {
  testing::TempDir dir;
  DiffusionModel m(toy_config(), make_schedule(10), 7);
  TrainConfig cfg;
  cfg.epochs = 5;
  cfg.batch_size = 2;
  cfg.checkpoint_every = 1;
  cfg.checkpoint_path = dir / "ckpt.tsm";
  // Two steps per epoch; poison a weight during epoch 2.
  cfg.on_step = [&](int step, double) {
    if (step == 2) m.denoiser.parameters()[0]->value(0, 0) = std::nan("");
  };
  try {
    train(m, constant_items(4), cfg);
    FAIL();
  } catch (const NumericError& e) {
    EXPECT_NE(std::string(e.what()).find("ckpt.tsm"), std::string::npos);
  }
  const auto kept = load_checkpoint(dir / "ckpt.tsm");
  EXPECT_TRUE(kept.parameters_finite());
}

TEST(Train, RejectsMismatchedData) {
  DiffusionModel m(toy_config(), make_schedule(10), 8);
  TrainConfig cfg;
  auto items = constant_items(2);
  items[1].x0 = nn::Matrix::Zero(2, 4);
  EXPECT_THROW(train(m, items, cfg), ValidationError);
  EXPECT_THROW(train(m, {}, cfg), EmptyInputError);
}

TEST(AdamW, ClipAndDecay) {
  nn::Parameter w{"a.weight", nn::Matrix::Ones(1, 2), nn::Matrix::Zero(1, 2)};
  nn::Parameter b{"a.bias", nn::Matrix::Ones(1, 2), nn::Matrix::Zero(1, 2)};
  w.grad << 3, 0;
  b.grad << 0, 4;
  TrainConfig cfg;
  cfg.lr = 0.1;
  cfg.weight_decay = 0.5;
  AdamW opt({&w, &b}, cfg);
  EXPECT_DOUBLE_EQ(opt.clip_grad_norm(1.0), 5.0);
  EXPECT_NEAR(w.grad(0, 0), 0.6, 1e-15);
  EXPECT_NEAR(b.grad(0, 1), 0.8, 1e-15);
  opt.step();
  // First Adam step moves each coordinate with a nonzero gradient by ~lr.
  EXPECT_NEAR(w.value(0, 0), 1.0 * (1 - 0.05) - 0.1, 1e-6);
  EXPECT_NEAR(w.value(0, 1), 0.95, 1e-12);  // decay only
  EXPECT_NEAR(b.value(0, 0), 1.0, 1e-12);   // biases are not decayed
  EXPECT_NEAR(b.value(0, 1), 0.9, 1e-6);
}

}  // namespace
}  // namespace tsm::diffusion
