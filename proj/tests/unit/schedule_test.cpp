// Copyright 2026 The text-scene-motion Authors
// SPDX-License-Identifier: Apache-2.0

#include "tsm/diffusion/schedule.hpp"

#include <gtest/gtest.h>

#include <random>

#include "tsm/common/error.hpp"

namespace tsm::diffusion {
namespace {

TEST(Schedule, SingleStepLinear) {
  const auto s = make_schedule(1);
  ASSERT_EQ(s.steps(), 1);
  EXPECT_DOUBLE_EQ(s.beta(1), 1e-4);
  EXPECT_DOUBLE_EQ(s.alpha_bar(1), 0.9999);
  EXPECT_EQ(s.alpha_bar(0), 1.0);
  EXPECT_THROW(make_schedule(0), ValidationError);
}

TEST(Schedule, LinearEndpointsAndRegression) {
  const auto s = make_schedule(1000);
  EXPECT_DOUBLE_EQ(s.beta(1), 1e-4);
  EXPECT_DOUBLE_EQ(s.beta(1000), 0.02);
  // Frozen from an independent cumulative product in float64.
  EXPECT_NEAR(s.alpha_bar(1000), 4.035829765375676e-05, 1e-15);
  EXPECT_LT(s.alpha_bar(1000), 5e-5);
}

TEST(Schedule, StrictlyDecreasing) {
  for (auto kind : {ScheduleKind::Linear, ScheduleKind::Cosine}) {
    for (int steps : {1, 2, 10, 100, 1000}) {
      const auto s = make_schedule(steps, kind);
      for (int t = 1; t <= steps; ++t) {
        EXPECT_LT(s.alpha_bar(t), s.alpha_bar(t - 1));
        EXPECT_GT(s.beta(t), 0.0);
        EXPECT_LT(s.beta(t), 1.0);
      }
    }
  }
}

TEST(Schedule, TerminalNoiseLevel) {
  // The desk default (cosine, 100 steps) ends near pure noise; 100 linear steps do not.
  EXPECT_LT(make_schedule(100, ScheduleKind::Cosine).alpha_bar(100), 0.01);
  EXPECT_NEAR(make_schedule(100, ScheduleKind::Cosine).alpha_bar(100), 2.4285722793500615e-07, 1e-12);
  EXPECT_GT(make_schedule(100, ScheduleKind::Linear).alpha_bar(100), 0.3);
  EXPECT_LT(make_schedule(1000, ScheduleKind::Cosine).alpha_bar(1000), 0.01);
}

TEST(Schedule, KindStrings) {
  EXPECT_EQ(schedule_kind_from_string("cosine"), ScheduleKind::Cosine);
  EXPECT_EQ(to_string(ScheduleKind::Linear), "linear");
  EXPECT_THROW(schedule_kind_from_string("sigmoid"), ValidationError);
}

TEST(QSample, Endpoints) {
  NoiseSchedule s;
  s.betas = {0.0, 1.0};
  s.alpha_bars = {1.0, 0.0};
  const Eigen::MatrixXd x0 = Eigen::MatrixXd::Constant(2, 3, 1.5);
  const Eigen::MatrixXd noise = Eigen::MatrixXd::Constant(2, 3, -0.7);
  EXPECT_EQ(q_sample(s, x0, 1, noise), x0);
  EXPECT_EQ(q_sample(s, x0, 2, noise), noise);
}

TEST(QSample, Errors) {
  const auto s = make_schedule(10);
  EXPECT_THROW(q_sample(s, Eigen::MatrixXd::Zero(2, 2), 1, Eigen::MatrixXd::Zero(2, 3)),
               ValidationError);
  EXPECT_THROW(q_sample(s, Eigen::MatrixXd::Zero(2, 2), 0, Eigen::MatrixXd::Zero(2, 2)),
               ValidationError);
  EXPECT_THROW(q_sample(s, Eigen::MatrixXd::Zero(2, 2), 11, Eigen::MatrixXd::Zero(2, 2)),
               ValidationError);
}

TEST(QSample, Linearity) {
  const auto s = make_schedule(50, ScheduleKind::Cosine);
  std::mt19937_64 rng(1);
  std::normal_distribution<double> n;
  Eigen::MatrixXd x0(4, 5);
  for (Eigen::Index i = 0; i < x0.size(); ++i) x0.data()[i] = n(rng);
  const Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(4, 5);
  for (int t : {1, 10, 50}) {
    EXPECT_TRUE(q_sample(s, 3.0 * x0, t, zero).isApprox(3.0 * q_sample(s, x0, t, zero), 1e-14));
  }
}

TEST(QSample, MonteCarloMoments) {
  const auto s = make_schedule(1000);
  std::mt19937_64 rng(2);
  std::normal_distribution<double> n;
  Eigen::MatrixXd x0(1, 4);
  x0 << 2.0, -3.0, 5.0, 10.0;
  for (int t : {1, 100, 300}) {
    const int draws = 100000;
    Eigen::ArrayXd sum = Eigen::ArrayXd::Zero(4), sq = Eigen::ArrayXd::Zero(4);
    Eigen::MatrixXd noise(1, 4);
    for (int i = 0; i < draws; ++i) {
      for (int k = 0; k < 4; ++k) noise(0, k) = n(rng);
      const Eigen::ArrayXd v = q_sample(s, x0, t, noise).row(0).transpose().array();
      sum += v;
      sq += v * v;
    }
    const Eigen::ArrayXd mean = sum / draws;
    const Eigen::ArrayXd want = std::sqrt(s.alpha_bar(t)) * x0.row(0).transpose().array();
    for (int k = 0; k < 4; ++k) EXPECT_NEAR(mean[k], want[k], 0.01 * std::abs(want[k]));
    // Isotropic covariance: pool the per-component variances.
    const double var = (sq / draws - mean * mean).mean();
    EXPECT_NEAR(var, 1.0 - s.alpha_bar(t), 0.01 * (1.0 - s.alpha_bar(t)));
  }
}

}  // namespace
}  // namespace tsm::diffusion
