// Copyright 2026 The text-scene-motion Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "tsm/diffusion/diffusion.hpp"

namespace tsm::diffusion {

struct TrainingItem {
  Eigen::MatrixXd x0;  // N x frame_dim
  ConditionSet conditions;
};

struct TrainConfig {
  int epochs = 1;
  int batch_size = 16;
  double lr = 1e-4;
  double weight_decay = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double grad_clip = 1.0;  // global norm; <= 0 disables
  bool pretrain = false;   // zero the text feature of every forwarded item
  std::uint64_t seed = 0;
  int checkpoint_every = 0;  // epochs; 0 disables
  std::filesystem::path checkpoint_path;
  /// Sees the conditions exactly as they enter the denoiser.
  std::function<void(const ConditionSet&)> on_forward;
  std::function<void(int step, double loss)> on_step;
};

struct TrainResult {
  std::vector<double> loss_curve;  // batch-mean loss per optimizer step
  int steps = 0;
};

/// Adds d(weight * loss)/d(params) to the parameter gradients and returns the loss.
double loss_and_gradient(TransformerDenoiser& g, const NoiseSchedule& schedule,
                         const Eigen::MatrixXd& x0, int t, const ConditionSet& c,
                         const Eigen::MatrixXd& noise, double weight = 1.0);

/// Adam with decoupled weight decay. Decay applies to ".weight" tensors only.
class AdamW {
 public:
  AdamW(std::vector<nn::Parameter*> params, const TrainConfig& config);
  void step();
  /// Scales all gradients so their joint L2 norm is at most `max_norm`.
  /// Returns the norm before clipping.
  double clip_grad_norm(double max_norm);

 private:
  std::vector<nn::Parameter*> params_;
  std::vector<nn::Matrix> m_, v_;
  double lr_, weight_decay_, beta1_, beta2_, eps_;
  int t_ = 0;
};

/// Minibatch training on the x0-prediction objective with uniform t.
/// A non-finite loss throws NumericError; checkpoints already written remain.
TrainResult train(DiffusionModel& model, const std::vector<TrainingItem>& data,
                  const TrainConfig& config);

}  // namespace tsm::diffusion
