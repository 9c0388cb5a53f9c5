// Copyright 2026 The text-scene-motion Authors
// SPDX-License-Identifier: Apache-2.0

#include "tsm/diffusion/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "tsm/common/error.hpp"

namespace tsm::diffusion {

double loss_and_gradient(TransformerDenoiser& g, const NoiseSchedule& schedule,
                         const Eigen::MatrixXd& x0, int t, const ConditionSet& c,
                         const Eigen::MatrixXd& noise, double weight) {
  nn::Tape tape;
  const nn::Var pred = g.forward(tape, q_sample(schedule, x0, t, noise), t, c);
  if (!tape.value(pred).allFinite()) {
    throw NumericError("non-finite denoiser output at step " + std::to_string(t));
  }
  const nn::Var loss = tape.mse(pred, x0);
  tape.backward(loss, weight);
  return tape.value(loss)(0, 0);
}

AdamW::AdamW(std::vector<nn::Parameter*> params, const TrainConfig& config)
    : params_(std::move(params)),
      lr_(config.lr),
      weight_decay_(config.weight_decay),
      beta1_(config.beta1),
      beta2_(config.beta2),
      eps_(config.eps) {
  for (const auto* p : params_) {
    m_.push_back(nn::Matrix::Zero(p->value.rows(), p->value.cols()));
    v_.push_back(nn::Matrix::Zero(p->value.rows(), p->value.cols()));
  }
}

double AdamW::clip_grad_norm(double max_norm) {
  double sq = 0.0;
  for (const auto* p : params_) {
    if (p->grad.size() != 0) sq += p->grad.squaredNorm();
  }
  const double norm = std::sqrt(sq);
  if (max_norm > 0.0 && norm > max_norm) {
    const double s = max_norm / norm;
    for (auto* p : params_) {
      if (p->grad.size() != 0) p->grad *= s;
    }
  }
  return norm;
}

void AdamW::step() {
  ++t_;
  const double c1 = 1.0 - std::pow(beta1_, t_);
  const double c2 = 1.0 - std::pow(beta2_, t_);
  for (std::size_t i = 0; i < params_.size(); ++i) {
    nn::Parameter& p = *params_[i];
    if (p.grad.size() == 0) continue;
    m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * p.grad;
    v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * p.grad.cwiseAbs2();
    if (weight_decay_ > 0.0 && p.name.ends_with(".weight")) p.value *= 1.0 - lr_ * weight_decay_;
    p.value.array() -= lr_ * (m_[i].array() / c1) / ((v_[i].array() / c2).sqrt() + eps_);
  }
}

TrainResult train(DiffusionModel& model, const std::vector<TrainingItem>& data,
                  const TrainConfig& config) {
  if (config.epochs < 0 || config.batch_size < 1) {
    throw ValidationError("epochs must be >= 0 and batch_size >= 1");
  }
  TrainResult result;
  if (config.epochs == 0) return result;
  if (data.empty()) throw EmptyInputError("training set is empty");
  for (const auto& item : data) {
    if (item.x0.cols() != model.denoiser.frame_dim()) {
      throw ValidationError("training item frame width does not match the model");
    }
    model.denoiser.check_conditions(item.conditions, item.x0.rows());
  }

  const auto params = model.denoiser.parameters();
  AdamW optimizer(params, config);
  std::mt19937_64 rng(config.seed);
  std::uniform_int_distribution<int> step_dist(1, model.schedule.steps());
  std::normal_distribution<double> normal;

  auto fail = [&](const std::string& what) {
    throw NumericError(what + (config.checkpoint_path.empty()
                                   ? std::string()
                                   : "; last good checkpoint kept at " + config.checkpoint_path.string()));
  };

  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t end = std::min(order.size(), start + config.batch_size);
      const double weight = 1.0 / static_cast<double>(end - start);
      for (auto* p : params) p->zero_grad();
      double batch_loss = 0.0;
      for (std::size_t k = start; k < end; ++k) {
        const TrainingItem& item = data[order[k]];
        const int t = step_dist(rng);
        Eigen::MatrixXd noise(item.x0.rows(), item.x0.cols());
        for (Eigen::Index i = 0; i < noise.size(); ++i) noise.data()[i] = normal(rng);
        ConditionSet c = item.conditions;
        if (config.pretrain) c.text.setZero();
        if (config.on_forward) config.on_forward(c);
        try {
          batch_loss += weight * loss_and_gradient(model.denoiser, model.schedule, item.x0, t, c,
                                                   noise, weight);
        } catch (const NumericError& e) {
          fail(std::string(e.what()) + " (optimizer step " + std::to_string(result.steps) + ")");
        }
      }
      if (!std::isfinite(batch_loss)) {
        fail("non-finite loss at optimizer step " + std::to_string(result.steps));
      }
      optimizer.clip_grad_norm(config.grad_clip);
      optimizer.step();
      result.loss_curve.push_back(batch_loss);
      if (config.on_step) config.on_step(result.steps, batch_loss);
      ++result.steps;
    }
    if (config.checkpoint_every > 0 && !config.checkpoint_path.empty() &&
        (epoch + 1) % config.checkpoint_every == 0) {
      if (!model.parameters_finite()) {
        fail("non-finite parameters after epoch " + std::to_string(epoch + 1));
      }
      save_checkpoint(config.checkpoint_path, model);
    }
  }
  return result;
}

}  // namespace tsm::diffusion
