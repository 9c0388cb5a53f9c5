// Copyright 2026 The text-scene-motion Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "tsm/diffusion/denoiser.hpp"
#include "tsm/diffusion/schedule.hpp"

namespace tsm::diffusion {

/// mean((x0 - G(q_sample(x0, t, noise), t, C))^2). Throws NumericError when
/// the denoiser output is not finite.
double training_loss(const Denoiser& g, const NoiseSchedule& schedule, const Eigen::MatrixXd& x0,
                     int t, const ConditionSet& c, const Eigen::MatrixXd& noise);

/// Ancestral DDPM sampling from x_T ~ N(0, I), using the x0-parameterized
/// posterior q(x_{t-1} | x_t, x0_hat). The last step returns x0_hat.
Eigen::MatrixXd ddpm_sample(const Denoiser& g, const NoiseSchedule& schedule,
                            const ConditionSet& c, int frames, std::uint64_t seed);

/// A denoiser together with the schedule it was trained under.
struct DiffusionModel {
  TransformerDenoiser denoiser;
  NoiseSchedule schedule;

  DiffusionModel(const DenoiserConfig& config, NoiseSchedule schedule, std::uint64_t seed)
      : denoiser(config, seed), schedule(std::move(schedule)) {}

  ModelMode mode() const noexcept { return denoiser.config().mode; }
  Eigen::MatrixXd sample(const ConditionSet& c, int frames, std::uint64_t seed) const {
    return ddpm_sample(denoiser, schedule, c, frames, seed);
  }
  bool parameters_finite() const;
};

/// "TSM1" | u32 header length | JSON header | float32 tensors in manifest order.
std::string encode_checkpoint(const DiffusionModel& model);
DiffusionModel decode_checkpoint(std::string_view bytes);
void save_checkpoint(const std::filesystem::path& path, const DiffusionModel& model);
DiffusionModel load_checkpoint(const std::filesystem::path& path);

}  // namespace tsm::diffusion
