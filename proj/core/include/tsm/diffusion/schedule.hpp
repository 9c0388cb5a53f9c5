// Copyright 2026 The text-scene-motion Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Core>
#include <string_view>
#include <vector>

namespace tsm::diffusion {

enum class ScheduleKind { Linear, Cosine };

std::string_view to_string(ScheduleKind k);
ScheduleKind schedule_kind_from_string(std::string_view s);

/// Variance schedule indexed by step t in [1, T].
struct NoiseSchedule {
  ScheduleKind kind = ScheduleKind::Linear;
  std::vector<double> betas;       // betas[t-1]
  std::vector<double> alpha_bars;  // cumulative products, alpha_bars[t-1]

  int steps() const noexcept { return static_cast<int>(betas.size()); }
  double beta(int t) const { return betas.at(t - 1); }
  double alpha(int t) const { return 1.0 - beta(t); }
  /// alpha_bar(0) == 1.
  double alpha_bar(int t) const { return t == 0 ? 1.0 : alpha_bars.at(t - 1); }
};

/// Linear: betas evenly spaced over [1e-4, 0.02]. Cosine: squared-cosine
/// alpha_bar with offset 0.008, betas clipped to 0.999.
NoiseSchedule make_schedule(int steps, ScheduleKind kind = ScheduleKind::Linear);

/// sqrt(alpha_bar_t) x0 + sqrt(1 - alpha_bar_t) noise.
Eigen::MatrixXd q_sample(const NoiseSchedule& schedule, const Eigen::MatrixXd& x0, int t,
                         const Eigen::MatrixXd& noise);

}  // namespace tsm::diffusion
