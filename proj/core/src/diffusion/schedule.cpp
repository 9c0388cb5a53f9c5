// Copyright 2026 The text-scene-motion Authors
// SPDX-License-Identifier: Apache-2.0

#include "tsm/diffusion/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "tsm/common/error.hpp"

namespace tsm::diffusion {

std::string_view to_string(ScheduleKind k) {
  return k == ScheduleKind::Linear ? "linear" : "cosine";
}

ScheduleKind schedule_kind_from_string(std::string_view s) {
  if (s == "linear") return ScheduleKind::Linear;
  if (s == "cosine") return ScheduleKind::Cosine;
  throw ValidationError("unknown schedule kind '" + std::string(s) + "'");
}

NoiseSchedule make_schedule(int steps, ScheduleKind kind) {
  if (steps < 1) throw ValidationError("schedule needs at least one step");
  NoiseSchedule s;
  s.kind = kind;
  s.betas.resize(steps);
  if (kind == ScheduleKind::Linear) {
    constexpr double kStart = 1e-4, kEnd = 0.02;
    for (int i = 0; i < steps; ++i) {
      s.betas[i] = steps == 1 ? kStart : kStart + (kEnd - kStart) * i / (steps - 1);
    }
  } else {
    constexpr double kOffset = 0.008;
    auto f = [&](double t) {
      const double c = std::cos((t / steps + kOffset) / (1.0 + kOffset) * std::numbers::pi / 2);
      return c * c;
    };
    for (int i = 0; i < steps; ++i) {
      s.betas[i] = std::min(1.0 - f(i + 1.0) / f(i), 0.999);
    }
  }
  s.alpha_bars.resize(steps);
  double prod = 1.0;
  for (int i = 0; i < steps; ++i) {
    prod *= 1.0 - s.betas[i];
    s.alpha_bars[i] = prod;
  }
  return s;
}

Eigen::MatrixXd q_sample(const NoiseSchedule& schedule, const Eigen::MatrixXd& x0, int t,
                         const Eigen::MatrixXd& noise) {
  if (noise.rows() != x0.rows() || noise.cols() != x0.cols()) {
    throw ValidationError("noise and x0 dimensions differ");
  }
  if (t < 1 || t > schedule.steps()) throw ValidationError("diffusion step out of range");
  const double ab = schedule.alpha_bar(t);
  return std::sqrt(ab) * x0 + std::sqrt(1.0 - ab) * noise;
}

}  // namespace tsm::diffusion
