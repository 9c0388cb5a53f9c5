// Copyright 2026 The text-scene-motion Authors
// SPDX-License-Identifier: Apache-2.0

#include "tsm/diffusion/diffusion.hpp"

#include <cmath>
#include <nlohmann/json.hpp>
#include <random>

#include "tsm/common/error.hpp"
#include "tsm/common/io.hpp"

namespace tsm::diffusion {

namespace {

constexpr std::string_view kMagic = "TSM1";

void require_finite(const Eigen::MatrixXd& m, const std::string& what) {
  if (!m.allFinite()) throw NumericError("non-finite values in " + what);
}

}  // namespace

double training_loss(const Denoiser& g, const NoiseSchedule& schedule, const Eigen::MatrixXd& x0,
                     int t, const ConditionSet& c, const Eigen::MatrixXd& noise) {
  const Eigen::MatrixXd x_t = q_sample(schedule, x0, t, noise);
  const Eigen::MatrixXd pred = g.predict(x_t, t, c);
  require_finite(pred, "denoiser output at step " + std::to_string(t));
  if (pred.rows() != x0.rows() || pred.cols() != x0.cols()) {
    throw ValidationError("denoiser output shape differs from x0");
  }
  return (x0 - pred).squaredNorm() / static_cast<double>(x0.size());
}

Eigen::MatrixXd ddpm_sample(const Denoiser& g, const NoiseSchedule& schedule,
                            const ConditionSet& c, int frames, std::uint64_t seed) {
  if (frames < 1) throw ValidationError("frame count must be positive");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  auto gaussian = [&] {
    Eigen::MatrixXd z(frames, g.frame_dim());
    for (Eigen::Index i = 0; i < z.size(); ++i) z.data()[i] = normal(rng);
    return z;
  };

  Eigen::MatrixXd x = gaussian();
  for (int t = schedule.steps(); t >= 1; --t) {
    Eigen::MatrixXd x0_hat = g.predict(x, t, c);
    require_finite(x0_hat, "sampler state at step " + std::to_string(t));
    if (t == 1) return x0_hat;
    const double ab = schedule.alpha_bar(t);
    const double ab_prev = schedule.alpha_bar(t - 1);
    const double beta = schedule.beta(t);
    const double c0 = std::sqrt(ab_prev) * beta / (1.0 - ab);
    const double ct = std::sqrt(schedule.alpha(t)) * (1.0 - ab_prev) / (1.0 - ab);
    const double var = (1.0 - ab_prev) / (1.0 - ab) * beta;
    x = c0 * x0_hat + ct * x + std::sqrt(var) * gaussian();
    require_finite(x, "sampler state at step " + std::to_string(t));
  }
  return x;
}

bool DiffusionModel::parameters_finite() const {
  for (const auto* p : denoiser.parameters()) {
    if (!p->value.allFinite()) return false;
  }
  return true;
}

std::string encode_checkpoint(const DiffusionModel& model) {
  nlohmann::json tensors = nlohmann::json::array();
  std::string blob;
  for (const auto* p : model.denoiser.parameters()) {
    tensors.push_back({{"name", p->name}, {"rows", p->value.rows()}, {"cols", p->value.cols()}});
    // Row-major so the blob matches the manifest shape read naturally.
    const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm = p->value;
    io::append_f32(blob, std::span<const double>(rm.data(), static_cast<std::size_t>(rm.size())));
  }
  const nlohmann::json header = {
      {"config", model.denoiser.config().to_json()},
      {"schedule", {{"kind", to_string(model.schedule.kind)}, {"steps", model.schedule.steps()}}},
      {"mode", to_string(model.mode())},
      {"tensors", tensors}};
  const std::string text = header.dump();
  std::string out(kMagic);
  io::append_u32(out, static_cast<std::uint32_t>(text.size()));
  out += text;
  out += blob;
  return out;
}

DiffusionModel decode_checkpoint(std::string_view bytes) {
  io::ByteReader reader(bytes);
  if (reader.remaining() < kMagic.size() || reader.take(kMagic.size()) != kMagic) {
    throw ParseError("not a checkpoint (bad magic)");
  }
  const std::uint32_t header_len = reader.u32();
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(reader.take(header_len));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("checkpoint header: ") + e.what());
  }
  try {
    const DenoiserConfig config = DenoiserConfig::from_json(header.at("config"));
    if (model_mode_from_string(header.at("mode").get<std::string>()) != config.mode) {
      throw ValidationError("checkpoint mode disagrees with its config");
    }
    const auto& sched = header.at("schedule");
    DiffusionModel model(config,
                         make_schedule(sched.at("steps").get<int>(),
                                       schedule_kind_from_string(sched.at("kind").get<std::string>())),
                         0);
    const auto params = model.denoiser.parameters();
    const auto& tensors = header.at("tensors");
    if (tensors.size() != params.size()) throw ValidationError("checkpoint tensor count mismatch");
    for (std::size_t i = 0; i < params.size(); ++i) {
      const auto& entry = tensors[i];
      nn::Parameter& p = *params[i];
      const auto rows = entry.at("rows").get<Eigen::Index>();
      const auto cols = entry.at("cols").get<Eigen::Index>();
      if (entry.at("name").get<std::string>() != p.name || rows != p.value.rows() ||
          cols != p.value.cols()) {
        throw ValidationError("checkpoint tensor '" + entry.at("name").get<std::string>() +
                              "' does not match the model layout");
      }
      const std::vector<double> values = reader.f32(static_cast<std::size_t>(rows * cols));
      p.value = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                               Eigen::RowMajor>>(values.data(), rows, cols);
    }
    if (reader.remaining() != 0) throw ParseError("trailing bytes after checkpoint tensors");
    if (!model.parameters_finite()) throw NumericError("checkpoint holds non-finite parameters");
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("checkpoint header: ") + e.what());
  }
}

void save_checkpoint(const std::filesystem::path& path, const DiffusionModel& model) {
  io::write_file(path, encode_checkpoint(model));
}

DiffusionModel load_checkpoint(const std::filesystem::path& path) {
  return decode_checkpoint(io::read_file(path));
}

}  // namespace tsm::diffusion
