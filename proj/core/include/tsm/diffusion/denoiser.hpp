// Copyright 2026 The text-scene-motion Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Core>
#include <array>
#include <cstdint>
#include <nlohmann/json.hpp>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "tsm/diffusion/autograd.hpp"

namespace tsm::diffusion {

enum class ModelMode { Trajectory, Motion };

std::string_view to_string(ModelMode m);
ModelMode model_mode_from_string(std::string_view s);

/// Conditioning signals: text feature, environment and target sensor
/// features, and (motion model only) one trajectory-sensor row per frame.
struct ConditionSet {
  Eigen::VectorXd text;
  Eigen::VectorXd environment;
  Eigen::VectorXd target;
  std::optional<Eigen::MatrixXd> trajectory;  // N x 512

  bool all_finite() const;
};

struct DenoiserConfig {
  ModelMode mode = ModelMode::Trajectory;
  int d_model = 64;
  int layers = 2;
  int heads = 4;
  int ff_dim = 128;
  int max_frames = 120;
  int frame_dim = 5;  // trajectory: r(3) + heading(2); motion: 6 + 6J
  int text_dim = 64;
  int env_dim = 3584;
  int target_dim = 3584;
  int traj_sensor_dim = 0;  // 512 in motion mode

  /// Throws ValidationError (d_model % heads, odd d_model, mode/dims mismatch).
  void validate() const;
  nlohmann::json to_json() const;
  static DenoiserConfig from_json(const nlohmann::json& j);
};

/// x0-prediction network G(x_t, t, C).
class Denoiser {
 public:
  virtual ~Denoiser() = default;
  virtual Eigen::MatrixXd predict(const Eigen::MatrixXd& x_t, int t,
                                  const ConditionSet& c) const = 0;
  virtual int frame_dim() const = 0;
};

/// Sinusoidal embedding of a scalar position, length `dim` (even).
Eigen::RowVectorXd sinusoidal_embedding(double position, int dim);

struct DenoiserForwardOptions {
  /// Slot assigned to the k-th condition token (timestep, text, env, target).
  /// Identity by default; exposed to check that the layout matters.
  std::array<int, 4> memory_order{0, 1, 2, 3};
};

/// Transformer decoder: frame queries attend to themselves and to a condition
/// memory of [timestep, text, environment, target] tokens, each produced by a
/// two-layer MLP and offset by a sinusoidal slot embedding. In motion mode the
/// projected trajectory-sensor row of frame i is added to query i.
class TransformerDenoiser final : public Denoiser {
 public:
  using ForwardOptions = DenoiserForwardOptions;

  TransformerDenoiser(const DenoiserConfig& config, std::uint64_t seed);

  Eigen::MatrixXd predict(const Eigen::MatrixXd& x_t, int t, const ConditionSet& c) const override;
  Eigen::MatrixXd predict(const Eigen::MatrixXd& x_t, int t, const ConditionSet& c,
                          const ForwardOptions& options) const;
  int frame_dim() const override { return config_.frame_dim; }

  /// Records the forward pass on `tape`, returning the N x frame_dim output.
  nn::Var forward(nn::Tape& tape, const Eigen::MatrixXd& x_t, int t, const ConditionSet& c,
                  const ForwardOptions& options = {});

  const DenoiserConfig& config() const noexcept { return config_; }
  /// Stable order, used by the optimizer and checkpoints.
  std::vector<nn::Parameter*> parameters();
  std::vector<const nn::Parameter*> parameters() const;
  std::size_t parameter_count() const;

  /// Throws ValidationError when `c` does not fit the config for N frames.
  void check_conditions(const ConditionSet& c, Eigen::Index frames) const;

 private:
  struct Linear {
    nn::Parameter weight;  // in x out
    nn::Parameter bias;    // 1 x out
  };
  struct Mlp {
    Linear first, second;
  };
  struct Norm {
    nn::Parameter gain, bias;
  };
  struct Attention {
    Linear q, k, v, o;
  };
  struct Layer {
    Norm self_norm, cross_norm, ff_norm;
    Attention self_attn, cross_attn;
    Linear ff_in, ff_out;
  };

  static Linear make_linear(std::mt19937_64& rng, const std::string& name, int in, int out);
  static Mlp make_mlp(std::mt19937_64& rng, const std::string& name, int in, int width);
  static Norm make_norm(const std::string& name, int width);

  template <typename Self, typename Fn>
  static void visit(Self& self, Fn&& fn);

  nn::Var linear(nn::Tape& t, Linear& l, nn::Var x);
  nn::Var mlp(nn::Tape& t, Mlp& m, nn::Var x);
  nn::Var norm(nn::Tape& t, Norm& n, nn::Var x);
  nn::Var attention(nn::Tape& t, Attention& a, nn::Var queries, nn::Var memory);

  DenoiserConfig config_;

  Linear input_;
  std::optional<Mlp> traj_sensor_;
  Mlp time_;
  std::optional<Mlp> text_, env_, target_;
  std::vector<Layer> layers_;
  Norm final_norm_;
  Linear head_;
};

}  // namespace tsm::diffusion
