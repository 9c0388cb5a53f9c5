// Copyright 2026 The text-scene-motion Authors
// SPDX-License-Identifier: Apache-2.0

#include "tsm/diffusion/denoiser.hpp"

#include <cmath>

#include "tsm/common/error.hpp"

namespace tsm::diffusion {

using nn::Matrix;
using nn::Parameter;
using nn::Tape;
using nn::Var;

std::string_view to_string(ModelMode m) {
  return m == ModelMode::Trajectory ? "trajectory" : "motion";
}

ModelMode model_mode_from_string(std::string_view s) {
  if (s == "trajectory") return ModelMode::Trajectory;
  if (s == "motion") return ModelMode::Motion;
  throw ValidationError("unknown model mode '" + std::string(s) + "'");
}

bool ConditionSet::all_finite() const {
  return text.allFinite() && environment.allFinite() && target.allFinite() &&
         (!trajectory || trajectory->allFinite());
}

void DenoiserConfig::validate() const {
  if (d_model <= 0 || d_model % 2 != 0) throw ValidationError("d_model must be positive and even");
  if (heads <= 0 || d_model % heads != 0) throw ValidationError("d_model must be divisible by heads");
  if (layers < 0 || ff_dim <= 0 || max_frames <= 0 || frame_dim <= 0) {
    throw ValidationError("denoiser dimensions must be positive");
  }
  if (text_dim < 0 || env_dim < 0 || target_dim < 0 || traj_sensor_dim < 0) {
    throw ValidationError("condition dimensions must be non-negative");
  }
  if ((mode == ModelMode::Motion) != (traj_sensor_dim > 0)) {
    throw ValidationError("trajectory-sensor input is required in motion mode and only there");
  }
}

nlohmann::json DenoiserConfig::to_json() const {
  return {{"mode", to_string(mode)},   {"d_model", d_model},     {"layers", layers},
          {"heads", heads},            {"ff_dim", ff_dim},       {"max_frames", max_frames},
          {"frame_dim", frame_dim},    {"text_dim", text_dim},   {"env_dim", env_dim},
          {"target_dim", target_dim},  {"traj_sensor_dim", traj_sensor_dim}};
}

DenoiserConfig DenoiserConfig::from_json(const nlohmann::json& j) {
  DenoiserConfig c;
  c.mode = model_mode_from_string(j.at("mode").get<std::string>());
  c.d_model = j.at("d_model").get<int>();
  c.layers = j.at("layers").get<int>();
  c.heads = j.at("heads").get<int>();
  c.ff_dim = j.at("ff_dim").get<int>();
  c.max_frames = j.at("max_frames").get<int>();
  c.frame_dim = j.at("frame_dim").get<int>();
  c.text_dim = j.at("text_dim").get<int>();
  c.env_dim = j.at("env_dim").get<int>();
  c.target_dim = j.at("target_dim").get<int>();
  c.traj_sensor_dim = j.at("traj_sensor_dim").get<int>();
  c.validate();
  return c;
}

Eigen::RowVectorXd sinusoidal_embedding(double position, int dim) {
  Eigen::RowVectorXd e(dim);
  const int half = dim / 2;
  for (int i = 0; i < half; ++i) {
    const double freq = std::pow(10000.0, -2.0 * i / dim);
    e[2 * i] = std::sin(position * freq);
    e[2 * i + 1] = std::cos(position * freq);
  }
  return e;
}

TransformerDenoiser::Linear TransformerDenoiser::make_linear(std::mt19937_64& rng,
                                                             const std::string& name, int in,
                                                             int out) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(in));
  std::uniform_real_distribution<double> u(-bound, bound);
  Linear l;
  l.weight.name = name + ".weight";
  l.weight.value.resize(in, out);
  for (Eigen::Index i = 0; i < l.weight.value.size(); ++i) l.weight.value.data()[i] = u(rng);
  l.bias.name = name + ".bias";
  l.bias.value = Matrix::Zero(1, out);
  return l;
}

TransformerDenoiser::Mlp TransformerDenoiser::make_mlp(std::mt19937_64& rng,
                                                       const std::string& name, int in,
                                                       int width) {
  Mlp m;
  m.first = make_linear(rng, name + ".0", in, width);
  m.second = make_linear(rng, name + ".1", width, width);
  return m;
}

TransformerDenoiser::Norm TransformerDenoiser::make_norm(const std::string& name, int width) {
  Norm n;
  n.gain.name = name + ".gain";
  n.gain.value = Matrix::Ones(1, width);
  n.bias.name = name + ".bias";
  n.bias.value = Matrix::Zero(1, width);
  return n;
}

TransformerDenoiser::TransformerDenoiser(const DenoiserConfig& config, std::uint64_t seed)
    : config_(config) {
  config_.validate();
  std::mt19937_64 rng(seed);
  const int d = config_.d_model;
  input_ = make_linear(rng, "input", config_.frame_dim, d);
  if (config_.traj_sensor_dim > 0) traj_sensor_ = make_mlp(rng, "traj_sensor", config_.traj_sensor_dim, d);
  time_ = make_mlp(rng, "time", d, d);
  if (config_.text_dim > 0) text_ = make_mlp(rng, "text", config_.text_dim, d);
  if (config_.env_dim > 0) env_ = make_mlp(rng, "environment", config_.env_dim, d);
  if (config_.target_dim > 0) target_ = make_mlp(rng, "target", config_.target_dim, d);
  for (int i = 0; i < config_.layers; ++i) {
    const std::string p = "layer" + std::to_string(i);
    Layer layer;
    layer.self_norm = make_norm(p + ".self_norm", d);
    layer.self_attn = {make_linear(rng, p + ".self.q", d, d), make_linear(rng, p + ".self.k", d, d),
                       make_linear(rng, p + ".self.v", d, d), make_linear(rng, p + ".self.o", d, d)};
    layer.cross_norm = make_norm(p + ".cross_norm", d);
    layer.cross_attn = {make_linear(rng, p + ".cross.q", d, d),
                        make_linear(rng, p + ".cross.k", d, d),
                        make_linear(rng, p + ".cross.v", d, d),
                        make_linear(rng, p + ".cross.o", d, d)};
    layer.ff_norm = make_norm(p + ".ff_norm", d);
    layer.ff_in = make_linear(rng, p + ".ff.0", d, config_.ff_dim);
    layer.ff_out = make_linear(rng, p + ".ff.1", config_.ff_dim, d);
    layers_.push_back(std::move(layer));
  }
  final_norm_ = make_norm("final_norm", d);
  head_ = make_linear(rng, "head", d, config_.frame_dim);
}

template <typename Self, typename Fn>
void TransformerDenoiser::visit(Self& self, Fn&& fn) {
  auto lin = [&](auto& l) {
    fn(l.weight);
    fn(l.bias);
  };
  auto mlp = [&](auto& m) {
    lin(m.first);
    lin(m.second);
  };
  auto nrm = [&](auto& n) {
    fn(n.gain);
    fn(n.bias);
  };
  lin(self.input_);
  if (self.traj_sensor_) mlp(*self.traj_sensor_);
  mlp(self.time_);
  if (self.text_) mlp(*self.text_);
  if (self.env_) mlp(*self.env_);
  if (self.target_) mlp(*self.target_);
  for (auto& layer : self.layers_) {
    nrm(layer.self_norm);
    lin(layer.self_attn.q);
    lin(layer.self_attn.k);
    lin(layer.self_attn.v);
    lin(layer.self_attn.o);
    nrm(layer.cross_norm);
    lin(layer.cross_attn.q);
    lin(layer.cross_attn.k);
    lin(layer.cross_attn.v);
    lin(layer.cross_attn.o);
    nrm(layer.ff_norm);
    lin(layer.ff_in);
    lin(layer.ff_out);
  }
  nrm(self.final_norm_);
  lin(self.head_);
}

std::vector<Parameter*> TransformerDenoiser::parameters() {
  std::vector<Parameter*> out;
  visit(*this, [&](Parameter& p) { out.push_back(&p); });
  return out;
}

std::vector<const Parameter*> TransformerDenoiser::parameters() const {
  std::vector<const Parameter*> out;
  visit(*this, [&](const Parameter& p) { out.push_back(&p); });
  return out;
}

std::size_t TransformerDenoiser::parameter_count() const {
  std::size_t n = 0;
  for (const auto* p : parameters()) n += static_cast<std::size_t>(p->value.size());
  return n;
}

void TransformerDenoiser::check_conditions(const ConditionSet& c, Eigen::Index frames) const {
  auto check = [](const Eigen::VectorXd& v, int dim, const char* what) {
    if (dim > 0 && v.size() != dim) {
      throw ValidationError(std::string(what) + " feature has length " + std::to_string(v.size()) +
                            ", model expects " + std::to_string(dim));
    }
  };
  check(c.text, config_.text_dim, "text");
  check(c.environment, config_.env_dim, "environment");
  check(c.target, config_.target_dim, "target");
  if (config_.mode == ModelMode::Motion) {
    if (!c.trajectory) throw ValidationError("motion model needs trajectory-sensor features");
    if (c.trajectory->rows() != frames || c.trajectory->cols() != config_.traj_sensor_dim) {
      throw ValidationError("trajectory-sensor features must be frames x " +
                            std::to_string(config_.traj_sensor_dim));
    }
  } else if (c.trajectory) {
    throw ValidationError("trajectory model does not take trajectory-sensor features");
  }
}

Var TransformerDenoiser::linear(Tape& t, Linear& l, Var x) {
  return t.add_rowwise(t.matmul(x, t.param(l.weight)), t.param(l.bias));
}

Var TransformerDenoiser::mlp(Tape& t, Mlp& m, Var x) {
  return linear(t, m.second, t.silu(linear(t, m.first, x)));
}

Var TransformerDenoiser::norm(Tape& t, Norm& n, Var x) {
  return t.layer_norm(x, t.param(n.gain), t.param(n.bias));
}

Var TransformerDenoiser::attention(Tape& t, Attention& a, Var queries, Var memory) {
  const Var q = linear(t, a.q, queries);
  const Var k = linear(t, a.k, memory);
  const Var v = linear(t, a.v, memory);
  const int dh = config_.d_model / config_.heads;
  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));
  std::vector<Var> heads;
  heads.reserve(config_.heads);
  for (int h = 0; h < config_.heads; ++h) {
    const Var qh = t.cols(q, h * dh, dh);
    const Var kh = t.cols(k, h * dh, dh);
    const Var vh = t.cols(v, h * dh, dh);
    const Var weights = t.softmax_rows(t.scale(t.matmul_nt(qh, kh), scale));
    heads.push_back(t.matmul(weights, vh));
  }
  return linear(t, a.o, config_.heads == 1 ? heads.front() : t.hcat(heads));
}

Var TransformerDenoiser::forward(Tape& t, const Eigen::MatrixXd& x_t, int step,
                                 const ConditionSet& c, const ForwardOptions& options) {
  const Eigen::Index frames = x_t.rows();
  if (frames < 1 || frames > config_.max_frames) {
    throw ValidationError("sequence length " + std::to_string(frames) + " outside [1, " +
                          std::to_string(config_.max_frames) + "]");
  }
  if (x_t.cols() != config_.frame_dim) {
    throw ValidationError("frame dimension " + std::to_string(x_t.cols()) + ", model expects " +
                          std::to_string(config_.frame_dim));
  }
  check_conditions(c, frames);
  const int d = config_.d_model;

  Matrix positions(frames, d);
  for (Eigen::Index i = 0; i < frames; ++i) {
    positions.row(i) = sinusoidal_embedding(static_cast<double>(i), d);
  }
  Var x = t.add(linear(t, input_, t.constant(x_t)), t.constant(std::move(positions)));
  if (traj_sensor_) x = t.add(x, mlp(t, *traj_sensor_, t.constant(*c.trajectory)));

  // Condition memory; absent conditions leave their token out.
  std::array<Var, 4> tokens{};
  tokens[0] = mlp(t, time_, t.constant(sinusoidal_embedding(static_cast<double>(step), d)));
  if (text_) tokens[1] = mlp(t, *text_, t.constant(c.text.transpose()));
  if (env_) tokens[2] = mlp(t, *env_, t.constant(c.environment.transpose()));
  if (target_) tokens[3] = mlp(t, *target_, t.constant(c.target.transpose()));
  std::array<Var, 4> slots{};
  for (int k = 0; k < 4; ++k) slots.at(options.memory_order.at(k)) = tokens[k];
  std::vector<Var> rows;
  int slot_index = 0;
  for (Var tok : slots) {
    if (!tok.valid()) continue;
    rows.push_back(t.add(tok, t.constant(sinusoidal_embedding(slot_index++, d))));
  }
  const Var memory = t.vcat(rows);

  for (Layer& layer : layers_) {
    const Var h1 = norm(t, layer.self_norm, x);
    x = t.add(x, attention(t, layer.self_attn, h1, h1));
    x = t.add(x, attention(t, layer.cross_attn, norm(t, layer.cross_norm, x), memory));
    const Var h3 = norm(t, layer.ff_norm, x);
    x = t.add(x, linear(t, layer.ff_out, t.silu(linear(t, layer.ff_in, h3))));
  }
  return linear(t, head_, norm(t, final_norm_, x));
}

Eigen::MatrixXd TransformerDenoiser::predict(const Eigen::MatrixXd& x_t, int t,
                                             const ConditionSet& c) const {
  return predict(x_t, t, c, {});
}

Eigen::MatrixXd TransformerDenoiser::predict(const Eigen::MatrixXd& x_t, int t,
                                             const ConditionSet& c,
                                             const ForwardOptions& options) const {
  // A non-recording tape only reads parameter values.
  Tape tape(/*record=*/false);
  auto& self = const_cast<TransformerDenoiser&>(*this);
  return tape.value(self.forward(tape, x_t, t, c, options));
}

}  // namespace tsm::diffusion
