// Copyright 2026 The text-scene-motion Authors
// SPDX-License-Identifier: Apache-2.0

#include "tsm/pipeline/config.hpp"

#include <toml++/toml.hpp>

#include "tsm/common/error.hpp"
#include "tsm/common/io.hpp"
#include "tsm/sensors/voxel_sensor.hpp"

namespace tsm::pipeline {

namespace {

nlohmann::json from_toml(const toml::node& node) {
  if (const auto* t = node.as_table()) {
    nlohmann::json out = nlohmann::json::object();
    for (const auto& [key, value] : *t) out[std::string(key.str())] = from_toml(value);
    return out;
  }
  if (const auto* a = node.as_array()) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& value : *a) out.push_back(from_toml(value));
    return out;
  }
  if (const auto* s = node.as_string()) return s->get();
  if (const auto* i = node.as_integer()) return i->get();
  if (const auto* f = node.as_floating_point()) return f->get();
  if (const auto* b = node.as_boolean()) return b->get();
  throw ParseError("unsupported TOML value type (dates are not configuration values)");
}

bool same_kind(const nlohmann::json& expected, const nlohmann::json& given) {
  if (expected.is_number_float()) return given.is_number();
  if (expected.is_number_integer()) return given.is_number_integer();
  if (expected.is_boolean()) return given.is_boolean();
  if (expected.is_string()) return given.is_string();
  if (expected.is_object()) return given.is_object();
  return expected.type() == given.type();
}

}  // namespace

nlohmann::json default_config() {
  const sensors::SensorParams sp;
  return {
      {"scene", {{"cloud", ""}, {"detections", ""}, {"relations", scene::to_json(scene::RelationParams{})}}},
      {"grounding",
       {{"method", "symbolic"},
        {"text", ""},
        {"llm", "http"},  // http | scripted
        {"transcript", ""},
        {"model", "gpt-3.5-turbo"},
        {"max_retries", 2},
        {"strict", false},
        {"few_shot", true}}},
      {"sensors",
       {{"search_radius", sp.search_radius},
        {"environment_side", sp.environment_side},
        {"target_inflation", sp.target_inflation},
        {"trajectory_side", sp.trajectory_side}}},
      {"diffusion",
       {{"d_model", 64},
        {"layers", 2},
        {"heads", 4},
        {"ff_dim", 128},
        {"max_frames", 120},
        {"text_dim", 64},
        {"text_backend", "hashed"},
        {"embeddings", ""},
        {"schedule", "cosine"},
        {"steps", 100},
        {"frames", 16},
        {"fps", 30.0},
        {"seed", 0},
        {"init_seed", 0},
        {"epochs", 20},
        {"pretrain_epochs", 0},
        {"batch_size", 16},
        {"lr", 1e-4},
        {"weight_decay", 0.01},
        {"grad_clip", 1.0},
        {"checkpoint_every", 0},
        {"data", ""},
        {"trajectory_checkpoint", ""},
        {"motion_checkpoint", ""}}},
      {"eval", {{"diversity_pairs", 200}, {"multimodality_pairs", 20}, {"seed", 0}}},
  };
}

nlohmann::json load_config_file(const std::filesystem::path& path) {
  const std::string text = io::read_file(path);
  if (path.extension() == ".json") {
    try {
      return nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(path.string() + ": " + e.what());
    }
  }
  try {
    return from_toml(toml::parse(text, path.string()));
  } catch (const toml::parse_error& e) {
    throw ParseError(path.string() + ": " + std::string(e.description()),
                     static_cast<std::size_t>(e.source().begin.line));
  }
}

void merge_config(nlohmann::json& base, const nlohmann::json& overlay) {
  if (!overlay.is_object()) throw ValidationError("configuration must be a table of sections");
  for (const auto& [section, values] : overlay.items()) {
    if (!base.contains(section)) throw ValidationError("unknown config section [" + section + "]");
    if (!values.is_object()) throw ValidationError("config section [" + section + "] must be a table");
    for (const auto& [key, value] : values.items()) {
      auto& slot = base[section];
      if (!slot.contains(key)) throw ValidationError("unknown config key " + section + "." + key);
      if (slot[key].is_object()) {
        if (!value.is_object()) throw ValidationError(section + "." + key + " must be a table");
        for (const auto& [k, v] : value.items()) {
          if (!slot[key].contains(k)) {
            throw ValidationError("unknown config key " + section + "." + key + "." + k);
          }
          if (!same_kind(slot[key][k], v)) {
            throw ValidationError("config key " + section + "." + key + "." + k + " has wrong type");
          }
          slot[key][k] = v;
        }
        continue;
      }
      if (!same_kind(slot[key], value)) {
        throw ValidationError("config key " + section + "." + key + " expects " +
                              slot[key].type_name() + ", got " + value.type_name());
      }
      slot[key] = value;
    }
  }
}

void apply_override(nlohmann::json& config, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos) {
    throw ValidationError("override '" + std::string(assignment) + "' is not section.key=value");
  }
  const std::string path(assignment.substr(0, eq));
  const std::string raw(assignment.substr(eq + 1));
  const auto dot = path.find('.');
  if (dot == std::string::npos || dot == 0 || dot + 1 == path.size()) {
    throw ValidationError("override '" + path + "' is not section.key");
  }
  nlohmann::json value = nlohmann::json::parse(raw, nullptr, /*allow_exceptions=*/false);
  if (value.is_discarded()) value = raw;
  // A quoted or unquoted string is accepted for string keys either way.
  const std::string section = path.substr(0, dot);
  std::string key = path.substr(dot + 1);
  nlohmann::json overlay;
  if (const auto dot2 = key.find('.'); dot2 != std::string::npos) {
    overlay[section][key.substr(0, dot2)][key.substr(dot2 + 1)] = value;
  } else {
    if (config.contains(section) && config[section].contains(key) &&
        config[section][key].is_string() && !value.is_string()) {
      value = raw;
    }
    overlay[section][key] = value;
  }
  merge_config(config, overlay);
}

scene::RelationParams relation_params(const nlohmann::json& config) {
  return scene::relation_params_from_json(config.at("scene").at("relations"));
}

sensors::SensorParams sensor_params(const nlohmann::json& config) {
  const auto& s = config.at("sensors");
  sensors::SensorParams p;
  p.search_radius = s.at("search_radius").get<double>();
  p.environment_side = s.at("environment_side").get<double>();
  p.target_inflation = s.at("target_inflation").get<double>();
  p.trajectory_side = s.at("trajectory_side").get<double>();
  if (p.search_radius <= 0 || p.environment_side <= 0 || p.target_inflation <= 0 ||
      p.trajectory_side <= 0) {
    throw ValidationError("sensor sizes must be positive");
  }
  return p;
}

diffusion::NoiseSchedule noise_schedule(const nlohmann::json& config) {
  const auto& d = config.at("diffusion");
  return diffusion::make_schedule(
      d.at("steps").get<int>(),
      diffusion::schedule_kind_from_string(d.at("schedule").get<std::string>()));
}

diffusion::DenoiserConfig denoiser_config(const nlohmann::json& config, diffusion::ModelMode mode,
                                          int joints) {
  const auto& d = config.at("diffusion");
  diffusion::DenoiserConfig c;
  c.mode = mode;
  c.d_model = d.at("d_model").get<int>();
  c.layers = d.at("layers").get<int>();
  c.heads = d.at("heads").get<int>();
  c.ff_dim = d.at("ff_dim").get<int>();
  c.max_frames = d.at("max_frames").get<int>();
  c.text_dim = d.at("text_dim").get<int>();
  c.env_dim = sensors::kVolumeFeatureSize;
  c.target_dim = sensors::kVolumeFeatureSize;
  if (mode == diffusion::ModelMode::Trajectory) {
    c.frame_dim = 5;
    c.traj_sensor_dim = 0;
  } else {
    c.frame_dim = 6 + 6 * joints;
    c.traj_sensor_dim = sensors::kCellCount;
  }
  c.validate();
  return c;
}

diffusion::TrainConfig train_config(const nlohmann::json& config) {
  const auto& d = config.at("diffusion");
  diffusion::TrainConfig t;
  t.epochs = d.at("epochs").get<int>();
  t.batch_size = d.at("batch_size").get<int>();
  t.lr = d.at("lr").get<double>();
  t.weight_decay = d.at("weight_decay").get<double>();
  t.grad_clip = d.at("grad_clip").get<double>();
  t.seed = d.at("seed").get<std::uint64_t>();
  t.checkpoint_every = d.at("checkpoint_every").get<int>();
  return t;
}

diffusion::TextEncoder text_encoder(const nlohmann::json& config) {
  const auto& d = config.at("diffusion");
  const auto backend = d.at("text_backend").get<std::string>();
  if (backend == "hashed") return diffusion::TextEncoder::hashed(d.at("text_dim").get<int>());
  if (backend == "file") {
    auto enc = diffusion::TextEncoder::from_file(d.at("embeddings").get<std::string>());
    if (enc.dim() != d.at("text_dim").get<int>()) {
      throw ValidationError("embeddings file dimension " + std::to_string(enc.dim()) +
                            " differs from diffusion.text_dim");
    }
    return enc;
  }
  throw ValidationError("unknown text backend '" + backend + "'");
}

}  // namespace tsm::pipeline
