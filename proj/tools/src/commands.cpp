// Copyright 2026 The text-scene-motion Authors
// SPDX-License-Identifier: Apache-2.0

#include "commands.hpp"

#include <iostream>
#include <memory>

#include "tsm/common/error.hpp"
#include "tsm/common/io.hpp"
#include "tsm/diffusion/diffusion.hpp"
#include "tsm/diffusion/trainer.hpp"
#include "tsm/grounding/grounder.hpp"
#include "tsm/grounding/instruction.hpp"
#include "tsm/grounding/llm_client.hpp"
#include "tsm/pipeline/config.hpp"
#include "tsm/pipeline/dataset.hpp"
#include "tsm/pipeline/evaluate.hpp"
#include "tsm/pipeline/generate.hpp"
#include "tsm/scene/scene_graph.hpp"
#include "tsm/sensors/voxel_sensor.hpp"

namespace tsm::cli {

namespace {

using diffusion::ModelMode;

constexpr std::array<std::pair<const char*, const char*>, 7> kPathKeys = {{
    {"scene", "cloud"},
    {"scene", "detections"},
    {"grounding", "transcript"},
    {"diffusion", "embeddings"},
    {"diffusion", "data"},
    {"diffusion", "trajectory_checkpoint"},
    {"diffusion", "motion_checkpoint"},
}};

std::string str(const json& config, const char* section, const char* key) {
  return config.at(section).at(key).get<std::string>();
}

json parse_json_file(const fs::path& path) {
  try {
    return json::parse(io::read_file(path));
  } catch (const json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

struct LoadedScene {
  scene::PointCloud cloud;
  std::vector<scene::DetectedObject> objects;
  std::vector<fs::path> files;
};

// scene.detections is either a detections array or a bundle
// {"cloud": "<path relative to the bundle>", "detections": [...]}.
LoadedScene load_scene(const json& config, bool need_cloud) {
  LoadedScene s;
  const fs::path det_path = str(config, "scene", "detections");
  if (det_path.empty()) throw ValidationError("scene.detections (or --scene) is required");
  const json j = parse_json_file(det_path);
  s.files.push_back(det_path);
  fs::path cloud_path = str(config, "scene", "cloud");
  if (j.is_object()) {
    s.objects = scene::parse_detections(j.at("detections"));
    if (cloud_path.empty() && j.contains("cloud")) {
      cloud_path = det_path.parent_path() / j.at("cloud").get<std::string>();
    }
  } else {
    s.objects = scene::parse_detections(j);
  }
  if (need_cloud) {
    if (cloud_path.empty()) throw ValidationError("scene.cloud (or a bundle with \"cloud\") is required");
    s.cloud = scene::load_point_cloud(cloud_path);
    s.files.push_back(cloud_path);
  }
  return s;
}

std::unique_ptr<grounding::LlmClient> make_llm(const json& config) {
  const std::string kind = str(config, "grounding", "llm");
  if (kind == "scripted") {
    const std::string transcript = str(config, "grounding", "transcript");
    if (transcript.empty()) throw ValidationError("grounding.transcript is required for scripted LLM");
    return std::make_unique<grounding::ScriptedClient>(grounding::ScriptedClient::from_file(transcript));
  }
  if (kind == "http") {
    auto c = grounding::HttpClientConfig::from_env();
    c.model = str(config, "grounding", "model");
    return std::make_unique<grounding::HttpClient>(c);
  }
  throw ValidationError("grounding.llm must be 'http' or 'scripted', got '" + kind + "'");
}

grounding::GroundingMethod grounding_method(const json& config) {
  const std::string m = str(config, "grounding", "method");
  if (m == "symbolic") return grounding::GroundingMethod::Symbolic;
  if (m == "llm") return grounding::GroundingMethod::Llm;
  throw ValidationError("grounding.method must be 'symbolic' or 'llm', got '" + m + "'");
}

grounding::RetryPolicy retry_policy(const json& config) {
  grounding::RetryPolicy p;
  p.max_retries = config.at("grounding").at("max_retries").get<int>();
  p.on_failure = config.at("grounding").at("strict").get<bool>()
                     ? grounding::RetryPolicy::OnFailure::Strict
                     : grounding::RetryPolicy::OnFailure::FallbackSymbolic;
  return p;
}

grounding::PromptOptions prompt_options(const json& config) {
  grounding::PromptOptions o;
  o.few_shot = config.at("grounding").at("few_shot").get<bool>();
  return o;
}

grounding::GroundingResult ground_scene(const json& config,
                                        const std::vector<scene::DetectedObject>& objects) {
  const std::string text = str(config, "grounding", "text");
  if (text.empty()) throw ValidationError("grounding.text (or --text) is required");
  const auto graph = scene::build_scene_graph(objects, pipeline::relation_params(config));
  if (grounding_method(config) == grounding::GroundingMethod::Symbolic) {
    return grounding::ground_symbolic(graph, grounding::parse_instruction(text));
  }
  auto llm = make_llm(config);
  return grounding::ground_llm(graph, text, *llm, retry_policy(config), prompt_options(config));
}

constexpr int kSkeletonJoints = 22;

diffusion::DiffusionModel load_or_init(const json& config, ModelMode mode,
                                       pipeline::RunManifest& manifest) {
  const char* key = mode == ModelMode::Trajectory ? "trajectory_checkpoint" : "motion_checkpoint";
  const std::string role(diffusion::to_string(mode));
  const std::string path = str(config, "diffusion", key);
  if (!path.empty()) {
    manifest.add_input(path);
    auto model = diffusion::load_checkpoint(path);
    manifest.parameters[role] = io::sha256_hex(diffusion::encode_checkpoint(model));
    return model;
  }
  // Untrained: seeded initialization, distinct per stage.
  const auto seed = config.at("diffusion").at("init_seed").get<std::uint64_t>() +
                    (mode == ModelMode::Motion ? 1 : 0);
  diffusion::DiffusionModel model(pipeline::denoiser_config(config, mode, kSkeletonJoints),
                                  pipeline::noise_schedule(config), seed);
  manifest.parameters[role] = io::sha256_hex(diffusion::encode_checkpoint(model));
  return model;
}

}  // namespace

void absolutize_paths(json& config) {
  for (const auto& [section, key] : kPathKeys) {
    auto& v = config.at(section).at(key);
    const std::string p = v.get<std::string>();
    if (!p.empty()) v = fs::absolute(p).lexically_normal().string();
  }
}

json build_graph(const json& config) {
  const LoadedScene s = load_scene(config, false);
  return scene::to_json(scene::build_scene_graph(s.objects, pipeline::relation_params(config)));
}

json ground(const json& config, const json& options) {
  const LoadedScene s = load_scene(config, false);
  const auto result = ground_scene(config, s.objects);
  std::optional<scene::Aabb> gt;
  if (options.contains("gt_id")) {
    const auto id = options.at("gt_id").get<scene::ObjectId>();
    const auto it = std::find_if(s.objects.begin(), s.objects.end(),
                                 [&](const auto& o) { return o.id == id; });
    if (it == s.objects.end()) throw LookupError("ground-truth id " + std::to_string(id) + " not in scene");
    gt = it->box;
  }
  return grounding::grounding_report(str(config, "grounding", "text"), result, gt);
}

pipeline::RunManifest sensors(const json& config, const json& options, const fs::path& out_dir) {
  pipeline::RunManifest m;
  m.command = "sensors";
  m.config = config;
  m.options = options;
  const LoadedScene s = load_scene(config, true);
  for (const auto& f : s.files) m.add_input(f);

  scene::Aabb box;
  if (options.contains("target_id")) {
    const auto id = options.at("target_id").get<scene::ObjectId>();
    const auto it = std::find_if(s.objects.begin(), s.objects.end(),
                                 [&](const auto& o) { return o.id == id; });
    if (it == s.objects.end()) throw LookupError("object id " + std::to_string(id) + " not in scene");
    box = it->box;
  } else {
    box = ground_scene(config, s.objects).box;
  }
  const auto params = pipeline::sensor_params(config);
  const sensors::PointIndex index(s.cloud);
  fs::create_directories(out_dir);
  sensors::dump_sensor(out_dir / "environment", "environment",
                       sensors::build_environment_sensor(index, box.center, params));
  sensors::dump_sensor(out_dir / "target", "target", sensors::build_target_sensor(s.cloud, box, params));
  for (const char* name : {"environment", "target"}) {
    m.add_output(out_dir, out_dir / (std::string(name) + ".f32"));
    m.add_output(out_dir, out_dir / (std::string(name) + ".json"));
  }
  if (options.contains("clip")) {
    const fs::path clip_path = options.at("clip").get<std::string>();
    m.add_input(clip_path);
    const auto clip = motion::load_clip(clip_path);
    for (std::size_t i = 0; i < clip.frames(); ++i) {
      char stem[32];
      std::snprintf(stem, sizeof stem, "trajectory_%04zu", i);
      const auto& f = clip.trajectory[i];
      sensors::dump_sensor(out_dir / stem,
                           sensors::build_trajectory_sensor(index, f.root, f.yaw(), params));
      m.add_output(out_dir, out_dir / (std::string(stem) + ".f32"));
      m.add_output(out_dir, out_dir / (std::string(stem) + ".json"));
    }
  }
  m.save(out_dir / "sensors.manifest.json");
  return m;
}

pipeline::RunManifest synth(const json& config, const json& options, const fs::path& out_dir) {
  pipeline::RunManifest m;
  m.command = "synth";
  m.config = config;
  m.options = options;
  const auto& d = config.at("diffusion");
  const auto items = pipeline::synthesize_dataset(options.at("count").get<int>(),
                                                  d.at("seed").get<std::uint64_t>(),
                                                  d.at("frames").get<int>(), d.at("fps").get<double>());
  for (const auto& item : items) {
    for (const auto& f : pipeline::write_dataset_item(out_dir, item)) m.add_output(out_dir, f);
  }
  m.save(out_dir / "synth.manifest.json");
  return m;
}

pipeline::RunManifest train(ModelMode mode, const json& config, const fs::path& out_dir,
                            std::ostream& log) {
  pipeline::RunManifest m;
  m.command = mode == ModelMode::Trajectory ? "train-traj" : "train-motion";
  m.config = config;
  const std::string data_dir = str(config, "diffusion", "data");
  if (data_dir.empty()) throw ValidationError("diffusion.data (or --data) is required");
  const auto data = pipeline::load_dataset(data_dir);
  for (const auto& item : data) {
    m.add_input(fs::path(data_dir) / (item.stem + ".json"));
  }
  const auto text = pipeline::text_encoder(config);
  const auto sp = pipeline::sensor_params(config);
  const auto items = mode == ModelMode::Trajectory ? pipeline::trajectory_training_set(data, text, sp)
                                                   : pipeline::motion_training_set(data, text, sp);

  const std::string role(diffusion::to_string(mode));
  const auto seed = config.at("diffusion").at("init_seed").get<std::uint64_t>() +
                    (mode == ModelMode::Motion ? 1 : 0);
  diffusion::DiffusionModel model(pipeline::denoiser_config(config, mode, kSkeletonJoints),
                                  pipeline::noise_schedule(config), seed);
  fs::create_directories(out_dir);
  const fs::path ckpt = out_dir / (role + ".tsm");

  auto tc = pipeline::train_config(config);
  tc.checkpoint_path = ckpt;
  json curve = json::array();
  const int pretrain_epochs = config.at("diffusion").at("pretrain_epochs").get<int>();
  if (pretrain_epochs > 0) {
    auto pc = tc;
    pc.epochs = pretrain_epochs;
    pc.pretrain = true;
    for (double l : diffusion::train(model, items, pc).loss_curve) curve.push_back({{"phase", "pretrain"}, {"loss", l}});
    tc.seed += 1;
  }
  const auto result = diffusion::train(model, items, tc);
  for (double l : result.loss_curve) curve.push_back({{"phase", "train"}, {"loss", l}});
  diffusion::save_checkpoint(ckpt, model);
  const fs::path curve_path = out_dir / (role + ".loss.json");
  io::write_file(curve_path, curve.dump() + "\n");
  if (!result.loss_curve.empty()) {
    log << m.command << ": " << result.steps << " steps, loss " << result.loss_curve.front()
        << " -> " << result.loss_curve.back() << "\n";
  }
  m.add_output(out_dir, ckpt);
  m.add_output(out_dir, curve_path);
  m.parameters[role] = io::sha256_file(ckpt);
  m.save(out_dir / (role + ".manifest.json"));
  return m;
}

pipeline::RunManifest generate(const json& config, const json& options, const fs::path& out_dir) {
  pipeline::RunManifest m;
  m.command = "generate";
  m.config = config;
  m.options = options;
  const std::string name = options.value("name", "sample");

  LoadedScene s = load_scene(config, true);
  for (const auto& f : s.files) m.add_input(f);
  const auto traj_model = load_or_init(config, ModelMode::Trajectory, m);
  const auto motion_model = load_or_init(config, ModelMode::Motion, m);
  const auto text = pipeline::text_encoder(config);

  pipeline::GenerationRequest req;
  req.cloud = std::move(s.cloud);
  req.objects = std::move(s.objects);
  req.utterance = str(config, "grounding", "text");
  if (req.utterance.empty()) throw ValidationError("grounding.text (or --text) is required");
  req.method = grounding_method(config);
  std::unique_ptr<grounding::LlmClient> llm;
  if (req.method == grounding::GroundingMethod::Llm) {
    llm = make_llm(config);
    req.llm = llm.get();
    if (str(config, "grounding", "llm") == "scripted") m.add_input(str(config, "grounding", "transcript"));
  }
  req.retry = retry_policy(config);
  req.prompts = prompt_options(config);
  req.relations = pipeline::relation_params(config);
  req.sensors = pipeline::sensor_params(config);
  req.frames = config.at("diffusion").at("frames").get<int>();
  req.fps = config.at("diffusion").at("fps").get<double>();
  req.seed = config.at("diffusion").at("seed").get<std::uint64_t>();

  const auto result = pipeline::generate(req, traj_model, motion_model, text);
  fs::create_directories(out_dir);
  const fs::path clip_path = out_dir / (name + ".clip");
  const fs::path report_path = out_dir / (name + ".json");
  motion::save_clip(clip_path, result.clip);
  io::write_file(report_path, result.report.dump(2) + "\n");
  m.add_output(out_dir, clip_path);
  m.add_output(out_dir, report_path);
  m.save(out_dir / (name + ".manifest.json"));
  return m;
}

json evaluate(const json& config, const json& options) {
  const auto& e = config.at("eval");
  pipeline::EvalOptions o;
  o.diversity_pairs = e.at("diversity_pairs").get<int>();
  o.multimodality_pairs = e.at("multimodality_pairs").get<int>();
  o.seed = e.at("seed").get<std::uint64_t>();
  const auto pred = pipeline::load_predictions(options.at("pred").get<std::string>());
  const auto gt = pipeline::load_references(options.at("gt").get<std::string>());
  return pipeline::evaluate(pred, gt, o);
}

json replay(const fs::path& manifest_path, const fs::path& out_dir, std::ostream& log) {
  const auto recorded = pipeline::RunManifest::load(manifest_path);
  const auto changed = pipeline::changed_inputs(recorded);
  json report = {{"command", recorded.command}, {"inputs_changed", changed}, {"outputs", json::object()}};
  if (!changed.empty()) {
    report["identical"] = false;
    return report;
  }
  pipeline::RunManifest fresh;
  if (recorded.command == "generate") {
    fresh = cli::generate(recorded.config, recorded.options, out_dir);
  } else if (recorded.command == "synth") {
    fresh = cli::synth(recorded.config, recorded.options, out_dir);
  } else if (recorded.command == "train-traj") {
    fresh = cli::train(ModelMode::Trajectory, recorded.config, out_dir, log);
  } else if (recorded.command == "train-motion") {
    fresh = cli::train(ModelMode::Motion, recorded.config, out_dir, log);
  } else if (recorded.command == "sensors") {
    fresh = cli::sensors(recorded.config, recorded.options, out_dir);
  } else {
    throw ValidationError("cannot replay command '" + recorded.command + "'");
  }
  bool identical = fresh.outputs.size() == recorded.outputs.size();
  for (const auto& [name, hash] : recorded.outputs) {
    const auto it = fresh.outputs.find(name);
    const std::string actual = it == fresh.outputs.end() ? "missing" : it->second;
    identical = identical && actual == hash;
    report["outputs"][name] = {{"expected", hash}, {"actual", actual}};
  }
  report["identical"] = identical;
  return report;
}

}  // namespace tsm::cli
