// Copyright 2026 The text-scene-motion Authors
// SPDX-License-Identifier: Apache-2.0

#include "tsm/cli/cli.hpp"

#include <CLI11.hpp>
#include <optional>
#include <ostream>

#include "commands.hpp"
#include "tsm/common/error.hpp"
#include "tsm/common/io.hpp"
#include "tsm/pipeline/config.hpp"

namespace tsm::cli {

namespace {

struct Flags {
  std::optional<std::string> config, out, scene, cloud, text, method, transcript, data,
      traj_ckpt, motion_ckpt, clip, pred, gt, manifest, name;
  std::optional<std::uint64_t> seed;
  std::optional<int> frames, epochs, count, gt_id, target_id;
};

class UsageError : public Error {
 public:
  using Error::Error;
};

std::string error_type(const std::exception& e) {
  if (dynamic_cast<const ParseError*>(&e)) return "parse_error";
  if (dynamic_cast<const ValidationError*>(&e)) return "validation_error";
  if (dynamic_cast<const EmptyInputError*>(&e)) return "empty_input";
  if (dynamic_cast<const IoError*>(&e)) return "io_error";
  if (dynamic_cast<const LookupError*>(&e)) return "lookup_error";
  if (dynamic_cast<const ProtocolError*>(&e)) return "protocol_error";
  if (dynamic_cast<const GroundingError*>(&e)) return "grounding_error";
  if (dynamic_cast<const DegenerateRotationError*>(&e)) return "degenerate_rotation";
  if (dynamic_cast<const NumericError*>(&e)) return "numeric_error";
  return "error";
}

// Pulls "--section.key=value" / "--section.key value" out of the argument list.
std::vector<std::string> split_overrides(const std::vector<std::string>& args,
                                         std::vector<std::string>& overrides) {
  std::vector<std::string> rest;
  for (std::size_t i = 0; i < args.size(); ++i) {
    const std::string& a = args[i];
    if (!a.starts_with("--")) {
      rest.push_back(a);
      continue;
    }
    const auto eq = a.find('=');
    const std::string name = a.substr(2, eq == std::string::npos ? std::string::npos : eq - 2);
    if (name.find('.') == std::string::npos) {
      rest.push_back(a);
      continue;
    }
    if (eq != std::string::npos) {
      overrides.push_back(a.substr(2));
    } else if (i + 1 < args.size()) {
      overrides.push_back(name + "=" + args[++i]);
    } else {
      throw UsageError("override --" + name + " needs a value");
    }
  }
  return rest;
}

void set(json& config, const char* section, const char* key, const json& value) {
  config.at(section).at(key) = value;
}

json resolve_config(const Flags& f, const std::vector<std::string>& overrides) {
  json config = pipeline::default_config();
  if (f.config) pipeline::merge_config(config, pipeline::load_config_file(*f.config));
  if (f.scene) set(config, "scene", "detections", *f.scene);
  if (f.cloud) set(config, "scene", "cloud", *f.cloud);
  if (f.text) set(config, "grounding", "text", *f.text);
  if (f.method) set(config, "grounding", "method", *f.method);
  if (f.transcript) {
    set(config, "grounding", "transcript", *f.transcript);
    set(config, "grounding", "llm", "scripted");
  }
  if (f.data) set(config, "diffusion", "data", *f.data);
  if (f.traj_ckpt) set(config, "diffusion", "trajectory_checkpoint", *f.traj_ckpt);
  if (f.motion_ckpt) set(config, "diffusion", "motion_checkpoint", *f.motion_ckpt);
  if (f.seed) set(config, "diffusion", "seed", *f.seed);
  if (f.frames) set(config, "diffusion", "frames", *f.frames);
  if (f.epochs) set(config, "diffusion", "epochs", *f.epochs);
  for (const auto& o : overrides) {
    try {
      pipeline::apply_override(config, o);
    } catch (const ValidationError& e) {
      throw UsageError(e.what());
    }
  }
  absolutize_paths(config);
  return config;
}

void emit(const json& j, const Flags& f, std::ostream& out) {
  if (f.out) {
    io::write_file(*f.out, j.dump(2) + "\n");
  } else {
    out << j.dump(2) << "\n";
  }
}

json manifest_summary(const pipeline::RunManifest& m) {
  return {{"command", m.command}, {"outputs", m.outputs}, {"parameters", m.parameters}};
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Text-conditioned human motion in 3D scenes", "tsm"};
  app.require_subcommand(1);
  Flags f;

  auto scene_flags = [&](CLI::App* c) {
    c->add_option("--scene", f.scene, "Detections JSON, or bundle {cloud, detections}");
    c->add_option("--cloud", f.cloud, "Point cloud (ASCII PLY or x y z nx ny nz text)");
    c->add_option("--text", f.text, "Instruction");
    c->add_option("--method", f.method, "Grounding method: symbolic | llm");
    c->add_option("--transcript", f.transcript, "Scripted LLM transcript (implies grounding.llm=scripted)");
  };
  auto config_flag = [&](CLI::App* c) { c->add_option("--config", f.config, "TOML or JSON config"); };

  auto* build_graph_cmd = app.add_subcommand("build-graph", "Spatial scene graph of a detection set");
  config_flag(build_graph_cmd);
  build_graph_cmd->add_option("--scene", f.scene, "Detections JSON");
  build_graph_cmd->add_option("--out", f.out, "Output file (default stdout)");

  auto* ground_cmd = app.add_subcommand("ground", "Resolve the target object of an instruction");
  config_flag(ground_cmd);
  scene_flags(ground_cmd);
  ground_cmd->add_option("--gt-id", f.gt_id, "Ground-truth object id for hit/center_dist");
  ground_cmd->add_option("--out", f.out, "Output file (default stdout)");

  auto* sensors_cmd = app.add_subcommand("sensors", "Dump environment, target and trajectory sensors");
  config_flag(sensors_cmd);
  scene_flags(sensors_cmd);
  sensors_cmd->add_option("--target-id", f.target_id, "Target object id (skips grounding)");
  sensors_cmd->add_option("--clip", f.clip, "Clip whose trajectory sensors to dump");
  sensors_cmd->add_option("--out", f.out, "Output directory")->required();

  auto* synth_cmd = app.add_subcommand("synth", "Write a synthetic walk/sit dataset");
  config_flag(synth_cmd);
  synth_cmd->add_option("--count", f.count, "Number of scenes (default 50)");
  synth_cmd->add_option("--seed", f.seed, "First scene seed");
  synth_cmd->add_option("--frames", f.frames, "Frames per clip");
  synth_cmd->add_option("--out", f.out, "Output directory")->required();

  CLI::App* train_cmds[2];
  for (int k = 0; k < 2; ++k) {
    auto* c = app.add_subcommand(k == 0 ? "train-traj" : "train-motion",
                                 k == 0 ? "Train the trajectory model" : "Train the motion model");
    config_flag(c);
    c->add_option("--data", f.data, "Dataset directory");
    c->add_option("--epochs", f.epochs, "Training epochs");
    c->add_option("--seed", f.seed, "Training seed");
    c->add_option("--out", f.out, "Output directory")->required();
    train_cmds[k] = c;
  }

  auto* generate_cmd = app.add_subcommand("generate", "Ground, then sample trajectory and motion");
  config_flag(generate_cmd);
  scene_flags(generate_cmd);
  generate_cmd->add_option("--traj-ckpt", f.traj_ckpt, "Trajectory model checkpoint");
  generate_cmd->add_option("--motion-ckpt", f.motion_ckpt, "Motion model checkpoint");
  generate_cmd->add_option("--seed", f.seed, "Sampling seed");
  generate_cmd->add_option("--frames", f.frames, "Frames to generate");
  generate_cmd->add_option("--name", f.name, "Output file stem (default sample)");
  generate_cmd->add_option("--out", f.out, "Output directory")->required();

  auto* eval_cmd = app.add_subcommand("eval", "Goal distance, FID, diversity, multimodality, grounding");
  config_flag(eval_cmd);
  eval_cmd->add_option("--pred", f.pred, "Directory written by generate")->required();
  eval_cmd->add_option("--gt", f.gt, "Reference dataset directory")->required();
  eval_cmd->add_option("--out", f.out, "Output file (default stdout)");

  auto* replay_cmd = app.add_subcommand("replay", "Re-run a manifest and compare output hashes");
  replay_cmd->add_option("--manifest", f.manifest, "Run manifest")->required();
  replay_cmd->add_option("--out", f.out, "Output directory")->required();

  app.footer("Any config value can be overridden with --section.key=value.");

  std::vector<std::string> overrides;
  try {
    std::vector<std::string> rest = split_overrides(args, overrides);
    std::reverse(rest.begin(), rest.end());
    app.parse(rest);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  try {
    json config;
    try {
      config = resolve_config(f, overrides);
    } catch (const UsageError& e) {
      err << "error: " << e.what() << "\n\n" << app.help();
      return kExitUsage;
    }
    if (build_graph_cmd->parsed()) {
      emit(build_graph(config), f, out);
    } else if (ground_cmd->parsed()) {
      json options = json::object();
      if (f.gt_id) options["gt_id"] = *f.gt_id;
      emit(ground(config, options), f, out);
    } else if (sensors_cmd->parsed()) {
      json options = json::object();
      if (f.target_id) options["target_id"] = *f.target_id;
      if (f.clip) options["clip"] = fs::absolute(*f.clip).lexically_normal().string();
      out << manifest_summary(cli::sensors(config, options, *f.out)).dump(2) << "\n";
    } else if (synth_cmd->parsed()) {
      const json options = {{"count", f.count.value_or(50)}};
      out << manifest_summary(cli::synth(config, options, *f.out)).dump(2) << "\n";
    } else if (train_cmds[0]->parsed() || train_cmds[1]->parsed()) {
      const auto mode = train_cmds[0]->parsed() ? diffusion::ModelMode::Trajectory
                                                : diffusion::ModelMode::Motion;
      out << manifest_summary(cli::train(mode, config, *f.out, err)).dump(2) << "\n";
    } else if (generate_cmd->parsed()) {
      const json options = {{"name", f.name.value_or("sample")}};
      out << manifest_summary(cli::generate(config, options, *f.out)).dump(2) << "\n";
    } else if (eval_cmd->parsed()) {
      emit(cli::evaluate(config, {{"pred", *f.pred}, {"gt", *f.gt}}), f, out);
    } else if (replay_cmd->parsed()) {
      const json report = replay(*f.manifest, *f.out, err);
      out << report.dump(2) << "\n";
      return report.at("identical").get<bool>() ? kExitOk : kExitFailure;
    }
    return kExitOk;
  } catch (const std::exception& e) {
    err << json{{"error", {{"type", error_type(e)}, {"message", e.what()}}}}.dump() << "\n";
    return kExitFailure;
  }
}

}  // namespace tsm::cli
