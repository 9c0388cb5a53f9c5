// Copyright 2026 The text-scene-motion Authors
// SPDX-License-Identifier: Apache-2.0

#include "tsm/pipeline/manifest.hpp"

#include "tsm/common/error.hpp"
#include "tsm/common/io.hpp"

namespace tsm::pipeline {

namespace fs = std::filesystem;

void RunManifest::add_input(const fs::path& path) {
  inputs[path.string()] = io::sha256_file(path);
}

void RunManifest::add_output(const fs::path& out_dir, const fs::path& file) {
  outputs[fs::relative(file, out_dir).generic_string()] = io::sha256_file(file);
}

nlohmann::json RunManifest::to_json() const {
  return {{"format", "tsm-run-manifest/1"},
          {"command", command},
          {"config", config},
          {"options", options},
          {"inputs", inputs},
          {"outputs", outputs},
          {"parameters", parameters}};
}

RunManifest RunManifest::from_json(const nlohmann::json& j) {
  if (j.value("format", "") != "tsm-run-manifest/1") throw ParseError("not a run manifest");
  RunManifest m;
  m.command = j.at("command").get<std::string>();
  m.config = j.at("config");
  m.options = j.value("options", nlohmann::json::object());
  m.inputs = j.at("inputs").get<std::map<std::string, std::string>>();
  m.outputs = j.at("outputs").get<std::map<std::string, std::string>>();
  m.parameters = j.value("parameters", std::map<std::string, std::string>{});
  return m;
}

void RunManifest::save(const fs::path& path) const {
  io::write_file(path, to_json().dump(2) + "\n");
}

RunManifest RunManifest::load(const fs::path& path) {
  try {
    return from_json(nlohmann::json::parse(io::read_file(path)));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

std::map<std::string, std::string> changed_inputs(const RunManifest& manifest) {
  std::map<std::string, std::string> changed;
  for (const auto& [path, hash] : manifest.inputs) {
    const std::string now = fs::exists(path) ? io::sha256_file(path) : "missing";
    if (now != hash) changed[path] = now;
  }
  return changed;
}

}  // namespace tsm::pipeline
