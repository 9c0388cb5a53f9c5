// Copyright 2026 The text-scene-motion Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <map>
#include <nlohmann/json.hpp>
#include <string>

namespace tsm::pipeline {

inline constexpr const char* kManifestName = "manifest.json";

/// What a run read and wrote, with SHA-256 of every file. `config` is the
/// fully resolved configuration, so re-running it reproduces the outputs.
struct RunManifest {
  std::string command;
  nlohmann::json config;
  nlohmann::json options = nlohmann::json::object();  // command flags outside the config
  std::map<std::string, std::string> inputs;   // path -> sha256
  std::map<std::string, std::string> outputs;  // name relative to the output dir -> sha256
  std::map<std::string, std::string> parameters;  // checkpoint role -> parameter hash

  void add_input(const std::filesystem::path& path);
  void add_output(const std::filesystem::path& out_dir, const std::filesystem::path& file);

  nlohmann::json to_json() const;
  static RunManifest from_json(const nlohmann::json& j);
  void save(const std::filesystem::path& path) const;
  static RunManifest load(const std::filesystem::path& path);
};

/// Input files whose current hash differs from the manifest.
std::map<std::string, std::string> changed_inputs(const RunManifest& manifest);

}  // namespace tsm::pipeline
