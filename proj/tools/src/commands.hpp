// Copyright 2026 The text-scene-motion Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <iosfwd>
#include <nlohmann/json.hpp>

#include "tsm/diffusion/denoiser.hpp"
#include "tsm/pipeline/manifest.hpp"

namespace tsm::cli {

namespace fs = std::filesystem;
using nlohmann::json;

// Each command reads the resolved config plus command-specific options.
// Commands that write files return the manifest they saved.

json build_graph(const json& config);
json ground(const json& config, const json& options);
pipeline::RunManifest sensors(const json& config, const json& options, const fs::path& out_dir);
pipeline::RunManifest synth(const json& config, const json& options, const fs::path& out_dir);
pipeline::RunManifest train(diffusion::ModelMode mode, const json& config, const fs::path& out_dir,
                            std::ostream& log);
pipeline::RunManifest generate(const json& config, const json& options, const fs::path& out_dir);
json evaluate(const json& config, const json& options);

/// Re-runs the command recorded in `manifest` into `out_dir` and returns
/// {identical, inputs_changed, outputs:{name:{expected, actual}}}.
json replay(const fs::path& manifest, const fs::path& out_dir, std::ostream& log);

/// Makes every path-valued config entry absolute, relative to the current directory.
void absolutize_paths(json& config);

}  // namespace tsm::cli
