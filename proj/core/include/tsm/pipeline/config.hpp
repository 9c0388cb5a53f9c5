// Copyright 2026 The text-scene-motion Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <nlohmann/json.hpp>
#include <string_view>

#include "tsm/diffusion/denoiser.hpp"
#include "tsm/diffusion/schedule.hpp"
#include "tsm/diffusion/text_embed.hpp"
#include "tsm/diffusion/trainer.hpp"
#include "tsm/scene/scene_graph.hpp"
#include "tsm/sensors/voxel_sensor.hpp"

namespace tsm::pipeline {

/// Every configurable value with its default, grouped as
/// scene / grounding / sensors / diffusion / eval.
nlohmann::json default_config();

/// TOML, or JSON when the extension is ".json". Returns the parsed tree
/// without merging defaults.
nlohmann::json load_config_file(const std::filesystem::path& path);

/// Copies `overlay` into `base`. Unknown sections or keys and values whose
/// type differs from the default throw ValidationError.
void merge_config(nlohmann::json& base, const nlohmann::json& overlay);

/// Applies "section.key=value". The value is read as a JSON literal when it
/// parses as one, else as a string.
void apply_override(nlohmann::json& config, std::string_view assignment);

scene::RelationParams relation_params(const nlohmann::json& config);
sensors::SensorParams sensor_params(const nlohmann::json& config);
diffusion::NoiseSchedule noise_schedule(const nlohmann::json& config);
diffusion::DenoiserConfig denoiser_config(const nlohmann::json& config, diffusion::ModelMode mode,
                                          int joints);
diffusion::TrainConfig train_config(const nlohmann::json& config);
diffusion::TextEncoder text_encoder(const nlohmann::json& config);

}  // namespace tsm::pipeline
