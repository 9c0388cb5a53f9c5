// Copyright 2026 The text-scene-motion Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <mutex>
#include <string>
#include <vector>

#include "tsm/grounding/prompt.hpp"
#include "tsm/scene/scene_graph.hpp"

namespace tsm::grounding {

/// Chat-completion backend. Calls block; one request in flight per instance.
class LlmClient {
 public:
  virtual ~LlmClient() = default;
  virtual std::string chat(const Prompt& prompt) = 0;
};

/// Replays a fixed transcript, one reply per call. Each entry may require the
/// final message of the prompt to contain a substring.
class ScriptedClient final : public LlmClient {
 public:
  struct Turn {
    std::string expect_substring;
    std::string reply;
  };

  explicit ScriptedClient(std::vector<Turn> transcript);
  /// JSON file: [{expect_substring, reply}].
  static ScriptedClient from_file(const std::filesystem::path& path);

  std::string chat(const Prompt& prompt) override;
  std::size_t calls() const noexcept { return next_; }

 private:
  std::vector<Turn> transcript_;
  std::size_t next_ = 0;
};

/// Answers both stages from a known ground truth, the way a perfect model would.
class GraphAwareClient final : public LlmClient {
 public:
  struct Truth {
    scene::ObjectId target_id = 0;
    std::string target_category;
    std::vector<std::string> anchor_categories;
  };

  explicit GraphAwareClient(Truth truth) : truth_(std::move(truth)) {}
  std::string chat(const Prompt& prompt) override;
  std::size_t calls() const noexcept { return calls_; }

 private:
  Truth truth_;
  std::size_t calls_ = 0;
};

struct HttpClientConfig {
  std::string base_url;  // e.g. https://api.openai.com/v1
  std::string api_key;
  std::string model = "gpt-3.5-turbo";
  double temperature = 0.0;
  std::chrono::milliseconds timeout{30'000};
  /// Waits before each retry after HTTP 429.
  std::vector<std::chrono::milliseconds> backoff{std::chrono::milliseconds(1000),
                                                 std::chrono::milliseconds(2000)};

  /// Reads LLM_API_BASE and LLM_API_KEY. Throws LookupError when unset.
  static HttpClientConfig from_env();
};

/// POST <base_url>/chat/completions with {model, temperature, messages}.
class HttpClient final : public LlmClient {
 public:
  explicit HttpClient(HttpClientConfig config);
  std::string chat(const Prompt& prompt) override;

  /// Request body for a prompt; exposed for wire-format tests.
  nlohmann::json request_body(const Prompt& prompt) const;

 private:
  HttpClientConfig config_;
  std::mutex in_flight_;
};

}  // namespace tsm::grounding
