// Copyright 2026 The text-scene-motion Authors
// SPDX-License-Identifier: Apache-2.0

#include "tsm/grounding/llm_client.hpp"

#include <cstdlib>
#include <thread>

#include "tsm/common/error.hpp"
#include "tsm/common/io.hpp"

// After Eigen: OpenSSL's headers define macros that collide with Eigen internals.
#include <httplib.h>

namespace tsm::grounding {

ScriptedClient::ScriptedClient(std::vector<Turn> transcript) : transcript_(std::move(transcript)) {}

ScriptedClient ScriptedClient::from_file(const std::filesystem::path& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(io::read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  if (!j.is_array()) throw ValidationError("transcript must be a JSON array");
  std::vector<Turn> turns;
  for (const auto& item : j) {
    turns.push_back({item.value("expect_substring", std::string()),
                     item.at("reply").get<std::string>()});
  }
  return ScriptedClient(std::move(turns));
}

std::string ScriptedClient::chat(const Prompt& prompt) {
  if (next_ >= transcript_.size()) {
    throw ProtocolError("scripted transcript exhausted after " + std::to_string(next_) +
                        " replies");
  }
  const Turn& turn = transcript_[next_];
  if (!turn.expect_substring.empty() &&
      prompt.last().content.find(turn.expect_substring) == std::string::npos) {
    throw ValidationError("scripted turn " + std::to_string(next_) +
                          ": prompt does not contain '" + turn.expect_substring + "'");
  }
  ++next_;
  return turn.reply;
}

std::string GraphAwareClient::chat(const Prompt& prompt) {
  ++calls_;
  if (prompt.last().content.starts_with(kStage2Header)) {
    return "answer: " + truth_.target_category + " " + std::to_string(truth_.target_id);
  }
  return render_stage1_response({truth_.target_category, truth_.anchor_categories});
}

HttpClientConfig HttpClientConfig::from_env() {
  HttpClientConfig c;
  const char* base = std::getenv("LLM_API_BASE");
  const char* key = std::getenv("LLM_API_KEY");
  if (!base || !*base) throw LookupError("LLM_API_BASE is not set");
  if (!key || !*key) throw LookupError("LLM_API_KEY is not set");
  c.base_url = base;
  c.api_key = key;
  return c;
}

HttpClient::HttpClient(HttpClientConfig config) : config_(std::move(config)) {
  if (config_.base_url.empty()) throw ValidationError("LLM base URL is empty");
}

nlohmann::json HttpClient::request_body(const Prompt& prompt) const {
  return {{"model", config_.model},
          {"temperature", config_.temperature},
          {"messages", prompt.to_json()}};
}

namespace {

// Splits "https://host:port/v1" into ("https://host:port", "/v1").
std::pair<std::string, std::string> split_base(std::string url) {
  while (url.ends_with('/')) url.pop_back();
  const auto scheme = url.find("://");
  const auto path = url.find('/', scheme == std::string::npos ? 0 : scheme + 3);
  if (path == std::string::npos) return {url, ""};
  return {url.substr(0, path), url.substr(path)};
}

}  // namespace

std::string HttpClient::chat(const Prompt& prompt) {
  std::lock_guard lock(in_flight_);
  const auto [host, prefix] = split_base(config_.base_url);
  httplib::Client cli(host);
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(config_.timeout);
  const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(config_.timeout - secs);
  cli.set_connection_timeout(secs.count(), usecs.count());
  cli.set_read_timeout(secs.count(), usecs.count());
  cli.set_write_timeout(secs.count(), usecs.count());
  httplib::Headers headers;
  if (!config_.api_key.empty()) headers.emplace("Authorization", "Bearer " + config_.api_key);

  const std::string body = request_body(prompt).dump();
  for (std::size_t attempt = 0;; ++attempt) {
    auto res = cli.Post(prefix + "/chat/completions", headers, body, "application/json");
    if (!res) {
      throw Error("LLM request failed: " + httplib::to_string(res.error()));
    }
    if (res->status == 429 && attempt < config_.backoff.size()) {
      std::this_thread::sleep_for(config_.backoff[attempt]);
      continue;
    }
    if (res->status != 200) {
      throw Error("LLM request returned HTTP " + std::to_string(res->status));
    }
    try {
      const auto j = nlohmann::json::parse(res->body);
      return j.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
      throw ProtocolError(std::string("malformed chat completion body: ") + e.what());
    }
  }
}

}  // namespace tsm::grounding
