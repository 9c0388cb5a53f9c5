// Copyright 2026 The text-scene-motion Authors
// SPDX-License-Identifier: Apache-2.0

#include "tsm/grounding/llm_client.hpp"

#include <gtest/gtest.h>

#include <atomic>
#include <cstdlib>
#include <thread>

#include "test_support.hpp"
#include "tsm/common/error.hpp"
#include "tsm/common/io.hpp"

#include <httplib.h>

namespace tsm::grounding {
namespace {

Prompt user_prompt(const std::string& text) {
  Prompt p;
  p.add(Role::User, text);
  return p;
}

TEST(ScriptedClient, RepliesInOrderAndChecksSubstrings) {
  ScriptedClient c({{"", "first"}, {"needle", "second"}});
  EXPECT_EQ(c.chat(user_prompt("anything")), "first");
  EXPECT_THROW(c.chat(user_prompt("no match")), ValidationError);
  EXPECT_EQ(c.chat(user_prompt("a needle here")), "second");
  EXPECT_EQ(c.calls(), 2u);
  EXPECT_THROW(c.chat(user_prompt("x")), ProtocolError);
}

TEST(ScriptedClient, FromFile) {
  testing::TempDir dir;
  io::write_file(dir / "t.json", R"([{"reply":"target: bed\nanchors:"}])");
  auto c = ScriptedClient::from_file(dir / "t.json");
  EXPECT_EQ(c.chat(user_prompt("q")), "target: bed\nanchors:");
  io::write_file(dir / "bad.json", "{");
  EXPECT_THROW(ScriptedClient::from_file(dir / "bad.json"), ParseError);
  io::write_file(dir / "obj.json", "{}");
  EXPECT_THROW(ScriptedClient::from_file(dir / "obj.json"), ValidationError);
}

TEST(GraphAwareClient, AnswersBothStages) {
  GraphAwareClient c({4, "chair", {"board"}});
  EXPECT_EQ(parse_stage1_response(c.chat(build_stage1_prompt("sit on the chair near the board"))),
            (Stage1Answer{"chair", {"board"}}));
  EXPECT_EQ(parse_stage2_response(c.chat(build_stage2_prompt("sit", {"chair 4 is near the board 1"}))),
            4);
  EXPECT_EQ(c.calls(), 2u);
}

TEST(HttpClientConfig, FromEnv) {
  ::setenv("LLM_API_BASE", "http://localhost:1/v1", 1);
  ::unsetenv("LLM_API_KEY");
  EXPECT_THROW(HttpClientConfig::from_env(), LookupError);
  ::setenv("LLM_API_KEY", "k", 1);
  const auto c = HttpClientConfig::from_env();
  EXPECT_EQ(c.base_url, "http://localhost:1/v1");
  EXPECT_EQ(c.api_key, "k");
  ::unsetenv("LLM_API_BASE");
  ::unsetenv("LLM_API_KEY");
}

TEST(HttpClient, RequestBody) {
  HttpClientConfig cfg;
  cfg.base_url = "http://localhost";
  cfg.model = "m";
  HttpClient c(cfg);
  const auto body = c.request_body(user_prompt("hi"));
  EXPECT_EQ(body["model"], "m");
  EXPECT_EQ(body["temperature"], 0.0);
  EXPECT_EQ(body["messages"][0]["content"], "hi");
  EXPECT_THROW(HttpClient(HttpClientConfig{}), ValidationError);
}

// Local chat-completions server; the first `throttle` requests get HTTP 429.
class FakeServer {
 public:
  explicit FakeServer(int throttle) : throttle_(throttle) {
    server_.Post("/v1/chat/completions", [this](const httplib::Request& req, httplib::Response& res) {
      ++requests_;
      auth_ = req.get_header_value("Authorization");
      body_ = req.body;
      if (requests_ <= throttle_) {
        res.status = 429;
        return;
      }
      if (reply_malformed_) {
        res.set_content("{\"choices\":[]}", "application/json");
        return;
      }
      res.set_content(R"({"choices":[{"message":{"role":"assistant","content":"answer: chair 4"}}]})",
                      "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~FakeServer() {
    server_.stop();
    thread_.join();
  }
  HttpClientConfig config() const {
    HttpClientConfig c;
    c.base_url = "http://127.0.0.1:" + std::to_string(port_) + "/v1/";
    c.api_key = "secret";
    c.timeout = std::chrono::milliseconds(5000);
    c.backoff = {std::chrono::milliseconds(1), std::chrono::milliseconds(1)};
    return c;
  }

  std::atomic<int> requests_{0};
  std::string auth_;
  std::string body_;
  bool reply_malformed_ = false;

 private:
  httplib::Server server_;
  int throttle_;
  int port_ = 0;
  std::thread thread_;
};

TEST(HttpClient, PostsChatCompletion) {
  FakeServer server(0);
  HttpClient c(server.config());
  EXPECT_EQ(c.chat(user_prompt("hello")), "answer: chair 4");
  EXPECT_EQ(server.auth_, "Bearer secret");
  EXPECT_EQ(nlohmann::json::parse(server.body_)["messages"][0]["content"], "hello");
}

TEST(HttpClient, RetriesAfter429) {
  FakeServer server(2);
  HttpClient c(server.config());
  EXPECT_EQ(c.chat(user_prompt("hello")), "answer: chair 4");
  EXPECT_EQ(server.requests_.load(), 3);
}

TEST(HttpClient, GivesUpAfterBackoffSchedule) {
  FakeServer server(3);
  HttpClient c(server.config());
  EXPECT_THROW(c.chat(user_prompt("hello")), Error);
  EXPECT_EQ(server.requests_.load(), 3);
}

TEST(HttpClient, MalformedBodyIsProtocolError) {
  FakeServer server(0);
  server.reply_malformed_ = true;
  HttpClient c(server.config());
  EXPECT_THROW(c.chat(user_prompt("hello")), ProtocolError);
}

TEST(HttpClient, ConnectionFailure) {
  HttpClientConfig cfg;
  cfg.base_url = "http://127.0.0.1:1";
  cfg.timeout = std::chrono::milliseconds(500);
  HttpClient c(cfg);
  EXPECT_THROW(c.chat(user_prompt("hello")), Error);
}

}  // namespace
}  // namespace tsm::grounding
