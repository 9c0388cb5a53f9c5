// Copyright 2026 The text-scene-motion Authors
// SPDX-License-Identifier: Apache-2.0

#include "tsm/grounding/prompt.hpp"

#include <gtest/gtest.h>

#include <random>

#include "tsm/common/error.hpp"

namespace tsm::grounding {
namespace {

std::size_t count(const std::string& hay, const std::string& needle) {
  std::size_t n = 0;
  for (auto p = hay.find(needle); p != std::string::npos; p = hay.find(needle, p + 1)) ++n;
  return n;
}

std::size_t assistant_turns(const Prompt& p) {
  return static_cast<std::size_t>(std::count_if(p.messages.begin(), p.messages.end(),
                                                [](const auto& m) { return m.role == Role::Assistant; }));
}

TEST(Prompt, Stage1ContainsUtteranceVerbatim) {
  const std::string u = "sit on the chair that is in the middle of the board and the end table";
  const auto p = build_stage1_prompt(u);
  EXPECT_EQ(p.messages.front().role, Role::System);
  EXPECT_EQ(p.last().role, Role::User);
  EXPECT_NE(p.last().content.find(u), std::string::npos);
  EXPECT_EQ(assistant_turns(p), 3u);
}

TEST(Prompt, FewShotCanBeDisabled) {
  PromptOptions opt;
  opt.few_shot = false;
  const auto p = build_stage1_prompt("walk to the table", opt);
  EXPECT_EQ(p.messages.size(), 2u);
  EXPECT_EQ(assistant_turns(p), 0u);
  EXPECT_EQ(assistant_turns(build_stage2_prompt("walk to the table", {"table 0 is near the tv 1"},
                                                opt)),
            0u);
}

TEST(Prompt, DefaultExamplesParseWithOwnParsers) {
  ASSERT_EQ(default_stage1_examples().size(), 3u);
  ASSERT_EQ(default_stage2_examples().size(), 3u);
  for (const auto& ex : default_stage1_examples()) EXPECT_NO_THROW(parse_stage1_response(ex.answer));
  for (const auto& ex : default_stage2_examples()) EXPECT_NO_THROW(parse_stage2_response(ex.answer));
}

TEST(Prompt, EmptyContentRejected) {
  Prompt p;
  EXPECT_THROW(p.add(Role::User, ""), ValidationError);
  EXPECT_THROW(build_stage1_prompt(""), ValidationError);
}

TEST(Prompt, ToJson) {
  Prompt p;
  p.add(Role::System, "s");
  p.add(Role::User, "u");
  EXPECT_EQ(p.to_json(), nlohmann::json::parse(
                             R"([{"role":"system","content":"s"},{"role":"user","content":"u"}])"));
}

TEST(Prompt, ParseStage1) {
  EXPECT_EQ(parse_stage1_response("target: chair\nanchors: board, end table"),
            (Stage1Answer{"chair", {"board", "end table"}}));
  EXPECT_EQ(parse_stage1_response("Sure! target: BED\nanchors:"), (Stage1Answer{"bed", {}}));
  EXPECT_EQ(parse_stage1_response("Target: sofa.\nAnchors: none"), (Stage1Answer{"sofa", {}}));
  EXPECT_THROW(parse_stage1_response("I think it is the chair."), ProtocolError);
  EXPECT_THROW(parse_stage1_response("target:\nanchors: desk"), ProtocolError);
}

TEST(Prompt, Stage1RoundTrip) {
  const std::vector<std::string> cats = {"chair", "end table", "bed", "tv", "coffee table", "lamp"};
  std::mt19937 rng(5);
  for (int i = 0; i < 200; ++i) {
    Stage1Answer a{cats[rng() % cats.size()], {}};
    for (unsigned k = rng() % 3; k > 0; --k) a.anchor_categories.push_back(cats[rng() % cats.size()]);
    EXPECT_EQ(parse_stage1_response(render_stage1_response(a)), a);
  }
}

TEST(Prompt, Stage2ListsSentencesAndUtterance) {
  const std::vector<std::string> s = {"chair 1 is near the board 0", "chair 4 is far from the end table 2"};
  const std::string u = "sit on the chair that is near the board";
  const auto p = build_stage2_prompt(u, s);
  const std::string& q = p.last().content;
  EXPECT_TRUE(q.starts_with(kStage2Header));
  for (const auto& line : s) EXPECT_NE(q.find(line + "\n"), std::string::npos);
  EXPECT_EQ(count(q, u), 1u);
  EXPECT_EQ(assistant_turns(p), 3u);
  EXPECT_THROW(build_stage2_prompt(u, {}), ValidationError);
}

TEST(Prompt, ParseStage2) {
  EXPECT_EQ(parse_stage2_response("answer: chair 4"), 4);
  EXPECT_EQ(parse_stage2_response("The answer: chair 12."), 12);
  EXPECT_EQ(parse_stage2_response("Reasoning...\nAnswer: end table 7"), 7);
  EXPECT_THROW(parse_stage2_response("I cannot determine this."), ProtocolError);
  EXPECT_THROW(parse_stage2_response("answer: the chair"), ProtocolError);
}

TEST(Prompt, ClarificationDiffersByStage) {
  EXPECT_NE(clarification_message(1), clarification_message(2));
  EXPECT_NE(clarification_message(2).find("answer:"), std::string::npos);
}

}  // namespace
}  // namespace tsm::grounding
