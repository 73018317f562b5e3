// Copyright 2026 The screenkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <string>

#include <gtest/gtest.h>

#include "screenkit/corpus.hpp"
#include "screenkit/prompt.hpp"

namespace screenkit {
namespace {

const std::string kFixtures = SCREENKIT_FIXTURES;

std::string strip_trailing_whitespace(std::string s) {
  while (!s.empty() && text::is_space(s.back())) s.pop_back();
  return s;
}

TEST(Prompt, ReproducesReferenceListingByteForByte) {
  const Corpus c = load_corpus(kFixtures + "/parmorel.jsonl");
  ASSERT_EQ(c.size(), 1u);
  PromptTemplate t;
  t.topic = "reinforcement learning for software engineering";
  const auto rendered = render_prompt(t, c.records.front());
  const std::string expected = read_file(kFixtures + "/listing_rl4se_parmorel.txt");
  EXPECT_EQ(strip_trailing_whitespace(rendered.text), strip_trailing_whitespace(expected));
  EXPECT_EQ(rendered.record_key, "barriga2022parmorel");
  EXPECT_EQ(rendered.estimated_tokens, (text::utf8_length(rendered.text) + 3) / 4);
}

ScreeningRecord record() {
  ScreeningRecord r;
  r.key = "k";
  r.title = "A \\& B";
  r.abstract = "Line\n\tbreak";
  r.extras["keywords"] = "x; y";
  return r;
}

TEST(Prompt, InputSelectionDropsUnusedLines) {
  PromptTemplate t;
  t.topic = "T";
  t.inputs = {"title"};
  const auto text = render_prompt(t, record()).text;
  EXPECT_NE(text.find("I give the title of the article as input."), std::string::npos);
  EXPECT_NE(text.find("Title: A & B\n"), std::string::npos);
  EXPECT_EQ(text.find("Abstract:"), std::string::npos);

  t.inputs = {"title", "abstract", "keywords"};
  const auto full = render_prompt(t, record()).text;
  EXPECT_NE(full.find("I give the title, abstract and keywords of the article"), std::string::npos);
  EXPECT_NE(full.find("Abstract: Line break\n"), std::string::npos);
  EXPECT_NE(full.find("Keywords: x; y"), std::string::npos);
}

TEST(Prompt, CustomWordsAndTokenEstimator) {
  PromptTemplate t;
  t.topic = "T";
  t.include_word = "Yes";
  t.exclude_word = "No";
  const auto r = render_prompt(t, record(), [](std::string_view s) { return s.size(); });
  EXPECT_NE(r.text.find("Only answer Yes or No."), std::string::npos);
  EXPECT_EQ(r.estimated_tokens, r.text.size());
}

TEST(Prompt, ValidationRejectsBadTemplates) {
  PromptTemplate t;
  EXPECT_THROW(t.validate(), UsageError);  // empty topic
  t.topic = "T";
  t.exclude_word = "include";
  EXPECT_THROW(t.validate(), UsageError);
  t.exclude_word = "Exclude";
  t.body = "no placeholders";
  EXPECT_THROW(t.validate(), UsageError);
  t.body = std::string(kDefaultPromptBody) + "{TOPIC}";
  EXPECT_THROW(t.validate(), UsageError);
  t.body = std::string(kDefaultPromptBody);
  t.inputs = {};
  EXPECT_THROW(t.validate(), UsageError);
}

TEST(Prompt, MissingRequestedFieldIsDataError) {
  PromptTemplate t;
  t.topic = "T";
  t.inputs = {"title", "doi"};
  EXPECT_THROW(render_prompt(t, record()), DataError);
}

TEST(Prompt, EnumerateInputs) {
  EXPECT_EQ(enumerate_inputs({"title"}), "title");
  EXPECT_EQ(enumerate_inputs({"title", "abstract"}), "title and abstract");
  EXPECT_EQ(enumerate_inputs({"a", "b", "c"}), "a, b and c");
}

}  // namespace
}  // namespace screenkit
