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

#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "screenkit/corpus.hpp"
#include "screenkit/error.hpp"
#include "screenkit/text.hpp"

namespace screenkit {

// Zero-shot screening prompt. Lines 1-3 give the context, 5-8 the
// instructions and the trailing block the article itself.
inline constexpr std::string_view kDefaultPromptBody =
    "I am screening papers for a systematic literature review.\n"
    "The topic of the systematic review is {TOPIC}.\n"
    "The study should focus exclusively on this topic.\n"
    "\n"
    "Decide if the article should be included or excluded from the systematic review.\n"
    "I give the {INPUTS} of the article as input.\n"
    "Only answer {INCLUDE_WORD} or {EXCLUDE_WORD}.\n"
    "Be lenient. I prefer including papers by mistake rather than excluding them by mistake.\n"
    "\n"
    "Title: {TITLE}\n"
    "Abstract: {ABSTRACT}\n";

inline constexpr std::array<std::string_view, 6> kPromptPlaceholders{
    "{TOPIC}", "{INPUTS}", "{INCLUDE_WORD}", "{EXCLUDE_WORD}", "{TITLE}", "{ABSTRACT}"};

// Estimates the request size of a prompt in tokens. Swap in an exact
// tokenizer by passing a different callable.
using TokenEstimator = std::function<std::size_t(std::string_view)>;

// One token is roughly four characters of English text.
inline std::size_t estimate_tokens(std::string_view text) {
  return (text::utf8_length(text) + 3) / 4;
}

struct PromptTemplate {
  std::string topic;
  std::vector<std::string> inputs{"title", "abstract"};
  std::string include_word = "Include";
  std::string exclude_word = "Exclude";
  std::string body{kDefaultPromptBody};

  void validate() const {
    if (text::is_blank(topic)) throw UsageError("prompt topic must not be empty");
    if (inputs.empty()) throw UsageError("prompt needs at least one input field");
    for (const auto& in : inputs) {
      if (text::is_blank(in)) throw UsageError("prompt input names must not be empty");
    }
    if (text::is_blank(include_word) || text::is_blank(exclude_word)) {
      throw UsageError("include and exclude words must not be empty");
    }
    if (text::to_lower(include_word) == text::to_lower(exclude_word)) {
      throw UsageError("include and exclude words must differ");
    }
    for (auto ph : kPromptPlaceholders) {
      std::size_t count = 0;
      for (auto pos = body.find(ph); pos != std::string::npos; pos = body.find(ph, pos + 1)) ++count;
      if (count != 1) {
        throw UsageError("prompt body must contain " + std::string(ph) + " exactly once (found " +
                         std::to_string(count) + ")");
      }
    }
  }
};

// Reads a template body from a plain-text file holding the six placeholders.
inline PromptTemplate load_prompt_template(const std::string& path, std::string topic) {
  PromptTemplate t;
  t.topic = std::move(topic);
  t.body = read_file(path);
  t.validate();
  return t;
}

struct RenderedPrompt {
  std::string text;
  std::string record_key;
  std::size_t estimated_tokens = 0;
};

// "title", "title and abstract", "title, abstract and keywords".
inline std::string enumerate_inputs(const std::vector<std::string>& inputs) {
  std::string out;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    if (i > 0) out += (i + 1 == inputs.size()) ? " and " : ", ";
    out += inputs[i];
  }
  return out;
}

namespace detail {

inline bool has_input(const std::vector<std::string>& inputs, std::string_view name) {
  for (const auto& in : inputs) {
    if (text::to_lower(text::trim(in)) == name) return true;
  }
  return false;
}

inline std::string field_value(const ScreeningRecord& record, const std::string& name) {
  const std::string key = text::to_lower(text::trim(name));
  std::string value;
  if (key == "title") {
    value = record.title;
  } else if (key == "abstract") {
    value = record.abstract;
  } else if (key == "doi") {
    value = record.doi.value_or("");
  } else if (record.extras.contains(name) && record.extras[name].is_string()) {
    value = record.extras[name].get<std::string>();
  }
  if (text::is_blank(value)) {
    throw DataError("record '" + record.key + "' has no field '" + name + "'");
  }
  return value;
}

inline std::string field_label(std::string name) {
  for (auto& c : name) {
    if (c == '_') c = ' ';
  }
  if (!name.empty()) name[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(name[0])));
  return name;
}

}  // namespace detail

// Fills the template for one article. Lines carrying {TITLE} or {ABSTRACT}
// are dropped when that field is not among the inputs; inputs beyond title
// and abstract get their own "Name: value" line after the article block.
inline RenderedPrompt render_prompt(const PromptTemplate& tmpl, const ScreeningRecord& record,
                                    const TokenEstimator& estimator = estimate_tokens) {
  tmpl.validate();
  const bool want_title = detail::has_input(tmpl.inputs, "title");
  const bool want_abstract = detail::has_input(tmpl.inputs, "abstract");

  std::string title;
  std::string abstract;
  if (want_title) title = text::clean_for_display(detail::field_value(record, "title"));
  if (want_abstract) abstract = text::clean_for_display(detail::field_value(record, "abstract"));

  std::vector<std::string> extra_lines;
  for (const auto& in : tmpl.inputs) {
    const std::string key = text::to_lower(text::trim(in));
    if (key == "title" || key == "abstract") continue;
    extra_lines.push_back(detail::field_label(in) + ": " +
                          text::clean_for_display(detail::field_value(record, in)));
  }

  const std::string inputs_text = enumerate_inputs(tmpl.inputs);
  auto substitute = [&](std::string_view ph) -> std::string_view {
    if (ph == "{TOPIC}") return tmpl.topic;
    if (ph == "{INPUTS}") return inputs_text;
    if (ph == "{INCLUDE_WORD}") return tmpl.include_word;
    if (ph == "{EXCLUDE_WORD}") return tmpl.exclude_word;
    if (ph == "{TITLE}") return title;
    return abstract;
  };

  std::string out;
  std::size_t last_task_line_end = std::string::npos;
  std::string_view body = tmpl.body;
  std::size_t start = 0;
  while (start < body.size()) {
    std::size_t end = body.find('\n', start);
    const bool has_newline = end != std::string_view::npos;
    if (!has_newline) end = body.size();
    std::string_view line = body.substr(start, end - start);
    start = has_newline ? end + 1 : end;

    const bool title_line = line.find("{TITLE}") != std::string_view::npos;
    const bool abstract_line = line.find("{ABSTRACT}") != std::string_view::npos;
    if ((title_line && !want_title) || (abstract_line && !want_abstract)) continue;

    std::size_t pos = 0;
    while (pos < line.size()) {
      bool replaced = false;
      if (line[pos] == '{') {
        for (auto ph : kPromptPlaceholders) {
          if (line.substr(pos, ph.size()) == ph) {
            out += substitute(ph);
            pos += ph.size();
            replaced = true;
            break;
          }
        }
      }
      if (!replaced) out.push_back(line[pos++]);
    }
    if (has_newline) out.push_back('\n');
    if (title_line || abstract_line) last_task_line_end = out.size();
  }

  if (!extra_lines.empty()) {
    std::string block;
    for (const auto& l : extra_lines) block += l + "\n";
    if (last_task_line_end == std::string::npos) {
      if (!out.empty() && out.back() != '\n') out.push_back('\n');
      out += block;
    } else {
      if (out[last_task_line_end - 1] != '\n') block.insert(block.begin(), '\n');
      out.insert(last_task_line_end, block);
    }
  }

  RenderedPrompt rendered;
  rendered.estimated_tokens = estimator(out);
  rendered.text = std::move(out);
  rendered.record_key = record.key;
  return rendered;
}

}  // namespace screenkit
