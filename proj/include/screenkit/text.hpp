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

#include <algorithm>
#include <array>
#include <cctype>
#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

// Small string utilities shared by the corpus, prompt and feature code.
namespace screenkit::text {

inline bool is_space(char c) noexcept {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

inline std::string_view trim(std::string_view s) noexcept {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

inline bool is_blank(std::string_view s) noexcept { return trim(s).empty(); }

inline std::string to_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

// Number of Unicode code points in a UTF-8 string (continuation bytes are
// not counted). Invalid sequences count byte-wise.
inline std::size_t utf8_length(std::string_view s) noexcept {
  std::size_t n = 0;
  for (unsigned char c : s) {
    if ((c & 0xC0) != 0x80) ++n;
  }
  return n;
}

inline bool is_valid_utf8(std::string_view s) noexcept {
  std::size_t i = 0;
  while (i < s.size()) {
    const auto c = static_cast<unsigned char>(s[i]);
    std::size_t extra = 0;
    if (c < 0x80) {
      extra = 0;
    } else if ((c & 0xE0) == 0xC0 && c >= 0xC2) {
      extra = 1;
    } else if ((c & 0xF0) == 0xE0) {
      extra = 2;
    } else if ((c & 0xF8) == 0xF0 && c <= 0xF4) {
      extra = 3;
    } else {
      return false;
    }
    for (std::size_t k = 1; k <= extra; ++k) {
      if (i + k >= s.size()) return false;
      if ((static_cast<unsigned char>(s[i + k]) & 0xC0) != 0x80) return false;
    }
    i += extra + 1;
  }
  return true;
}

// Replacements for the LaTeX escapes that leak into exported abstracts.
// Longer commands come first so "\textendash" wins over "\te...".
inline constexpr std::array<std::pair<std::string_view, std::string_view>, 11> kLatexEscapes{{
    {"\\textendash", "\xE2\x80\x93"},
    {"\\textemdash", "\xE2\x80\x94"},
    {"\\endash", "\xE2\x80\x93"},
    {"\\emdash", "\xE2\x80\x94"},
    {"\\%", "%"},
    {"\\&", "&"},
    {"\\_", "_"},
    {"\\#", "#"},
    {"\\$", "$"},
    {"\\{", "{"},
    {"\\}", "}"},
}};

// Decodes the common LaTeX escapes and turns every run of control
// characters into a single space. Plain text passes through unchanged.
inline std::string clean_for_display(std::string_view in) {
  std::string out;
  out.reserve(in.size());
  std::size_t i = 0;
  while (i < in.size()) {
    const char c = in[i];
    if (c == '\\') {
      bool matched = false;
      for (const auto& [from, to] : kLatexEscapes) {
        if (in.substr(i, from.size()) == from) {
          out.append(to);
          i += from.size();
          // "\endash{}" form: the empty group terminates the command.
          if (from.size() > 2 && in.substr(i, 2) == "{}") i += 2;
          matched = true;
          break;
        }
      }
      if (matched) continue;
    }
    const auto uc = static_cast<unsigned char>(c);
    if (uc < 0x20 || uc == 0x7F) {
      while (i < in.size() && (static_cast<unsigned char>(in[i]) < 0x20 ||
                               static_cast<unsigned char>(in[i]) == 0x7F)) {
        ++i;
      }
      out.push_back(' ');
      continue;
    }
    out.push_back(c);
    ++i;
  }
  return out;
}

// Lowercase word tokens. LaTeX escapes are stripped first; any ASCII byte
// that is not alphanumeric separates tokens, UTF-8 multibyte sequences are
// kept inside words.
inline std::vector<std::string> tokenize(std::string_view in) {
  const std::string cleaned = clean_for_display(in);
  std::vector<std::string> tokens;
  std::string current;
  for (char c : cleaned) {
    const auto uc = static_cast<unsigned char>(c);
    if (uc >= 0x80 || std::isalnum(uc)) {
      current.push_back(static_cast<char>(uc < 0x80 ? std::tolower(uc) : uc));
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

inline std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      parts.emplace_back(s.substr(start));
      break;
    }
    parts.emplace_back(s.substr(start, pos - start));
    start = pos + 1;
  }
  return parts;
}

}  // namespace screenkit::text
