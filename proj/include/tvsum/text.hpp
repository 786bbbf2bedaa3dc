// Copyright 2026 The tvsum Authors.
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

// Small text helpers shared by mention tagging and subtitle alignment.

#ifndef TVSUM_TEXT_HPP_
#define TVSUM_TEXT_HPP_

#include <algorithm>
#include <string>
#include <string_view>
#include <vector>

namespace tvsum {
namespace text {

inline std::string_view trim(std::string_view s) {
  auto is_space = [](char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
           c == '\v';
  };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

inline std::string to_lower(std::string_view s) {
  std::string out(s);
  for (char &c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

// Bytes >= 0x80 are treated as word characters so that UTF-8 letters never
// split a token.
inline bool is_word_byte(unsigned char c) {
  return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') ||
         (c >= 'A' && c <= 'Z') || c >= 0x80;
}

inline bool is_handle_byte(unsigned char c) {
  return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') ||
         (c >= 'A' && c <= 'Z') || c == '_';
}

// Lower-cased word tokens. Tokens split on any non-alphanumeric byte, except
// that an apostrophe (ASCII or U+2019) between two word characters stays
// inside the token, so "O'Rourke" is one token. When skip_handles is set,
// "@name" spans are dropped entirely.
inline std::vector<std::string> tokenize(std::string_view s,
                                         bool skip_handles = true) {
  std::vector<std::string> tokens;
  std::string cur;
  auto flush = [&] {
    if (!cur.empty()) tokens.push_back(to_lower(cur));
    cur.clear();
  };
  auto byte = [&](std::size_t i) -> unsigned char {
    return static_cast<unsigned char>(s[i]);
  };
  std::size_t i = 0;
  while (i < s.size()) {
    unsigned char c = byte(i);
    // U+2019 RIGHT SINGLE QUOTATION MARK
    bool curly = c == 0xE2 && i + 2 < s.size() && byte(i + 1) == 0x80 &&
                 byte(i + 2) == 0x99;
    if (c == '\'' || curly) {
      std::size_t next = i + (curly ? 3 : 1);
      if (!cur.empty() && next < s.size() && is_word_byte(byte(next)) &&
          !(byte(next) == 0xE2)) {
        cur.push_back('\'');
      } else {
        flush();
      }
      i = next;
      continue;
    }
    if (c == '@' && skip_handles && cur.empty()) {
      ++i;
      while (i < s.size() && is_handle_byte(byte(i))) ++i;
      continue;
    }
    if (is_word_byte(c)) {
      cur.push_back(static_cast<char>(c));
    } else {
      flush();
    }
    ++i;
  }
  flush();
  return tokens;
}

// Joins parts with sep.
inline std::string join(const std::vector<std::string> &parts,
                        std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

// Splits s on '\n', dropping a trailing '\r' from each line.
inline std::vector<std::string_view> split_lines(std::string_view s) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= s.size()) {
    std::size_t end = s.find('\n', start);
    if (end == std::string_view::npos) end = s.size();
    std::string_view line = s.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (end == s.size()) {
      if (!line.empty()) lines.push_back(line);
      break;
    }
    lines.push_back(line);
    start = end + 1;
  }
  return lines;
}

}  // namespace text
}  // namespace tvsum

#endif  // TVSUM_TEXT_HPP_
