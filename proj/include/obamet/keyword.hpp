// Copyright 2026 The obamet Authors
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

#include <cctype>
#include <compare>
#include <initializer_list>
#include <set>
#include <string>
#include <string_view>

#include "obamet/error.hpp"

namespace obamet {

// Lowercases ASCII, turns '_' and any whitespace into single spaces, trims,
// and puts exactly one space around '&' and none around '/'.
// normalize_keyword(normalize_keyword(s)) == normalize_keyword(s).
inline std::string normalize_keyword(std::string_view raw) {
  std::string spaced;
  spaced.reserve(raw.size() + 4);
  for (char c : raw) {
    unsigned char u = static_cast<unsigned char>(c);
    if (c == '_' || c == '\t' || c == '\n' || c == '\r' || c == '\v' ||
        c == '\f') {
      spaced.push_back(' ');
    } else if (c == '&') {
      spaced += " & ";
    } else if (c == '/') {
      spaced += " / ";
    } else if (u < 0x80) {
      spaced.push_back(static_cast<char>(std::tolower(u)));
    } else {
      spaced.push_back(c);
    }
  }
  std::string out;
  out.reserve(spaced.size());
  bool pending_space = false;
  for (char c : spaced) {
    if (c == ' ') {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(c);
  }
  // Collapse " / " to "/".
  std::string result;
  result.reserve(out.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (out[i] == ' ' && i + 1 < out.size() && out[i + 1] == '/') continue;
    if (out[i] == ' ' && i > 0 && out[i - 1] == '/') continue;
    result.push_back(out[i]);
  }
  return result;
}

// A normalized keyword (word sense label). Never empty.
class Keyword {
 public:
  Keyword() = delete;
  explicit Keyword(std::string_view raw) : text_(normalize_keyword(raw)) {
    if (text_.empty()) {
      throw Error(ErrorCode::kInvalidKeyword,
                  "keyword is empty after normalization: '" +
                      std::string(raw) + "'");
    }
  }

  const std::string& text() const noexcept { return text_; }

  friend auto operator<=>(const Keyword&, const Keyword&) = default;
  friend bool operator==(const Keyword&, const Keyword&) = default;

 private:
  std::string text_;
};

using KeywordSet = std::set<Keyword>;

template <typename Range>
KeywordSet make_keyword_set(const Range& raw) {
  KeywordSet out;
  for (const auto& r : raw) out.emplace(r);
  return out;
}

inline KeywordSet make_keyword_set(std::initializer_list<std::string_view> raw) {
  KeywordSet out;
  for (auto r : raw) out.emplace(r);
  return out;
}

}  // namespace obamet
