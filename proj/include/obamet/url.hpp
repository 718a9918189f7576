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
#include <string>
#include <string_view>

#include "obamet/error.hpp"

namespace obamet {

namespace url_detail {

inline std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

struct UrlParts {
  std::string scheme;
  std::string host;  // lowercased, default port removed
  std::string path;  // no trailing slash; "" for the site root
  std::string query;
};

inline UrlParts split(std::string_view raw) {
  while (!raw.empty() && std::isspace(static_cast<unsigned char>(raw.front()))) raw.remove_prefix(1);
  while (!raw.empty() && std::isspace(static_cast<unsigned char>(raw.back()))) raw.remove_suffix(1);
  if (raw.empty()) throw Error(ErrorCode::kCorpusError, "empty URL");
  UrlParts p;
  auto sep = raw.find("://");
  if (sep != std::string_view::npos) {
    p.scheme = lower(raw.substr(0, sep));
    raw.remove_prefix(sep + 3);
  } else {
    p.scheme = "http";
  }
  if (auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
  auto path_start = raw.find_first_of("/?");
  std::string_view authority = raw.substr(0, path_start);
  std::string_view rest = path_start == std::string_view::npos ? std::string_view() : raw.substr(path_start);
  p.host = lower(authority);
  if (auto colon = p.host.rfind(':'); colon != std::string::npos) {
    std::string port = p.host.substr(colon + 1);
    if ((p.scheme == "http" && port == "80") || (p.scheme == "https" && port == "443") || port.empty()) {
      p.host.erase(colon);
    }
  }
  if (p.host.empty()) throw Error(ErrorCode::kCorpusError, "URL without host: '" + std::string(raw) + "'");
  auto q = rest.find('?');
  std::string_view path = rest.substr(0, q);
  if (q != std::string_view::npos) p.query = std::string(rest.substr(q + 1));
  p.path = std::string(path);
  while (!p.path.empty() && p.path.back() == '/') p.path.pop_back();
  return p;
}

}  // namespace url_detail

// Canonical page URL: lowercase scheme and host, no default port, no
// fragment, no trailing slash. Idempotent.
inline std::string normalize_url(std::string_view raw) {
  auto p = url_detail::split(raw);
  std::string out = p.scheme + "://" + p.host + p.path;
  if (!p.query.empty()) out += "?" + p.query;
  return out;
}

// Identity used when matching landing pages: host + path, scheme and query
// dropped (ad URLs carry volatile tracking parameters).
inline std::string landing_key(std::string_view raw) {
  auto p = url_detail::split(raw);
  return p.host + p.path;
}

}  // namespace obamet
