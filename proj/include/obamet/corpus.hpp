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

#include <cstdint>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "obamet/error.hpp"
#include "obamet/keyword.hpp"
#include "obamet/url.hpp"

namespace obamet {

using json = nlohmann::json;

enum class PageRole { kTraining, kControl, kLanding };

inline std::string_view to_string(PageRole r) {
  switch (r) {
    case PageRole::kTraining: return "training";
    case PageRole::kControl: return "control";
    case PageRole::kLanding: return "landing";
  }
  return "landing";
}

inline PageRole page_role_from_string(std::string_view s) {
  if (s == "training") return PageRole::kTraining;
  if (s == "control") return PageRole::kControl;
  if (s == "landing") return PageRole::kLanding;
  throw Error(ErrorCode::kCorpusError, "unknown page role '" + std::string(s) + "'");
}

struct WebPage {
  std::string url;  // normalized
  PageRole role = PageRole::kLanding;

  WebPage() = default;
  WebPage(std::string_view raw_url, PageRole r) : url(normalize_url(raw_url)), role(r) {}

  friend auto operator<=>(const WebPage&, const WebPage&) = default;
};

struct TagSource {
  std::string name;
  std::string granularity;
};

struct TagAssignment {
  WebPage page;
  std::string source;
  KeywordSet keywords;

  friend bool operator==(const TagAssignment&, const TagAssignment&) = default;
};

enum class AdKind { kOba, kContextual, kStatic, kRetargeting, kGeoDemo };

inline constexpr AdKind kAllAdKinds[] = {AdKind::kOba, AdKind::kContextual, AdKind::kStatic,
                                         AdKind::kRetargeting, AdKind::kGeoDemo};

inline std::string_view to_string(AdKind k) {
  switch (k) {
    case AdKind::kOba: return "oba";
    case AdKind::kContextual: return "contextual";
    case AdKind::kStatic: return "static";
    case AdKind::kRetargeting: return "retargeting";
    case AdKind::kGeoDemo: return "geo_demo";
  }
  return "static";
}

inline AdKind ad_kind_from_string(std::string_view s) {
  for (auto k : kAllAdKinds) {
    if (to_string(k) == s) return k;
  }
  throw Error(ErrorCode::kCorpusError, "unknown ad kind '" + std::string(s) + "'");
}

// Browsing condition of a session (location label and Do-Not-Track) plus the
// repetition slot. Sessions sharing a key form one cohort for analysis.
struct SessionKey {
  std::string geo = "ES";
  bool dnt = false;
  int repetition = 0;

  std::string condition_id() const { return geo + (dnt ? "-dnt" : "-nodnt"); }
  std::string id() const { return condition_id() + "-r" + std::to_string(repetition); }

  friend auto operator<=>(const SessionKey&, const SessionKey&) = default;
};

// Reserved persona id for clean-profile sessions.
inline constexpr std::string_view kCleanProfileId = "clean-profile";

struct AdImpression {
  std::string persona_id;
  SessionKey session;
  std::string control_url;
  std::string landing_url;
  std::int64_t ntimes = 1;
  std::optional<AdKind> ground_truth;

  friend auto operator<=>(const AdImpression&, const AdImpression&) = default;
};

enum class VisitKind { kTraining, kControl };

struct VisitRecord {
  std::string persona_id;
  SessionKey session;
  int seq = 0;
  double timestamp = 0.0;  // simulated seconds since session start
  std::string url;
  VisitKind kind = VisitKind::kControl;

  friend auto operator<=>(const VisitRecord&, const VisitRecord&) = default;
};

// ---- JSON codecs -----------------------------------------------------------

inline json keywords_to_json(const KeywordSet& ks) {
  json a = json::array();
  for (const auto& k : ks) a.push_back(k.text());
  return a;
}

inline KeywordSet keywords_from_json(const json& a) {
  KeywordSet out;
  for (const auto& k : a) out.emplace(k.get<std::string>());
  return out;
}

inline void to_json(json& j, const WebPage& p) {
  j = json{{"url", p.url}, {"role", to_string(p.role)}};
}
inline void from_json(const json& j, WebPage& p) {
  p = WebPage(j.at("url").get<std::string>(), page_role_from_string(j.at("role").get<std::string>()));
}

inline void to_json(json& j, const SessionKey& k) {
  j = json{{"geo", k.geo}, {"dnt", k.dnt}, {"repetition", k.repetition}};
}
inline void from_json(const json& j, SessionKey& k) {
  k.geo = j.at("geo").get<std::string>();
  k.dnt = j.at("dnt").get<bool>();
  k.repetition = j.at("repetition").get<int>();
}

inline void to_json(json& j, const AdImpression& a) {
  j = json{{"persona", a.persona_id},
           {"session", a.session.id()},
           {"geo", a.session.geo},
           {"dnt", a.session.dnt},
           {"repetition", a.session.repetition},
           {"control", a.control_url},
           {"landing", a.landing_url},
           {"ntimes", a.ntimes},
           {"ground_truth", a.ground_truth ? json(to_string(*a.ground_truth)) : json(nullptr)}};
}
inline void from_json(const json& j, AdImpression& a) {
  a.persona_id = j.at("persona").get<std::string>();
  a.session = j.get<SessionKey>();
  a.control_url = j.at("control").get<std::string>();
  a.landing_url = j.at("landing").get<std::string>();
  a.ntimes = j.at("ntimes").get<std::int64_t>();
  if (a.ntimes < 1) throw Error(ErrorCode::kCorpusError, "impression with ntimes < 1");
  a.ground_truth.reset();
  if (j.contains("ground_truth") && !j["ground_truth"].is_null()) {
    a.ground_truth = ad_kind_from_string(j["ground_truth"].get<std::string>());
  }
}

inline void to_json(json& j, const VisitRecord& v) {
  j = json{{"persona", v.persona_id}, {"session", v.session.id()}, {"geo", v.session.geo},
           {"dnt", v.session.dnt},    {"repetition", v.session.repetition},
           {"seq", v.seq},            {"t", v.timestamp},
           {"url", v.url},            {"kind", v.kind == VisitKind::kTraining ? "training" : "control"}};
}
inline void from_json(const json& j, VisitRecord& v) {
  v.persona_id = j.at("persona").get<std::string>();
  v.session = j.get<SessionKey>();
  v.seq = j.at("seq").get<int>();
  v.timestamp = j.at("t").get<double>();
  v.url = j.at("url").get<std::string>();
  v.kind = j.at("kind").get<std::string>() == "training" ? VisitKind::kTraining : VisitKind::kControl;
}

// One tags.<source>.jsonl line.
inline json tag_line(const TagAssignment& t) {
  return json{{"url", t.page.url}, {"keywords", keywords_to_json(t.keywords)}};
}

// ---- JSONL helpers ---------------------------------------------------------

inline std::vector<json> read_jsonl(const std::string& path, ErrorCode on_missing) {
  std::ifstream in(path);
  if (!in) throw Error(on_missing, "cannot open '" + path + "'");
  std::vector<json> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      out.push_back(json::parse(line));
    } catch (const json::exception& e) {
      auto code = on_missing == ErrorCode::kSourceUnavailable ? on_missing : ErrorCode::kCorpusError;
      throw Error(code, path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

// ---- tagging sources ---------------------------------------------------------

class TaggingSource {
 public:
  virtual ~TaggingSource() = default;
  virtual const TagSource& source() const = 0;
  // Keywords for one page; an empty set when the source cannot tag it.
  virtual KeywordSet tag(const WebPage& page) const = 0;
};

// Tags replayed from a file in the tags.<source>.jsonl schema.
class FixtureTaggingSource final : public TaggingSource {
 public:
  FixtureTaggingSource(TagSource source, const std::string& path) : source_(std::move(source)) {
    std::vector<json> lines;
    try {
      lines = read_jsonl(path, ErrorCode::kSourceUnavailable);
      for (const auto& j : lines) {
        auto key = landing_key(j.at("url").get<std::string>());
        auto& ks = table_[key];
        for (const auto& k : j.at("keywords")) ks.emplace(k.get<std::string>());
      }
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kSourceUnavailable) throw;
      throw Error(ErrorCode::kSourceUnavailable, path + ": " + e.what());
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kSourceUnavailable, path + ": " + e.what());
    }
  }

  FixtureTaggingSource(TagSource source, std::map<std::string, KeywordSet> table)
      : source_(std::move(source)) {
    for (auto& [url, ks] : table) table_[landing_key(url)].insert(ks.begin(), ks.end());
  }

  const TagSource& source() const override { return source_; }

  KeywordSet tag(const WebPage& page) const override {
    auto it = table_.find(landing_key(page.url));
    return it == table_.end() ? KeywordSet{} : it->second;
  }

 private:
  TagSource source_;
  std::map<std::string, KeywordSet> table_;
};

// Placeholder for live categorization services; no network client ships.
class RemoteTaggingSource final : public TaggingSource {
 public:
  explicit RemoteTaggingSource(TagSource source) : source_(std::move(source)) {}
  const TagSource& source() const override { return source_; }
  KeywordSet tag(const WebPage&) const override {
    throw Error(ErrorCode::kSourceUnavailable,
                "no network client for tagging source '" + source_.name + "'");
  }

 private:
  TagSource source_;
};

inline std::vector<TagAssignment> tag_pages(const std::vector<WebPage>& pages,
                                            const TaggingSource& source) {
  std::vector<TagAssignment> out;
  out.reserve(pages.size());
  for (const auto& p : pages) out.push_back({p, source.source().name, source.tag(p)});
  return out;
}

struct CoverageReport {
  std::map<std::string, double> fraction;  // per source
  bool empty_page_set = false;
};

// Fraction of `pages` with a non-empty keyword set, per source seen in
// `assignments`. An empty page set reports 1.0 and raises the flag.
inline CoverageReport coverage(const std::vector<TagAssignment>& assignments,
                               const std::vector<WebPage>& pages) {
  CoverageReport report;
  std::set<std::string> urls;
  for (const auto& p : pages) urls.insert(p.url);
  std::map<std::string, std::set<std::string>> tagged;
  for (const auto& a : assignments) {
    auto& t = tagged[a.source];
    if (!a.keywords.empty() && urls.count(a.page.url)) t.insert(a.page.url);
  }
  report.empty_page_set = urls.empty();
  for (const auto& [source, t] : tagged) {
    report.fraction[source] =
        urls.empty() ? 1.0 : static_cast<double>(t.size()) / static_cast<double>(urls.size());
  }
  return report;
}

}  // namespace obamet
