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

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "obamet/corpus.hpp"
#include "obamet/error.hpp"
#include "obamet/persona.hpp"

namespace obamet {

struct Corpus {
  std::vector<WebPage> pages;
  std::map<std::string, std::vector<TagAssignment>> tags;  // by source
  std::vector<VisitRecord> visits;
  std::vector<AdImpression> impressions;
  std::vector<PersonaRecord> personas;
};

// Set equality per collection; file order carries no meaning.
inline bool same_logical_state(const Corpus& a, const Corpus& b) {
  auto sorted = [](auto v) {
    std::sort(v.begin(), v.end());
    return v;
  };
  auto tag_key = [](const std::map<std::string, std::vector<TagAssignment>>& m) {
    std::set<std::tuple<std::string, std::string, std::vector<std::string>>> out;
    for (const auto& [s, list] : m) {
      for (const auto& t : list) {
        std::vector<std::string> ks;
        for (const auto& k : t.keywords) ks.push_back(k.text());
        out.emplace(s, t.page.url, ks);
      }
    }
    return out;
  };
  auto persona_key = [](const std::vector<PersonaRecord>& v) {
    std::map<std::string, json> out;
    for (const auto& r : v) out[r.persona.id] = r;
    return out;
  };
  return sorted(a.pages) == sorted(b.pages) && tag_key(a.tags) == tag_key(b.tags) &&
         sorted(a.visits) == sorted(b.visits) && sorted(a.impressions) == sorted(b.impressions) &&
         persona_key(a.personas) == persona_key(b.personas);
}

// Experiment directory:
//   pages.jsonl, tags.<source>.jsonl, visits.jsonl, impressions.jsonl,
//   personas.json, report.json (+ auxiliary JSON/CSV written by the CLI).
// All writes go through one mutex; loaded snapshots are plain values.
class ExperimentStore {
 public:
  explicit ExperimentStore(std::filesystem::path dir) : dir_(std::move(dir)) {}

  const std::filesystem::path& dir() const { return dir_; }

  // Creates the directory and truncates the event logs.
  void create() {
    std::lock_guard lock(mu_);
    std::filesystem::create_directories(dir_);
    for (auto name : {"visits.jsonl", "impressions.jsonl"}) {
      std::ofstream(dir_ / name, std::ios::trunc);
    }
  }

  void write_pages(const std::vector<WebPage>& pages) {
    std::vector<json> lines;
    for (const auto& p : pages) lines.push_back(p);
    write_jsonl("pages.jsonl", lines);
  }

  void write_tags(const std::string& source, const std::vector<TagAssignment>& tags) {
    std::vector<json> lines;
    for (const auto& t : tags) lines.push_back(tag_line(t));
    write_jsonl("tags." + source + ".jsonl", lines);
  }

  void write_personas(const std::vector<PersonaRecord>& personas) {
    json arr = json::array();
    for (const auto& p : personas) arr.push_back(p);
    write_json("personas.json", arr);
  }

  void append_visits(std::span<const VisitRecord> visits) {
    std::vector<json> lines(visits.begin(), visits.end());
    append_jsonl("visits.jsonl", lines);
  }

  void append_impressions(std::span<const AdImpression> impressions) {
    std::vector<json> lines(impressions.begin(), impressions.end());
    append_jsonl("impressions.jsonl", lines);
  }

  void write_json(const std::string& name, const json& j) { write_text(name, j.dump(2) + "\n"); }

  void write_jsonl(const std::string& name, const std::vector<json>& lines) {
    std::string text;
    for (const auto& l : lines) text += l.dump() + "\n";
    write_text(name, text);
  }

  void append_jsonl(const std::string& name, const std::vector<json>& lines) {
    std::lock_guard lock(mu_);
    std::ofstream out(dir_ / name, std::ios::app | std::ios::binary);
    if (!out) throw Error(ErrorCode::kCorpusError, "cannot append to " + (dir_ / name).string());
    for (const auto& l : lines) out << l.dump() << '\n';
  }

  void write_text(const std::string& name, const std::string& text) {
    std::lock_guard lock(mu_);
    std::filesystem::create_directories(dir_);
    std::ofstream out(dir_ / name, std::ios::trunc | std::ios::binary);
    if (!out) throw Error(ErrorCode::kCorpusError, "cannot write " + (dir_ / name).string());
    out << text;
  }

  void save(const Corpus& c) {
    create();
    write_pages(c.pages);
    for (const auto& [source, tags] : c.tags) write_tags(source, tags);
    write_personas(c.personas);
    append_visits(c.visits);
    append_impressions(c.impressions);
  }

  bool exists(const std::string& name) const { return std::filesystem::exists(dir_ / name); }

  json read_json(const std::string& name) const {
    std::ifstream in(dir_ / name);
    if (!in) throw Error(ErrorCode::kIncompleteCorpus, "missing " + (dir_ / name).string());
    try {
      return json::parse(in);
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kCorpusError, (dir_ / name).string() + ": " + e.what());
    }
  }

  // Sources with a tags.<source>.jsonl file, sorted.
  std::vector<std::string> tag_sources() const {
    std::vector<std::string> out;
    if (!std::filesystem::exists(dir_)) return out;
    for (const auto& entry : std::filesystem::directory_iterator(dir_)) {
      auto name = entry.path().filename().string();
      if (name.size() > 11 && name.rfind("tags.", 0) == 0 &&
          name.compare(name.size() - 6, 6, ".jsonl") == 0) {
        out.push_back(name.substr(5, name.size() - 11));
      }
    }
    std::sort(out.begin(), out.end());
    return out;
  }

  Corpus load(bool check_integrity = true) const {
    Corpus c;
    try {
      for (const auto& j : read_jsonl(path("pages.jsonl"), ErrorCode::kIncompleteCorpus)) {
        c.pages.push_back(j.get<WebPage>());
      }
      std::map<std::string, PageRole> roles;
      for (const auto& p : c.pages) roles[p.url] = p.role;
      for (const auto& source : tag_sources()) {
        auto& list = c.tags[source];
        for (const auto& j : read_jsonl(path("tags." + source + ".jsonl"), ErrorCode::kIncompleteCorpus)) {
          auto url = normalize_url(j.at("url").get<std::string>());
          auto it = roles.find(url);
          list.push_back({WebPage(url, it == roles.end() ? PageRole::kLanding : it->second), source,
                          keywords_from_json(j.at("keywords"))});
        }
      }
      for (const auto& j : read_jsonl(path("visits.jsonl"), ErrorCode::kIncompleteCorpus)) {
        c.visits.push_back(j.get<VisitRecord>());
      }
      for (const auto& j : read_jsonl(path("impressions.jsonl"), ErrorCode::kIncompleteCorpus)) {
        c.impressions.push_back(j.get<AdImpression>());
      }
      for (const auto& j : read_json("personas.json")) c.personas.push_back(j.get<PersonaRecord>());
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kCorpusError, dir_.string() + ": " + e.what());
    }
    if (check_integrity) verify_integrity(c);
    return c;
  }

  static void verify_integrity(const Corpus& c) {
    std::set<std::string> personas{std::string(kCleanProfileId)};
    for (const auto& p : c.personas) personas.insert(p.persona.id);
    std::set<std::string> pages;
    for (const auto& p : c.pages) pages.insert(landing_key(p.url));
    auto need_page = [&](const std::string& url, const char* what) {
      if (!pages.count(landing_key(url))) {
        throw Error(ErrorCode::kCorpusError, std::string(what) + " page '" + url + "' is not in pages.jsonl");
      }
    };
    for (const auto& i : c.impressions) {
      if (!personas.count(i.persona_id)) {
        throw Error(ErrorCode::kCorpusError, "impression for unknown persona '" + i.persona_id + "'");
      }
      need_page(i.control_url, "control");
      need_page(i.landing_url, "landing");
    }
    for (const auto& v : c.visits) {
      if (!personas.count(v.persona_id)) {
        throw Error(ErrorCode::kCorpusError, "visit by unknown persona '" + v.persona_id + "'");
      }
      need_page(v.url, "visited");
    }
  }

 private:
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  std::filesystem::path dir_;
  mutable std::mutex mu_;
};

}  // namespace obamet
