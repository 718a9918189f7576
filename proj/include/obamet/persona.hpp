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

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "obamet/corpus.hpp"
#include "obamet/error.hpp"
#include "obamet/keyword.hpp"
#include "obamet/taxonomy.hpp"

namespace obamet {

inline constexpr std::size_t kMinTrainingPages = 10;

struct Persona {
  std::string id;
  Keyword category{"unset"};
  bool sensitive = false;
  std::vector<WebPage> training_pages;

  friend bool operator==(const Persona&, const Persona&) = default;
};

// A site proposed for a persona, with what each source says about it and the
// categories observed in a fresh ads-preference profile after one visit.
struct CandidatePage {
  WebPage page;
  std::map<std::string, KeywordSet> source_keywords;
  KeywordSet profile_categories;
};

struct SelectionAttrition {
  std::size_t candidates = 0;
  std::size_t after_step1 = 0;
  std::size_t after_step2 = 0;

  friend bool operator==(const SelectionAttrition&, const SelectionAttrition&) = default;
};

class PersonaRejected : public Error {
 public:
  PersonaRejected(const std::string& category, SelectionAttrition attrition)
      : Error(ErrorCode::kPersonaRejected,
              "'" + category + "' keeps " + std::to_string(attrition.after_step2) +
                  " training pages (" + std::to_string(attrition.candidates) + " -> " +
                  std::to_string(attrition.after_step1) + " -> " +
                  std::to_string(attrition.after_step2) + "), need " +
                  std::to_string(kMinTrainingPages)),
        attrition_(attrition) {}

  const SelectionAttrition& attrition() const { return attrition_; }

 private:
  SelectionAttrition attrition_;
};

struct TrainingSelection {
  std::vector<WebPage> pages;
  SelectionAttrition attrition;
};

// Three-step training page selection.
//   1. keep candidates whose `selection_source` keywords contain `category`;
//   2. regular personas keep candidates whose clean-visit profile is exactly
//      {category} or {category, x}; sensitive personas keep candidates whose
//      profile stayed empty;
//   3. accept only with at least kMinTrainingPages survivors.
// Candidate order is preserved. Throws PersonaRejected with the attrition.
inline TrainingSelection select_training_pages(const Keyword& category,
                                               const std::vector<CandidatePage>& candidates,
                                               bool sensitive,
                                               const std::string& selection_source = "google") {
  TrainingSelection out;
  out.attrition.candidates = candidates.size();
  std::vector<const CandidatePage*> step1;
  for (const auto& c : candidates) {
    auto it = c.source_keywords.find(selection_source);
    if (it != c.source_keywords.end() && it->second.count(category)) step1.push_back(&c);
  }
  out.attrition.after_step1 = step1.size();
  for (const auto* c : step1) {
    const auto& prof = c->profile_categories;
    bool keep = sensitive ? prof.empty()
                          : (prof.count(category) && (prof.size() == 1 || prof.size() == 2));
    if (keep) out.pages.push_back(c->page);
  }
  out.attrition.after_step2 = out.pages.size();
  if (out.pages.size() < kMinTrainingPages) throw PersonaRejected(category.text(), out.attrition);
  return out;
}

struct ConsensusConfig {
  int n = 2;         // other sources that must agree
  double t = 2.5;    // similarity threshold
};

inline void validate(const ConsensusConfig& cfg, std::size_t source_count, const KeywordTaxonomy& tax) {
  if (cfg.n < 0) throw Error(ErrorCode::kInvalidConfig, "consensus N must be >= 0");
  if (!(cfg.t >= 0.0) || cfg.t > tax.max_score() + 1e-12) {
    throw Error(ErrorCode::kInvalidConfig,
                "consensus T=" + std::to_string(cfg.t) + " outside [0, " +
                    std::to_string(tax.max_score()) + "]");
  }
  if (static_cast<std::size_t>(cfg.n) + 1 > source_count) {
    throw Error(ErrorCode::kInsufficientSources,
                std::to_string(source_count) + " sources supplied, N=" + std::to_string(cfg.n) +
                    " needs " + std::to_string(cfg.n + 1));
  }
}

// Per-source union of training-page keywords.
inline std::map<std::string, KeywordSet> union_by_source(
    const std::map<std::string, std::vector<TagAssignment>>& assignments) {
  std::map<std::string, KeywordSet> out;
  for (const auto& [source, list] : assignments) {
    auto& u = out[source];
    for (const auto& a : list) u.insert(a.keywords.begin(), a.keywords.end());
  }
  return out;
}

// Cross-source training keyword consensus: keyword k of source i survives
// when at least N other sources hold some keyword agreeing with k (exact
// text, or Leacock-Chodorow score above T).
inline std::map<std::string, KeywordSet> consensus_training_keywords(
    const std::map<std::string, std::vector<TagAssignment>>& assignments,
    const ConsensusConfig& cfg, const KeywordMatcher& matcher) {
  validate(cfg, assignments.size(), matcher.taxonomy());
  const auto raw = union_by_source(assignments);
  std::map<std::string, KeywordSet> out;
  for (const auto& [source, mine] : raw) {
    auto& kept = out[source];
    for (const auto& k : mine) {
      int agreeing = 0;
      for (const auto& [other, theirs] : raw) {
        if (other == source) continue;
        for (const auto& l : theirs) {
          if (matcher.agree(k, l, cfg.t)) {
            ++agreeing;
            break;
          }
        }
      }
      if (agreeing >= cfg.n) kept.insert(k);
    }
  }
  return out;
}

// ---- persistence ---------------------------------------------------------

struct PersonaRecord {
  Persona persona;
  SelectionAttrition attrition;
  bool accepted = true;

  friend bool operator==(const PersonaRecord&, const PersonaRecord&) = default;
};

inline void to_json(json& j, const PersonaRecord& r) {
  json pages = json::array();
  for (const auto& p : r.persona.training_pages) pages.push_back(p.url);
  j = json{{"id", r.persona.id},
           {"category", r.persona.category.text()},
           {"sensitive", r.persona.sensitive},
           {"training_pages", pages},
           {"accepted", r.accepted},
           {"attrition",
            {{"candidates", r.attrition.candidates},
             {"step1", r.attrition.after_step1},
             {"step2", r.attrition.after_step2}}}};
}

inline void from_json(const json& j, PersonaRecord& r) {
  r.persona.id = j.at("id").get<std::string>();
  r.persona.category = Keyword(j.at("category").get<std::string>());
  r.persona.sensitive = j.value("sensitive", false);
  r.persona.training_pages.clear();
  for (const auto& u : j.at("training_pages")) {
    r.persona.training_pages.emplace_back(u.get<std::string>(), PageRole::kTraining);
  }
  r.accepted = j.value("accepted", true);
  if (j.contains("attrition")) {
    const auto& a = j["attrition"];
    r.attrition.candidates = a.value("candidates", std::size_t{0});
    r.attrition.after_step1 = a.value("step1", std::size_t{0});
    r.attrition.after_step2 = a.value("step2", std::size_t{0});
  }
}

}  // namespace obamet
