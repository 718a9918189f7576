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

#include <array>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "obamet/corpus.hpp"
#include "obamet/error.hpp"
#include "obamet/taxonomy.hpp"

namespace obamet {

// Cumulative filter combinations, always applied in the order
// retargeting -> static & contextual -> demographic & geographic.
enum class FilterSet { kR = 1, kRSc = 2, kRScDg = 3 };

inline constexpr FilterSet kAllFilterSets[] = {FilterSet::kR, FilterSet::kRSc, FilterSet::kRScDg};

inline std::string_view to_string(FilterSet f) {
  switch (f) {
    case FilterSet::kR: return "r";
    case FilterSet::kRSc: return "rsc";
    case FilterSet::kRScDg: return "rscdg";
  }
  return "r";
}

inline FilterSet filter_set_from_string(std::string_view s) {
  for (auto f : kAllFilterSets) {
    if (to_string(f) == s) return f;
  }
  throw Error(ErrorCode::kInvalidConfig, "unknown filter set '" + std::string(s) + "' (expected r, rsc or rscdg)");
}

inline int stage_count(FilterSet f) { return static_cast<int>(f); }

struct FilterConfig {
  std::vector<FilterSet> sets{FilterSet::kR, FilterSet::kRSc, FilterSet::kRScDg};
  double t_prime = 2.5;
};

inline std::set<std::string> landing_keys(const std::vector<AdImpression>& impressions) {
  std::set<std::string> out;
  for (const auto& i : impressions) out.insert(landing_key(i.landing_url));
  return out;
}

// Drops impressions whose landing page is a page the persona visited.
inline std::vector<AdImpression> filter_retargeting(const std::vector<AdImpression>& impressions,
                                                    const std::set<std::string>& visited_keys) {
  std::vector<AdImpression> out;
  for (const auto& i : impressions) {
    if (!visited_keys.count(landing_key(i.landing_url))) out.push_back(i);
  }
  return out;
}

inline std::set<std::string> visited_keys(const std::vector<std::string>& urls) {
  std::set<std::string> out;
  for (const auto& u : urls) out.insert(landing_key(u));
  return out;
}

// Drops impressions whose landing page the clean profile also received, on
// any control page.
inline std::vector<AdImpression> filter_static_contextual(
    const std::vector<AdImpression>& impressions, const std::optional<std::vector<AdImpression>>& clean) {
  if (!clean) throw Error(ErrorCode::kMissingCleanProfile, "no clean-profile impressions supplied");
  const auto clean_keys = landing_keys(*clean);
  std::vector<AdImpression> out;
  for (const auto& i : impressions) {
    if (!clean_keys.count(landing_key(i.landing_url))) out.push_back(i);
  }
  return out;
}

// Landing page -> personas that received it.
using PersonaAudience = std::map<std::string, std::set<std::string>>;

inline PersonaAudience build_audience(const std::map<std::string, std::vector<AdImpression>>& by_persona) {
  PersonaAudience audience;
  for (const auto& [persona, list] : by_persona) {
    for (const auto& i : list) audience[landing_key(i.landing_url)].insert(persona);
  }
  return audience;
}

// For persona p and ad A, drops A when some other persona that received A
// has a category scoring strictly below t_prime against p's category. Ads
// only p received always pass.
inline std::map<std::string, std::vector<AdImpression>> filter_demo_geo(
    const std::map<std::string, std::vector<AdImpression>>& by_persona,
    const std::map<std::string, Keyword>& categories, const KeywordMatcher& matcher, double t_prime) {
  const auto audience = build_audience(by_persona);
  std::map<std::pair<std::string, std::string>, double> cache;
  auto score = [&](const std::string& p, const std::string& q) {
    auto key = p < q ? std::pair{p, q} : std::pair{q, p};
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    auto cp = categories.find(p);
    auto cq = categories.find(q);
    if (cp == categories.end() || cq == categories.end()) {
      throw Error(ErrorCode::kUnknownKeyword, "no category for persona '" + (cp == categories.end() ? p : q) + "'");
    }
    double s = matcher.score(cp->second, cq->second);
    cache.emplace(key, s);
    return s;
  };
  std::map<std::string, std::vector<AdImpression>> out;
  for (const auto& [persona, list] : by_persona) {
    auto& kept = out[persona];
    for (const auto& i : list) {
      bool broadcast = false;
      for (const auto& other : audience.at(landing_key(i.landing_url))) {
        if (other != persona && score(persona, other) < t_prime) {
          broadcast = true;
          break;
        }
      }
      if (!broadcast) kept.push_back(i);
    }
  }
  return out;
}

// Everything one cohort (personas sharing geo, DNT and repetition) needs.
struct CohortInput {
  std::map<std::string, std::vector<AdImpression>> impressions;  // by persona
  std::map<std::string, std::set<std::string>> visited;          // landing keys, by persona
  std::optional<std::vector<AdImpression>> clean;
};

// stages[0] is the raw input, stages[k] the output after k filters.
struct PersonaStages {
  std::array<std::vector<AdImpression>, 4> stages;
};

inline std::map<std::string, PersonaStages> run_pipeline(const CohortInput& in,
                                                         const std::map<std::string, Keyword>& categories,
                                                         const KeywordMatcher& matcher, double t_prime,
                                                         int max_stage = 3) {
  std::map<std::string, PersonaStages> out;
  for (const auto& [persona, list] : in.impressions) {
    auto& s = out[persona];
    s.stages[0] = list;
    auto v = in.visited.find(persona);
    s.stages[1] = filter_retargeting(list, v == in.visited.end() ? std::set<std::string>{} : v->second);
  }
  if (max_stage >= 2) {
    for (auto& [_, s] : out) s.stages[2] = filter_static_contextual(s.stages[1], in.clean);
  }
  if (max_stage >= 3) {
    std::map<std::string, std::vector<AdImpression>> after_sc;
    for (const auto& [persona, s] : out) after_sc[persona] = s.stages[2];
    auto dg = filter_demo_geo(after_sc, categories, matcher, t_prime);
    for (auto& [persona, s] : out) s.stages[3] = std::move(dg[persona]);
  }
  return out;
}

}  // namespace obamet
