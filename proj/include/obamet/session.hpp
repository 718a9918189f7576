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
#include <exception>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "obamet/corpus.hpp"
#include "obamet/error.hpp"
#include "obamet/persona.hpp"
#include "obamet/rng.hpp"

namespace obamet {

inline constexpr double kDefaultMeanInterval = 180.0;  // simulated seconds
inline constexpr int kDefaultVisitBudget = 310;
inline constexpr int kDefaultRepetitions = 4;

struct SessionConfig {
  std::string persona_id;
  SessionKey key;
  bool clean_profile = false;
  double mean_interval = kDefaultMeanInterval;
  int visit_budget = kDefaultVisitBudget;
  std::uint64_t rng_seed = 0;
};

struct VisitEvent {
  int seq = 0;
  double timestamp = 0.0;
  WebPage page;
  VisitKind kind = VisitKind::kControl;
};

// Draws `visit_budget` visits uniformly from `pool`, with i.i.d. exponential
// gaps of mean `mean_interval` on a simulated clock starting at 0.
inline std::vector<VisitEvent> schedule_visits(const std::vector<WebPage>& pool, const SessionConfig& cfg) {
  if (pool.empty()) throw Error(ErrorCode::kEmptyPool, "no pages to visit for '" + cfg.persona_id + "'");
  if (cfg.visit_budget < 1) throw Error(ErrorCode::kInvalidConfig, "visit budget must be >= 1");
  if (!(cfg.mean_interval > 0.0)) throw Error(ErrorCode::kInvalidConfig, "mean interval must be > 0");
  Rng rng(cfg.rng_seed);
  std::vector<VisitEvent> events;
  events.reserve(static_cast<std::size_t>(cfg.visit_budget));
  double clock = 0.0;
  for (int i = 0; i < cfg.visit_budget; ++i) {
    clock += rng.exponential(cfg.mean_interval);
    const auto& page = pool[rng.index(pool.size())];
    events.push_back({i, clock, page,
                      page.role == PageRole::kTraining ? VisitKind::kTraining : VisitKind::kControl});
  }
  return events;
}

struct ServedAd {
  std::string landing_url;
  std::optional<AdKind> label;
};

// Something that loads pages on behalf of a session and reports the ads
// shown on them (the simulator, or a recorded fixture).
class Harvester {
 public:
  virtual ~Harvester() = default;
  virtual std::vector<ServedAd> visit(const SessionConfig& cfg, const VisitEvent& event) = 0;
  // Drop cookies, history and any profile state.
  virtual void reset_state() = 0;
};

struct SessionResult {
  SessionConfig config;
  std::vector<VisitRecord> visits;
  std::vector<AdImpression> impressions;
  std::int64_t raw_ads = 0;
  int training_visits = 0;
  int control_visits = 0;
  bool complete = true;
  std::string failure;
};

// Runs one persona session. Ads seen on control pages are merged per
// (control page, landing page) with summed ntimes; training visits only feed
// the harvester. A clean-profile session resets the harvester after every
// visit. A throwing harvester ends the session early with complete = false
// and whatever was collected so far.
inline SessionResult run_session(const Persona& persona, const std::vector<WebPage>& control_pages,
                                 const SessionConfig& cfg, Harvester& harvester) {
  std::vector<WebPage> pool = persona.training_pages;
  pool.insert(pool.end(), control_pages.begin(), control_pages.end());
  SessionResult result;
  result.config = cfg;
  auto events = schedule_visits(pool, cfg);

  std::map<std::pair<std::string, std::string>, AdImpression> merged;
  if (cfg.clean_profile) harvester.reset_state();
  for (const auto& e : events) {
    std::vector<ServedAd> served;
    try {
      served = harvester.visit(cfg, e);
    } catch (const std::exception& ex) {
      result.complete = false;
      result.failure = "visit " + std::to_string(e.seq) + " to " + e.page.url + ": " + ex.what();
      break;
    }
    result.visits.push_back({persona.id, cfg.key, e.seq, e.timestamp, e.page.url, e.kind});
    if (e.kind == VisitKind::kTraining) {
      ++result.training_visits;
    } else {
      ++result.control_visits;
      for (auto& ad : served) {
        ++result.raw_ads;
        auto landing = normalize_url(ad.landing_url);
        auto [it, inserted] = merged.try_emplace({e.page.url, landing});
        if (inserted) {
          it->second = AdImpression{persona.id, cfg.key, e.page.url, landing, 0, ad.label};
        }
        it->second.ntimes += 1;
      }
    }
    if (cfg.clean_profile) harvester.reset_state();
  }
  result.impressions.reserve(merged.size());
  for (auto& [_, imp] : merged) result.impressions.push_back(std::move(imp));
  return result;
}

// Replays recorded ads: each control page cycles through its recorded
// per-visit ad lists. Training visits serve nothing.
class ReplayHarvester final : public Harvester {
 public:
  explicit ReplayHarvester(std::map<std::string, std::vector<std::vector<ServedAd>>> by_control) {
    for (auto& [url, lists] : by_control) script_[landing_key(url)] = std::move(lists);
  }

  std::vector<ServedAd> visit(const SessionConfig&, const VisitEvent& event) override {
    if (event.kind != VisitKind::kControl) return {};
    auto it = script_.find(landing_key(event.page.url));
    if (it == script_.end() || it->second.empty()) return {};
    auto& cursor = cursor_[it->first];
    const auto& ads = it->second[cursor % it->second.size()];
    ++cursor;
    return ads;
  }

  void reset_state() override {}

 private:
  std::map<std::string, std::vector<std::vector<ServedAd>>> script_;
  std::map<std::string, std::size_t> cursor_;
};

}  // namespace obamet
