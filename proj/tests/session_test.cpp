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
#include "obamet/session.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>
#include <gtest/gtest.h>

namespace obamet {
namespace {

std::vector<WebPage> Pool(int training, int control) {
  std::vector<WebPage> pool;
  for (int i = 0; i < training; ++i) pool.emplace_back("https://t" + std::to_string(i) + ".example", PageRole::kTraining);
  for (int i = 0; i < control; ++i) pool.emplace_back("https://c" + std::to_string(i) + ".example", PageRole::kControl);
  return pool;
}

SessionConfig Config(int budget, std::uint64_t seed = 42) {
  SessionConfig cfg;
  cfg.persona_id = "p";
  cfg.visit_budget = budget;
  cfg.rng_seed = seed;
  return cfg;
}

TEST(ScheduleVisits, BudgetAndMonotoneClock) {
  auto ev = schedule_visits(Pool(10, 5), Config(310));
  ASSERT_EQ(ev.size(), 310u);
  for (std::size_t i = 0; i < ev.size(); ++i) {
    EXPECT_EQ(ev[i].seq, static_cast<int>(i));
    if (i) EXPECT_GT(ev[i].timestamp, ev[i - 1].timestamp);
  }
}

TEST(ScheduleVisits, SinglePagePool) {
  auto ev = schedule_visits(Pool(1, 0), Config(50));
  for (const auto& e : ev) {
    EXPECT_EQ(e.page.url, "https://t0.example");
    EXPECT_EQ(e.kind, VisitKind::kTraining);
  }
  EXPECT_GT(ev.back().timestamp, 0.0);
}

TEST(ScheduleVisits, GapsAndPagesFollowTheirDistributions) {
  const int n = 10000, k = 20;
  auto cfg = Config(n, 7);
  auto ev = schedule_visits(Pool(k, 0), cfg);
  double mean_gap = ev.back().timestamp / n;
  EXPECT_NEAR(mean_gap, 180.0, 0.05 * 180.0);

  std::map<std::string, int> counts;
  for (const auto& e : ev) ++counts[e.page.url];
  double expected = double(n) / k, chi2 = 0;
  for (const auto& [_, c] : counts) chi2 += (c - expected) * (c - expected) / expected;
  double critical = boost::math::quantile(boost::math::complement(boost::math::chi_squared(k - 1), 0.01));
  EXPECT_LT(chi2, critical);
}

TEST(ScheduleVisits, Deterministic) {
  auto a = schedule_visits(Pool(10, 5), Config(100, 9));
  auto b = schedule_visits(Pool(10, 5), Config(100, 9));
  auto c = schedule_visits(Pool(10, 5), Config(100, 10));
  ASSERT_EQ(a.size(), b.size());
  bool differs = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].page.url, b[i].page.url);
    EXPECT_EQ(a[i].timestamp, b[i].timestamp);
    differs = differs || a[i].page.url != c[i].page.url;
  }
  EXPECT_TRUE(differs);
}

TEST(ScheduleVisits, Errors) {
  try {
    schedule_visits({}, Config(10));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyPool);
  }
  EXPECT_THROW(schedule_visits(Pool(1, 0), Config(0)), Error);
  auto cfg = Config(5);
  cfg.mean_interval = 0;
  EXPECT_THROW(schedule_visits(Pool(1, 0), cfg), Error);
}

class CountingHarvester : public Harvester {
 public:
  std::vector<ServedAd> visit(const SessionConfig&, const VisitEvent& e) override {
    ++visits;
    if (resets_before_visit.size() < static_cast<std::size_t>(visits)) resets_before_visit.push_back(resets);
    if (fail_at >= 0 && e.seq == fail_at) throw std::runtime_error("browser crashed");
    if (e.kind == VisitKind::kTraining) return {};
    return {{"https://ad-a.example/x", AdKind::kStatic}, {"https://ad-a.example/x/", AdKind::kStatic},
            {"https://ad-b.example", AdKind::kContextual}};
  }
  void reset_state() override { ++resets; }

  int visits = 0, resets = 0, fail_at = -1;
  std::vector<int> resets_before_visit;
};

Persona TwoPagePersona() {
  Persona p;
  p.id = "p";
  p.category = Keyword("pets");
  p.training_pages = {WebPage("https://t0.example", PageRole::kTraining), WebPage("https://t1.example", PageRole::kTraining)};
  return p;
}

TEST(RunSession, MergesImpressionsAndConservesCounts) {
  CountingHarvester h;
  auto controls = std::vector<WebPage>{WebPage("https://c0.example", PageRole::kControl),
                                       WebPage("https://c1.example", PageRole::kControl)};
  auto r = run_session(TwoPagePersona(), controls, Config(200), h);
  EXPECT_TRUE(r.complete);
  EXPECT_EQ(r.visits.size(), 200u);
  EXPECT_EQ(r.training_visits + r.control_visits, 200);
  EXPECT_EQ(r.raw_ads, 3 * r.control_visits);
  std::int64_t total = 0;
  for (const auto& i : r.impressions) total += i.ntimes;
  EXPECT_EQ(total, r.raw_ads);
  // Two landing pages (trailing slash collides) on two control pages.
  EXPECT_EQ(r.impressions.size(), 4u);
  EXPECT_EQ(h.resets, 0);
}

TEST(RunSession, CleanProfileResetsAroundEveryVisit) {
  CountingHarvester h;
  Persona clean;
  clean.id = std::string(kCleanProfileId);
  auto cfg = Config(25);
  cfg.clean_profile = true;
  auto r = run_session(clean, {WebPage("https://c0.example", PageRole::kControl)}, cfg, h);
  EXPECT_EQ(r.control_visits, 25);
  EXPECT_EQ(h.resets, 26);
  for (std::size_t i = 0; i < h.resets_before_visit.size(); ++i) EXPECT_EQ(h.resets_before_visit[i], int(i) + 1);
}

TEST(RunSession, HarvesterFailureKeepsPartialData) {
  CountingHarvester h;
  h.fail_at = 10;
  auto r = run_session(TwoPagePersona(), {WebPage("https://c0.example", PageRole::kControl)}, Config(50), h);
  EXPECT_FALSE(r.complete);
  EXPECT_EQ(r.visits.size(), 10u);
  EXPECT_NE(r.failure.find("browser crashed"), std::string::npos);
}

TEST(ReplayHarvester, CyclesThroughRecordedVisits) {
  ReplayHarvester h({{"https://c0.example/", {{{"https://x.example", AdKind::kOba}}, {}}}});
  Persona p;
  p.id = "p";
  auto r = run_session(p, {WebPage("https://c0.example", PageRole::kControl)}, Config(10), h);
  ASSERT_EQ(r.impressions.size(), 1u);
  EXPECT_EQ(r.impressions[0].ntimes, 5);
  EXPECT_EQ(r.impressions[0].ground_truth, AdKind::kOba);
}

TEST(RunSession, DeterministicForEqualSeeds) {
  CountingHarvester a, b;
  auto controls = std::vector<WebPage>{WebPage("https://c0.example", PageRole::kControl)};
  auto ra = run_session(TwoPagePersona(), controls, Config(80, 5), a);
  auto rb = run_session(TwoPagePersona(), controls, Config(80, 5), b);
  EXPECT_EQ(ra.visits, rb.visits);
  EXPECT_EQ(ra.impressions, rb.impressions);
}

}  // namespace
}  // namespace obamet
