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

// Shared corpus fixtures for the unit and acceptance suites.

#include <cstdlib>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "obamet/adsim.hpp"
#include "obamet/corpus.hpp"
#include "obamet/persona.hpp"
#include "obamet/store.hpp"

namespace obamet::testing {

// A fresh, empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("obamet-" + name + "-" + std::to_string(::getpid()));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

struct TrainingTags {
  std::string url;
  std::vector<std::string> google, cyren, mcafee;
};

// The ten pool-persona training sites and what each source says about them.
inline std::vector<TrainingTags> pool_training_tags() {
  return {
      {"http://poolpricer.com", {"swimming pools & spas", "surf & swim"}, {"home & garden"}, {"home/garden"}},
      {"http://levelgroundpool.com", {"swimming pools & spas"}, {"home & garden"}, {"sports/recreation"}},
      {"http://whirlpool-zu-hause.de", {"swimming pools & spas", "gyms & health clubs"}, {"sports"}, {"home/garden"}},
      {"http://poolforum.se", {"surf & swim"}, {"sports"}, {"sports/recreation"}},
      {"http://eauplaisir.com",
       {"swimming pools & spas", "outdoor toys & play equipment"},
       {"recreation & hobbies"},
       {"recreation/hobbies"}},
      {"http://photopiscine.net", {"swimming pools & spas", "gems & jewellery"}, {"shopping"}, {"home/garden"}},
      {"http://a-pool.czm", {"security products & services"}, {"home security"}, {"security/surveillance"}},
      {"http://allas.fi", {"swimming pools & spas"}, {}, {"sports/recreation"}},
      {"http://seaglasspools.com",
       {"swimming pools & spas", "outdoor toys & play equipment"},
       {"home & garden"},
       {"home/garden"}},
      {"http://piscineinfoservice.com",
       {"swimming pools & spas", "security products & services"},
       {"home & garden"},
       {"security/surveillance"}},
  };
}

// Per-source tag assignments of the pool persona's training pages.
inline std::map<std::string, std::vector<TagAssignment>> pool_training_assignments() {
  std::map<std::string, std::vector<TagAssignment>> out;
  for (const auto& t : pool_training_tags()) {
    WebPage page(t.url, PageRole::kTraining);
    auto set = [](const std::vector<std::string>& v) {
      KeywordSet s;
      for (const auto& k : v) s.emplace(k);
      return s;
    };
    out["google"].push_back({page, "google", set(t.google)});
    out["cyren"].push_back({page, "cyren", set(t.cyren)});
    out["mcafee"].push_back({page, "mcafee", set(t.mcafee)});
  }
  return out;
}

// A landing page of the pool-persona fixture: who saw it, how often, and
// its Google keywords.
struct FixtureLanding {
  std::string url;
  std::int64_t ntimes;
  std::vector<std::string> google;
};

struct PoolFixture {
  Corpus corpus;
  SessionKey session{"ES", false, 0};
  // Unique landing pages left after each filter stage.
  std::size_t after_r = 0, removed_sc = 0, removed_dg = 0;
};

// One cohort with four personas and a clean profile. The pool persona's
// landing pages split into 8 retargeted hits, 226 pages also shown to the
// clean profile, 128 pages also shown to unrelated personas and 27 pages it
// alone (or with a neighbouring persona) received.
inline PoolFixture pool_fixture() {
  PoolFixture fx;
  auto& c = fx.corpus;
  const SessionKey key = fx.session;
  const auto controls = control_page_urls();

  auto add_page = [&](const std::string& url, PageRole role) { c.pages.emplace_back(url, role); };
  std::map<std::string, std::vector<TagAssignment>>& tags = c.tags;
  auto tag = [&](const std::string& source, const std::string& url, const std::vector<std::string>& kws) {
    KeywordSet s;
    for (const auto& k : kws) s.emplace(k);
    tags[source].push_back({WebPage(url, PageRole::kLanding), source, s});
  };
  for (const auto& u : controls) {
    add_page(u, PageRole::kControl);
    for (const char* src : {"google", "cyren", "mcafee"}) tag(src, u, {"weather"});
  }

  // Personas and training pages.
  auto add_persona = [&](const std::string& id, const std::string& category, std::vector<std::string> urls) {
    PersonaRecord r;
    r.persona.id = id;
    r.persona.category = Keyword(category);
    for (const auto& u : urls) {
      r.persona.training_pages.emplace_back(u, PageRole::kTraining);
      add_page(u, PageRole::kTraining);
    }
    r.attrition = {urls.size(), urls.size(), urls.size()};
    c.personas.push_back(r);
  };
  std::vector<std::string> pool_urls;
  for (const auto& t : pool_training_tags()) {
    pool_urls.push_back(t.url);
    tag("google", t.url, t.google);
    tag("cyren", t.url, t.cyren);
    tag("mcafee", t.url, t.mcafee);
  }
  add_persona("pools", "swimming pools & spas", pool_urls);
  for (auto [id, cat] : {std::pair{"yard", "yard & patio"}, {"banking", "banking"}, {"flights", "air travel"}}) {
    std::vector<std::string> urls;
    for (int i = 0; i < 10; ++i) {
      urls.push_back("https://www." + std::string(id) + "-train-" + std::to_string(i) + ".example/");
      for (const char* src : {"google", "cyren", "mcafee"}) tag(src, urls.back(), {cat});
    }
    add_persona(id, cat, urls);
  }

  // Visits: every persona sees its training pages and all control pages.
  auto visit = [&](const std::string& persona, const std::string& url, VisitKind kind, int seq) {
    c.visits.push_back({persona, key, seq, 180.0 * seq, url, kind});
  };
  for (const auto& r : c.personas) {
    int seq = 0;
    for (const auto& p : r.persona.training_pages) visit(r.persona.id, p.url, VisitKind::kTraining, seq++);
    for (const auto& u : controls) visit(r.persona.id, u, VisitKind::kControl, seq++);
  }
  for (std::size_t i = 0; i < controls.size(); ++i) {
    visit(std::string(kCleanProfileId), controls[i], VisitKind::kControl, static_cast<int>(i));
  }

  std::size_t control_rr = 0;
  auto show = [&](const std::string& persona, const std::string& landing, std::int64_t ntimes,
                  AdKind truth = AdKind::kStatic) {
    c.impressions.push_back({persona, key, controls[control_rr++ % controls.size()], landing, ntimes, truth});
  };
  auto landing = [&](const std::string& url, const std::vector<std::string>& google) {
    add_page(url, PageRole::kLanding);
    tag("google", url, google);
  };
  auto numbered = [](const std::string& stem, int i) {
    return "https://www." + stem + "-" + std::to_string(i) + ".example/offer";
  };

  // Retargeting: ads pointing back at pages the persona visited.
  show("pools", "http://poolpricer.com", 5, AdKind::kRetargeting);
  show("pools", "http://allas.fi/", 3, AdKind::kRetargeting);

  // Final 27: pool-themed advertisers and a few unrelated stragglers.
  std::vector<FixtureLanding> final_pages = {
      {"http://www.abrisud.co.uk", 1195, {"swimming pools & spas"}},
      {"http://www.endlesspools.com", 106, {"swimming pools & spas", "surf & swim"}},
      {"http://www.samsclub.com", 16, {"mass merchants & department stores", "gems & jewellery"}},
      {"http://www.paradisepoolsms.com", 8, {"swimming pools & spas"}},
      {"http://www.habitissimo.es", 8, {"home improvement"}},
      {"http://www.abrisud.es", 6, {"swimming pools & spas"}},
      {"http://www.atrium-kobylisy.cz", 6, {"security products & services", "swimming pools & spas"}},
      {"http://www.piscines-caron.com", 5, {"swimming pools & spas"}},
      {"http://athomerecreation.net", 4, {"outdoor toys & play equipment"}},
      {"http://www.saunahouse.cz", 4, {"swimming pools & spas", "hot tubs"}},
  };
  for (int i = 0; i < 8; ++i) final_pages.push_back({numbered("pool-shop", i), 2, {"swimming pools & spas"}});
  for (int i = 0; i < 9; ++i) final_pages.push_back({numbered("misc-offer", i), 2, {"consumer electronics"}});
  for (std::size_t i = 0; i < final_pages.size(); ++i) {
    const auto& f = final_pages[i];
    landing(f.url, f.google);
    bool pool_ad = f.google.size() && f.google.front() != "mass merchants & department stores" &&
                   f.google.front() != "home improvement" && f.google.front() != "consumer electronics";
    show("pools", f.url, f.ntimes, pool_ad ? AdKind::kOba : AdKind::kStatic);
    // A neighbouring persona received two of them; it is close enough in
    // the taxonomy that the demographic filter keeps them.
    if (i == 4 || i == 20) show("yard", f.url, 1);
  }

  // 128 pages that unrelated personas received as well.
  for (int i = 0; i < 128; ++i) {
    auto url = numbered("broadcast", i);
    landing(url, {i % 2 ? "car rental" : "insurance"});
    show("pools", url, i < 24 ? 4 : 3, AdKind::kGeoDemo);
    show(i % 2 ? "banking" : "flights", url, 1, AdKind::kGeoDemo);
  }

  // 226 pages the clean profile received too.
  for (int i = 0; i < 226; ++i) {
    auto url = numbered("run-of-network", i);
    landing(url, {i % 3 ? "weather" : "mobile phones"});
    show("pools", url, i < 39 ? 28 : 27, AdKind::kContextual);
    show(std::string(kCleanProfileId), url, 1, AdKind::kContextual);
  }

  fx.after_r = final_pages.size() + 128 + 226;
  fx.removed_sc = 226;
  fx.removed_dg = 128;
  return fx;
}

}  // namespace obamet::testing
