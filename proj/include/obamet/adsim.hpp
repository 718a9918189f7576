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
#include <cctype>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "obamet/corpus.hpp"
#include "obamet/error.hpp"
#include "obamet/persona.hpp"
#include "obamet/rng.hpp"
#include "obamet/session.hpp"
#include "obamet/taxonomy.hpp"

namespace obamet {

// Per-source tagging noise. Draws are coupled across settings: for a fixed
// seed, raising `spurious` only ever adds keywords and raising `dropout` only
// ever removes them.
struct SourceNoise {
  double dropout = 0.0;   // per true keyword
  double spurious = 0.0;  // chance of one extra vocabulary keyword per page
  double miss = 0.0;      // chance the page is not tagged at all

  friend bool operator==(const SourceNoise&, const SourceNoise&) = default;
};

inline std::map<std::string, SourceNoise> zero_noise_preset() {
  return {{"google", {}}, {"mcafee", {}}, {"cyren", {}}};
}

// Light disagreement between the three sources: fine-grained Google loses
// few keywords, the flat vocabularies lose and invent a few more.
inline std::map<std::string, SourceNoise> field_noise_preset() {
  return {{"google", {0.01, 0.03, 0.0}}, {"mcafee", {0.02, 0.05, 0.0}}, {"cyren", {0.03, 0.06, 0.0}}};
}

struct PersonaSpec {
  std::string id;
  std::string category;
  bool sensitive = false;
};

struct SimConfig {
  std::uint64_t rng_seed = 1;
  std::size_t inventory_size = 2000;
  std::map<AdKind, double> mix = {{AdKind::kOba, 0.40},
                                  {AdKind::kContextual, 0.25},
                                  {AdKind::kStatic, 0.15},
                                  {AdKind::kRetargeting, 0.10},
                                  {AdKind::kGeoDemo, 0.10}};
  std::size_t tracker_pool = 80;
  std::size_t ad_networks = 6;
  std::size_t min_trackers = 15;
  std::size_t max_trackers = 40;
  std::size_t candidates_per_persona = 30;
  bool honor_dnt = false;
  double activation_threshold = 3.0;  // weighted training visits
  double profile_decay_tau = 7 * 86400.0;
  bool share_profiles = false;
  int slots_per_visit = 3;
  double oba_weight = 4.0;  // relative serving weight of an eligible OBA ad
  std::vector<std::string> geos = {"ES", "US"};
  std::vector<std::string> neutral_categories = {
      "weather",        "local news",  "business news", "mass merchants & department stores",
      "coupons & discount offers", "mobile phones", "telecommunications", "web hosting",
      "software",       "consumer electronics", "insurance", "car rental",
      "fast food",      "beverages",   "music & audio", "tv & video",
      "jobs",           "online courses", "legal services", "cars"};
  std::map<std::string, SourceNoise> noise = zero_noise_preset();
};

struct AdUnit {
  std::string id;
  WebPage landing;
  AdKind kind = AdKind::kStatic;
  std::optional<Keyword> target;  // oba only
  std::string theme;              // contextual only
  std::string geo;                // geo_demo only
  std::string owner_persona;      // persona whose category is targeted (oba) or visited (retargeting)
  double base_weight = 1.0;
};

struct SimPage {
  WebPage page;
  KeywordSet categories;
  std::vector<int> trackers;
  std::string theme;
};

// Per-browser aggregator state.
struct BrowserState {
  std::map<int, std::map<std::string, double>> profile;  // tracker -> category -> weight
  std::set<std::string> history;                          // landing keys of visited pages
  double last_time = 0.0;

  void reset() {
    profile.clear();
    history.clear();
    last_time = 0.0;
  }
  bool empty() const { return profile.empty() && history.empty(); }
};

struct ServedUnit {
  const AdUnit* unit;
  AdKind label;
};

class World {
 public:
  const SimConfig& config() const { return cfg_; }
  const std::vector<PersonaRecord>& personas() const { return personas_; }
  const std::vector<CandidatePage>& candidates(const std::string& persona_id) const {
    return candidates_.at(persona_id);
  }
  const std::vector<WebPage>& control_pages() const { return control_pages_; }
  const std::vector<AdUnit>& inventory() const { return inventory_; }
  const std::vector<std::string>& vocabulary() const { return vocabulary_; }
  std::vector<std::string> source_names() const {
    std::vector<std::string> out;
    for (const auto& [name, _] : cfg_.noise) out.push_back(name);
    return out;
  }

  const SimPage* find_page(const std::string& url) const {
    auto it = pages_.find(landing_key(url));
    return it == pages_.end() ? nullptr : &it->second;
  }

  // Every page known to the world, sorted by URL.
  std::vector<WebPage> pages() const {
    std::vector<WebPage> out;
    for (const auto& [_, p] : pages_) out.push_back(p.page);
    std::sort(out.begin(), out.end());
    return out;
  }

  // Distinct trackers over a persona's training pages.
  std::set<int> trackers_of(const std::string& persona_id) const {
    std::set<int> out;
    for (const auto& r : personas_) {
      if (r.persona.id != persona_id) continue;
      for (const auto& p : r.persona.training_pages) {
        const auto* sp = find_page(p.url);
        if (sp) out.insert(sp->trackers.begin(), sp->trackers.end());
      }
    }
    return out;
  }

  // Browser-side effect of a visit plus the ads served on it, each labeled
  // with the rule that made it eligible.
  std::vector<ServedUnit> serve_ads(BrowserState& state, const VisitEvent& visit, const SessionKey& ctx,
                                    Rng& rng) const {
    const SimPage* page = find_page(visit.page.url);
    if (!page) throw Error(ErrorCode::kInvalidConfig, "page not in world: " + visit.page.url);
    double dt = visit.timestamp - state.last_time;
    if (dt > 0.0 && cfg_.profile_decay_tau > 0.0) {
      double f = std::exp(-dt / cfg_.profile_decay_tau);
      for (auto& [_, cats] : state.profile) {
        for (auto& [_, w] : cats) w *= f;
      }
    }
    state.last_time = std::max(state.last_time, visit.timestamp);
    state.history.insert(landing_key(page->page.url));

    if (page->page.role == PageRole::kTraining) {
      for (int t : page->trackers) {
        auto& cats = state.profile[t];
        for (const auto& c : page->categories) cats[c.text()] += 1.0;
      }
      return {};
    }
    if (page->page.role != PageRole::kControl) return {};

    const bool suppress = cfg_.honor_dnt && ctx.dnt;
    std::vector<const AdUnit*> eligible;
    std::vector<double> weights;
    for (const auto& ad : inventory_) {
      bool ok = false;
      switch (ad.kind) {
        case AdKind::kStatic: ok = true; break;
        case AdKind::kContextual: ok = ad.theme == page->theme; break;
        case AdKind::kGeoDemo: ok = ad.geo == ctx.geo; break;
        case AdKind::kRetargeting: ok = !suppress && state.history.count(landing_key(ad.landing.url)); break;
        case AdKind::kOba: ok = !suppress && profile_active(state, *page, ad.target->text()); break;
      }
      if (ok) {
        eligible.push_back(&ad);
        weights.push_back(ad.base_weight);
      }
    }
    std::vector<ServedUnit> out;
    if (eligible.empty()) return out;
    for (int s = 0; s < cfg_.slots_per_visit; ++s) {
      const AdUnit* ad = eligible[rng.weighted(weights)];
      out.push_back({ad, ad->kind});
    }
    return out;
  }

  json to_json() const;

 private:
  friend World build_world(const SimConfig&, const std::vector<PersonaSpec>&, const KeywordTaxonomy&);

  bool profile_active(const BrowserState& state, const SimPage& control, const std::string& category) const {
    auto weight_at = [&](int tracker) {
      auto it = state.profile.find(tracker);
      if (it == state.profile.end()) return 0.0;
      auto c = it->second.find(category);
      return c == it->second.end() ? 0.0 : c->second;
    };
    if (cfg_.share_profiles) {
      for (const auto& [tracker, _] : state.profile) {
        if (weight_at(tracker) > cfg_.activation_threshold) return true;
      }
      return false;
    }
    for (int t : control.trackers) {
      if (weight_at(t) > cfg_.activation_threshold) return true;
    }
    return false;
  }

  SimConfig cfg_;
  std::vector<PersonaRecord> personas_;
  std::map<std::string, std::vector<CandidatePage>> candidates_;
  std::vector<WebPage> control_pages_;
  std::vector<AdUnit> inventory_;
  std::map<std::string, SimPage> pages_;  // by landing key
  std::vector<std::string> vocabulary_;
};

// Exact per-kind counts: floor of share * n, remainders handed out by
// largest fractional part (ties in kAllAdKinds order).
inline std::map<AdKind, std::size_t> apportion(const std::map<AdKind, double>& mix, std::size_t n) {
  std::map<AdKind, std::size_t> out;
  std::vector<std::pair<double, int>> rem;
  std::size_t used = 0;
  int order = 0;
  for (auto k : kAllAdKinds) {
    auto it = mix.find(k);
    double share = it == mix.end() ? 0.0 : it->second;
    double exact = share * static_cast<double>(n);
    auto whole = static_cast<std::size_t>(std::floor(exact + 1e-9));
    out[k] = whole;
    used += whole;
    rem.emplace_back(exact - static_cast<double>(whole), order++);
  }
  std::stable_sort(rem.begin(), rem.end(), [](auto a, auto b) { return a.first > b.first; });
  for (std::size_t i = 0; used < n && i < rem.size(); ++i, ++used) out[kAllAdKinds[rem[i].second]] += 1;
  return out;
}

inline void validate(const SimConfig& cfg) {
  double total = 0.0;
  for (const auto& [k, v] : cfg.mix) {
    if (v < 0.0) throw Error(ErrorCode::kInvalidConfig, "negative share for " + std::string(to_string(k)));
    total += v;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw Error(ErrorCode::kInvalidConfig, "inventory mix sums to " + std::to_string(total) + ", not 1");
  }
  if (cfg.min_trackers > cfg.max_trackers || cfg.max_trackers > cfg.tracker_pool) {
    throw Error(ErrorCode::kInvalidConfig, "tracker bounds must satisfy min <= max <= pool");
  }
  if (cfg.ad_networks < 2 || cfg.ad_networks > cfg.min_trackers) {
    throw Error(ErrorCode::kInvalidConfig, "need 2 <= ad_networks <= min_trackers");
  }
  if (cfg.slots_per_visit < 1) throw Error(ErrorCode::kInvalidConfig, "slots_per_visit must be >= 1");
  if (cfg.activation_threshold < 0.0) throw Error(ErrorCode::kInvalidConfig, "negative activation threshold");
  if (cfg.geos.empty()) throw Error(ErrorCode::kInvalidConfig, "no geo labels");
  if (cfg.noise.empty()) throw Error(ErrorCode::kInvalidConfig, "no tagging sources");
  for (const auto& [name, n] : cfg.noise) {
    for (double p : {n.dropout, n.spurious, n.miss}) {
      if (p < 0.0 || p > 1.0) throw Error(ErrorCode::kInvalidConfig, "noise rate outside [0,1] for " + name);
    }
  }
}

namespace sim_detail {

inline std::string slug(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (std::isalnum(static_cast<unsigned char>(c))) {
      out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    } else if (!out.empty() && out.back() != '-') {
      out.push_back('-');
    }
  }
  while (!out.empty() && out.back() == '-') out.pop_back();
  return out;
}

inline std::string pad(std::size_t i) {
  std::string s = std::to_string(i);
  return std::string(s.size() < 4 ? 4 - s.size() : 0, '0') + s;
}

}  // namespace sim_detail

// The five weather sites used as control pages.
inline const std::vector<std::string>& control_page_urls() {
  static const std::vector<std::string> urls = {
      "http://www.accuweather.com", "http://www.localconditions.com", "http://www.wunderground.com",
      "http://www.myforecast.com", "http://www.weatherbase.com"};
  return urls;
}

inline World build_world(const SimConfig& cfg, const std::vector<PersonaSpec>& specs,
                         const KeywordTaxonomy& tax) {
  validate(cfg);
  using sim_detail::pad;
  using sim_detail::slug;
  World w;
  w.cfg_ = cfg;
  Rng rng(derive_seed(cfg.rng_seed, "world"));
  const std::string selection_source = cfg.noise.count("google") ? std::string("google") : cfg.noise.begin()->first;

  std::set<std::string> persona_vocab;
  std::set<std::string> seen_ids;
  for (const auto& spec : specs) {
    Keyword cat(spec.category);
    if (!tax.contains(cat)) {
      throw Error(ErrorCode::kInvalidConfig, "persona category '" + cat.text() + "' is not in the taxonomy");
    }
    if (!seen_ids.insert(spec.id).second) throw Error(ErrorCode::kInvalidConfig, "duplicate persona id " + spec.id);
    persona_vocab.insert(cat.text());
    for (const auto& c : tax.children_of(cat)) persona_vocab.insert(c);
  }
  std::vector<std::string> neutral;
  for (const auto& n : cfg.neutral_categories) {
    auto t = normalize_keyword(n);
    if (!t.empty() && !persona_vocab.count(t)) neutral.push_back(t);
  }
  std::sort(neutral.begin(), neutral.end());
  neutral.erase(std::unique(neutral.begin(), neutral.end()), neutral.end());
  if (neutral.empty()) throw Error(ErrorCode::kInvalidConfig, "no neutral categories left for non-OBA landing pages");
  auto pick_neutral = [&](Rng& r) { return Keyword(neutral[r.index(neutral.size())]); };

  // Control pages: weather themed, carrying every ad network.
  for (const auto& url : control_page_urls()) {
    SimPage p;
    p.page = WebPage(url, PageRole::kControl);
    p.categories = {Keyword("weather")};
    p.theme = "weather";
    for (std::size_t a = 0; a < cfg.ad_networks; ++a) p.trackers.push_back(static_cast<int>(a));
    w.control_pages_.push_back(p.page);
    w.pages_[landing_key(p.page.url)] = p;
  }

  // Personas: candidate pool, three-step selection, tracker placement.
  for (const auto& spec : specs) {
    Keyword cat(spec.category);
    auto children = tax.children_of(cat);
    Rng prng(derive_seed(cfg.rng_seed, "persona/" + spec.id));
    std::vector<CandidatePage> candidates;
    std::map<std::string, KeywordSet> cand_categories;
    for (std::size_t i = 0; i < cfg.candidates_per_persona; ++i) {
      CandidatePage c;
      c.page = WebPage("https://www." + slug(spec.id) + "-site" + pad(i) + ".example", PageRole::kTraining);
      KeywordSet cats;
      double u = prng.uniform01();
      if (u < 0.15) {
        // Off-topic: the selection source does not list the category.
        cats.insert(pick_neutral(prng));
        if (!children.empty()) cats.insert(Keyword(children[prng.index(children.size())]));
        c.profile_categories = cats;
      } else if (u < 0.30) {
        // Contaminating: the visit adds unrelated interests to the profile.
        cats.insert(cat);
        auto n = prng.index(neutral.size());
        c.profile_categories = {cat, Keyword(neutral[n]), Keyword(neutral[(n + 1) % neutral.size()])};
        if (spec.sensitive) c.profile_categories = {Keyword(neutral[n])};
      } else {
        cats.insert(cat);
        if (!children.empty() && prng.bernoulli(0.5)) cats.insert(Keyword(children[prng.index(children.size())]));
        if (!spec.sensitive) c.profile_categories = cats;
      }
      c.source_keywords[selection_source] = cats;
      cand_categories[c.page.url] = cats;
      candidates.push_back(std::move(c));
    }
    PersonaRecord rec;
    rec.persona.id = spec.id;
    rec.persona.category = cat;
    rec.persona.sensitive = spec.sensitive;
    try {
      auto sel = select_training_pages(cat, candidates, spec.sensitive, selection_source);
      rec.persona.training_pages = sel.pages;
      rec.attrition = sel.attrition;
      rec.accepted = true;
    } catch (const PersonaRejected& e) {
      rec.attrition = e.attrition();
      rec.accepted = false;
    }
    w.candidates_[spec.id] = candidates;

    if (rec.accepted) {
      // Distinct tracker count drawn in [min, max]; at least two ad networks.
      std::size_t want = cfg.min_trackers + prng.index(cfg.max_trackers - cfg.min_trackers + 1);
      std::vector<int> networks, others;
      for (std::size_t t = 0; t < cfg.tracker_pool; ++t) {
        (t < cfg.ad_networks ? networks : others).push_back(static_cast<int>(t));
      }
      prng.shuffle(networks);
      prng.shuffle(others);
      std::vector<int> chosen(networks.begin(), networks.begin() + 2);
      for (std::size_t i = 2; i < cfg.ad_networks && chosen.size() < want; ++i) {
        if (prng.bernoulli(0.5)) chosen.push_back(networks[i]);
      }
      for (std::size_t i = 0; chosen.size() < want; ++i) chosen.push_back(others[i]);
      const auto& tp = rec.persona.training_pages;
      std::vector<std::vector<int>> placed(tp.size());
      for (std::size_t i = 0; i < tp.size(); ++i) placed[i].push_back(chosen[i % 2]);
      std::vector<int> rest(chosen.begin() + 2, chosen.end());
      prng.shuffle(rest);
      for (std::size_t i = 0; i < rest.size(); ++i) placed[i % tp.size()].push_back(rest[i]);
      for (std::size_t i = 0; i < tp.size(); ++i) {
        // A few extra repeats from the persona's own tracker set.
        int extra = static_cast<int>(prng.index(3));
        for (int e = 0; e < extra; ++e) placed[i].push_back(chosen[prng.index(chosen.size())]);
        std::sort(placed[i].begin(), placed[i].end());
        placed[i].erase(std::unique(placed[i].begin(), placed[i].end()), placed[i].end());
        SimPage p;
        p.page = tp[i];
        p.categories = cand_categories.at(tp[i].url);
        p.trackers = placed[i];
        p.theme = cat.text();
        w.pages_[landing_key(p.page.url)] = p;
      }
    }
    w.personas_.push_back(std::move(rec));
  }

  // Inventory.
  auto counts = apportion(cfg.mix, cfg.inventory_size);
  std::size_t serial = 0;
  auto landing_for = [&](const std::string& label) {
    return WebPage("https://www." + slug(label) + "-" + pad(serial) + ".example/offer", PageRole::kLanding);
  };
  auto add_unit = [&](AdUnit ad, KeywordSet cats, double kind_weight) {
    ad.id = "ad-" + pad(serial);
    ad.base_weight = kind_weight * rng.uniform(0.5, 1.5);
    if (ad.kind != AdKind::kRetargeting) {
      SimPage p;
      p.page = ad.landing;
      p.categories = std::move(cats);
      w.pages_[landing_key(p.page.url)] = p;
    }
    w.inventory_.push_back(std::move(ad));
    ++serial;
  };

  struct Target {
    Keyword target;
    Keyword main;
    std::string owner;
  };
  std::vector<Target> targets;
  for (const auto& r : w.personas_) {
    if (!r.accepted) continue;
    targets.push_back({r.persona.category, r.persona.category, r.persona.id});
    for (const auto& c : tax.children_of(r.persona.category)) targets.push_back({Keyword(c), r.persona.category, r.persona.id});
  }
  for (std::size_t i = 0; i < counts[AdKind::kOba]; ++i) {
    if (targets.empty()) {
      // Nobody to target; fall back to static inventory.
      AdUnit ad;
      ad.kind = AdKind::kStatic;
      auto cat = pick_neutral(rng);
      ad.landing = landing_for(cat.text());
      add_unit(std::move(ad), {cat}, 1.0);
      continue;
    }
    const auto& t = targets[i % targets.size()];
    AdUnit ad;
    ad.kind = AdKind::kOba;
    ad.target = t.target;
    ad.owner_persona = t.owner;
    ad.landing = landing_for(t.target.text());
    KeywordSet cats{t.main, t.target};
    if (t.target == t.main) {
      auto kids = tax.children_of(t.main);
      if (!kids.empty()) cats.insert(Keyword(kids[rng.index(kids.size())]));
    }
    add_unit(std::move(ad), std::move(cats), cfg.oba_weight);
  }
  for (std::size_t i = 0; i < counts[AdKind::kContextual]; ++i) {
    AdUnit ad;
    ad.kind = AdKind::kContextual;
    ad.theme = "weather";
    ad.landing = landing_for("weather");
    KeywordSet cats{Keyword("weather")};
    if (rng.bernoulli(0.5)) cats.insert(pick_neutral(rng));
    add_unit(std::move(ad), std::move(cats), 1.0);
  }
  for (std::size_t i = 0; i < counts[AdKind::kStatic]; ++i) {
    AdUnit ad;
    ad.kind = AdKind::kStatic;
    auto cat = pick_neutral(rng);
    ad.landing = landing_for(cat.text());
    add_unit(std::move(ad), {cat}, 1.0);
  }
  {
    // Retargeting ads point back at training pages, spread over personas.
    std::vector<std::pair<WebPage, std::string>> training;
    std::size_t longest = 0;
    for (const auto& r : w.personas_) {
      if (r.accepted) longest = std::max(longest, r.persona.training_pages.size());
    }
    for (std::size_t i = 0; i < longest; ++i) {
      for (const auto& r : w.personas_) {
        if (r.accepted && i < r.persona.training_pages.size()) {
          training.emplace_back(r.persona.training_pages[i], r.persona.id);
        }
      }
    }
    if (counts[AdKind::kRetargeting] > 0 && training.empty()) {
      throw Error(ErrorCode::kInvalidConfig, "retargeting ads but no training pages to point at");
    }
    // Several ads may point at the same page when training sets are small.
    for (std::size_t i = 0; i < counts[AdKind::kRetargeting]; ++i) {
      AdUnit ad;
      ad.kind = AdKind::kRetargeting;
      ad.landing = training[i % training.size()].first;
      ad.owner_persona = training[i % training.size()].second;
      add_unit(std::move(ad), {}, 1.0);
    }
  }
  for (std::size_t i = 0; i < counts[AdKind::kGeoDemo]; ++i) {
    AdUnit ad;
    ad.kind = AdKind::kGeoDemo;
    ad.geo = cfg.geos[i % cfg.geos.size()];
    auto cat = pick_neutral(rng);
    ad.landing = landing_for(cat.text() + " " + ad.geo);
    add_unit(std::move(ad), {cat}, 1.0);
  }

  std::set<std::string> vocab;
  for (const auto& [_, p] : w.pages_) {
    for (const auto& c : p.categories) vocab.insert(c.text());
  }
  w.vocabulary_.assign(vocab.begin(), vocab.end());
  return w;
}

inline json World::to_json() const {
  json j;
  j["seed"] = cfg_.rng_seed;
  j["personas"] = personas_;
  json inv = json::array();
  for (const auto& ad : inventory_) {
    json a{{"id", ad.id}, {"landing", ad.landing.url}, {"kind", to_string(ad.kind)},
           {"base_weight", ad.base_weight}};
    if (ad.target) a["target"] = ad.target->text();
    if (!ad.theme.empty()) a["theme"] = ad.theme;
    if (!ad.geo.empty()) a["geo"] = ad.geo;
    if (!ad.owner_persona.empty()) a["owner"] = ad.owner_persona;
    inv.push_back(std::move(a));
  }
  j["inventory"] = std::move(inv);
  json pages = json::array();
  for (const auto& [_, p] : pages_) {
    pages.push_back({{"url", p.page.url},
                     {"role", to_string(p.page.role)},
                     {"categories", keywords_to_json(p.categories)},
                     {"trackers", p.trackers}});
  }
  j["pages"] = std::move(pages);
  return j;
}

// The simulator as a harvester for one browser.
class SimHarvester final : public Harvester {
 public:
  SimHarvester(const World& world, std::uint64_t seed) : world_(&world), rng_(seed) {}

  std::vector<ServedAd> visit(const SessionConfig& cfg, const VisitEvent& event) override {
    std::vector<ServedAd> out;
    for (const auto& s : world_->serve_ads(state_, event, cfg.key, rng_)) {
      out.push_back({s.unit->landing.url, s.label});
    }
    return out;
  }

  void reset_state() override { state_.reset(); }

  const BrowserState& state() const { return state_; }

 private:
  const World* world_;
  BrowserState state_;
  Rng rng_;
};

// The simulator as a tagging source: true page categories passed through the
// source's noise model. Every page uses its own random stream, so the result
// for one page does not depend on which other pages get tagged.
class SimTaggingSource final : public TaggingSource {
 public:
  SimTaggingSource(const World& world, std::string name, SourceNoise noise, std::uint64_t seed)
      : world_(&world), source_{std::move(name), "simulated"}, noise_(noise), seed_(seed) {}

  const TagSource& source() const override { return source_; }

  KeywordSet tag(const WebPage& page) const override {
    const SimPage* sp = world_->find_page(page.url);
    if (!sp) return {};
    Rng rng(derive_seed(seed_, "tag/" + source_.name + "/" + landing_key(page.url)));
    const bool missed = rng.uniform01() < noise_.miss;
    KeywordSet out;
    for (const auto& k : sp->categories) {
      if (rng.uniform01() >= noise_.dropout) out.insert(k);
    }
    const double u_spurious = rng.uniform01();
    const auto& vocab = world_->vocabulary();
    if (!vocab.empty()) {
      const auto idx = rng.index(vocab.size());
      if (u_spurious < noise_.spurious) out.insert(Keyword(vocab[idx]));
    }
    if (missed) return {};
    return out;
  }

 private:
  const World* world_;
  TagSource source_;
  SourceNoise noise_;
  std::uint64_t seed_;
};

}  // namespace obamet
