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
#include <atomic>
#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "obamet/adsim.hpp"
#include "obamet/corpus.hpp"
#include "obamet/demo_taxonomy.hpp"
#include "obamet/error.hpp"
#include "obamet/metrics.hpp"
#include "obamet/persona.hpp"
#include "obamet/pipeline.hpp"
#include "obamet/rng.hpp"
#include "obamet/session.hpp"
#include "obamet/store.hpp"
#include "obamet/taxonomy.hpp"

namespace obamet {

struct Condition {
  std::string geo = "ES";
  bool dnt = false;

  std::string id() const { return SessionKey{geo, dnt, 0}.condition_id(); }
  friend auto operator<=>(const Condition&, const Condition&) = default;
};

struct AnalysisConfig {
  ConsensusConfig consensus;
  FilterConfig filters;
  QuartileMethod quartiles = QuartileMethod::kMedianExclusive;
};

inline std::vector<PersonaSpec> default_personas() {
  return {{"swimming-pools-spas", "swimming pools & spas", false},
          {"motor-sports", "motor sports", false},
          {"air-travel", "air travel", false},
          {"banking", "banking", false},
          {"cooking-recipes", "cooking & recipes", false},
          {"movies", "movies", false},
          {"bicycles-accessories", "bicycles & accessories", false},
          {"video-games", "video games", false},
          {"fitness", "fitness", false},
          {"pets", "pets", false}};
}

// Everything needed to reproduce an experiment. All random streams derive
// from `seed` (see derive_seed).
struct Manifest {
  std::string experiment_id = "obamet-demo";
  std::uint64_t seed = 7;
  std::string taxonomy = "builtin:demo";
  std::vector<PersonaSpec> personas = default_personas();
  std::vector<Condition> conditions = {{"ES", false}};
  int visit_budget = kDefaultVisitBudget;
  double mean_interval = kDefaultMeanInterval;
  int repetitions = kDefaultRepetitions;
  AnalysisConfig analysis;
  SimConfig sim;
};

// ---- manifest JSON ---------------------------------------------------------

inline json noise_to_json(const std::map<std::string, SourceNoise>& noise) {
  json j = json::object();
  for (const auto& [name, n] : noise) j[name] = {{"dropout", n.dropout}, {"spurious", n.spurious}, {"miss", n.miss}};
  return j;
}

inline std::map<std::string, SourceNoise> noise_from_json(const json& j) {
  if (j.is_string()) {
    auto preset = j.get<std::string>();
    if (preset == "zero") return zero_noise_preset();
    if (preset == "field") return field_noise_preset();
    throw Error(ErrorCode::kInvalidConfig, "unknown noise preset '" + preset + "'");
  }
  std::map<std::string, SourceNoise> out;
  for (const auto& [name, n] : j.items()) {
    out[name] = {n.value("dropout", 0.0), n.value("spurious", 0.0), n.value("miss", 0.0)};
  }
  return out;
}

inline json to_json_value(const Manifest& m) {
  json personas = json::array();
  for (const auto& p : m.personas) personas.push_back({{"id", p.id}, {"category", p.category}, {"sensitive", p.sensitive}});
  json conditions = json::array();
  for (const auto& c : m.conditions) conditions.push_back({{"geo", c.geo}, {"dnt", c.dnt}});
  json mix = json::object();
  for (const auto& [k, v] : m.sim.mix) mix[std::string(to_string(k))] = v;
  json sets = json::array();
  for (auto s : m.analysis.filters.sets) sets.push_back(to_string(s));
  const auto& s = m.sim;
  return json{
      {"experiment_id", m.experiment_id},
      {"seed", m.seed},
      {"taxonomy", m.taxonomy},
      {"personas", personas},
      {"conditions", conditions},
      {"session", {{"budget", m.visit_budget}, {"mean_interval", m.mean_interval}, {"repetitions", m.repetitions}}},
      {"consensus", {{"N", m.analysis.consensus.n}, {"T", m.analysis.consensus.t}}},
      {"filters", {{"sets", sets}, {"tprime", m.analysis.filters.t_prime}}},
      {"quartiles", to_string(m.analysis.quartiles)},
      {"sim",
       {{"inventory_size", s.inventory_size},
        {"mix", mix},
        {"tracker_pool", s.tracker_pool},
        {"ad_networks", s.ad_networks},
        {"trackers_min", s.min_trackers},
        {"trackers_max", s.max_trackers},
        {"candidates_per_persona", s.candidates_per_persona},
        {"honor_dnt", s.honor_dnt},
        {"activation_threshold", s.activation_threshold},
        {"profile_decay_tau", s.profile_decay_tau},
        {"share_profiles", s.share_profiles},
        {"slots_per_visit", s.slots_per_visit},
        {"oba_weight", s.oba_weight},
        {"neutral_categories", s.neutral_categories},
        {"noise", noise_to_json(s.noise)}}}};
}

inline Manifest manifest_from_json(const json& j) {
  Manifest m;
  try {
    m.experiment_id = j.value("experiment_id", m.experiment_id);
    m.seed = j.value("seed", m.seed);
    m.taxonomy = j.value("taxonomy", m.taxonomy);
    if (j.contains("personas")) {
      m.personas.clear();
      for (const auto& p : j["personas"]) {
        m.personas.push_back({p.at("id").get<std::string>(), p.at("category").get<std::string>(),
                              p.value("sensitive", false)});
      }
    }
    if (j.contains("conditions")) {
      m.conditions.clear();
      for (const auto& c : j["conditions"]) m.conditions.push_back({c.value("geo", "ES"), c.value("dnt", false)});
    }
    if (j.contains("session")) {
      const auto& s = j["session"];
      m.visit_budget = s.value("budget", m.visit_budget);
      m.mean_interval = s.value("mean_interval", m.mean_interval);
      m.repetitions = s.value("repetitions", m.repetitions);
    }
    if (j.contains("consensus")) {
      m.analysis.consensus.n = j["consensus"].value("N", m.analysis.consensus.n);
      m.analysis.consensus.t = j["consensus"].value("T", m.analysis.consensus.t);
    }
    if (j.contains("filters")) {
      const auto& f = j["filters"];
      if (f.contains("sets")) {
        m.analysis.filters.sets.clear();
        for (const auto& s : f["sets"]) m.analysis.filters.sets.push_back(filter_set_from_string(s.get<std::string>()));
      }
      m.analysis.filters.t_prime = f.value("tprime", m.analysis.filters.t_prime);
    }
    if (j.contains("quartiles")) m.analysis.quartiles = quartile_method_from_string(j["quartiles"].get<std::string>());
    if (j.contains("sim")) {
      const auto& s = j["sim"];
      auto& c = m.sim;
      c.inventory_size = s.value("inventory_size", c.inventory_size);
      if (s.contains("mix")) {
        c.mix.clear();
        for (const auto& [k, v] : s["mix"].items()) c.mix[ad_kind_from_string(k)] = v.get<double>();
      }
      c.tracker_pool = s.value("tracker_pool", c.tracker_pool);
      c.ad_networks = s.value("ad_networks", c.ad_networks);
      c.min_trackers = s.value("trackers_min", c.min_trackers);
      c.max_trackers = s.value("trackers_max", c.max_trackers);
      c.candidates_per_persona = s.value("candidates_per_persona", c.candidates_per_persona);
      c.honor_dnt = s.value("honor_dnt", c.honor_dnt);
      c.activation_threshold = s.value("activation_threshold", c.activation_threshold);
      c.profile_decay_tau = s.value("profile_decay_tau", c.profile_decay_tau);
      c.share_profiles = s.value("share_profiles", c.share_profiles);
      c.slots_per_visit = s.value("slots_per_visit", c.slots_per_visit);
      c.oba_weight = s.value("oba_weight", c.oba_weight);
      if (s.contains("neutral_categories")) c.neutral_categories = s["neutral_categories"].get<std::vector<std::string>>();
      if (s.contains("noise")) c.noise = noise_from_json(s["noise"]);
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kInvalidConfig, std::string("manifest: ") + e.what());
  }
  return m;
}

inline Manifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kInvalidConfig, "cannot read manifest " + path.string());
  try {
    return manifest_from_json(json::parse(in));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kInvalidConfig, path.string() + ": " + e.what());
  }
}

inline void validate(const Manifest& m) {
  if (m.personas.empty()) throw Error(ErrorCode::kInvalidConfig, "manifest lists no personas");
  if (m.conditions.empty()) throw Error(ErrorCode::kInvalidConfig, "manifest lists no conditions");
  if (m.visit_budget < 1) throw Error(ErrorCode::kInvalidConfig, "session budget must be >= 1");
  if (!(m.mean_interval > 0.0)) throw Error(ErrorCode::kInvalidConfig, "mean interval must be > 0");
  if (m.repetitions < 1) throw Error(ErrorCode::kInvalidConfig, "repetitions must be >= 1");
  if (m.analysis.filters.sets.empty()) throw Error(ErrorCode::kInvalidConfig, "no filter sets");
  std::set<Condition> seen;
  for (const auto& c : m.conditions) {
    if (!seen.insert(c).second) throw Error(ErrorCode::kInvalidConfig, "duplicate condition " + c.id());
  }
  for (const auto& p : m.personas) {
    if (p.id.empty() || p.id == kCleanProfileId) throw Error(ErrorCode::kInvalidConfig, "invalid persona id '" + p.id + "'");
  }
  validate(m.sim);
}

inline KeywordTaxonomy load_taxonomy(const std::string& spec) {
  if (spec == "builtin:demo") return demo_taxonomy();
  std::ifstream in(spec);
  if (!in) throw Error(ErrorCode::kInvalidConfig, "cannot read taxonomy " + spec);
  return KeywordTaxonomy::parse(in);
}

// Runs fn(0..n-1) on up to `workers` threads.
inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn, unsigned workers = 0) {
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, n));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(workers);
  {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t i = next++; i < n; i = next++) fn(i);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

// ---- simulate -----------------------------------------------------------------

struct SimulationSummary {
  std::size_t sessions = 0;
  std::size_t incomplete = 0;
  std::size_t accepted_personas = 0;
  std::int64_t displayed_ads = 0;
};

// Builds the world, tags every page with each source, runs every persona and
// one clean profile per (condition, repetition), and writes the corpus.
struct SimulationOptions {
  unsigned workers = 0;  // 0: one per hardware thread
};

inline SimulationSummary simulate(const Manifest& input, const std::filesystem::path& out_dir,
                                  const SimulationOptions& opts = {}) {
  Manifest m = input;
  std::set<std::string> geos;
  std::vector<std::string> geo_order;
  for (const auto& c : m.conditions) {
    if (geos.insert(c.geo).second) geo_order.push_back(c.geo);
  }
  m.sim.geos = geo_order;
  m.sim.rng_seed = derive_seed(m.seed, "world");
  validate(m);
  auto tax = load_taxonomy(m.taxonomy);
  auto world = build_world(m.sim, m.personas, tax);

  ExperimentStore store(out_dir);
  store.create();
  store.write_json("manifest.json", to_json_value(input));
  store.write_text("taxonomy.tsv", tax.to_tsv());
  store.write_json("world.json", world.to_json());
  store.write_personas(world.personas());
  auto pages = world.pages();
  store.write_pages(pages);
  const auto tag_seed = derive_seed(m.seed, "tagging");
  for (const auto& [name, noise] : m.sim.noise) {
    SimTaggingSource source(world, name, noise, tag_seed);
    store.write_tags(name, tag_pages(pages, source));
  }

  std::vector<SessionConfig> jobs;
  std::vector<Persona> job_persona;
  Persona clean;
  clean.id = std::string(kCleanProfileId);
  clean.category = Keyword("clean profile");
  for (const auto& cond : m.conditions) {
    for (int rep = 0; rep < m.repetitions; ++rep) {
      SessionKey key{cond.geo, cond.dnt, rep};
      auto add = [&](const Persona& p, bool is_clean) {
        SessionConfig cfg;
        cfg.persona_id = p.id;
        cfg.key = key;
        cfg.clean_profile = is_clean;
        cfg.mean_interval = m.mean_interval;
        cfg.visit_budget = m.visit_budget;
        cfg.rng_seed = derive_seed(m.seed, "session/" + p.id + "/" + key.id() + "/schedule");
        jobs.push_back(cfg);
        job_persona.push_back(p);
      };
      for (const auto& r : world.personas()) {
        if (r.accepted) add(r.persona, false);
      }
      add(clean, true);
    }
  }
  std::vector<SessionResult> results(jobs.size());
  parallel_for(jobs.size(), [&](std::size_t i) {
    SimHarvester harvester(world, derive_seed(m.seed, "session/" + jobs[i].persona_id + "/" + jobs[i].key.id() + "/serve"));
    results[i] = run_session(job_persona[i], world.control_pages(), jobs[i], harvester);
  }, opts.workers);

  SimulationSummary summary;
  std::vector<json> session_lines;
  for (const auto& r : results) {
    store.append_visits(r.visits);
    store.append_impressions(r.impressions);
    ++summary.sessions;
    if (!r.complete) ++summary.incomplete;
    summary.displayed_ads += r.raw_ads;
    double mix = r.training_visits + r.control_visits == 0
                     ? 0.0
                     : static_cast<double>(r.training_visits) / (r.training_visits + r.control_visits);
    session_lines.push_back({{"persona", r.config.persona_id},
                             {"session", r.config.key.id()},
                             {"clean_profile", r.config.clean_profile},
                             {"training_visits", r.training_visits},
                             {"control_visits", r.control_visits},
                             {"training_share", mix},
                             {"displayed_ads", r.raw_ads},
                             {"complete", r.complete},
                             {"failure", r.failure}});
  }
  store.write_jsonl("sessions.jsonl", session_lines);
  for (const auto& r : world.personas()) summary.accepted_personas += r.accepted ? 1 : 0;
  if (summary.incomplete > 0) {
    throw Error(ErrorCode::kHarvesterFailure, std::to_string(summary.incomplete) + " session(s) incomplete");
  }
  return summary;
}

// ---- analyze ------------------------------------------------------------------

struct CellMetrics {
  std::string persona;
  SessionKey session;
  std::string source;
  FilterSet filters = FilterSet::kR;
  std::optional<double> ttk;
  std::optional<double> bailp;
  std::size_t landing_pages = 0;
  std::int64_t ads = 0;
};

struct PersonaSummary {
  std::string persona;
  std::string condition;
  std::size_t cells = 0;
  double ttk_mean = 0, ttk_sd = 0, bailp_mean = 0, bailp_sd = 0;
  bool has_ttk = false, has_bailp = false;
};

// Keyword lookup: source -> landing key -> keywords.
using TagIndex = std::map<std::string, std::map<std::string, KeywordSet>>;

struct AnalysisResult {
  std::vector<std::string> sources;
  TagIndex tags;
  std::map<std::string, Keyword> categories;
  std::map<std::string, std::map<std::string, KeywordSet>> raw_training_keywords;  // persona -> source
  std::map<std::string, std::map<std::string, KeywordSet>> training_keywords;      // after consensus
  std::map<SessionKey, std::map<std::string, PersonaStages>> stages;
  std::vector<CellMetrics> cells;
  std::vector<PersonaSummary> summaries;
  json report;
};

inline TagIndex build_tag_index(const Corpus& c) {
  TagIndex idx;
  for (const auto& [source, list] : c.tags) {
    auto& m = idx[source];
    for (const auto& t : list) m[landing_key(t.page.url)].insert(t.keywords.begin(), t.keywords.end());
  }
  return idx;
}

inline const KeywordSet& lookup_tags(const TagIndex& idx, const std::string& source, const std::string& url) {
  static const KeywordSet empty;
  auto s = idx.find(source);
  if (s == idx.end()) return empty;
  auto it = s->second.find(landing_key(url));
  return it == s->second.end() ? empty : it->second;
}

inline std::string format_number(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}


// Consensus -> filters -> TTK/BAiLP for every (persona, cohort, source,
// filter set) cell, plus per-persona summaries and condition comparisons.
inline AnalysisResult analyze_corpus(const Corpus& corpus, const KeywordTaxonomy& tax, const AnalysisConfig& cfg) {
  AnalysisResult out;
  KeywordMatcher matcher(tax);
  out.tags = build_tag_index(corpus);
  for (const auto& [s, _] : corpus.tags) out.sources.push_back(s);
  if (out.sources.empty()) throw Error(ErrorCode::kIncompleteCorpus, "corpus has no tag files");

  std::vector<const PersonaRecord*> personas;
  for (const auto& r : corpus.personas) {
    if (!r.accepted) continue;
    personas.push_back(&r);
    out.categories.emplace(r.persona.id, r.persona.category);
  }
  if (personas.empty()) throw Error(ErrorCode::kIncompleteCorpus, "corpus has no accepted personas");

  // Training keywords per persona and source.
  for (const auto* r : personas) {
    std::map<std::string, std::vector<TagAssignment>> assignments;
    for (const auto& source : out.sources) {
      auto& list = assignments[source];
      for (const auto& p : r->persona.training_pages) list.push_back({p, source, lookup_tags(out.tags, source, p.url)});
    }
    out.raw_training_keywords[r->persona.id] = union_by_source(assignments);
    out.training_keywords[r->persona.id] = consensus_training_keywords(assignments, cfg.consensus, matcher);
  }

  // Cohorts.
  std::map<SessionKey, CohortInput> cohorts;
  std::set<SessionKey> clean_seen;
  for (const auto& v : corpus.visits) {
    if (v.persona_id == kCleanProfileId) {
      clean_seen.insert(v.session);
      continue;
    }
    if (out.categories.count(v.persona_id)) cohorts[v.session].visited[v.persona_id].insert(landing_key(v.url));
  }
  for (const auto& i : corpus.impressions) {
    if (i.persona_id == kCleanProfileId) {
      clean_seen.insert(i.session);
      continue;
    }
    if (out.categories.count(i.persona_id)) cohorts[i.session].impressions[i.persona_id].push_back(i);
  }
  for (const auto& i : corpus.impressions) {
    if (i.persona_id != kCleanProfileId) continue;
    auto it = cohorts.find(i.session);
    if (it != cohorts.end()) {
      if (!it->second.clean) it->second.clean.emplace();
      it->second.clean->push_back(i);
    }
  }
  for (auto& [key, in] : cohorts) {
    if (!in.clean && clean_seen.count(key)) in.clean.emplace();
    for (const auto* r : personas) in.impressions.try_emplace(r->persona.id);
  }

  int max_stage = 1;
  for (auto s : cfg.filters.sets) max_stage = std::max(max_stage, stage_count(s));

  json attrition = json::array();
  for (const auto& [key, in] : cohorts) {
    auto stages = run_pipeline(in, out.categories, matcher, cfg.filters.t_prime, max_stage);
    for (const auto& [persona, st] : stages) {
      json a{{"persona", persona}, {"session", key.id()}};
      for (int k = 0; k <= max_stage; ++k) {
        std::int64_t ads = 0;
        for (const auto& i : st.stages[k]) ads += i.ntimes;
        a[k == 0 ? std::string("raw") : std::string(to_string(static_cast<FilterSet>(k)))] = {
            {"landing_pages", landing_keys(st.stages[k]).size()}, {"ads", ads}};
      }
      attrition.push_back(std::move(a));
      for (const auto& source : out.sources) {
        const auto& kt = out.training_keywords[persona][source];
        for (auto set : cfg.filters.sets) {
          const auto& survivors = st.stages[stage_count(set)];
          CellMetrics cell{persona, key, source, set, std::nullopt, std::nullopt, 0, 0};
          KeywordSet landing_kw;
          std::vector<LandingObservation> obs;
          for (const auto& i : survivors) {
            const auto& kw = lookup_tags(out.tags, source, i.landing_url);
            landing_kw.insert(kw.begin(), kw.end());
            obs.push_back({kw, i.ntimes});
            cell.ads += i.ntimes;
          }
          cell.landing_pages = landing_keys(survivors).size();
          if (!kt.empty()) cell.ttk = ttk(kt, landing_kw);
          if (cell.ads > 0) cell.bailp = bailp(kt, obs);
          out.cells.push_back(std::move(cell));
        }
      }
    }
    out.stages[key] = std::move(stages);
  }

  // Per persona and condition: flat mean / sd over (source x filter set x
  // repetition) cells.
  std::map<std::pair<std::string, std::string>, std::pair<std::vector<double>, std::vector<double>>> acc;
  std::map<std::pair<std::string, std::string>, std::size_t> cell_count;
  for (const auto& c : out.cells) {
    auto k = std::pair{c.persona, c.session.condition_id()};
    ++cell_count[k];
    if (c.ttk) acc[k].first.push_back(*c.ttk);
    if (c.bailp) acc[k].second.push_back(*c.bailp);
  }
  for (const auto& [k, n] : cell_count) {
    PersonaSummary s;
    s.persona = k.first;
    s.condition = k.second;
    s.cells = n;
    const auto& [t, b] = acc[k];
    s.has_ttk = !t.empty();
    s.has_bailp = !b.empty();
    s.ttk_mean = mean(t);
    s.ttk_sd = stddev(t);
    s.bailp_mean = mean(b);
    s.bailp_sd = stddev(b);
    out.summaries.push_back(s);
  }

  // Condition comparisons on per-persona averages.
  std::map<std::string, Condition> conditions;
  for (const auto& [key, _] : cohorts) conditions[key.condition_id()] = Condition{key.geo, key.dnt};
  auto series = [&](const std::string& cond, bool use_bailp) {
    ValueSeries s;
    for (const auto& p : out.summaries) {
      if (p.condition == cond && (use_bailp ? p.has_bailp : p.has_ttk)) s[p.persona] = use_bailp ? p.bailp_mean : p.ttk_mean;
    }
    return s;
  };
  json comparisons = json::array();
  auto compare = [&](const std::string& kind, const std::string& a, const std::string& b) {
    for (bool use_bailp : {true, false}) {
      auto sa = series(a, use_bailp), sb = series(b, use_bailp);
      ValueSeries ca, cb;
      for (const auto& [k, v] : sa) {
        if (sb.count(k)) {
          ca[k] = v;
          cb[k] = sb[k];
        }
      }
      if (ca.empty()) continue;
      auto cmp = comparison_stats(ca, cb, cfg.quartiles);
      comparisons.push_back({{"kind", kind},
                             {"metric", use_bailp ? "bailp" : "ttk"},
                             {"a", a},
                             {"b", b},
                             {"differences", cmp.differences},
                             {"summary", to_json_value(cmp.summary)}});
    }
  };
  for (const auto& [ida, ca] : conditions) {
    for (const auto& [idb, cb] : conditions) {
      if (ca.dnt == cb.dnt && ca.geo < cb.geo) compare("geo", ida, idb);
      if (ca.geo == cb.geo && ca.dnt && !cb.dnt) compare("dnt", ida, idb);
    }
  }

  // Report document.
  json sets = json::array();
  for (auto s : cfg.filters.sets) sets.push_back(to_string(s));
  json kw = json::object();
  for (const auto& [persona, by_source] : out.training_keywords) {
    for (const auto& [source, ks] : by_source) {
      kw[persona][source] = {{"raw", keywords_to_json(out.raw_training_keywords[persona][source])},
                             {"consensus", keywords_to_json(ks)}};
    }
  }
  json cells = json::array();
  for (const auto& c : out.cells) {
    cells.push_back({{"persona", c.persona},
                     {"session", c.session.id()},
                     {"condition", c.session.condition_id()},
                     {"repetition", c.session.repetition},
                     {"source", c.source},
                     {"filters", to_string(c.filters)},
                     {"ttk", optional_json(c.ttk)},
                     {"bailp", optional_json(c.bailp)},
                     {"landing_pages", c.landing_pages},
                     {"ads", c.ads}});
  }
  json summaries = json::array();
  for (const auto& s : out.summaries) {
    summaries.push_back({{"persona", s.persona},
                         {"condition", s.condition},
                         {"cells", s.cells},
                         {"ttk_mean", s.has_ttk ? json(s.ttk_mean) : json(nullptr)},
                         {"ttk_sd", s.has_ttk ? json(s.ttk_sd) : json(nullptr)},
                         {"bailp_mean", s.has_bailp ? json(s.bailp_mean) : json(nullptr)},
                         {"bailp_sd", s.has_bailp ? json(s.bailp_sd) : json(nullptr)}});
  }
  out.report = {{"config",
                 {{"N", cfg.consensus.n},
                  {"T", cfg.consensus.t},
                  {"tprime", cfg.filters.t_prime},
                  {"filters", sets},
                  {"quartiles", to_string(cfg.quartiles)},
                  {"taxonomy_depth", tax.max_depth()}}},
                {"sources", out.sources},
                {"training_keywords", kw},
                {"attrition", attrition},
                {"cells", cells},
                {"summary", summaries},
                {"comparisons", comparisons}};
  return out;
}

inline std::string report_csv(const AnalysisResult& r) {
  std::ostringstream os;
  os << "persona,session,geo,dnt,repetition,source,filters,ttk,bailp,landing_pages,ads\n";
  auto num = [](const std::optional<double>& v) { return v ? format_number(*v) : std::string(); };
  for (const auto& c : r.cells) {
    os << c.persona << ',' << c.session.id() << ',' << c.session.geo << ',' << (c.session.dnt ? 1 : 0) << ','
       << c.session.repetition << ',' << c.source << ',' << to_string(c.filters) << ',' << num(c.ttk) << ','
       << num(c.bailp) << ',' << c.landing_pages << ',' << c.ads << '\n';
  }
  return os.str();
}

struct AnalyzeOverrides {
  std::optional<int> n;
  std::optional<double> t;
  std::optional<double> t_prime;
  std::optional<std::vector<FilterSet>> sets;
  std::optional<QuartileMethod> quartiles;
};

// Analysis settings of an experiment directory: its manifest (if any) with
// overrides applied.
inline AnalysisConfig analysis_config_for(const ExperimentStore& store, const AnalyzeOverrides& o) {
  AnalysisConfig cfg;
  if (store.exists("manifest.json")) cfg = manifest_from_json(store.read_json("manifest.json")).analysis;
  if (o.n) cfg.consensus.n = *o.n;
  if (o.t) cfg.consensus.t = *o.t;
  if (o.t_prime) cfg.filters.t_prime = *o.t_prime;
  if (o.sets) cfg.filters.sets = *o.sets;
  if (o.quartiles) cfg.quartiles = *o.quartiles;
  return cfg;
}

inline KeywordTaxonomy taxonomy_for(const ExperimentStore& store) {
  if (store.exists("taxonomy.tsv")) return load_taxonomy((store.dir() / "taxonomy.tsv").string());
  if (store.exists("manifest.json")) return load_taxonomy(manifest_from_json(store.read_json("manifest.json")).taxonomy);
  return demo_taxonomy();
}

inline void require_complete_sessions(const ExperimentStore& store) {
  if (!std::filesystem::is_directory(store.dir())) {
    throw Error(ErrorCode::kIncompleteCorpus, "no experiment directory at " + store.dir().string());
  }
  for (auto name : {"visits.jsonl", "impressions.jsonl"}) {
    if (!store.exists(name)) throw Error(ErrorCode::kIncompleteCorpus, "missing " + (store.dir() / name).string());
  }
  if (!store.exists("sessions.jsonl")) return;
  for (const auto& j : read_jsonl((store.dir() / "sessions.jsonl").string(), ErrorCode::kIncompleteCorpus)) {
    if (!j.value("complete", true)) {
      throw Error(ErrorCode::kIncompleteCorpus,
                  "session " + j.value("session", std::string("?")) + " of " + j.value("persona", std::string("?")) +
                      " is incomplete");
    }
  }
}

inline AnalysisResult analyze(const std::filesystem::path& dir, const AnalyzeOverrides& overrides = {}) {
  ExperimentStore store(dir);
  require_complete_sessions(store);
  auto cfg = analysis_config_for(store, overrides);
  auto tax = taxonomy_for(store);
  validate(cfg.consensus, std::max<std::size_t>(store.tag_sources().size(), 1), tax);
  if (cfg.filters.t_prime < 0.0 || cfg.filters.t_prime > tax.max_score() + 1e-12) {
    throw Error(ErrorCode::kInvalidConfig, "T' outside [0, lc_max]");
  }
  auto corpus = store.load();
  auto result = analyze_corpus(corpus, tax, cfg);
  store.write_json("report.json", result.report);
  store.write_text("report.csv", report_csv(result));
  return result;
}

// ---- validate -----------------------------------------------------------------

struct PerformanceRow {
  std::string persona;
  std::string condition;
  std::string source;
  PerformanceReport performance;
};

// Scores the tool's OBA call against simulator labels. An impression is
// called OBA when it survives all three filters and its landing page shares
// a training keyword. Counts are summed over repetitions.
inline std::vector<PerformanceRow> score_detection(const Corpus& corpus, const AnalysisResult& analysis) {
  for (const auto& i : corpus.impressions) {
    if (i.persona_id != kCleanProfileId && analysis.categories.count(i.persona_id) && !i.ground_truth) {
      throw Error(ErrorCode::kMissingGroundTruth, "impressions carry no ground-truth labels");
    }
  }
  std::map<std::tuple<std::string, std::string, std::string>, Confusion> acc;
  for (const auto& [key, by_persona] : analysis.stages) {
    for (const auto& [persona, st] : by_persona) {
      std::set<std::pair<std::string, std::string>> survivors;
      for (const auto& i : st.stages[3]) survivors.emplace(i.control_url, i.landing_url);
      for (const auto& source : analysis.sources) {
        const auto& kt = analysis.training_keywords.at(persona).at(source);
        auto c = confusion_counts(st.stages[0], [&](const AdImpression& i) {
          return survivors.count({i.control_url, i.landing_url}) > 0 &&
                 shares_keyword(kt, lookup_tags(analysis.tags, source, i.landing_url));
        });
        acc[{persona, key.condition_id(), source}] += c;
      }
    }
  }
  std::vector<PerformanceRow> rows;
  for (const auto& [k, c] : acc) rows.push_back({std::get<0>(k), std::get<1>(k), std::get<2>(k), performance_from(c)});
  return rows;
}

inline json performance_json(const std::vector<PerformanceRow>& rows) {
  json list = json::array();
  std::map<std::string, std::map<std::string, std::vector<double>>> by_source;
  for (const auto& r : rows) {
    json j = to_json_value(r.performance);
    j["persona"] = r.persona;
    j["condition"] = r.condition;
    j["source"] = r.source;
    list.push_back(std::move(j));
    auto& s = by_source[r.source];
    if (r.performance.recall) s["recall"].push_back(*r.performance.recall);
    if (r.performance.accuracy) s["accuracy"].push_back(*r.performance.accuracy);
    if (r.performance.fpr) s["fpr"].push_back(*r.performance.fpr);
    if (r.performance.fnr) s["fnr"].push_back(*r.performance.fnr);
  }
  json ranges = json::object();
  for (const auto& [source, metrics] : by_source) {
    for (const auto& [name, v] : metrics) {
      ranges[source][name] = {{"min", *std::min_element(v.begin(), v.end())},
                              {"max", *std::max_element(v.begin(), v.end())}};
    }
  }
  return json{{"rows", list}, {"ranges", ranges}};
}

inline std::vector<PerformanceRow> validate_experiment(const std::filesystem::path& dir,
                                                       const AnalyzeOverrides& overrides = {}) {
  ExperimentStore store(dir);
  require_complete_sessions(store);
  auto o = overrides;
  o.sets = std::vector<FilterSet>{FilterSet::kR, FilterSet::kRSc, FilterSet::kRScDg};
  auto cfg = analysis_config_for(store, o);
  auto tax = taxonomy_for(store);
  auto corpus = store.load();
  auto analysis = analyze_corpus(corpus, tax, cfg);
  auto rows = score_detection(corpus, analysis);
  store.write_json("performance.json", performance_json(rows));
  return rows;
}

// ---- report -------------------------------------------------------------------

// Reads a CPC file: JSON object {persona: bid} or CSV lines "persona,bid".
inline ValueSeries read_value_series(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kInvalidConfig, "cannot read " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  auto text = buf.str();
  ValueSeries out;
  auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    try {
      const auto doc = json::parse(text);
      for (const auto& [k, v] : doc.items()) out[k] = v.get<double>();
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kInvalidConfig, path.string() + ": " + e.what());
    }
    return out;
  }
  std::istringstream lines(text);
  std::string line;
  while (std::getline(lines, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto comma = line.find(',');
    if (line.empty() || comma == std::string::npos) continue;
    auto key = line.substr(0, comma);
    auto val = line.substr(comma + 1);
    double v = 0;
    auto res = std::from_chars(val.data(), val.data() + val.size(), v);
    if (res.ec != std::errc()) continue;  // header or junk
    out[key] = v;
  }
  return out;
}

struct ReportOptions {
  std::optional<std::filesystem::path> cpc;
  std::optional<std::string> condition;  // default: first condition in the report
};

// Boxplot records for per-persona averages and comparisons, and (given CPC
// bids) the BAiLP/CPC correlation. Returns the boxplot document.
inline json build_report(const std::filesystem::path& dir, const ReportOptions& opts = {}) {
  ExperimentStore store(dir);
  auto report = store.read_json("report.json");
  auto quartiles = quartile_method_from_string(report.at("config").value("quartiles", "median-exclusive"));
  std::map<std::string, std::pair<ValueSeries, ValueSeries>> by_condition;
  for (const auto& s : report.at("summary")) {
    auto& [b, t] = by_condition[s.at("condition").get<std::string>()];
    if (!s["bailp_mean"].is_null()) b[s["persona"].get<std::string>()] = s["bailp_mean"].get<double>();
    if (!s["ttk_mean"].is_null()) t[s["persona"].get<std::string>()] = s["ttk_mean"].get<double>();
  }
  json boxplots = json::array();
  auto values = [](const ValueSeries& s) {
    std::vector<double> v;
    for (const auto& [_, x] : s) v.push_back(x);
    return v;
  };
  for (const auto& [cond, pair] : by_condition) {
    const auto& [b, t] = pair;
    if (!b.empty()) boxplots.push_back({{"series", "bailp_mean/" + cond}, {"summary", to_json_value(five_number(values(b), quartiles))}});
    if (!t.empty()) boxplots.push_back({{"series", "ttk_mean/" + cond}, {"summary", to_json_value(five_number(values(t), quartiles))}});
  }
  for (const auto& c : report.at("comparisons")) {
    boxplots.push_back({{"series", c.at("kind").get<std::string>() + "/" + c.at("metric").get<std::string>() + "/" +
                                       c.at("a").get<std::string>() + "-minus-" + c.at("b").get<std::string>()},
                        {"summary", c.at("summary")}});
  }
  json doc{{"boxplots", boxplots}};
  store.write_json("boxplots.json", doc);

  if (opts.cpc) {
    if (by_condition.empty()) throw Error(ErrorCode::kIncompleteCorpus, "report has no persona summaries");
    std::string cond = opts.condition.value_or(by_condition.begin()->first);
    auto it = by_condition.find(cond);
    if (it == by_condition.end()) throw Error(ErrorCode::kInvalidConfig, "no condition '" + cond + "' in report");
    auto cpc = read_value_series(*opts.cpc);
    auto r = value_correlation(it->second.first, cpc, quartiles);
    json corr{{"condition", cond},
              {"pairs", r.pairs},
              {"outliers", r.outliers},
              {"spearman", r.spearman},
              {"pearson", r.pearson},
              {"spearman_p", r.spearman_p},
              {"pearson_p", r.pearson_p},
              {"cpc_summary", to_json_value(r.cpc_summary)}};
    store.write_json("correlation.json", corr);
    doc["correlation"] = corr;
  }
  return doc;
}

}  // namespace obamet
