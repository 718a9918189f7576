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

// obamet: command-line entry point.
//
//   obamet simulate --manifest m.json --out DIR [--seed S] [--budget B] ...
//   obamet analyze  DIR [--N 2] [--T 2.5] [--tprime 2.5] [--filters r,rsc,rscdg]
//   obamet filter   DIR --filters rsc [--tprime 2.5]
//   obamet validate DIR
//   obamet report   DIR [--cpc bids.csv] [--condition ES-nodnt]
//   obamet taxonomy [--taxonomy builtin:demo] --out tax.tsv
//
// Exit status: 0 ok, 2 configuration error, 3 corpus error, 1 anything else.
// Diagnostics go to stderr; results go to files.

#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "obamet/experiment.hpp"

namespace {

int exit_code_for(obamet::ErrorCode code) {
  using obamet::ErrorCode;
  switch (code) {
    case ErrorCode::kInvalidConfig:
    case ErrorCode::kInvalidTaxonomy:
    case ErrorCode::kInvalidKeyword:
    case ErrorCode::kUnknownKeyword:
    case ErrorCode::kInsufficientSources:
    case ErrorCode::kEmptyPool:
    case ErrorCode::kPersonaRejected:
      return 2;
    case ErrorCode::kIncompleteCorpus:
    case ErrorCode::kCorpusError:
    case ErrorCode::kMissingCleanProfile:
    case ErrorCode::kMissingGroundTruth:
    case ErrorCode::kHarvesterFailure:
    case ErrorCode::kSourceUnavailable:
      return 3;
    default:
      return 1;
  }
}

std::vector<obamet::FilterSet> parse_sets(const std::vector<std::string>& names) {
  std::vector<obamet::FilterSet> out;
  for (const auto& n : names) out.push_back(obamet::filter_set_from_string(n));
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Measure online behavioural advertising in a harvested or simulated ad corpus"};
  app.require_subcommand(1);

  // simulate
  auto* sim = app.add_subcommand("simulate", "Build a simulated world and harvest a corpus");
  std::string manifest_path, out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> budget, repetitions;
  std::optional<double> mean_interval;
  std::string dnt_mode;
  std::vector<std::string> geos;
  unsigned workers = 0;
  sim->add_option("--manifest", manifest_path, "Experiment manifest (JSON); defaults are used when omitted");
  sim->add_option("--out", out_dir, "Experiment directory")->required();
  sim->add_option("--seed", seed, "Master seed; every module seed derives from it");
  sim->add_option("--budget", budget, "Visits per session");
  sim->add_option("--mean-interval", mean_interval, "Mean seconds between visits");
  sim->add_option("--repetitions", repetitions, "Repetitions per condition");
  sim->add_option("--dnt", dnt_mode, "DNT conditions: off, on or both")->check(CLI::IsMember({"off", "on", "both"}));
  sim->add_option("--geo", geos, "Geo labels (comma separated)")->delimiter(',');
  sim->add_option("--workers", workers, "Concurrent sessions (0 = hardware threads)");

  // analyze / filter
  std::string exp_dir;
  std::optional<int> n_opt;
  std::optional<double> t_opt, tprime_opt;
  std::vector<std::string> filters;
  std::string quartiles;
  auto* ana = app.add_subcommand("analyze", "Consensus, filters and metrics for every cell");
  ana->add_option("dir", exp_dir, "Experiment directory")->required();
  ana->add_option("--N", n_opt, "Consensus: minimum number of agreeing sources");
  ana->add_option("--T", t_opt, "Consensus: similarity threshold");
  ana->add_option("--tprime", tprime_opt, "Demographic/geo filter similarity threshold");
  ana->add_option("--filters", filters, "Filter sets (r, rsc, rscdg)")->delimiter(',');
  ana->add_option("--quartiles", quartiles, "Quartile convention")
      ->check(CLI::IsMember({"median-exclusive", "median-inclusive", "linear"}));

  auto* fil = app.add_subcommand("filter", "Analyze with a single filter set");
  fil->add_option("dir", exp_dir, "Experiment directory")->required();
  std::string single_filter;
  fil->add_option("--filters", single_filter, "r, rsc or rscdg")->required();
  fil->add_option("--tprime", tprime_opt, "Demographic/geo filter similarity threshold");

  auto* val = app.add_subcommand("validate", "Score OBA detection against simulator ground truth");
  val->add_option("dir", exp_dir, "Experiment directory")->required();
  val->add_option("--N", n_opt, "Consensus: minimum number of agreeing sources");
  val->add_option("--T", t_opt, "Consensus: similarity threshold");
  val->add_option("--tprime", tprime_opt, "Demographic/geo filter similarity threshold");

  auto* rep = app.add_subcommand("report", "Boxplot summaries and CPC correlation from report.json");
  rep->add_option("dir", exp_dir, "Experiment directory")->required();
  std::string cpc, condition;
  rep->add_option("--cpc", cpc, "Suggested CPC per persona (JSON object or CSV persona,cpc)");
  rep->add_option("--condition", condition, "Condition whose BAiLP means are correlated");

  auto* tax_cmd = app.add_subcommand("taxonomy", "Export a taxonomy as child<TAB>parent lines");
  std::string tax_spec = "builtin:demo", tax_out;
  tax_cmd->add_option("--taxonomy", tax_spec, "builtin:demo or a TSV path");
  tax_cmd->add_option("--out", tax_out, "Output file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // --help exits 0; any usage error counts as a config error.
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (*sim) {
      obamet::Manifest m = manifest_path.empty() ? obamet::Manifest{} : obamet::load_manifest(manifest_path);
      if (seed) m.seed = *seed;
      if (budget) m.visit_budget = *budget;
      if (mean_interval) m.mean_interval = *mean_interval;
      if (repetitions) m.repetitions = *repetitions;
      if (!geos.empty() || !dnt_mode.empty()) {
        std::vector<std::string> g = geos;
        std::vector<bool> d;
        if (g.empty()) {
          std::set<std::string> seen;
          for (const auto& c : m.conditions) {
            if (seen.insert(c.geo).second) g.push_back(c.geo);
          }
        }
        if (dnt_mode == "off") d = {false};
        else if (dnt_mode == "on") d = {true};
        else if (dnt_mode == "both") d = {false, true};
        else {
          std::set<bool> seen;
          for (const auto& c : m.conditions) {
            if (seen.insert(c.dnt).second) d.push_back(c.dnt);
          }
        }
        m.conditions.clear();
        for (const auto& geo : g) {
          for (bool dnt : d) m.conditions.push_back({geo, dnt});
        }
      }
      obamet::SimulationOptions opts;
      opts.workers = workers;
      auto s = obamet::simulate(m, out_dir, opts);
      std::cerr << "simulate: " << s.sessions << " sessions, " << s.accepted_personas << " accepted personas, "
                << s.displayed_ads << " ads displayed\n";
    } else if (*ana || *fil) {
      obamet::AnalyzeOverrides o;
      o.n = n_opt;
      o.t = t_opt;
      o.t_prime = tprime_opt;
      if (*fil) o.sets = parse_sets({single_filter});
      else if (!filters.empty()) o.sets = parse_sets(filters);
      if (!quartiles.empty()) o.quartiles = obamet::quartile_method_from_string(quartiles);
      auto r = obamet::analyze(exp_dir, o);
      std::cerr << "analyze: " << r.cells.size() << " cells\n";
    } else if (*val) {
      obamet::AnalyzeOverrides o;
      o.n = n_opt;
      o.t = t_opt;
      o.t_prime = tprime_opt;
      auto rows = obamet::validate_experiment(exp_dir, o);
      std::cerr << "validate: " << rows.size() << " persona/source rows\n";
    } else if (*rep) {
      obamet::ReportOptions o;
      if (!cpc.empty()) o.cpc = cpc;
      if (!condition.empty()) o.condition = condition;
      obamet::build_report(exp_dir, o);
    } else if (*tax_cmd) {
      auto tsv = obamet::load_taxonomy(tax_spec).to_tsv();
      std::ofstream out(tax_out, std::ios::binary);
      if (!out) throw obamet::Error(obamet::ErrorCode::kInvalidConfig, "cannot write " + tax_out);
      out << tsv;
    }
  } catch (const obamet::Error& e) {
    std::cerr << "obamet: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "obamet: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
