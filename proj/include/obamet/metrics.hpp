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
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <boost/math/distributions/students_t.hpp>

#include "obamet/corpus.hpp"
#include "obamet/error.hpp"
#include "obamet/keyword.hpp"

namespace obamet {

// ---- TTK / BAiLP -----------------------------------------------------------

// Targeted training keywords: |K_T ∩ K_L| / |K_T| on exact keyword matches.
inline double ttk(const KeywordSet& training, const KeywordSet& landing) {
  if (training.empty()) throw Error(ErrorCode::kEmptyTrainingSet, "no training keywords");
  std::size_t hit = 0;
  for (const auto& k : training) hit += landing.count(k);
  return static_cast<double>(hit) / static_cast<double>(training.size());
}

struct LandingObservation {
  KeywordSet keywords;
  std::int64_t ntimes = 0;
};

inline bool shares_keyword(const KeywordSet& training, const KeywordSet& page) {
  const auto& small = training.size() < page.size() ? training : page;
  const auto& large = training.size() < page.size() ? page : training;
  return std::any_of(small.begin(), small.end(), [&](const Keyword& k) { return large.count(k) > 0; });
}

// Behavioural advertising in landing pages: share of displayed ads whose
// landing page carries at least one training keyword, weighted by ntimes.
inline double bailp(const KeywordSet& training, const std::vector<LandingObservation>& landings) {
  std::int64_t total = 0, hit = 0;
  for (const auto& l : landings) {
    total += l.ntimes;
    if (shares_keyword(training, l.keywords)) hit += l.ntimes;
  }
  if (total <= 0) throw Error(ErrorCode::kNoImpressions, "no displayed ads");
  return static_cast<double>(hit) / static_cast<double>(total);
}

// ---- detection performance ---------------------------------------------------

struct Confusion {
  std::int64_t tp = 0, fp = 0, tn = 0, fn = 0;

  std::int64_t total() const { return tp + fp + tn + fn; }
  Confusion& operator+=(const Confusion& o) {
    tp += o.tp;
    fp += o.fp;
    tn += o.tn;
    fn += o.fn;
    return *this;
  }
  friend bool operator==(const Confusion&, const Confusion&) = default;
};

// Rates are nullopt when their denominator is zero.
struct PerformanceReport {
  Confusion counts;
  std::optional<double> recall, accuracy, fpr, fnr;
};

inline PerformanceReport performance_from(const Confusion& c) {
  auto ratio = [](std::int64_t num, std::int64_t den) -> std::optional<double> {
    if (den == 0) return std::nullopt;
    return static_cast<double>(num) / static_cast<double>(den);
  };
  return {c, ratio(c.tp, c.tp + c.fn), ratio(c.tp + c.tn, c.total()), ratio(c.fp, c.fp + c.tn),
          ratio(c.fn, c.tp + c.fn)};
}

// Counts every displayed ad (ntimes-weighted) with oba as the positive class.
template <typename Predicate>
Confusion confusion_counts(const std::vector<AdImpression>& impressions, Predicate&& predicted_oba) {
  Confusion c;
  for (const auto& i : impressions) {
    if (!i.ground_truth) {
      throw Error(ErrorCode::kMissingGroundTruth, "impression " + i.landing_url + " has no ground-truth label");
    }
    const bool actual = *i.ground_truth == AdKind::kOba;
    const bool pred = predicted_oba(i);
    if (actual && pred) c.tp += i.ntimes;
    else if (actual) c.fn += i.ntimes;
    else if (pred) c.fp += i.ntimes;
    else c.tn += i.ntimes;
  }
  return c;
}

template <typename Predicate>
PerformanceReport detection_performance(const std::vector<AdImpression>& impressions, Predicate&& predicted_oba) {
  return performance_from(confusion_counts(impressions, std::forward<Predicate>(predicted_oba)));
}

// ---- descriptive statistics ----------------------------------------------------

// Quartile conventions for the IQR rule. kMedianExclusive (default) takes the
// medians of the lower and upper halves, leaving the middle element out when
// n is odd; kMedianInclusive keeps it in both halves; kLinear interpolates
// at p * (n - 1).
enum class QuartileMethod { kMedianExclusive, kMedianInclusive, kLinear };

inline std::string_view to_string(QuartileMethod m) {
  switch (m) {
    case QuartileMethod::kMedianExclusive: return "median-exclusive";
    case QuartileMethod::kMedianInclusive: return "median-inclusive";
    case QuartileMethod::kLinear: return "linear";
  }
  return "median-exclusive";
}

inline QuartileMethod quartile_method_from_string(std::string_view s) {
  for (auto m : {QuartileMethod::kMedianExclusive, QuartileMethod::kMedianInclusive, QuartileMethod::kLinear}) {
    if (to_string(m) == s) return m;
  }
  throw Error(ErrorCode::kInvalidConfig, "unknown quartile method '" + std::string(s) + "'");
}

namespace stats_detail {

inline double median_sorted(const double* first, std::size_t n) {
  if (n % 2 == 1) return first[n / 2];
  return 0.5 * (first[n / 2 - 1] + first[n / 2]);
}

inline double linear_quantile(const std::vector<double>& s, double p) {
  double h = p * static_cast<double>(s.size() - 1);
  auto lo = static_cast<std::size_t>(std::floor(h));
  auto hi = std::min(lo + 1, s.size() - 1);
  return s[lo] + (h - static_cast<double>(lo)) * (s[hi] - s[lo]);
}

}  // namespace stats_detail

struct FiveNumber {
  std::size_t n = 0;
  double min = 0, q1 = 0, median = 0, q3 = 0, max = 0;
  double iqr() const { return q3 - q1; }
};

inline FiveNumber five_number(std::vector<double> values, QuartileMethod method = QuartileMethod::kMedianExclusive) {
  if (values.empty()) throw Error(ErrorCode::kDegenerateSeries, "five-number summary of an empty series");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  FiveNumber f;
  f.n = n;
  f.min = values.front();
  f.max = values.back();
  f.median = stats_detail::median_sorted(values.data(), n);
  if (method == QuartileMethod::kLinear) {
    f.q1 = stats_detail::linear_quantile(values, 0.25);
    f.q3 = stats_detail::linear_quantile(values, 0.75);
  } else if (n == 1) {
    f.q1 = f.q3 = values[0];
  } else {
    std::size_t half = n / 2;
    if (method == QuartileMethod::kMedianInclusive && n % 2 == 1) ++half;
    f.q1 = stats_detail::median_sorted(values.data(), half);
    f.q3 = stats_detail::median_sorted(values.data() + (n - half), half);
  }
  return f;
}

inline double mean(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

// Sample standard deviation (n - 1); 0 for fewer than two values.
inline double stddev(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  double m = mean(v), acc = 0.0;
  for (double x : v) acc += (x - m) * (x - m);
  return std::sqrt(acc / static_cast<double>(v.size() - 1));
}

// Ranks 1..n with ties sharing their average rank.
inline std::vector<double> average_ranks(const std::vector<double>& v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
    double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[idx[k]] = r;
    i = j + 1;
  }
  return ranks;
}

inline double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw Error(ErrorCode::kKeyMismatch, "series of different length");
  if (x.size() < 2) throw Error(ErrorCode::kDegenerateSeries, "need at least two pairs");
  double mx = mean(x), my = mean(y), sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) throw Error(ErrorCode::kDegenerateSeries, "constant series, correlation undefined");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

inline double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  return pearson(average_ranks(x), average_ranks(y));
}

// Two-sided p-value of Pearson's r via the t distribution with n - 2 dof.
inline double pearson_p_value(double r, std::size_t n) {
  if (n < 3) return 1.0;
  if (std::abs(r) >= 1.0) return 0.0;
  double dof = static_cast<double>(n - 2);
  double t = r * std::sqrt(dof / (1.0 - r * r));
  boost::math::students_t dist(dof);
  return 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t)));
}

// Two-sided p-value of Spearman's rho, large-sample normal approximation.
inline double spearman_p_value(double rho, std::size_t n) {
  if (n < 2) return 1.0;
  double z = rho * std::sqrt(static_cast<double>(n - 1));
  return std::erfc(std::abs(z) / std::sqrt(2.0));
}

// ---- keyed series ------------------------------------------------------------

using ValueSeries = std::map<std::string, double>;

inline void require_same_keys(const ValueSeries& a, const ValueSeries& b) {
  if (a.size() != b.size() ||
      !std::equal(a.begin(), a.end(), b.begin(), [](const auto& x, const auto& y) { return x.first == y.first; })) {
    throw Error(ErrorCode::kKeyMismatch, "series are keyed by different personas");
  }
}

struct CorrelationResult {
  double spearman = 0.0;
  double pearson = 0.0;
  double spearman_p = 1.0;
  double pearson_p = 1.0;
  std::size_t pairs = 0;
  std::vector<std::string> outliers;  // keys dropped by the IQR rule
  FiveNumber cpc_summary;
};

// Keys whose value lies outside [Q1 - 1.5 IQR, Q3 + 1.5 IQR].
inline std::vector<std::string> iqr_outliers(const ValueSeries& s, QuartileMethod method) {
  std::vector<double> v;
  for (const auto& [_, x] : s) v.push_back(x);
  auto f = five_number(v, method);
  double lo = f.q1 - 1.5 * f.iqr(), hi = f.q3 + 1.5 * f.iqr();
  std::vector<std::string> out;
  for (const auto& [k, x] : s) {
    if (x < lo || x > hi) out.push_back(k);
  }
  return out;
}

// Spearman and Pearson between a per-persona metric and the CPC bid, after
// removing personas whose CPC is an IQR outlier.
inline CorrelationResult value_correlation(const ValueSeries& metric, const ValueSeries& cpc,
                                           QuartileMethod method = QuartileMethod::kMedianExclusive) {
  require_same_keys(metric, cpc);
  if (cpc.empty()) throw Error(ErrorCode::kDegenerateSeries, "empty series");
  CorrelationResult r;
  r.outliers = iqr_outliers(cpc, method);
  std::vector<double> x, y;
  for (const auto& [k, c] : cpc) {
    if (std::find(r.outliers.begin(), r.outliers.end(), k) != r.outliers.end()) continue;
    x.push_back(metric.at(k));
    y.push_back(c);
  }
  r.pairs = x.size();
  if (r.pairs < 3) throw Error(ErrorCode::kDegenerateSeries, "fewer than 3 pairs after outlier removal");
  r.cpc_summary = five_number(y, method);
  r.pearson = pearson(x, y);
  r.spearman = spearman(x, y);
  r.pearson_p = pearson_p_value(r.pearson, r.pairs);
  r.spearman_p = spearman_p_value(r.spearman, r.pairs);
  return r;
}

struct Comparison {
  ValueSeries differences;  // a - b
  FiveNumber summary;
};

inline Comparison comparison_stats(const ValueSeries& a, const ValueSeries& b,
                                   QuartileMethod method = QuartileMethod::kMedianExclusive) {
  require_same_keys(a, b);
  Comparison c;
  std::vector<double> d;
  for (const auto& [k, x] : a) {
    c.differences[k] = x - b.at(k);
    d.push_back(c.differences[k]);
  }
  c.summary = five_number(d, method);
  return c;
}

inline json to_json_value(const FiveNumber& f) {
  return json{{"n", f.n}, {"min", f.min}, {"q1", f.q1}, {"median", f.median}, {"q3", f.q3}, {"max", f.max},
              {"iqr", f.iqr()}};
}

inline json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

inline json to_json_value(const PerformanceReport& p) {
  return json{{"tp", p.counts.tp},
              {"fp", p.counts.fp},
              {"tn", p.counts.tn},
              {"fn", p.counts.fn},
              {"recall", optional_json(p.recall)},
              {"accuracy", optional_json(p.accuracy)},
              {"fpr", optional_json(p.fpr)},
              {"fnr", optional_json(p.fnr)}};
}

}  // namespace obamet
