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
#include "obamet/metrics.hpp"

#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

namespace obamet {
namespace {

KeywordSet Set(std::initializer_list<const char*> xs) {
  KeywordSet s;
  for (auto x : xs) s.insert(Keyword(x));
  return s;
}

AdImpression Labeled(AdKind kind, std::int64_t n) {
  return {"p", {"ES", false, 0}, "http://c.example", "http://l.example", n, kind};
}

TEST(Ttk, ExactMatchShare) {
  EXPECT_DOUBLE_EQ(ttk(Set({"a", "b", "c", "d"}), Set({"b", "d", "x"})), 0.5);
  EXPECT_DOUBLE_EQ(ttk(Set({"a"}), Set({})), 0.0);
  EXPECT_DOUBLE_EQ(ttk(Set({"a", "b"}), Set({"b", "a"})), 1.0);
  // Related but different keywords do not count.
  EXPECT_DOUBLE_EQ(ttk(Set({"swimming pools & spas"}), Set({"hot tubs"})), 0.0);
  EXPECT_THROW(ttk(Set({}), Set({"a"})), Error);
}

TEST(Bailp, WeightedByNtimes) {
  KeywordSet kt = Set({"pools", "spas"});
  std::vector<LandingObservation> obs{{Set({"pools"}), 5}, {Set({"spas", "x"}), 3}, {Set({"x"}), 2}};
  EXPECT_DOUBLE_EQ(bailp(kt, obs), 0.8);
  obs = {{Set({"pools"}), 5}, {Set({"x"}), 3}, {Set({"spas"}), 2}};
  EXPECT_DOUBLE_EQ(bailp(kt, obs), 0.7);
  EXPECT_DOUBLE_EQ(bailp(kt, {{Set({}), 4}}), 0.0);
  try {
    bailp(kt, {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNoImpressions);
  }
}

TEST(Performance, RatesFromCounts) {
  std::vector<AdImpression> ads{Labeled(AdKind::kOba, 8), Labeled(AdKind::kOba, 2), Labeled(AdKind::kStatic, 1),
                                Labeled(AdKind::kContextual, 9)};
  std::vector<bool> pred{true, false, true, false};
  std::size_t i = 0;
  auto c = confusion_counts(ads, [&](const AdImpression&) { return pred[i++]; });
  EXPECT_EQ(c, (Confusion{8, 1, 9, 2}));
  auto r = performance_from(c);
  EXPECT_DOUBLE_EQ(*r.recall, 0.8);
  EXPECT_DOUBLE_EQ(*r.accuracy, 0.85);
  EXPECT_DOUBLE_EQ(*r.fpr, 0.1);
  EXPECT_DOUBLE_EQ(*r.fnr, 0.2);
}

TEST(Performance, UndefinedRatesAreEmpty) {
  auto r = performance_from(Confusion{0, 2, 3, 0});
  EXPECT_FALSE(r.recall);
  EXPECT_FALSE(r.fnr);
  EXPECT_DOUBLE_EQ(*r.fpr, 0.4);
  EXPECT_FALSE(performance_from(Confusion{}).accuracy);
}

TEST(Performance, MissingLabel) {
  auto ad = Labeled(AdKind::kOba, 1);
  ad.ground_truth.reset();
  try {
    confusion_counts({ad}, [](const AdImpression&) { return true; });
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kMissingGroundTruth);
  }
}

TEST(FiveNumber, MedianOfHalves) {
  auto f = five_number({7, 1, 3, 5, 9, 11, 13});
  EXPECT_EQ(f.n, 7u);
  EXPECT_DOUBLE_EQ(f.min, 1);
  EXPECT_DOUBLE_EQ(f.q1, 3);
  EXPECT_DOUBLE_EQ(f.median, 7);
  EXPECT_DOUBLE_EQ(f.q3, 11);
  EXPECT_DOUBLE_EQ(f.max, 13);
  auto g = five_number({1, 2, 3, 4, 5, 6, 7, 8});
  EXPECT_DOUBLE_EQ(g.q1, 2.5);
  EXPECT_DOUBLE_EQ(g.median, 4.5);
  EXPECT_DOUBLE_EQ(g.q3, 6.5);
}

TEST(FiveNumber, OtherMethods) {
  std::vector<double> v{1, 3, 5, 7, 9, 11, 13};
  auto inc = five_number(v, QuartileMethod::kMedianInclusive);
  EXPECT_DOUBLE_EQ(inc.q1, 4);
  EXPECT_DOUBLE_EQ(inc.q3, 10);
  auto lin = five_number({1, 2, 3, 4}, QuartileMethod::kLinear);
  EXPECT_DOUBLE_EQ(lin.q1, 1.75);
  EXPECT_DOUBLE_EQ(lin.median, 2.5);
  EXPECT_DOUBLE_EQ(lin.q3, 3.25);
  auto one = five_number({4});
  EXPECT_DOUBLE_EQ(one.q1, 4);
  EXPECT_DOUBLE_EQ(one.q3, 4);
  EXPECT_THROW(five_number({}), Error);
  EXPECT_THROW(quartile_method_from_string("tukey"), Error);
  EXPECT_EQ(quartile_method_from_string(to_string(QuartileMethod::kLinear)), QuartileMethod::kLinear);
}

TEST(Correlation, KnownValues) {
  std::vector<double> x{1, 2, 3, 4, 5}, y{2, 4, 5, 4, 5};
  // r = 6 / sqrt(10 * 6)
  EXPECT_NEAR(pearson(x, y), 6.0 / std::sqrt(60.0), 1e-12);
  // ranks of y: 1, 2, 4.5, 2... -> computed by hand: y ranks {1, 2.5, 4.5, 2.5, 4.5}
  std::vector<double> ry{1, 2.5, 4.5, 2.5, 4.5};
  EXPECT_NEAR(spearman(x, y), pearson(x, ry), 1e-12);
  EXPECT_EQ(average_ranks(y), ry);
  EXPECT_DOUBLE_EQ(spearman({1, 2, 3}, {10, 100, 1000}), 1.0);
  EXPECT_DOUBLE_EQ(pearson({1, 2, 3}, {3, 2, 1}), -1.0);
  EXPECT_THROW(pearson({1, 1, 1}, {1, 2, 3}), Error);
  EXPECT_THROW(pearson({1, 2}, {1, 2, 3}), Error);
}

TEST(Correlation, PValues) {
  // r = 0.5, n = 12 -> t = 0.5 * sqrt(10 / 0.75) = 1.8257, two-sided p ~ 0.0979.
  EXPECT_NEAR(pearson_p_value(0.5, 12), 0.0979, 5e-4);
  EXPECT_DOUBLE_EQ(pearson_p_value(1.0, 10), 0.0);
  EXPECT_NEAR(spearman_p_value(0.0, 10), 1.0, 1e-12);
  EXPECT_NEAR(spearman_p_value(1.96 / 3.0, 10), 0.05, 1e-3);
}

// Straightforward two-pass oracle on random data.
TEST(Correlation, MatchesNaiveOracle) {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> u(-5, 5);
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<double> x(20), y(20);
    for (int i = 0; i < 20; ++i) {
      x[i] = u(gen);
      y[i] = 0.3 * x[i] + u(gen);
    }
    double n = 20, sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
    for (int i = 0; i < 20; ++i) {
      sx += x[i];
      sy += y[i];
      sxx += x[i] * x[i];
      syy += y[i] * y[i];
      sxy += x[i] * y[i];
    }
    double r = (n * sxy - sx * sy) / std::sqrt((n * sxx - sx * sx) * (n * syy - sy * sy));
    EXPECT_NEAR(pearson(x, y), r, 1e-9);
  }
}

TEST(ValueCorrelation, DropsCpcOutlier) {
  ValueSeries metric, cpc;
  const char* keys[] = {"a", "b", "c", "d", "e", "f", "g", "h"};
  double m[] = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.0};
  double c[] = {1.0, 1.2, 1.1, 1.5, 1.6, 1.8, 1.9, 45.0};
  for (int i = 0; i < 8; ++i) {
    metric[keys[i]] = m[i];
    cpc[keys[i]] = c[i];
  }
  auto r = value_correlation(metric, cpc);
  ASSERT_EQ(r.outliers, std::vector<std::string>{"h"});
  EXPECT_EQ(r.pairs, 7u);
  EXPECT_GT(r.spearman, 0.9);
  EXPECT_GT(r.pearson, 0.9);
  EXPECT_DOUBLE_EQ(r.cpc_summary.max, 1.9);
  cpc.erase("h");
  EXPECT_THROW(value_correlation(metric, cpc), Error);
}

TEST(Comparison, Differences) {
  ValueSeries a{{"x", 0.5}, {"y", 0.2}, {"z", 0.9}}, b{{"x", 0.1}, {"y", 0.4}, {"z", 0.9}};
  auto c = comparison_stats(a, b);
  EXPECT_NEAR(c.differences["x"], 0.4, 1e-15);
  EXPECT_NEAR(c.differences["y"], -0.2, 1e-15);
  EXPECT_DOUBLE_EQ(c.summary.median, 0.0);
  ValueSeries other{{"x", 1}, {"q", 2}, {"z", 3}};
  try {
    comparison_stats(a, other);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kKeyMismatch);
  }
}

TEST(Descriptive, MeanAndSampleSd) {
  EXPECT_DOUBLE_EQ(mean({2, 4, 4, 4, 5, 5, 7, 9}), 5.0);
  EXPECT_NEAR(stddev({2, 4, 4, 4, 5, 5, 7, 9}), std::sqrt(32.0 / 7.0), 1e-12);
  EXPECT_DOUBLE_EQ(stddev({3}), 0.0);
}

}  // namespace
}  // namespace obamet
