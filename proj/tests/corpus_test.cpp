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
#include "obamet/corpus.hpp"

#include <fstream>
#include <set>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "fixtures.hpp"

namespace obamet {
namespace {

std::vector<WebPage> SyntheticPages(int n) {
  std::vector<WebPage> pages;
  for (int i = 0; i < n; ++i) pages.emplace_back("https://site" + std::to_string(i) + ".example/", PageRole::kTraining);
  return pages;
}

TEST(FixtureTaggingSource, ReplaysFile) {
  auto dir = testing::scratch_dir("fixture-src");
  auto path = (dir / "tags.google.jsonl").string();
  {
    std::ofstream out(path);
    out << R"({"url":"http://poolpricer.com","keywords":["Swimming Pools & Spas","Surf & Swim"]})" << "\n";
    out << R"({"url":"http://allas.fi/","keywords":[]})" << "\n";
  }
  FixtureTaggingSource src({"google", "fine"}, path);
  EXPECT_EQ(src.tag(WebPage("https://POOLPRICER.com/", PageRole::kTraining)),
            make_keyword_set({"swimming pools & spas", "surf & swim"}));
  EXPECT_TRUE(src.tag(WebPage("http://allas.fi", PageRole::kTraining)).empty());
  EXPECT_TRUE(src.tag(WebPage("http://unknown.example", PageRole::kTraining)).empty());

  auto pages = std::vector<WebPage>{WebPage("http://poolpricer.com", PageRole::kTraining),
                                    WebPage("http://unknown.example", PageRole::kTraining)};
  auto a = tag_pages(pages, src);
  auto b = tag_pages(pages, src);
  ASSERT_EQ(a.size(), 2u);
  EXPECT_EQ(a, b);
  EXPECT_EQ(a[0].source, "google");
}

TEST(FixtureTaggingSource, MissingOrCorruptFileIsUnavailable) {
  auto dir = testing::scratch_dir("fixture-bad");
  try {
    FixtureTaggingSource src({"x", ""}, (dir / "nope.jsonl").string());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSourceUnavailable);
  }
  auto path = (dir / "bad.jsonl").string();
  std::ofstream(path) << "{not json\n";
  try {
    FixtureTaggingSource src({"x", ""}, path);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSourceUnavailable);
  }
}

TEST(RemoteTaggingSource, IsAStub) {
  RemoteTaggingSource src({"cyren", "coarse"});
  try {
    src.tag(WebPage("http://a.example", PageRole::kLanding));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSourceUnavailable);
  }
}

TEST(Coverage, ThreeSourcesOverThousandPages) {
  // 1000 pages; google tags all, mcafee misses 10, cyren misses 45.
  auto pages = SyntheticPages(1000);
  std::map<std::string, KeywordSet> g, m, c;
  for (int i = 0; i < 1000; ++i) {
    const auto& url = pages[i].url;
    g[url] = make_keyword_set({"home & garden"});
    if (i % 100 != 7) m[url] = make_keyword_set({"home/garden"});
    if (i % 200 >= 9) c[url] = make_keyword_set({"sports"});
  }
  std::vector<TagAssignment> all;
  for (auto* src : {new FixtureTaggingSource({"google", ""}, g), new FixtureTaggingSource({"mcafee", ""}, m),
                    new FixtureTaggingSource({"cyren", ""}, c)}) {
    auto a = tag_pages(pages, *src);
    all.insert(all.end(), a.begin(), a.end());
    delete src;
  }
  auto r = coverage(all, pages);
  EXPECT_FALSE(r.empty_page_set);
  EXPECT_DOUBLE_EQ(r.fraction.at("google"), 1.0);
  EXPECT_DOUBLE_EQ(r.fraction.at("mcafee"), 0.990);
  EXPECT_DOUBLE_EQ(r.fraction.at("cyren"), 0.955);
}

TEST(Coverage, MatchesBruteForceRecount) {
  auto pages = SyntheticPages(37);
  std::vector<TagAssignment> all;
  std::map<std::string, int> expected;
  for (int i = 0; i < 37; ++i) {
    bool a = i % 3 != 0, b = i % 3 == 0 || i % 5 == 0;  // disjoint-ish misses
    all.push_back({pages[i], "a", a ? make_keyword_set({"x"}) : KeywordSet{}});
    all.push_back({pages[i], "b", b ? make_keyword_set({"y"}) : KeywordSet{}});
  }
  for (const auto& t : all) expected[t.source] += t.keywords.empty() ? 0 : 1;
  auto r = coverage(all, pages);
  EXPECT_DOUBLE_EQ(r.fraction.at("a"), expected["a"] / 37.0);
  EXPECT_DOUBLE_EQ(r.fraction.at("b"), expected["b"] / 37.0);
}

TEST(Coverage, EmptyPageSetIsFlagged) {
  std::vector<TagAssignment> all{{WebPage("http://a.example", PageRole::kLanding), "s", make_keyword_set({"x"})}};
  auto r = coverage(all, {});
  EXPECT_TRUE(r.empty_page_set);
  EXPECT_DOUBLE_EQ(r.fraction.at("s"), 1.0);
}

TEST(CorpusJson, ImpressionRoundTrip) {
  AdImpression a{"p1", {"US", true, 3}, "http://c.example", "https://l.example/x?u=1", 7, AdKind::kGeoDemo};
  json j = a;
  EXPECT_EQ(j["session"], "US-dnt-r3");
  EXPECT_EQ(j["ground_truth"], "geo_demo");
  EXPECT_EQ(j.get<AdImpression>(), a);
  a.ground_truth.reset();
  json k = a;
  EXPECT_EQ(k.get<AdImpression>(), a);
}

TEST(CorpusJson, VisitRoundTrip) {
  VisitRecord v{"p1", {"ES", false, 0}, 4, 812.5, "http://c.example", VisitKind::kControl};
  json j = v;
  EXPECT_EQ(j.get<VisitRecord>(), v);
}

TEST(AdKind, StringRoundTrip) {
  for (auto k : kAllAdKinds) EXPECT_EQ(ad_kind_from_string(to_string(k)), k);
  EXPECT_THROW(ad_kind_from_string("banner"), Error);
}

}  // namespace
}  // namespace obamet
