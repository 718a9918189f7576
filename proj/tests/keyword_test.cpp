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
#include "obamet/keyword.hpp"

#include <vector>

#include <gtest/gtest.h>

namespace obamet {
namespace {

TEST(NormalizeKeyword, Canonicalizes) {
  EXPECT_EQ(normalize_keyword("Swimming Pools &  Spas"), "swimming pools & spas");
  EXPECT_EQ(normalize_keyword("Home_&_Garden"), "home & garden");
  EXPECT_EQ(normalize_keyword("Home / Garden"), "home/garden");
  EXPECT_EQ(normalize_keyword("\tGems&Jewellery \n"), "gems & jewellery");
  EXPECT_EQ(normalize_keyword("SPORTS/ Recreation"), "sports/recreation");
}

TEST(NormalizeKeyword, Idempotent) {
  for (const char* s : {"A & B", "a_b", " x / y ", "Caf\xc3\xa9 & Bar", "&", "//"}) {
    auto once = normalize_keyword(s);
    EXPECT_EQ(normalize_keyword(once), once) << s;
  }
}

TEST(Keyword, RejectsEmpty) {
  EXPECT_THROW(Keyword(""), Error);
  EXPECT_THROW(Keyword(" _\t"), Error);
  try {
    Keyword k("   ");
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidKeyword);
  }
}

TEST(Keyword, EqualityFollowsNormalization) {
  EXPECT_EQ(Keyword("Surf & Swim"), Keyword("surf&swim"));
  EXPECT_NE(Keyword("surf"), Keyword("swim"));
  auto s = make_keyword_set({"B", "a", "b"});
  EXPECT_EQ(s.size(), 2u);
  std::vector<std::string> v{"x", "X ", "y"};
  EXPECT_EQ(make_keyword_set(v).size(), 2u);
}

}  // namespace
}  // namespace obamet
