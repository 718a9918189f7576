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
#include <cstddef>
#include <istream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "obamet/error.hpp"
#include "obamet/keyword.hpp"

namespace obamet {

// Leacock-Chodorow score upper bound for a hierarchy of depth `max_depth`:
// ln(2 * D), reached only by identical senses.
inline double lc_max(int max_depth) {
  return std::log(2.0 * static_cast<double>(max_depth));
}

// Rooted tree of keyword senses, immutable once built. A node id may carry a
// sense suffix ("bank#2"); the keyword text of the node is the id without
// the suffix, so several nodes can share one keyword.
class KeywordTaxonomy {
 public:
  struct Edge {
    std::string child;
    std::string parent;  // empty for the root
  };

  // Builds from an edge list. Exactly one edge must have an empty parent.
  explicit KeywordTaxonomy(const std::vector<Edge>& edges) { build(edges); }

  // Parses the line format `child<TAB>parent`, root given as `name<TAB>-`.
  // Blank lines and lines starting with '#' are ignored.
  static KeywordTaxonomy parse(std::istream& in) {
    std::vector<Edge> edges;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty() || line.front() == '#') continue;
      auto tab = line.find('\t');
      if (tab == std::string::npos) {
        throw Error(ErrorCode::kInvalidTaxonomy,
                    "line " + std::to_string(line_no) + ": expected child<TAB>parent");
      }
      Edge e{line.substr(0, tab), line.substr(tab + 1)};
      if (e.parent == "-") e.parent.clear();
      edges.push_back(std::move(e));
    }
    return KeywordTaxonomy(edges);
  }

  static KeywordTaxonomy parse(std::string_view text) {
    std::istringstream in{std::string(text)};
    return parse(in);
  }

  std::size_t size() const noexcept { return nodes_.size(); }
  int max_depth() const noexcept { return max_depth_; }
  double max_score() const noexcept { return lc_max(max_depth_); }
  const std::string& root() const { return nodes_[root_].id; }

  bool contains(const Keyword& k) const {
    return senses_.find(k.text()) != senses_.end();
  }

  // Node depth of the shallowest sense of `k` (root = 1).
  int depth(const Keyword& k) const {
    const auto& s = senses_of(k);
    int best = nodes_[s.front()].depth;
    for (auto i : s) best = std::min(best, nodes_[i].depth);
    return best;
  }

  // Minimum number of nodes on an undirected path between any sense of k
  // and any sense of l; 1 when they share a node.
  int path_nodes(const Keyword& k, const Keyword& l) const {
    const auto& sk = senses_of(k);
    const auto& sl = senses_of(l);
    int best = -1;
    for (auto a : sk) {
      for (auto b : sl) {
        int p = node_path(a, b);
        if (best < 0 || p < best) best = p;
      }
    }
    return best;
  }

  // -ln(pathlen / 2D), maximised over sense pairs. Throws UnknownKeyword.
  double lc_similarity(const Keyword& k, const Keyword& l) const {
    int p = path_nodes(k, l);
    return -std::log(static_cast<double>(p) / (2.0 * max_depth_));
  }

  bool similar(const Keyword& k, const Keyword& l, double threshold) const {
    return lc_similarity(k, l) > threshold;
  }

  std::vector<Edge> edges() const {
    std::vector<Edge> out;
    out.reserve(nodes_.size());
    for (const auto& n : nodes_) {
      out.push_back({n.id, n.parent < 0 ? std::string() : nodes_[n.parent].id});
    }
    return out;
  }

  // Serializes to the tab-separated line format, parents before children.
  std::string to_tsv() const {
    std::string out;
    for (const auto& e : edges()) {
      out += e.child;
      out += '\t';
      out += e.parent.empty() ? std::string("-") : e.parent;
      out += '\n';
    }
    return out;
  }

  // Every keyword text present, sorted.
  std::vector<std::string> keywords() const {
    std::vector<std::string> out;
    out.reserve(senses_.size());
    for (const auto& [text, _] : senses_) out.push_back(text);
    std::sort(out.begin(), out.end());
    return out;
  }

  std::vector<std::string> children_of(const Keyword& k) const {
    std::vector<std::string> out;
    for (auto s : senses_of(k)) {
      for (auto c : nodes_[s].children) out.push_back(nodes_[c].text);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  static std::string keyword_text_of(std::string_view id) {
    auto hash = id.rfind('#');
    if (hash != std::string_view::npos && hash > 0) id = id.substr(0, hash);
    return normalize_keyword(id);
  }

 private:
  struct Node {
    std::string id;
    std::string text;
    int parent = -1;
    int depth = 0;
    std::vector<int> children;
  };

  const std::vector<int>& senses_of(const Keyword& k) const {
    auto it = senses_.find(k.text());
    if (it == senses_.end()) {
      throw Error(ErrorCode::kUnknownKeyword, "'" + k.text() + "' is not in the taxonomy");
    }
    return it->second;
  }

  int node_path(int a, int b) const {
    int edges = 0;
    while (nodes_[a].depth > nodes_[b].depth) { a = nodes_[a].parent; ++edges; }
    while (nodes_[b].depth > nodes_[a].depth) { b = nodes_[b].parent; ++edges; }
    while (a != b) {
      a = nodes_[a].parent;
      b = nodes_[b].parent;
      edges += 2;
    }
    return edges + 1;
  }

  void build(const std::vector<Edge>& edges) {
    std::unordered_map<std::string, int> index;
    auto id_of = [&](const std::string& raw) {
      auto key = normalize_id(raw);
      if (key.empty()) {
        throw Error(ErrorCode::kInvalidTaxonomy, "empty node name '" + raw + "'");
      }
      auto [it, inserted] = index.emplace(key, static_cast<int>(nodes_.size()));
      if (inserted) {
        Node n;
        n.id = key;
        n.text = keyword_text_of(key);
        nodes_.push_back(std::move(n));
      }
      return it->second;
    };

    std::vector<bool> declared;
    int root = -1;
    for (const auto& e : edges) {
      int child = id_of(e.child);
      declared.resize(nodes_.size(), false);
      if (declared[child]) {
        throw Error(ErrorCode::kInvalidTaxonomy,
                    "node '" + nodes_[child].id + "' declared more than once");
      }
      declared[child] = true;
      if (e.parent.empty()) {
        if (root >= 0) {
          throw Error(ErrorCode::kInvalidTaxonomy,
                      "multiple roots: '" + nodes_[root].id + "' and '" +
                          nodes_[child].id + "'");
        }
        root = child;
        continue;
      }
      int parent = id_of(e.parent);
      declared.resize(nodes_.size(), false);
      if (parent == child) {
        throw Error(ErrorCode::kInvalidTaxonomy,
                    "cycle: node '" + nodes_[child].id + "' is its own parent");
      }
      nodes_[child].parent = parent;
    }
    if (root < 0) throw Error(ErrorCode::kInvalidTaxonomy, "no root declared");
    root_ = root;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      if (!declared[i]) {
        throw Error(ErrorCode::kInvalidTaxonomy,
                    "node '" + nodes_[i].id + "' is used as a parent but never declared");
      }
    }
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      if (nodes_[i].parent >= 0) {
        nodes_[nodes_[i].parent].children.push_back(static_cast<int>(i));
      }
    }
    // Breadth-first depth assignment; anything unreached sits on a cycle.
    std::vector<int> frontier{root_};
    nodes_[root_].depth = 1;
    std::size_t reached = 1;
    max_depth_ = 1;
    while (!frontier.empty()) {
      std::vector<int> next;
      for (int n : frontier) {
        for (int c : nodes_[n].children) {
          nodes_[c].depth = nodes_[n].depth + 1;
          max_depth_ = std::max(max_depth_, nodes_[c].depth);
          next.push_back(c);
          ++reached;
        }
      }
      frontier = std::move(next);
    }
    if (reached != nodes_.size()) {
      for (const auto& n : nodes_) {
        if (n.depth == 0) {
          throw Error(ErrorCode::kInvalidTaxonomy,
                      "cycle: node '" + n.id + "' is not reachable from root '" +
                          nodes_[root_].id + "'");
        }
      }
    }
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      senses_[nodes_[i].text].push_back(static_cast<int>(i));
    }
  }

  static std::string normalize_id(std::string_view raw) {
    auto hash = raw.rfind('#');
    if (hash != std::string_view::npos && hash > 0) {
      return normalize_keyword(raw.substr(0, hash)) + "#" +
             normalize_keyword(raw.substr(hash + 1));
    }
    return normalize_keyword(raw);
  }

  std::vector<Node> nodes_;
  std::map<std::string, std::vector<int>> senses_;
  int root_ = -1;
  int max_depth_ = 1;
};

// Keyword comparison with the exact-match fallback used throughout the
// analysis: identical texts always agree; otherwise both keywords must be in
// the taxonomy and score strictly above the threshold.
class KeywordMatcher {
 public:
  explicit KeywordMatcher(const KeywordTaxonomy& taxonomy) : taxonomy_(&taxonomy) {}

  const KeywordTaxonomy& taxonomy() const { return *taxonomy_; }

  // Similarity with fallback: equal texts score lc_max, unknown pairs score 0.
  double score(const Keyword& k, const Keyword& l) const {
    if (taxonomy_->contains(k) && taxonomy_->contains(l)) {
      return taxonomy_->lc_similarity(k, l);
    }
    return k == l ? taxonomy_->max_score() : 0.0;
  }

  bool agree(const Keyword& k, const Keyword& l, double threshold) const {
    if (k == l) return true;
    if (!taxonomy_->contains(k) || !taxonomy_->contains(l)) return false;
    return taxonomy_->lc_similarity(k, l) > threshold;
  }

 private:
  const KeywordTaxonomy* taxonomy_;
};

}  // namespace obamet
