#pragma once

// Shared fixtures: deterministic tree builders, an exhaustive cut optimizer
// used as the oracle for the dynamic program, and temp-file helpers.

#include <unistd.h>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <string>
#include <vector>

#include "ucantor/rng.hpp"
#include "ucantor/tree.hpp"

namespace ucantor::testing {

/// Depth bookkeeping plus the frontier/dangling marks, via the library's own
/// finalize pass. Hand-built trees must go through this before use.
inline void mark_leaves(WeightedTree& t) { t.finalize(); }

/// Complete b-ary tree, kappa = ratio^depth.
inline WeightedTree uniform_tree(std::uint32_t branch, std::uint32_t depth,
                                 double ratio = 0.5) {
  WeightedTree t;
  std::vector<VertexId> level{t.add_root(1.0)};
  double w = 1.0;
  for (std::uint32_t d = 0; d < depth; ++d) {
    w *= ratio;
    std::vector<VertexId> next;
    for (VertexId v : level)
      for (std::uint32_t k = 0; k < branch; ++k)
        next.push_back(t.add_child(v, w));
    level = std::move(next);
  }
  mark_leaves(t);
  return t;
}

/// Branching alternates 2, 3, 2, 3, ... by depth; kappa = ratio^depth.
inline WeightedTree mixed_tree(std::uint32_t depth, double ratio = 0.5) {
  WeightedTree t;
  std::vector<VertexId> level{t.add_root(1.0)};
  double w = 1.0;
  for (std::uint32_t d = 0; d < depth; ++d) {
    w *= ratio;
    const std::uint32_t branch = (d % 2 == 0) ? 2 : 3;
    std::vector<VertexId> next;
    for (VertexId v : level)
      for (std::uint32_t k = 0; k < branch; ++k)
        next.push_back(t.add_child(v, w));
    level = std::move(next);
  }
  mark_leaves(t);
  return t;
}

/// Random reduced tree: every internal vertex draws 2..max_branch children,
/// each child keeps a random fraction of its parent weight, and branches
/// past depth 1 only with probability 1 - stop_prob. Deterministic in key.
inline WeightedTree random_tree(std::uint64_t key, std::uint32_t max_depth,
                                std::uint32_t max_branch = 3,
                                double stop_prob = 0.3) {
  WeightedTree t;
  struct Item {
    VertexId v;
    std::uint32_t depth;
    std::uint64_t k;
  };
  std::vector<Item> stack{{t.add_root(1.0), 0, key}};
  while (!stack.empty()) {
    const Item it = stack.back();
    stack.pop_back();
    if (it.depth == max_depth) continue;
    if (it.depth >= 1 && unit_halfopen(rng_draw(it.k, 0)) < stop_prob)
      continue;
    const std::uint32_t branch =
        2 + static_cast<std::uint32_t>(rng_draw(it.k, 1) % (max_branch - 1));
    const double w = t.weight(it.v);
    for (std::uint32_t c = 0; c < branch; ++c) {
      const double frac = 0.3 + 0.6 * unit_halfopen(rng_draw(it.k, 2 + c));
      stack.push_back(
          {t.add_child(it.v, w * frac), it.depth + 1, child_key(it.k, c)});
    }
  }
  mark_leaves(t);
  return t;
}

/// Number of full subtrees all of whose boundary weights are < delta.
inline double count_cuts(const WeightedTree& t, VertexId v, double delta) {
  double n = t.weight(v) < delta ? 1.0 : 0.0;
  if (!t.is_leaf(v)) {
    double prod = 1.0;
    for (VertexId c : t.at(v).children) prod *= count_cuts(t, c, delta);
    n += prod;
  }
  return n;
}

namespace detail {

inline void collect_cuts(const WeightedTree& t, VertexId v, double delta,
                         std::vector<std::vector<VertexId>>& out) {
  std::vector<std::vector<VertexId>> mine;
  if (t.weight(v) < delta) mine.push_back({v});
  if (!t.is_leaf(v)) {
    std::vector<std::vector<VertexId>> combos{{}};
    for (VertexId c : t.at(v).children) {
      std::vector<std::vector<VertexId>> sub;
      collect_cuts(t, c, delta, sub);
      std::vector<std::vector<VertexId>> next;
      for (const auto& head : combos)
        for (const auto& opt : sub) {
          auto merged = head;
          merged.insert(merged.end(), opt.begin(), opt.end());
          next.push_back(std::move(merged));
        }
      combos = std::move(next);
    }
    for (auto& c : combos) mine.push_back(std::move(c));
  }
  out = std::move(mine);
}

// Value of one cut, summed subtree by subtree (the same association the
// dynamic program uses, so the comparison can demand bitwise equality).
inline double cut_value(const WeightedTree& t, VertexId v, double s,
                        const std::vector<char>& in_cut) {
  if (in_cut[v]) return std::pow(t.weight(v), s);
  double sum = 0.0;
  for (VertexId c : t.at(v).children) sum += cut_value(t, c, s, in_cut);
  return sum;
}

}  // namespace detail

/// Exhaustive minimum of sum kappa^s over all delta-admissible full cuts.
/// Enumerates every cut explicitly; callers keep the cut count in check.
inline double brute_h_s_delta(const WeightedTree& t, double s, double delta) {
  std::vector<std::vector<VertexId>> cuts;
  detail::collect_cuts(t, t.root(), delta, cuts);
  double best = std::numeric_limits<double>::infinity();
  std::vector<char> in_cut(t.size(), 0);
  for (const auto& cut : cuts) {
    for (VertexId v : cut) in_cut[v] = 1;
    const double val = detail::cut_value(t, t.root(), s, in_cut);
    if (val < best) best = val;
    for (VertexId v : cut) in_cut[v] = 0;
  }
  return best;
}

class TempDir {
 public:
  TempDir() {
    base_ = std::filesystem::temp_directory_path() /
            ("ucantor_test_" + std::to_string(::getpid()) + "_" +
             std::to_string(counter_++));
    std::filesystem::create_directories(base_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(base_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::string path(const std::string& name) const {
    return (base_ / name).string();
  }
  std::string write(const std::string& name,
                    const std::string& content) const {
    const std::string p = path(name);
    std::ofstream f(p, std::ios::binary);
    f << content;
    return p;
  }

 private:
  static inline int counter_ = 0;
  std::filesystem::path base_;
};

}  // namespace ucantor::testing
