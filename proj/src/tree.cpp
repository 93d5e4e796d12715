#include "ucantor/tree.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

namespace ucantor {

void WeightedTree::set_leaf_kind(VertexId v, LeafKind k) {
  if (v >= v_.size()) throw Error::invalid("set_leaf_kind: no such vertex");
  if (!v_[v].children.empty() && k != LeafKind::internal)
    throw Error::invalid("set_leaf_kind: vertex has children");
  if (forced_.size() < v_.size()) forced_.resize(v_.size(), false);
  v_[v].leaf = k;
  forced_[v] = true;
}

void WeightedTree::finalize() {
  if (root_ == kNoVertex) throw Error::invalid("finalize: tree has no root");
  if (forced_.size() < v_.size()) forced_.resize(v_.size(), false);
  std::deque<VertexId> queue{root_};
  v_[root_].depth = 0;
  max_depth_ = 0;
  while (!queue.empty()) {
    const VertexId v = queue.front();
    queue.pop_front();
    max_depth_ = std::max(max_depth_, v_[v].depth);
    for (VertexId c : v_[v].children) {
      v_[c].depth = v_[v].depth + 1;
      queue.push_back(c);
    }
  }
  for (std::size_t i = 0; i < v_.size(); ++i) {
    if (!v_[i].children.empty()) {
      v_[i].leaf = LeafKind::internal;
    } else if (!forced_[i]) {
      v_[i].leaf = (v_[i].depth == max_depth_) ? LeafKind::frontier : LeafKind::dangling;
    }
  }
}

std::vector<VertexId> resolve(const WeightedTree& t, const BoundaryPoint& p) {
  if (t.empty() || t.root() == kNoVertex) throw Error::invalid("resolve: empty tree");
  std::vector<VertexId> path;
  path.reserve(p.steps.size() + 1);
  VertexId v = t.root();
  path.push_back(v);
  for (std::uint32_t s : p.steps) {
    const auto& kids = t.at(v).children;
    if (s >= kids.size()) throw Error::invalid("resolve: child index out of range");
    v = kids[s];
    path.push_back(v);
  }
  if (!t.is_leaf(v)) throw Error::invalid("resolve: path stops at an internal vertex");
  return path;
}

ValidationReport validate(const WeightedTree& t) {
  ValidationReport rep;
  auto add = [&rep](std::string code, std::string msg, std::vector<std::int64_t> ids = {}) {
    rep.valid = false;
    rep.issues.push_back({std::move(code), std::move(msg), std::move(ids)});
  };

  const auto& v = t.vertices();
  if (v.empty()) {
    add("no-root", "tree has no vertices");
    return rep;
  }

  std::vector<VertexId> roots;
  for (VertexId i = 0; i < v.size(); ++i)
    if (v[i].parent == kNoVertex) roots.push_back(i);
  if (roots.empty()) add("no-root", "no vertex without a parent");
  if (roots.size() > 1) {
    std::vector<std::int64_t> ids;
    for (VertexId r : roots) ids.push_back(v[r].ext_id);
    add("multiple-roots", "more than one vertex without a parent", std::move(ids));
  }
  if (t.root() >= v.size() ||
      (!roots.empty() && std::find(roots.begin(), roots.end(), t.root()) == roots.end())) {
    add("root-mismatch", "declared root is not a parentless vertex");
  }

  // parent/children cross-links
  for (VertexId i = 0; i < v.size(); ++i) {
    for (VertexId c : v[i].children) {
      if (c >= v.size() || v[c].parent != i) {
        add("child-link", "children array and parent field disagree", {v[i].ext_id});
        break;
      }
    }
    if (v[i].parent != kNoVertex) {
      const auto& sib = v[v[i].parent].children;
      if (std::count(sib.begin(), sib.end(), i) != 1)
        add("child-link", "vertex missing from its parent's children", {v[i].ext_id});
    }
  }

  // reachability from the declared root (also catches parent cycles)
  if (t.root() < v.size()) {
    std::vector<bool> seen(v.size(), false);
    std::deque<VertexId> queue{t.root()};
    seen[t.root()] = true;
    std::uint32_t depth_max = 0;
    std::vector<std::uint32_t> depth(v.size(), 0);
    while (!queue.empty()) {
      const VertexId x = queue.front();
      queue.pop_front();
      depth_max = std::max(depth_max, depth[x]);
      for (VertexId c : v[x].children) {
        if (c < v.size() && !seen[c]) {
          seen[c] = true;
          depth[c] = depth[x] + 1;
          queue.push_back(c);
        }
      }
    }
    std::vector<std::int64_t> unreachable;
    for (VertexId i = 0; i < v.size(); ++i)
      if (!seen[i]) unreachable.push_back(v[i].ext_id);
    if (!unreachable.empty())
      add("unreachable", "vertices not reachable from the root", std::move(unreachable));
    if (unreachable.empty() && depth_max != t.max_depth())
      add("max-depth-mismatch", "stored max depth " + std::to_string(t.max_depth()) +
                                    " differs from computed " + std::to_string(depth_max));
  }

  for (VertexId i = 0; i < v.size(); ++i) {
    const double w = v[i].weight;
    if (!(w > 0.0) || !std::isfinite(w))
      add("weight-positive", "weight must be finite and positive", {v[i].ext_id});
    if (v[i].parent != kNoVertex && v[i].parent < v.size()) {
      const double pw = v[v[i].parent].weight;
      if (std::isfinite(w) && std::isfinite(pw) && w > pw)
        add("weight-monotone", "child weight exceeds parent weight", {v[i].ext_id});
    }
    if (!v[i].children.empty() && v[i].leaf != LeafKind::internal)
      add("leaf-kind", "vertex with children marked as a leaf", {v[i].ext_id});
    if (v[i].children.empty() && v[i].leaf == LeafKind::internal)
      add("leaf-kind", "childless vertex not marked frontier or dangling", {v[i].ext_id});
  }
  return rep;
}

void require_valid(const WeightedTree& t, const char* op) {
  ValidationReport rep = validate(t);
  if (rep.valid) return;
  const auto& issue = rep.issues.front();
  throw Error::domain(std::string(op) + ": invalid tree (" + issue.code + ": " + issue.message + ")");
}

VertexId lca(const WeightedTree& t, VertexId a, VertexId b) {
  if (a >= t.size() || b >= t.size()) throw Error::invalid("lca: no such vertex");
  while (a != b) {
    if (t.at(a).depth >= t.at(b).depth) {
      a = t.at(a).parent;
    } else {
      b = t.at(b).parent;
    }
    if (a == kNoVertex || b == kNoVertex) throw Error::internal("lca: broken parent chain");
  }
  return a;
}

VertexId lca(const WeightedTree& t, const BoundaryPoint& a, const BoundaryPoint& b) {
  VertexId v = t.root();
  const std::size_t n = std::min(a.steps.size(), b.steps.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (a.steps[i] != b.steps[i]) break;
    const auto& kids = t.at(v).children;
    if (a.steps[i] >= kids.size()) throw Error::invalid("lca: child index out of range");
    v = kids[a.steps[i]];
  }
  return v;
}

double d_kappa(const WeightedTree& t, const BoundaryPoint& a, const BoundaryPoint& b) {
  if (a.steps == b.steps) return 0.0;
  return t.weight(lca(t, a, b));
}

bool is_reduced(const WeightedTree& t) {
  for (const auto& v : t.vertices())
    if (v.children.size() == 1) return false;
  return true;
}

bool structurally_equal(const WeightedTree& a, const WeightedTree& b) {
  if (a.size() != b.size()) return false;
  if (a.empty()) return true;
  // parallel DFS in child order
  std::vector<std::pair<VertexId, VertexId>> stack{{a.root(), b.root()}};
  while (!stack.empty()) {
    auto [x, y] = stack.back();
    stack.pop_back();
    const Vertex& vx = a.at(x);
    const Vertex& vy = b.at(y);
    if (vx.weight != vy.weight || vx.leaf != vy.leaf ||
        vx.children.size() != vy.children.size())
      return false;
    for (std::size_t i = 0; i < vx.children.size(); ++i)
      stack.push_back({vx.children[i], vy.children[i]});
  }
  return true;
}

namespace {

// First branching-or-leaf vertex at or below v.
VertexId skip_unary(const WeightedTree& t, VertexId v) {
  while (t.at(v).children.size() == 1) v = t.at(v).children[0];
  return v;
}

}  // namespace

MappedTree reduce_mapped(const WeightedTree& t) {
  require_valid(t, "reduce");
  MappedTree out;
  const VertexId top = skip_unary(t, t.root());
  if (t.is_leaf(top))
    throw Error::domain("reduce: degenerate tree, boundary is a single point");

  const VertexId new_root = out.tree.add_root(t.weight(top));
  out.source.push_back(top);
  std::vector<std::pair<VertexId, VertexId>> stack{{new_root, top}};  // (out, in)
  while (!stack.empty()) {
    auto [ov, iv] = stack.back();
    stack.pop_back();
    for (VertexId c : t.at(iv).children) {
      const VertexId w = skip_unary(t, c);
      const VertexId oc = out.tree.add_child(ov, t.weight(w));
      out.source.push_back(w);
      if (!t.is_leaf(w)) stack.push_back({oc, w});
    }
  }
  out.tree.finalize();
  for (VertexId i = 0; i < out.tree.size(); ++i) {
    out.tree.at(i).ext_id = t.at(out.source[i]).ext_id;
    if (out.tree.is_leaf(i)) out.tree.set_leaf_kind(i, t.at(out.source[i]).leaf);
  }
  return out;
}

WeightedTree reduce(const WeightedTree& t) { return reduce_mapped(t).tree; }

MappedTree telescope(const WeightedTree& t, double delta) {
  require_valid(t, "telescope");
  if (!(delta > 0.0 && delta < 1.0))
    throw Error::invalid("telescope: delta must lie in (0, 1)");

  MappedTree out;
  const VertexId new_root = out.tree.add_root(t.weight(t.root()));
  out.source.push_back(t.root());

  std::deque<std::pair<VertexId, VertexId>> queue{{new_root, t.root()}};  // (out, in)
  bool first_level = true;
  while (!queue.empty()) {
    const std::size_t level_count = queue.size();
    for (std::size_t k = 0; k < level_count; ++k) {
      auto [ov, iv] = queue.front();
      queue.pop_front();
      const double bound = delta * t.weight(iv);
      // maximal descendants w of iv with weight(w) <= bound
      std::vector<VertexId> stack(t.at(iv).children.rbegin(), t.at(iv).children.rend());
      while (!stack.empty()) {
        const VertexId c = stack.back();
        stack.pop_back();
        if (t.weight(c) <= bound) {
          const VertexId oc = out.tree.add_child(ov, t.weight(c));
          out.source.push_back(c);
          if (!t.is_leaf(c)) queue.push_back({oc, c});
        } else if (t.is_leaf(c)) {
          if (t.at(c).leaf == LeafKind::frontier && first_level)
            throw Error::domain("telescope: truncation too shallow to complete one level");
          out.tree.add_child(ov, t.weight(c));
          out.source.push_back(c);
        } else {
          for (auto it = t.at(c).children.rbegin(); it != t.at(c).children.rend(); ++it)
            stack.push_back(*it);
        }
      }
    }
    first_level = false;
  }
  out.tree.finalize();
  for (VertexId i = 0; i < out.tree.size(); ++i) {
    out.tree.at(i).ext_id = t.at(out.source[i]).ext_id;
    if (out.tree.is_leaf(i) && t.at(out.source[i]).leaf != LeafKind::internal)
      out.tree.set_leaf_kind(i, t.at(out.source[i]).leaf);
  }
  return out;
}

namespace {

struct GapTable {
  std::vector<double> worst;                                    // by gap-1
  std::vector<std::pair<std::int64_t, std::int64_t>> argmax;    // ext ids
  void bump(std::uint32_t gap, double ratio, std::int64_t anc, std::int64_t desc) {
    if (worst.size() < gap) {
      worst.resize(gap, 0.0);
      argmax.resize(gap, {0, 0});
    }
    if (ratio > worst[gap - 1]) {
      worst[gap - 1] = ratio;
      argmax[gap - 1] = {anc, desc};
    }
  }
};

// Fit theta, c from per-gap worst ratios. theta is the max of worst[g]^(1/g)
// over gaps that actually decay (worst[g] < 1): pairs of equal weight carry
// no decay information and are absorbed by c instead, otherwise one flat edge
// would force theta = 1 on trees that are geometric everywhere else. c is the
// smallest c >= 1 making worst[g] <= c * theta^g hold for every populated gap.
std::pair<double, double> fit_from_gaps(const std::vector<double>& worst) {
  double theta = 0.0;
  for (std::size_t g = 1; g <= worst.size(); ++g)
    if (worst[g - 1] > 0.0 && worst[g - 1] < 1.0)
      theta = std::max(theta, std::pow(worst[g - 1], 1.0 / static_cast<double>(g)));
  if (theta == 0.0) theta = 1.0;  // no decaying pair seen

  double c = 1.0;
  for (std::size_t g = 1; g <= worst.size(); ++g)
    if (worst[g - 1] > 0.0) c = std::max(c, worst[g - 1] / std::pow(theta, static_cast<double>(g)));
  return {theta, c};
}

}  // namespace

DecayFit fit_decay(const WeightedTree& t) {
  require_valid(t, "fit_decay");
  if (t.size() < 2) throw Error::domain("fit_decay: single-vertex tree");
  if (!is_reduced(t)) throw Error::domain("fit_decay: tree must be reduced first");

  DecayFit fit;
  for (const auto& v : t.vertices())
    fit.max_children = std::max<std::uint32_t>(fit.max_children,
                                               static_cast<std::uint32_t>(v.children.size()));

  // vertices ordered by depth so per-depth snapshots come out of one pass
  std::vector<VertexId> order(t.size());
  for (VertexId i = 0; i < t.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&t](VertexId a, VertexId b) {
    return t.at(a).depth < t.at(b).depth;
  });

  GapTable gaps;
  std::size_t idx = 0;
  for (std::uint32_t d = 1; d <= t.max_depth(); ++d) {
    while (idx < order.size() && t.at(order[idx]).depth < d) ++idx;
    bool saw = false;
    for (std::size_t j = idx; j < order.size() && t.at(order[j]).depth == d; ++j) {
      const VertexId w = order[j];
      // frontier leaves carry truncation placeholders, not geometry
      if (t.is_leaf(w) && t.at(w).leaf == LeafKind::frontier) continue;
      saw = true;
      VertexId v = t.at(w).parent;
      while (v != kNoVertex) {
        gaps.bump(d - t.at(v).depth, t.weight(w) / t.weight(v), t.at(v).ext_id, t.at(w).ext_id);
        v = t.at(v).parent;
      }
    }
    if (saw || d == t.max_depth()) {
      auto [theta_d, c_d] = fit_from_gaps(gaps.worst);
      fit.per_depth.push_back({d, theta_d, c_d});
    }
  }

  fit.worst_ratio = gaps.worst;
  fit.worst_pair = gaps.argmax;
  auto [theta, c] = fit_from_gaps(gaps.worst);
  fit.theta = theta;
  fit.c = c;
  return fit;
}

EmbedCheck check_embeddable(const WeightedTree& t, const EmbedCheckOptions& opt) {
  EmbedCheck out;
  out.fit = fit_decay(t);

  // Depths before the first observed decay carry no fit information (the
  // snapshot degenerates to theta = 1); the stability window starts after.
  std::vector<DepthFit> pd;
  for (const auto& f : out.fit.per_depth)
    if (f.theta < 1.0 || !pd.empty()) pd.push_back(f);

  std::size_t first = pd.size() > opt.window ? pd.size() - opt.window : 0;
  double c_lo = out.fit.c, c_hi = out.fit.c;
  bool climbing = pd.size() - first >= 3;  // need two steps to call it a trend
  for (std::size_t i = first; i < pd.size(); ++i) {
    c_lo = std::min(c_lo, pd[i].c);
    c_hi = std::max(c_hi, pd[i].c);
    if (i > first && !(pd[i].theta > pd[i - 1].theta)) climbing = false;
  }
  out.theta_stable = !climbing;
  out.c_stable = c_lo > 0.0 && (c_hi / c_lo) <= opt.c_ratio;

  std::string reason;
  if (!(out.fit.theta < 1.0)) reason += "no weight decay observed; ";
  if (out.fit.theta > opt.theta_max) reason += "theta too close to 1; ";
  if (!out.theta_stable)
    reason += "theta estimate still climbing across the stability window; ";
  if (!out.c_stable) reason += "c estimate drifts with depth; ";
  out.satisfied = reason.empty();
  if (!reason.empty()) reason.erase(reason.size() - 2);
  out.reason = reason;

  // worst offending pairs, largest excess over the fitted bound first
  std::vector<RatioWitness> all;
  for (std::size_t g = 1; g <= out.fit.worst_ratio.size(); ++g) {
    if (out.fit.worst_ratio[g - 1] <= 0.0) continue;
    RatioWitness w;
    w.ancestor = out.fit.worst_pair[g - 1].first;
    w.descendant = out.fit.worst_pair[g - 1].second;
    w.gap = static_cast<std::uint32_t>(g);
    w.ratio = out.fit.worst_ratio[g - 1];
    w.excess = w.ratio / std::pow(out.fit.theta, static_cast<double>(g));
    all.push_back(w);
  }
  std::sort(all.begin(), all.end(),
            [](const RatioWitness& a, const RatioWitness& b) { return a.excess > b.excess; });
  if (all.size() > 3) all.resize(3);
  out.witnesses = std::move(all);
  return out;
}

}  // namespace ucantor
