#include "ucantor/hausdorff.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "ucantor/rng.hpp"

namespace ucantor {

void require_full_subtree(const WeightedTree& t, const FullSubtree& cut) {
  require_valid(t, "full_subtree");
  if (cut.boundary.empty()) throw Error::domain("full_subtree: empty cut");

  std::vector<bool> member(t.size(), false);
  for (VertexId v : cut.boundary) {
    if (v >= t.size()) throw Error::invalid("full_subtree: no such vertex");
    if (member[v])
      throw Error::domain("full_subtree: vertex " + std::to_string(t.at(v).ext_id) +
                          " listed twice");
    member[v] = true;
  }
  for (VertexId v : cut.boundary) {
    for (VertexId u = t.at(v).parent; u != kNoVertex; u = t.at(u).parent) {
      if (member[u])
        throw Error::domain("full_subtree: not an antichain, " + std::to_string(t.at(u).ext_id) +
                            " is an ancestor of " + std::to_string(t.at(v).ext_id));
    }
  }

  // coverage: every root-to-leaf path must meet the cut (postorder sweep)
  std::vector<std::int8_t> covered(t.size(), -1);
  std::vector<std::pair<VertexId, bool>> stack{{t.root(), false}};
  while (!stack.empty()) {
    auto [v, expanded] = stack.back();
    stack.pop_back();
    if (member[v]) {
      covered[v] = 1;
      continue;
    }
    if (t.is_leaf(v)) {
      covered[v] = 0;
      continue;
    }
    if (!expanded) {
      stack.push_back({v, true});
      for (VertexId c : t.at(v).children) stack.push_back({c, false});
      continue;
    }
    std::int8_t all = 1;
    for (VertexId c : t.at(v).children)
      if (covered[c] != 1) all = 0;
    covered[v] = all;
  }
  if (covered[t.root()] != 1) {
    // name one missed leaf for the error message
    VertexId v = t.root();
    while (!t.is_leaf(v) && !member[v]) {
      for (VertexId c : t.at(v).children) {
        if (covered[c] != 1) {
          v = c;
          break;
        }
      }
    }
    throw Error::domain("full_subtree: boundary not covered (e.g. leaf " +
                        std::to_string(t.at(v).ext_id) + ")");
  }
}

WeightedTree kraft_weight(const WeightedTree& t) {
  require_valid(t, "kraft_weight");
  WeightedTree out = t;
  std::vector<VertexId> stack{out.root()};
  out.at(out.root()).weight = 1.0;
  while (!stack.empty()) {
    const VertexId v = stack.back();
    stack.pop_back();
    const double share = out.at(v).weight / static_cast<double>(out.at(v).children.size());
    for (VertexId c : out.at(v).children) {
      out.at(c).weight = share;
      if (!out.is_leaf(c)) stack.push_back(c);
    }
  }
  return out;
}

double kraft_sum(const WeightedTree& t, const FullSubtree& cut) {
  require_full_subtree(t, cut);
  double sum = 0.0;
  for (VertexId v : cut.boundary) {
    double k = 1.0;
    for (VertexId u = t.at(v).parent; u != kNoVertex; u = t.at(u).parent)
      k /= static_cast<double>(t.at(u).children.size());
    sum += k;
  }
  return sum;
}

FullSubtree sample_full_cut(const WeightedTree& t, std::uint64_t key,
                            double expand_prob) {
  require_valid(t, "sample_full_cut");
  FullSubtree cut;
  std::vector<std::pair<VertexId, std::uint64_t>> stack{{t.root(), mix64(key)}};
  while (!stack.empty()) {
    auto [v, k] = stack.back();
    stack.pop_back();
    const bool expand =
        !t.is_leaf(v) &&
        (v == t.root() || unit_halfopen(rng_draw(k, 0)) < expand_prob);
    if (!expand) {
      cut.boundary.push_back(v);
      continue;
    }
    const auto& cs = t.at(v).children;
    for (std::size_t i = 0; i < cs.size(); ++i)
      stack.push_back({cs[i], child_key(k, static_cast<std::uint32_t>(i))});
  }
  return cut;
}

double h_s_delta(const WeightedTree& t, double s, double delta) {
  require_valid(t, "h_s_delta");
  if (s < 0.0) throw Error::invalid("h_s_delta: s must be >= 0");
  if (!(delta > 0.0)) throw Error::invalid("h_s_delta: delta must be positive");
  for (VertexId v = 0; v < t.size(); ++v)
    if (t.is_leaf(v) && !(t.weight(v) < delta))
      throw Error::domain("h_s_delta: insufficient depth, leaf " +
                          std::to_string(t.at(v).ext_id) + " has weight >= delta");

  // F(v) = kappa^s on leaves; else sum over children, improvable to
  // kappa(v)^s once the cylinder at v is delta-admissible.
  std::vector<double> f(t.size(), 0.0);
  std::vector<std::pair<VertexId, bool>> stack{{t.root(), false}};
  while (!stack.empty()) {
    auto [v, expanded] = stack.back();
    stack.pop_back();
    if (t.is_leaf(v)) {
      f[v] = std::pow(t.weight(v), s);
      continue;
    }
    if (!expanded) {
      stack.push_back({v, true});
      for (VertexId c : t.at(v).children) stack.push_back({c, false});
      continue;
    }
    double sum = 0.0;
    for (VertexId c : t.at(v).children) sum += f[c];
    f[v] = (t.weight(v) < delta) ? std::min(std::pow(t.weight(v), s), sum) : sum;
  }
  return f[t.root()];
}

double dimension_upper_bound(const DecayFit& fit) {
  if (fit.theta >= 1.0) return std::numeric_limits<double>::infinity();
  return std::log(static_cast<double>(fit.max_children)) / std::log(1.0 / fit.theta);
}

namespace {

std::vector<double> auto_ladder(const WeightedTree& t, std::vector<std::string>& warnings) {
  double leaf_max = 0.0;
  for (VertexId v = 0; v < t.size(); ++v)
    if (t.is_leaf(v)) leaf_max = std::max(leaf_max, t.weight(v));
  const double hi = t.weight(t.root()) / 2.0;
  const double lo = leaf_max * 1.05;
  std::vector<double> deltas;
  const int n = 6;
  if (lo < hi) {
    for (int j = 0; j < n; ++j)
      deltas.push_back(std::exp(std::log(hi) + (std::log(lo) - std::log(hi)) * j / (n - 1)));
  } else {
    warnings.push_back("auto delta ladder degenerate: tree too shallow for a scaling range");
    deltas = {hi, (hi + lo) / 2, lo, lo * 0.99};
  }
  return deltas;
}

}  // namespace

DimensionReport estimate_dimension(const WeightedTree& t, const DimensionOptions& opt) {
  require_valid(t, "estimate_dimension");
  DimensionReport rep;

  {
    const WeightedTree red = is_reduced(t) ? t : reduce(t);
    const DecayFit fit = fit_decay(red);
    rep.upper_bound = dimension_upper_bound(fit);
    if (fit.theta >= 1.0)
      rep.warnings.push_back("decay fit found theta = 1; upper bound unavailable");
  }

  rep.deltas = opt.deltas.empty() ? auto_ladder(t, rep.warnings) : opt.deltas;
  std::sort(rep.deltas.begin(), rep.deltas.end(), std::greater<double>());
  {
    double leaf_max = 0.0;
    for (VertexId v = 0; v < t.size(); ++v)
      if (t.is_leaf(v)) leaf_max = std::max(leaf_max, t.weight(v));
    std::vector<double> usable;
    for (double d : rep.deltas)
      if (d > leaf_max) usable.push_back(d);
    if (usable.size() < rep.deltas.size())
      rep.warnings.push_back("dropped deltas not feasible at this truncation depth");
    rep.deltas = std::move(usable);
  }
  if (rep.deltas.size() < 4)
    throw Error::domain("estimate_dimension: need at least 4 feasible deltas");

  std::vector<double> log_inv_delta;
  for (double d : rep.deltas) log_inv_delta.push_back(std::log(1.0 / d));

  std::map<double, std::vector<double>> table;
  bool grey_zone = false;
  // slope of ln H^s_delta against ln(1/delta): positive = mass diverging as
  // delta shrinks = s below the dimension
  auto classify_below = [&](double s) {
    std::vector<double> row;
    for (double d : rep.deltas) row.push_back(h_s_delta(t, s, d));
    std::vector<double> y;
    for (double h : row) y.push_back(std::log(std::max(h, 1e-300)));
    const std::size_t n = y.size();
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) {
      mx += log_inv_delta[i];
      my += y[i];
    }
    mx /= n;
    my /= n;
    double num = 0, den = 0;
    for (std::size_t i = 0; i < n; ++i) {
      num += (log_inv_delta[i] - mx) * (y[i] - my);
      den += (log_inv_delta[i] - mx) * (log_inv_delta[i] - mx);
    }
    const double slope = num / den;
    table.emplace(s, std::move(row));
    if (std::abs(slope) <= opt.dead_band) grey_zone = true;
    // inside the dead band the slope is truncation noise (mixed branching
    // can leave a faint positive residue above the dimension), so "below"
    // requires clearing the band
    return slope > opt.dead_band;
  };

  double lo = opt.s_lo;
  double hi = opt.s_hi;
  if (hi < 0.0) {
    hi = std::isfinite(rep.upper_bound) ? rep.upper_bound + 0.5 : 2.0;
  }
  if (!classify_below(lo)) {
    rep.warnings.push_back("lower bracket already classifies above the dimension");
    hi = lo;
  }
  int expand = 0;
  while (hi > lo && classify_below(hi)) {
    if (++expand > 6) {
      rep.warnings.push_back("upper bracket never classified above; estimate unreliable");
      break;
    }
    hi = lo + (hi - lo) * 2.0;
  }
  while (hi - lo > opt.tol) {
    const double mid = (lo + hi) / 2.0;
    if (classify_below(mid)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  if (grey_zone)
    rep.warnings.push_back("some slopes fell inside the dead band; counted as not-below");

  rep.s_lo = lo;
  rep.s_hi = hi;
  rep.s_estimate = (lo + hi) / 2.0;
  for (auto& [s, row] : table) {
    rep.s_grid.push_back(s);
    rep.h_table.push_back(std::move(row));
  }
  return rep;
}

}  // namespace ucantor
