#include "ucantor/gw.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "ucantor/errors.hpp"
#include "ucantor/hausdorff.hpp"
#include "ucantor/rng.hpp"

namespace ucantor {

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t from = 0;
  while (true) {
    std::size_t at = s.find(sep, from);
    if (at == std::string::npos) {
      out.push_back(s.substr(from));
      return out;
    }
    out.push_back(s.substr(from, at - from));
    from = at + 1;
  }
}

double parse_num(const std::string& s, const char* what) {
  try {
    std::size_t used = 0;
    double v = std::stod(s, &used);
    if (used != s.size()) throw Error::parse("");
    return v;
  } catch (...) {
    throw Error::parse(std::string(what) + ": bad number '" + s + "'");
  }
}

long parse_int(const std::string& s, const char* what) {
  double v = parse_num(s, what);
  long k = std::lround(v);
  if (static_cast<double>(k) != v)
    throw Error::parse(std::string(what) + ": '" + s + "' is not an integer");
  return k;
}

void finish_moments(OffspringDist& d) {
  double m = 0.0, m2 = 0.0;
  for (std::size_t k = 0; k < d.p.size(); ++k) {
    m += static_cast<double>(k) * d.p[k];
    m2 += static_cast<double>(k) * static_cast<double>(k) * d.p[k];
  }
  d.m = m;
  d.var = m2 - m * m;
}

}  // namespace

std::size_t OffspringDist::sample(double u) const {
  double cum = 0.0;
  for (std::size_t k = 2; k < p.size(); ++k) {
    cum += p[k];
    if (u < cum) return k;
  }
  return p.size() - 1;
}

OffspringDist offspring_from_text(const std::string& text) {
  std::size_t colon = text.find(':');
  if (colon == std::string::npos)
    throw Error::parse("offspring: expected 'family:params', got '" + text +
                       "'");
  const std::string family = text.substr(0, colon);
  const std::string rest = text.substr(colon + 1);
  OffspringDist d;
  d.text = text;
  if (family == "dirac") {
    long k = parse_int(rest, "offspring dirac");
    if (k < 2) throw Error::parse("offspring: support must start at 2");
    d.p.assign(static_cast<std::size_t>(k) + 1, 0.0);
    d.p[static_cast<std::size_t>(k)] = 1.0;
  } else if (family == "uniform") {
    auto ab = split(rest, ',');
    if (ab.size() != 2) throw Error::parse("offspring uniform: expected A,B");
    long a = parse_int(ab[0], "offspring uniform");
    long b = parse_int(ab[1], "offspring uniform");
    if (a < 2 || b < a) throw Error::parse("offspring: need 2 <= A <= B");
    d.p.assign(static_cast<std::size_t>(b) + 1, 0.0);
    for (long k = a; k <= b; ++k)
      d.p[static_cast<std::size_t>(k)] = 1.0 / static_cast<double>(b - a + 1);
  } else if (family == "table") {
    double sum = 0.0;
    for (const std::string& entry : split(rest, ',')) {
      auto kv = split(entry, ':');
      if (kv.size() != 2) throw Error::parse("offspring table: expected K:P");
      long k = parse_int(kv[0], "offspring table");
      double pr = parse_num(kv[1], "offspring table");
      if (k < 2) throw Error::parse("offspring: support must start at 2");
      if (pr < 0.0) throw Error::parse("offspring: negative probability");
      if (d.p.size() <= static_cast<std::size_t>(k))
        d.p.resize(static_cast<std::size_t>(k) + 1, 0.0);
      d.p[static_cast<std::size_t>(k)] += pr;
      sum += pr;
    }
    if (std::abs(sum - 1.0) > 1e-9)
      throw Error::parse("offspring table: probabilities sum to " +
                         std::to_string(sum));
    for (double& pr : d.p) pr /= sum;
  } else if (family == "geometric") {
    double q = parse_num(rest, "offspring geometric");
    if (!(q > 0.0 && q < 1.0))
      throw Error::parse("offspring geometric: parameter must be in (0,1)");
    // P(N = k) = q(1-q)^(k-2); cut the tail at mass 1e-9 and renormalize
    double tail = 1.0;
    double sum = 0.0;
    d.p.assign(2, 0.0);
    for (std::size_t k = 2; tail >= 1e-9; ++k) {
      double pr = q * std::pow(1.0 - q, static_cast<double>(k - 2));
      d.p.push_back(pr);
      sum += pr;
      tail -= pr;
    }
    for (double& pr : d.p) pr /= sum;
  } else {
    throw Error::parse("offspring: unknown family '" + family + "'");
  }
  finish_moments(d);
  return d;
}

double WeightDist::h(double s) const {
  switch (kind) {
    case Kind::dirac:
      return std::pow(lambda0, s);
    case Kind::uniform:
      return (1.0 - std::pow(a, s + 1.0)) / ((1.0 - a) * (s + 1.0));
    case Kind::table: {
      double sum = 0.0;
      for (const auto& [lam, pr] : table) sum += pr * std::pow(lam, s);
      return sum;
    }
  }
  throw Error::internal("weights: bad kind");
}

double WeightDist::atom_at_one() const {
  if (kind == Kind::dirac) return lambda0 == 1.0 ? 1.0 : 0.0;
  if (kind == Kind::uniform) return 0.0;
  double sum = 0.0;
  for (const auto& [lam, pr] : table)
    if (lam == 1.0) sum += pr;
  return sum;
}

double WeightDist::atom_at_max() const {
  if (kind == Kind::dirac) return 1.0;
  if (kind == Kind::uniform) return 0.0;
  double top = 0.0;
  for (const auto& [lam, pr] : table) top = std::max(top, lam);
  double sum = 0.0;
  for (const auto& [lam, pr] : table)
    if (lam == top) sum += pr;
  return sum;
}

double WeightDist::sample(double u) const {
  switch (kind) {
    case Kind::dirac:
      return lambda0;
    case Kind::uniform:
      return 1.0 - (1.0 - a) * u;  // u in [0,1) lands in (a, 1]
    case Kind::table: {
      double cum = 0.0;
      for (const auto& [lam, pr] : table) {
        cum += pr;
        if (u < cum) return lam;
      }
      return table.back().first;
    }
  }
  throw Error::internal("weights: bad kind");
}

WeightDist weights_from_text(const std::string& text) {
  std::size_t colon = text.find(':');
  if (colon == std::string::npos)
    throw Error::parse("weights: expected 'family:params', got '" + text +
                       "'");
  const std::string family = text.substr(0, colon);
  const std::string rest = text.substr(colon + 1);
  WeightDist d;
  d.text = text;
  if (family == "dirac") {
    d.kind = WeightDist::Kind::dirac;
    d.lambda0 = parse_num(rest, "weights dirac");
    if (!(d.lambda0 > 0.0 && d.lambda0 < 1.0))
      throw Error::parse("weights: point mass must lie in (0,1)");
  } else if (family == "uniform") {
    d.kind = WeightDist::Kind::uniform;
    auto ab = split(rest, ',');
    if (ab.size() != 2) throw Error::parse("weights uniform: expected A,B");
    d.a = parse_num(ab[0], "weights uniform");
    double b = parse_num(ab[1], "weights uniform");
    if (!(d.a >= 0.0 && d.a < 1.0) || b != 1.0)
      throw Error::parse("weights: uniform support must be (a,1], 0 <= a < 1");
  } else if (family == "table") {
    d.kind = WeightDist::Kind::table;
    double sum = 0.0;
    for (const std::string& entry : split(rest, ',')) {
      auto kv = split(entry, ':');
      if (kv.size() != 2) throw Error::parse("weights table: expected L:P");
      double lam = parse_num(kv[0], "weights table");
      double pr = parse_num(kv[1], "weights table");
      if (!(lam > 0.0 && lam <= 1.0))
        throw Error::parse("weights: atoms must lie in (0,1]");
      if (pr < 0.0) throw Error::parse("weights: negative probability");
      d.table.push_back({lam, pr});
      sum += pr;
    }
    if (std::abs(sum - 1.0) > 1e-9)
      throw Error::parse("weights table: probabilities sum to " +
                         std::to_string(sum));
    for (auto& [lam, pr] : d.table) pr /= sum;
    std::sort(d.table.begin(), d.table.end());
    if (d.atom_at_one() >= 1.0)
      throw Error::parse("weights: all mass at 1 is not a weight");
  } else {
    throw Error::parse("weights: unknown family '" + family + "'");
  }
  return d;
}

double mellin_h(const WeightDist& rho, double s) {
  if (s < 0) throw Error::invalid("mellin_h: s must be nonnegative");
  return rho.h(s);
}

WeightedTree sample_tree(const GWConfig& cfg) {
  if (cfg.depth == 0) throw Error::invalid("sample_tree: depth must be >= 1");
  if (cfg.offspring.p.empty()) throw Error::invalid("sample_tree: no offspring law");
  WeightedTree t;
  VertexId root = t.add_root(1.0);
  std::vector<std::pair<VertexId, std::uint64_t>> level = {
      {root, mix64(cfg.seed)}};
  for (std::uint32_t d = 0; d < cfg.depth; ++d) {
    std::vector<std::pair<VertexId, std::uint64_t>> next;
    for (const auto& [vid, key] : level) {
      std::size_t n = cfg.offspring.sample(unit_halfopen(rng_draw(key, 0)));
      for (std::size_t i = 0; i < n; ++i) {
        if (t.size() >= cfg.vertex_cap)
          throw Error::domain("sample_tree: tree too large (cap " +
                              std::to_string(cfg.vertex_cap) + " vertices)");
        std::uint64_t ck = child_key(key, static_cast<std::uint32_t>(i));
        double lam = cfg.weights.sample(unit_halfopen(rng_draw(ck, 1)));
        VertexId cid = t.add_child(vid, lam * t.weight(vid));
        next.push_back({cid, ck});
      }
    }
    level = std::move(next);
  }
  t.finalize();
  return t;
}

double solve_s_m(const OffspringDist& p, const WeightDist& rho) {
  const double m = p.m;
  if (m * rho.atom_at_one() >= 1.0)
    throw Error::domain(
        "solve_s_m: hypothesis violated: m*h(s) is bounded below by "
        "m*rho({1}) >= 1");
  auto f = [&](double s) { return m * rho.h(s) - 1.0; };
  double lo = 0.0, hi = 1.0;
  while (f(hi) > 0.0) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e9) throw Error::domain("solve_s_m: root beyond search range");
  }
  for (int it = 0; it < 200 && hi - lo > 1e-13; ++it) {
    double mid = 0.5 * (lo + hi);
    (f(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

TmResult solve_t_m(const OffspringDist& p, const WeightDist& rho) {
  TmResult out;
  const double m = p.m;
  bool point_mass = rho.kind == WeightDist::Kind::dirac;
  if (rho.kind == WeightDist::Kind::table) {
    std::size_t atoms = 0;
    for (const auto& [lam, pr] : rho.table)
      if (pr > 0.0) ++atoms;
    point_mass = atoms <= 1;
  }
  if (point_mass) {
    out.note = "h(2s) = h(s)^2 identically for a point mass; no threshold";
    return out;
  }
  const double top = rho.atom_at_max();
  if (top > 0.0 && 1.0 / top <= m) {
    out.note = "sup h(2s)/h(s)^2 = 1/rho({lambda_max}) <= m; no threshold";
    return out;
  }
  auto g = [&](double s) {
    double hs = rho.h(s);
    return rho.h(2.0 * s) / (hs * hs);
  };
  double lo = 0.0, hi = 1.0;
  while (g(hi) < m) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e9) {
      out.note = "threshold beyond the search range";
      return out;
    }
  }
  for (int it = 0; it < 200 && hi - lo > 1e-13; ++it) {
    double mid = 0.5 * (lo + hi);
    (g(mid) < m ? lo : hi) = mid;
  }
  out.exists = true;
  out.value = 0.5 * (lo + hi);
  try {
    if (out.value <= solve_s_m(p, rho))
      throw Error::internal("solve_t_m: threshold at or below s_m");
  } catch (const Error& e) {
    if (e.code() == ErrorCode::internal) throw;
    // s_m undefined: nothing to compare against
  }
  return out;
}

MartingaleTrace martingale_trace(const GWConfig& cfg,
                                 const std::vector<double>& s_list) {
  WeightedTree t = sample_tree(cfg);
  MartingaleTrace tr;
  tr.s_values = s_list;
  tr.z.assign(cfg.depth + 1, 0);
  tr.h_s.assign(s_list.size(), std::vector<double>(cfg.depth + 1, 0.0));
  for (const Vertex& v : t.vertices()) {
    tr.z[v.depth] += 1;
    for (std::size_t i = 0; i < s_list.size(); ++i)
      tr.h_s[i][v.depth] += std::pow(v.weight, s_list[i]);
  }
  tr.w.resize(cfg.depth + 1);
  tr.y.assign(s_list.size(), std::vector<double>(cfg.depth + 1, 0.0));
  const double m = cfg.offspring.m;
  for (std::uint32_t n = 0; n <= cfg.depth; ++n) {
    tr.w[n] = static_cast<double>(tr.z[n]) / std::pow(m, n);
    for (std::size_t i = 0; i < s_list.size(); ++i) {
      double mh = m * cfg.weights.h(s_list[i]);
      tr.y[i][n] = tr.h_s[i][n] / std::pow(mh, n);
    }
  }
  return tr;
}

namespace {

struct MomentStats {
  double mean = 0.0, var = 0.0, se_var = 0.0;
};

MomentStats sample_moments(const std::vector<double>& xs) {
  MomentStats st;
  const std::size_t n = xs.size();
  if (n < 2) {
    st.mean = n ? xs[0] : 0.0;
    return st;
  }
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(n);
  double m2 = 0.0, m4 = 0.0;
  for (double x : xs) {
    double d = x - mean;
    m2 += d * d;
    m4 += d * d * d * d;
  }
  const double fn = static_cast<double>(n);
  st.mean = mean;
  st.var = m2 / (fn - 1.0);
  m2 /= fn;
  m4 /= fn;
  // standard error of the unbiased sample variance
  double v = (m4 - (fn - 3.0) / (fn - 1.0) * m2 * m2) / fn;
  st.se_var = v > 0.0 ? std::sqrt(v) : 0.0;
  return st;
}

}  // namespace

GWSummary simulate(const GWConfig& cfg, const std::vector<double>& s_list) {
  if (cfg.trials == 0) throw Error::invalid("simulate: trials must be >= 1");
  GWSummary sum;
  sum.trials = cfg.trials;
  sum.depth = cfg.depth;
  sum.s_values = s_list;
  std::vector<double> ws;
  std::vector<std::vector<double>> ys(s_list.size());
  ws.reserve(cfg.trials);
  for (std::size_t tr = 0; tr < cfg.trials; ++tr) {
    GWConfig one = cfg;
    one.seed = rng_draw(cfg.seed, tr);
    MartingaleTrace trace = martingale_trace(one, s_list);
    ws.push_back(trace.w[cfg.depth]);
    for (std::size_t i = 0; i < s_list.size(); ++i)
      ys[i].push_back(trace.y[i][cfg.depth]);
  }
  MomentStats mw = sample_moments(ws);
  sum.mean_w = mw.mean;
  sum.var_w = mw.var;
  sum.se_var_w = mw.se_var;
  for (std::size_t i = 0; i < s_list.size(); ++i) {
    MomentStats my = sample_moments(ys[i]);
    sum.mean_y.push_back(my.mean);
    sum.var_y.push_back(my.var);
    sum.se_var_y.push_back(my.se_var);
  }
  return sum;
}

double variance_y(const OffspringDist& p, const WeightDist& rho, double s,
                  std::uint32_t n) {
  if (s < 0) throw Error::invalid("variance_y: s must be nonnegative");
  const double m = p.m;
  const double hs = rho.h(s);
  const double r = rho.h(2.0 * s) / (m * hs * hs);
  const double step = r - 1.0 / m + p.var / (m * m);
  double geom;  // sum_{j<n} r^j
  if (std::abs(r - 1.0) <= 1e-12)
    geom = static_cast<double>(n);
  else
    geom = (std::pow(r, n) - 1.0) / (r - 1.0);
  return step * geom;
}

McDimension mc_dimension(const GWConfig& cfg, std::size_t trials) {
  if (trials == 0) throw Error::invalid("mc_dimension: trials must be >= 1");
  McDimension out;
  out.trials = trials;
  out.s_m_reference = solve_s_m(cfg.offspring, cfg.weights);
  for (std::size_t tr = 0; tr < trials; ++tr) {
    GWConfig one = cfg;
    one.seed = rng_draw(cfg.seed, tr);
    WeightedTree t = sample_tree(one);
    DimensionReport rep = estimate_dimension(t);
    out.estimates.push_back(rep.s_estimate);
  }
  double mean = 0.0;
  for (double e : out.estimates) mean += e;
  mean /= static_cast<double>(trials);
  double ss = 0.0;
  for (double e : out.estimates) ss += (e - mean) * (e - mean);
  out.mean = mean;
  out.stddev = trials > 1 ? std::sqrt(ss / static_cast<double>(trials - 1)) : 0.0;
  out.se = out.stddev / std::sqrt(static_cast<double>(trials));
  return out;
}

McMeasure mc_measure(const GWConfig& cfg, std::uint32_t target_depth,
                     std::size_t trials) {
  if (trials == 0) throw Error::invalid("mc_measure: trials must be >= 1");
  if (target_depth > cfg.depth)
    throw Error::invalid("mc_measure: target depth exceeds tree depth");
  McMeasure out;
  out.trials = trials;
  out.target_depth = target_depth;
  out.s_m = solve_s_m(cfg.offspring, cfg.weights);
  std::vector<double> diffs;
  double mass_sum = 0.0, ref_sum = 0.0;
  for (std::size_t tr = 0; tr < trials; ++tr) {
    GWConfig one = cfg;
    one.seed = rng_draw(cfg.seed, tr);
    WeightedTree t = sample_tree(one);
    // subtree s-energy at the deepest cut, accumulated bottom-up (children
    // always follow their parent in construction order)
    const auto& vs = t.vertices();
    std::vector<double> acc(vs.size(), 0.0);
    double total_direct = 0.0;
    for (std::size_t i = 0; i < vs.size(); ++i)
      if (vs[i].depth == cfg.depth) {
        acc[i] = std::pow(vs[i].weight, out.s_m);
        total_direct += acc[i];
      }
    for (std::size_t i = vs.size(); i-- > 1;)
      acc[vs[i].parent] += acc[i];
    double cut_sum = 0.0;
    for (std::size_t i = 0; i < vs.size(); ++i)
      if (vs[i].depth == target_depth) cut_sum += acc[i];
    out.additivity_error =
        std::max(out.additivity_error,
                 std::abs(cut_sum - total_direct) / total_direct);
    VertexId u = t.root();
    for (std::uint32_t d = 0; d < target_depth; ++d) u = t.at(u).children[0];
    const double mass = acc[u];
    const double ref = std::pow(t.weight(u), out.s_m);
    mass_sum += mass;
    ref_sum += ref;
    diffs.push_back(mass - ref);
  }
  out.mean_mass = mass_sum / static_cast<double>(trials);
  out.mean_reference = ref_sum / static_cast<double>(trials);
  MomentStats md = sample_moments(diffs);
  out.se_diff = trials > 1 ? std::sqrt(md.var / static_cast<double>(trials)) : 0.0;
  return out;
}

}  // namespace ucantor
