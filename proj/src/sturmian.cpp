#include "ucantor/sturmian.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <sstream>
#include <unordered_set>

namespace ucantor {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

// "(p+q√d)/r", also accepting sqrt(d) and an optional '*' before the root.
bool parse_quad_text(const std::string& s, Quad& out) {
  std::size_t i = 0;
  auto ws = [&] { while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i; };
  auto integer = [&](long long& v) -> bool {
    ws();
    std::size_t j = i;
    if (j < s.size() && (s[j] == '+' || s[j] == '-')) ++j;
    std::size_t k = j;
    while (k < s.size() && std::isdigit(static_cast<unsigned char>(s[k]))) ++k;
    if (k == j) return false;
    v = std::strtoll(s.substr(i, k - i).c_str(), nullptr, 10);
    i = k;
    return true;
  };
  ws();
  if (i >= s.size() || s[i] != '(') return false;
  ++i;
  long long p = 0, q = 1, d = 0, r = 1;
  if (!integer(p)) return false;
  ws();
  if (i >= s.size() || (s[i] != '+' && s[i] != '-')) return false;
  bool neg = s[i] == '-';
  ++i;
  ws();
  if (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) {
    if (!integer(q)) return false;
    ws();
    if (i < s.size() && s[i] == '*') { ++i; ws(); }
  }
  bool paren = false;
  if (s.compare(i, 3, "\xe2\x88\x9a") == 0) {
    i += 3;
  } else if (s.compare(i, 4, "sqrt") == 0) {
    i += 4;
    ws();
    if (i < s.size() && s[i] == '(') { ++i; paren = true; }
  } else {
    return false;
  }
  if (!integer(d)) return false;
  ws();
  if (paren) {
    if (i >= s.size() || s[i] != ')') return false;
    ++i;
    ws();
  }
  if (i >= s.size() || s[i] != ')') return false;
  ++i;
  ws();
  if (i >= s.size() || s[i] != '/') return false;
  ++i;
  if (!integer(r)) return false;
  ws();
  if (i != s.size()) return false;
  out = quad_make(p, neg ? -q : q, r, d);
  return true;
}

void require_unit_interval(double v, const std::string& text) {
  if (!(v > 0.0 && v < 1.0))
    throw Error::invalid("alpha must lie in (0,1): " + text);
}

double pearson(const std::vector<double>& xs, const std::vector<double>& ys) {
  std::size_t n = xs.size();
  if (n < 2) return 0.0;
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) { mx += xs[i]; my += ys[i]; }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  if (sxx <= 0 || syy <= 0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace

AlphaSpec parse_alpha(const std::string& text) {
  AlphaSpec a;
  a.text = trim(text);
  if (a.text == "golden") {
    a.kind = AlphaSpec::Kind::golden;
    a.value = quad_make(-1, 1, 2, 5);
    return a;
  }
  if (a.text == "sqrt2") {
    a.kind = AlphaSpec::Kind::sqrt2;
    a.value = quad_make(-1, 1, 1, 2);
    return a;
  }
  if (a.text == "e") {
    a.kind = AlphaSpec::Kind::e;
    a.fvalue = std::exp(1.0) - 2.0;
    return a;
  }
  Quad q;
  if (parse_quad_text(a.text, q)) {
    if (quad_is_rational(q))
      throw Error::domain("parse_alpha: rational input " + a.text);
    require_unit_interval(quad_to_double(q), a.text);
    a.kind = AlphaSpec::Kind::quadratic;
    a.value = q;
    return a;
  }
  char* end = nullptr;
  double v = std::strtod(a.text.c_str(), &end);
  if (end != a.text.c_str() + a.text.size() || a.text.empty())
    throw Error::invalid("parse_alpha: cannot parse alpha " + a.text);
  require_unit_interval(v, a.text);
  a.kind = AlphaSpec::Kind::floating;
  a.fvalue = v;
  return a;
}

double alpha_value(const AlphaSpec& alpha) {
  switch (alpha.kind) {
    case AlphaSpec::Kind::e:
    case AlphaSpec::Kind::floating:
      return alpha.fvalue;
    default:
      return quad_to_double(alpha.value);
  }
}

ContinuedFraction alpha_cf(const AlphaSpec& alpha, std::size_t depth) {
  switch (alpha.kind) {
    case AlphaSpec::Kind::e:
      return cf_pattern_e(depth);
    case AlphaSpec::Kind::floating:
      return cf_from_double(alpha.fvalue, depth);
    default:
      return cf_from_quad(alpha.value, depth);
  }
}

std::string mechanical_word_exact(const Quad& alpha, const Quad& x,
                                  std::size_t count) {
  if (quad_is_rational(alpha))
    throw Error::domain("mechanical_word: rational alpha");
  if (quad_sign(x) <= 0 || quad_sign(quad_add_int(quad_neg(x), 1)) < 0)
    throw Error::invalid("mechanical_word: intercept must lie in (0,1]");
  std::string out;
  out.reserve(count);
  Quad t = x;
  long long prev = quad_floor(t);
  for (std::size_t n = 0; n < count; ++n) {
    t = quad_sub(t, alpha);
    long long f = quad_floor(t);
    long long letter = prev - f;
    if (letter != 0 && letter != 1)
      throw Error::domain("mechanical_word: alpha outside (0,1)");
    out.push_back(static_cast<char>('0' + letter));
    prev = f;
  }
  return out;
}

std::string mechanical_word_float(double alpha, double x, std::size_t count) {
  if (!(alpha > 0 && alpha < 1))
    throw Error::invalid("mechanical_word: alpha must lie in (0,1)");
  if (!(x > 0 && x <= 1))
    throw Error::invalid("mechanical_word: intercept must lie in (0,1]");
  std::string out;
  out.reserve(count);
  // The letters come from floor evaluations; a value this close to an
  // integer is inside double rounding noise for the running sum.
  const double guard = 1e-9;
  auto checked_floor = [&](double t, std::size_t n) {
    double r = t - std::floor(t);
    if (r < guard || r > 1.0 - guard)
      throw Error::domain("mechanical_word: precision exhausted at n=" +
                          std::to_string(n));
    return std::floor(t);
  };
  double prev = checked_floor(x, 0);
  for (std::size_t n = 0; n < count; ++n) {
    double f = checked_floor(x - static_cast<double>(n + 1) * alpha, n + 1);
    out.push_back(static_cast<char>('0' + static_cast<int>(prev - f)));
    prev = f;
  }
  return out;
}

std::string characteristic_window(const ContinuedFraction& cf,
                                  std::size_t min_len) {
  constexpr std::size_t kWindowCap = std::size_t(1) << 23;
  if (min_len > kWindowCap)
    throw Error::domain("characteristic_window: window cap exceeded");
  long long a1;
  try {
    a1 = cf.quotient(1);
  } catch (const Error&) {
    throw Error::domain("characteristic_window: window too short");
  }
  std::string prev = "0";  // s_0
  std::string cur;         // s_1 = 0^(a1-1) 1
  cur.assign(static_cast<std::size_t>(a1 - 1), '0');
  cur.push_back('1');
  for (std::size_t k = 2; cur.size() < min_len; ++k) {
    long long ak;
    try {
      ak = cf.quotient(k);
    } catch (const Error&) {
      throw Error::domain("characteristic_window: window too short");
    }
    if (cur.size() > (kWindowCap - prev.size()) / static_cast<std::size_t>(ak))
      throw Error::domain("characteristic_window: window cap exceeded");
    std::string next;
    next.reserve(cur.size() * static_cast<std::size_t>(ak) + prev.size());
    for (long long r = 0; r < ak; ++r) next += cur;
    next += prev;
    prev = std::move(cur);
    cur = std::move(next);
  }
  return cur;
}

std::vector<std::size_t> complexity(const std::string& word,
                                    std::size_t n_max) {
  if (n_max == 0) throw Error::invalid("complexity: n_max must be positive");
  if (word.size() < 4 * n_max)
    throw Error::domain("complexity: window too short (" +
                        std::to_string(word.size()) + " letters for n_max " +
                        std::to_string(n_max) + ")");
  std::vector<std::size_t> p;
  p.reserve(n_max);
  for (std::size_t n = 1; n <= n_max; ++n) {
    std::unordered_set<std::string_view> seen;
    seen.reserve(word.size());
    for (std::size_t i = 0; i + n <= word.size(); ++i)
      seen.insert(std::string_view(word).substr(i, n));
    p.push_back(seen.size());
  }
  return p;
}

RecodeResult recode(const std::string& word) {
  if (word.size() < 2) throw Error::domain("recode: window too short");
  bool has00 = word.find("00") != std::string::npos;
  bool has11 = word.find("11") != std::string::npos;
  if (has00 && has11)
    throw Error::domain("recode: not Sturmian at this window");
  RecodeResult res;
  res.type = has11 ? 1 : 0;
  res.shift = 0;  // left-aligned tiling; a finite window fixes no absolute
                  // phase, so the shifted variant is a convention
  // type 0 tiles: 0 -> "0", 1 -> "10"; type 1 tiles: 1 -> "1", 0 -> "01".
  char opener = res.type == 0 ? '1' : '0';
  std::size_t i = 0;
  while (i < word.size()) {
    if (word[i] == opener) {
      if (i + 1 >= word.size()) break;  // trailing partial tile
      res.word.push_back(opener);
      i += 2;
    } else {
      res.word.push_back(word[i]);
      i += 1;
    }
  }
  if (res.word.empty()) throw Error::domain("recode: window too short");
  return res;
}

ContinuedFraction multiplicative_coding(const ContinuedFraction& cf) {
  long long a1 = cf.quotient(1);
  ContinuedFraction b;
  b.source = cf.source;
  b.a0 = a1 - 1;
  if (cf.quotients.size() >= 2)
    b.quotients.assign(cf.quotients.begin() + 1, cf.quotients.end());
  b.periodic = cf.periodic;
  b.period = cf.period;
  b.preperiod = cf.preperiod > 0 ? cf.preperiod - 1 : 0;
  b.reliable = cf.reliable;
  if (b.quotients.empty() && !b.periodic)
    throw Error::domain("multiplicative_coding: need at least two quotients");
  if (b.periodic && b.quotients.size() < b.preperiod + b.period) {
    // Refill the shortened tail from the period so quotient() indexing works.
    while (b.quotients.size() < b.preperiod + b.period)
      b.quotients.push_back(cf.quotient(2 + b.quotients.size()));
  }
  return b;
}

WordTree tree_of_words(const ContinuedFraction& cf, std::size_t depth) {
  std::size_t max_len = 2 * depth + 1;
  std::string window;
  std::vector<std::unordered_set<std::string_view>> sets(depth + 1);
  bool certified = false;
  std::size_t want = std::max<std::size_t>(64, 8 * max_len);
  for (int attempt = 0; attempt < 10 && !certified; ++attempt) {
    window = characteristic_window(cf, want);
    certified = true;
    for (std::size_t n = 0; n <= depth; ++n) {
      std::size_t len = 2 * n + 1;
      sets[n].clear();
      sets[n].reserve(2 * n + 4);
      for (std::size_t i = 0; i + len <= window.size(); ++i)
        sets[n].insert(std::string_view(window).substr(i, len));
      if (sets[n].size() != 2 * n + 2) {
        if (sets[n].size() > 2 * n + 2)
          throw Error::domain("tree_of_words: word is not Sturmian (|L_" +
                              std::to_string(len) + "| = " +
                              std::to_string(sets[n].size()) + ")");
        certified = false;
        break;
      }
    }
    want *= 4;
  }
  if (!certified) throw Error::domain("tree_of_words: window too short");

  WordTree wt;
  wt.radius = depth;
  wt.window_len = window.size();
  WeightedTree& t = wt.tree;
  VertexId root = t.add_root(1.0);
  wt.level.push_back(0);
  wt.word.emplace_back("");

  auto children_of = [&](std::string_view w, std::size_t n) {
    std::vector<std::string_view> out;
    std::string probe;
    probe.reserve(w.size() + 2);
    for (char a : {'0', '1'})
      for (char b : {'0', '1'}) {
        probe.clear();
        probe.push_back(a);
        probe.append(w);
        probe.push_back(b);
        auto it = sets[n + 1].find(std::string_view(probe));
        if (it != sets[n + 1].end()) out.push_back(*it);
      }
    return out;
  };

  struct Item {
    VertexId parent;
    std::string_view w;
    std::size_t n;
  };
  std::vector<Item> stack;
  for (std::string_view seed : {std::string_view("1"), std::string_view("0")})
    if (sets[0].count(seed)) stack.push_back({root, seed, 0});
  if (stack.size() < 2)
    throw Error::domain("tree_of_words: degenerate language");
  // LIFO with seeds pushed in reverse so cells come out "0" before "1".
  while (!stack.empty()) {
    Item it = stack.back();
    stack.pop_back();
    std::string_view w = it.w;
    std::size_t n = it.n;
    std::vector<std::string_view> ch;
    while (n < depth) {
      ch = children_of(w, n);
      if (ch.empty())
        throw Error::internal("tree_of_words: cylinder lost its extension");
      if (ch.size() > 1) break;
      w = ch[0];
      ++n;
    }
    VertexId v = t.add_child(it.parent, 1.0 / static_cast<double>(n + 1));
    wt.level.push_back(n);
    wt.word.emplace_back(w);
    if (n < depth)
      for (std::size_t j = ch.size(); j-- > 0;)
        stack.push_back({v, ch[j], n + 1});
  }
  t.finalize();
  for (VertexId v = 0; v < t.size(); ++v)
    if (t.is_leaf(v)) t.set_leaf_kind(v, LeafKind::frontier);
  return wt;
}

TypeVerdict bounded_type_verdict(const ContinuedFraction& cf,
                                 std::size_t bound_window) {
  TypeVerdict v;
  std::size_t horizon = bound_window;
  if (!cf.periodic) horizon = std::min(horizon, cf.quotients.size());
  v.max_quotient = horizon > 0 ? cf.max_quotient(horizon) : 0;
  switch (cf.source) {
    case CFSource::quadratic:
      // Eventually periodic quotients, so the period maximum is global.
      v.max_quotient = cf.max_quotient(cf.preperiod + cf.period + 1);
      v.bounded = TypeVerdict::Bounded::yes;
      v.embeddable_known = true;
      v.embeddable = true;
      v.note = "periodic quotients, bounded type";
      break;
    case CFSource::pattern_e:
      v.bounded = TypeVerdict::Bounded::no;
      v.embeddable_known = true;
      v.embeddable = false;
      v.note = "quotient pattern 2l grows without bound";
      break;
    default:
      v.bounded = TypeVerdict::Bounded::unknown;
      v.embeddable_known = false;
      v.note = "unknown beyond horizon";
      break;
  }
  return v;
}

WitnessReport nonembed_witness(const WordTree& wt,
                               const ContinuedFraction& acf,
                               std::size_t target_b) {
  ContinuedFraction b = multiplicative_coding(acf);
  std::size_t supply = b.periodic ? 64 : b.quotients.size();
  supply = std::min<std::size_t>(supply, 64);

  // Regime k (quotient b_k) lives at cell radius ~ continuant q_{k-1}; a
  // three-vertex chain needs about three times that radius.
  auto reachable = [&](std::size_t k) {
    unsigned long long qm1 = 0, q = 1;  // q_{-1}, q_0
    for (std::size_t j = 1; j < k; ++j) {
      unsigned long long bj = static_cast<unsigned long long>(b.quotient(j));
      unsigned long long qn = bj * q + qm1;
      if (qn > (1ull << 40)) return false;
      qm1 = q;
      q = qn;
    }
    return 3 * q <= wt.radius + 2;  // q = q_{k-1}, the regime's radius scale
  };

  WitnessReport rep;
  if (target_b > 0) {
    if (target_b > supply || b.quotient(target_b) < 4 || !reachable(target_b))
      throw Error::domain("nonembed_witness: no witness at this depth");
    rep.b_index = target_b;
  } else {
    long long best = 0;
    for (std::size_t k = 1; k <= supply; ++k) {
      long long bk = b.quotient(k);
      if (bk >= 4 && bk > best && reachable(k)) {
        best = bk;
        rep.b_index = k;
      }
    }
    if (rep.b_index == 0)
      throw Error::domain("nonembed_witness: no witness at this depth");
  }
  rep.b_value = b.quotient(rep.b_index);
  rep.predicted_ratio = static_cast<double>(rep.b_value / 2 - 1);

  const WeightedTree& t = wt.tree;
  auto inc = [&](VertexId p, VertexId c) {
    return static_cast<double>(wt.level[c]) - static_cast<double>(wt.level[p]);
  };
  auto tol = [](double u) { return std::max(1.0, u / 6.0); };

  std::vector<WitnessChain> chains;
  std::function<void(std::vector<VertexId>&, double)> extend =
      [&](std::vector<VertexId>& path, double u0) {
        VertexId tail = path.back();
        bool extended = false;
        for (VertexId c : t.at(tail).children)
          // Frontier leaves sit at the cut radius, not at a real branching
          // radius; chains are built from branching vertices only.
          if (!t.is_leaf(c) && std::abs(inc(tail, c) - u0) <= tol(u0)) {
            path.push_back(c);
            extend(path, u0);
            path.pop_back();
            extended = true;
          }
        if (extended || path.size() < 3) return;
        double first = static_cast<double>(wt.level[path.front()]) + 1;
        double last = static_cast<double>(wt.level[path.back()]) + 1;
        if (last / first < 1.8) return;
        WitnessChain ch;
        ch.vertices = path;
        for (VertexId v : path) ch.levels.push_back(wt.level[v]);
        ch.increment = u0;
        chains.push_back(std::move(ch));
      };

  for (VertexId p = 0; p < t.size(); ++p) {
    if (p == t.root() || t.is_leaf(p)) continue;  // root is not a cell
    for (VertexId c : t.at(p).children) {
      if (t.is_leaf(c)) continue;
      double u0 = inc(p, c);
      if (u0 < 1) continue;
      VertexId gp = t.at(p).parent;
      if (gp != kNoVertex && gp != t.root() &&
          std::abs(inc(gp, p) - u0) <= tol(u0))
        continue;  // not backward-maximal: counted from the earlier edge
      std::vector<VertexId> path{p, c};
      extend(path, u0);
    }
  }
  if (chains.empty())
    throw Error::domain("nonembed_witness: no witness at this depth");

  // Pairs are anchored at the chain head: with a constant radius step u the
  // weight ratio is 1 + u*distance/(n0+1), exactly linear in tree distance.
  std::vector<double> ds, rs;
  for (const WitnessChain& ch : chains)
    for (std::size_t j = 1; j < ch.vertices.size(); ++j) {
      WitnessPair pr;
      pr.ancestor = ch.vertices.front();
      pr.descendant = ch.vertices[j];
      pr.distance = j;
      pr.ratio = (static_cast<double>(ch.levels[j]) + 1) /
                 (static_cast<double>(ch.levels.front()) + 1);
      rep.pairs.push_back(pr);
      ds.push_back(static_cast<double>(pr.distance));
      rs.push_back(pr.ratio);
      if (pr.ratio > rep.best.ratio ||
          (pr.ratio == rep.best.ratio && pr.distance > rep.best.distance))
        rep.best = pr;
    }
  rep.correlation = pearson(ds, rs);
  rep.chains = std::move(chains);
  return rep;
}

}  // namespace ucantor
