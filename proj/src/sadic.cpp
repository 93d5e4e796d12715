#include "ucantor/sadic.hpp"

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "ucantor/errors.hpp"

namespace ucantor {

namespace {

// Hard cap on any expanded image or reconstructed window.
constexpr std::size_t kMaxExpand = 10'000'000;

constexpr std::uint64_t kLenCap = std::uint64_t(1) << 62;

std::string sorted_distinct(std::string s) {
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  return s;
}

}  // namespace

std::string Substitution::domain() const {
  std::string d;
  for (const auto& [c, img] : images) d.push_back(c);
  return d;  // std::map keeps it sorted
}

std::string Substitution::letters() const {
  std::string all;
  for (const auto& [c, img] : images) all += img;
  return sorted_distinct(all);
}

const std::string& Substitution::image(char c) const {
  auto it = images.find(c);
  if (it == images.end())
    throw Error::domain(std::string("substitution '") + name +
                        "' has no image for letter '" + c + "'");
  return it->second;
}

std::string Substitution::apply(const std::string& word) const {
  std::size_t total = 0;
  for (char c : word) total += image(c).size();
  if (total > kMaxExpand)
    throw Error::domain("substitution image exceeds the expansion cap");
  std::string out;
  out.reserve(total);
  for (char c : word) out += image(c);
  return out;
}

std::size_t SAdicSystem::levels() const {
  return periodic ? std::numeric_limits<std::size_t>::max() : schedule.size();
}

const Substitution& SAdicSystem::sigma(std::size_t n) const {
  if (n == 0) throw Error::invalid("sigma: levels are 1-based");
  if (schedule.empty()) throw Error::invalid("sigma: empty schedule");
  if (periodic) return set[schedule[(n - 1) % schedule.size()]];
  if (n > schedule.size())
    throw Error::invalid("sigma: level beyond the truncation");
  return set[schedule[n - 1]];
}

std::string SAdicSystem::alphabet(std::size_t n) const {
  if (n == 0) throw Error::invalid("alphabet: levels are 1-based");
  if (n == 1) return sigma(1).letters();
  return sigma(n - 1).domain();
}

Substitution compose(const SAdicSystem& sys, std::size_t n, std::size_t m) {
  if (n == 0 || n >= m) throw Error::invalid("compose: need 1 <= n < m");
  Substitution out;
  out.name = "sigma_" + std::to_string(n) + "," + std::to_string(m);
  const std::string dom = sys.alphabet(m);
  for (char b : dom) out.images[b] = std::string(1, b);
  for (std::size_t k = m; k-- > n;) {
    const Substitution& s = sys.sigma(k);
    for (auto& [b, img] : out.images) img = s.apply(img);
  }
  return out;
}

ProperCheck check_proper(const SAdicSystem& sys) {
  ProperCheck pc;
  bool first = true;
  for (const auto& sub : sys.set) {
    for (const auto& [c, img] : sub.images) {
      if (img.empty()) return pc;
      if (first) {
        pc.l = img.front();
        pc.r = img.back();
        first = false;
      } else if (img.front() != pc.l || img.back() != pc.r) {
        return pc;
      }
    }
  }
  pc.proper = !first;
  return pc;
}

bool check_primitive(const SAdicSystem& sys, std::size_t s0) {
  if (s0 == 0) throw Error::invalid("check_primitive: s0 must be positive");
  std::size_t starts;
  if (sys.periodic) {
    starts = sys.schedule.size();  // window contents repeat after one period
  } else {
    if (sys.schedule.size() < s0)
      throw Error::domain("check_primitive: truncation shorter than s0");
    starts = sys.schedule.size() - s0 + 1;
  }
  for (std::size_t r = 1; r <= starts; ++r) {
    // occ[i][j] = letter i of A_r occurs in sigma_{r,k}(letter j of A_k)
    std::string rows = sys.alphabet(r);
    std::vector<std::vector<bool>> occ(rows.size(),
                                       std::vector<bool>(rows.size(), false));
    for (std::size_t i = 0; i < rows.size(); ++i) occ[i][i] = true;
    std::string cols = rows;
    for (std::size_t k = r; k < r + s0; ++k) {
      const Substitution& s = sys.sigma(k);
      std::string next = sys.alphabet(k + 1);
      std::vector<std::vector<bool>> prod(
          rows.size(), std::vector<bool>(next.size(), false));
      for (std::size_t j = 0; j < next.size(); ++j) {
        for (char c : s.image(next[j])) {
          std::size_t mid = cols.find(c);
          if (mid == std::string::npos)
            throw Error::internal("check_primitive: letter outside alphabet");
          for (std::size_t i = 0; i < rows.size(); ++i)
            if (occ[i][mid]) prod[i][j] = true;
        }
      }
      occ = std::move(prod);
      cols = std::move(next);
    }
    for (const auto& row : occ)
      for (bool hit : row)
        if (!hit) return false;
  }
  return true;
}

BratteliDiagram build_bratteli(const SAdicSystem& sys, std::size_t depth) {
  if (depth == 0) throw Error::invalid("build_bratteli: depth must be positive");
  if (!sys.periodic && depth > sys.schedule.size())
    throw Error::invalid("build_bratteli: depth exceeds the schedule");
  BratteliDiagram d;
  for (std::size_t n = 1; n <= depth + 1; ++n)
    d.alphabets.push_back(sys.alphabet(n));
  for (std::size_t n = 1; n <= depth; ++n) {
    const Substitution& s = sys.sigma(n);
    std::vector<BratteliEdge> level;
    for (char b : d.alphabets[n]) {
      const std::string& img = s.image(b);
      for (std::size_t pos = 0; pos < img.size(); ++pos)
        level.push_back({img[pos], b, static_cast<std::uint32_t>(pos)});
    }
    d.edges.push_back(std::move(level));
  }
  // w_n = 1 / min_a |sigma_{1,n}(a)|; lengths grow, so w is nonincreasing.
  std::unordered_map<char, std::uint64_t> len;
  for (char a : d.alphabets[0]) len[a] = 1;
  d.weights.push_back(1.0);
  for (std::size_t n = 1; n <= depth; ++n) {
    const Substitution& s = sys.sigma(n);
    std::unordered_map<char, std::uint64_t> next;
    std::uint64_t lo = std::numeric_limits<std::uint64_t>::max();
    for (char b : d.alphabets[n]) {
      std::uint64_t total = 0;
      for (char c : s.image(b)) {
        total += len.at(c);
        if (total > kLenCap)
          throw Error::domain("build_bratteli: image lengths overflow");
      }
      next[b] = total;
      lo = std::min(lo, total);
    }
    d.weights.push_back(1.0 / static_cast<double>(lo));
    len = std::move(next);
  }
  return d;
}

WeightedTree diagram_to_tree(const BratteliDiagram& diagram) {
  if (diagram.edges.empty())
    throw Error::invalid("diagram_to_tree: diagram has no edges");
  if (diagram.weights.size() != diagram.edges.size() + 1)
    throw Error::invalid("diagram_to_tree: weights do not match levels");
  WeightedTree t;
  VertexId root = t.add_root(diagram.weights[0]);
  // Level k holds the length-k paths together with their terminal letter.
  std::vector<std::pair<VertexId, char>> level;
  for (const BratteliEdge& e : diagram.edges[0])
    level.push_back({t.add_child(root, diagram.weights[1]), e.to});
  for (std::size_t n = 1; n < diagram.edges.size(); ++n) {
    std::vector<std::pair<VertexId, char>> next;
    for (const auto& [vid, end] : level) {
      for (const BratteliEdge& e : diagram.edges[n]) {
        if (e.from != end)
          continue;
        next.push_back({t.add_child(vid, diagram.weights[n + 1]), e.to});
      }
    }
    level = std::move(next);
  }
  t.finalize();
  return reduce(t);
}

namespace {

// Cumulative image lengths |sigma_{1,k}(c)| for c in A_k, k = 1..n+1.
std::vector<std::unordered_map<char, std::uint64_t>> cumulative_lengths(
    const SAdicSystem& sys, std::size_t n) {
  std::vector<std::unordered_map<char, std::uint64_t>> lens(n + 2);
  for (char a : sys.alphabet(1)) lens[1][a] = 1;
  for (std::size_t k = 1; k <= n; ++k) {
    const Substitution& s = sys.sigma(k);
    for (char b : sys.alphabet(k + 1)) {
      std::uint64_t total = 0;
      for (char c : s.image(b)) {
        total += lens[k].at(c);
        if (total > kLenCap)
          throw Error::domain("path_to_word: image lengths overflow");
      }
      lens[k + 1][b] = total;
    }
  }
  return lens;
}

void check_path_edges(const SAdicSystem& sys,
                      const std::vector<BratteliEdge>& path, std::size_t n) {
  for (std::size_t k = 1; k <= n; ++k) {
    const BratteliEdge& e = path[k - 1];
    const std::string& img = sys.sigma(k).image(e.to);
    if (e.label >= img.size() || img[e.label] != e.from)
      throw Error::invalid("path edge label mismatch at level " +
                           std::to_string(k));
    if (k >= 2 && path[k - 2].to != e.from)
      throw Error::invalid("path not composable at level " + std::to_string(k));
  }
}

}  // namespace

CenteredWord path_to_word(const SAdicSystem& sys,
                          const std::vector<BratteliEdge>& path,
                          std::size_t n) {
  if (n == 0) throw Error::invalid("path_to_word: n must be positive");
  if (path.size() < n)
    throw Error::invalid("path_to_word: path shorter than n");
  ProperCheck pc = check_proper(sys);
  if (!pc.proper) throw Error::domain("path_to_word: system is not proper");
  check_path_edges(sys, path, n);

  auto lens = cumulative_lengths(sys, n);
  // Origin offset within sigma_{1,k+1}(a_{k+1}), accumulated level by level.
  std::uint64_t off = 0;
  for (std::size_t k = 1; k <= n; ++k) {
    const BratteliEdge& e = path[k - 1];
    const std::string& img = sys.sigma(k).image(e.to);
    for (std::uint32_t j = 0; j < e.label; ++j) off += lens[k].at(img[j]);
  }

  auto expand = [&](char c, std::size_t top) {
    // sigma_{1,top}(c) with c in A_top
    std::string w(1, c);
    for (std::size_t k = top; k-- > 1;) w = sys.sigma(k).apply(w);
    return w;
  };
  std::string left = expand(pc.r, n);
  std::string center = expand(path[n - 1].to, n + 1);
  std::string right = expand(pc.l, n);
  if (left.size() + center.size() + right.size() > kMaxExpand)
    throw Error::domain("path_to_word: window exceeds the expansion cap");

  CenteredWord cw;
  cw.word = left + center + right;
  cw.origin = left.size() + static_cast<std::size_t>(off);
  return cw;
}

namespace {

struct ImageSet {
  std::vector<char> letter;
  std::vector<const std::string*> img;
};

ImageSet collect_images(const Substitution& s) {
  ImageSet is;
  for (const auto& [c, img] : s.images) {
    is.letter.push_back(c);
    is.img.push_back(&img);
  }
  return is;
}

// Can word[0, s) be tiled by full images, allowing one clipped image at the
// left window edge?
bool left_tilable(const std::string& w, std::size_t s, const ImageSet& is) {
  std::vector<bool> ok(s + 1, false);
  ok[s] = true;
  for (std::size_t i = s; i-- > 0;) {
    for (const std::string* img : is.img) {
      if (i + img->size() <= s && ok[i + img->size()] &&
          w.compare(i, img->size(), *img) == 0) {
        ok[i] = true;
        break;
      }
    }
  }
  for (std::size_t j = 0; j <= s; ++j) {
    if (!ok[j]) continue;
    if (j == 0) return true;
    for (const std::string* img : is.img)
      if (img->size() > j &&
          img->compare(img->size() - j, j, w, 0, j) == 0)
        return true;
  }
  return false;
}

bool right_tilable(const std::string& w, std::size_t t, const ImageSet& is) {
  const std::size_t end = w.size();
  std::vector<bool> ok(end - t + 1, false);
  ok[0] = true;  // ok[i - t] covers tilings of [t, i)
  for (std::size_t i = t + 1; i <= end; ++i) {
    for (const std::string* img : is.img) {
      if (img->size() <= i - t && ok[i - img->size() - t] &&
          w.compare(i - img->size(), img->size(), *img) == 0) {
        ok[i - t] = true;
        break;
      }
    }
  }
  for (std::size_t j = t; j <= end; ++j) {
    if (!ok[j - t]) continue;
    if (j == end) return true;
    const std::size_t rest = end - j;
    for (const std::string* img : is.img)
      if (img->size() > rest && img->compare(0, rest, w, j, rest) == 0)
        return true;
  }
  return false;
}

}  // namespace

std::vector<BratteliEdge> word_to_path(const SAdicSystem& sys,
                                       const CenteredWord& cw, std::size_t n) {
  if (n == 0) throw Error::invalid("word_to_path: n must be positive");
  if (cw.origin >= cw.word.size())
    throw Error::invalid("word_to_path: origin outside the word");

  std::string cur = cw.word;
  std::size_t org = cw.origin;
  std::vector<BratteliEdge> path;
  for (std::size_t k = 1; k <= n; ++k) {
    const Substitution& s = sys.sigma(k);
    ImageSet is = collect_images(s);

    // The image block covering the origin: letter and in-block position.
    std::vector<std::pair<char, std::uint32_t>> cands;
    bool clipped = false;
    for (std::size_t bi = 0; bi < is.letter.size(); ++bi) {
      const std::string& img = *is.img[bi];
      for (std::size_t p = 0; p < img.size(); ++p) {
        if (img[p] != cur[org]) continue;
        if (p > org || org - p + img.size() > cur.size()) {
          clipped = true;
          continue;
        }
        const std::size_t start = org - p;
        if (cur.compare(start, img.size(), img) != 0) continue;
        if (!left_tilable(cur, start, is)) continue;
        if (!right_tilable(cur, start + img.size(), is)) continue;
        cands.push_back({is.letter[bi], static_cast<std::uint32_t>(p)});
      }
    }
    if (cands.empty()) {
      if (clipped) throw Error::domain("word_to_path: word too short");
      throw Error::domain("word_to_path: no decomposition at level " +
                          std::to_string(k));
    }
    if (cands.size() > 1)
      throw Error::domain("word_to_path: unique decomposition violated");

    const auto [b, p] = cands[0];
    const std::string& img = s.image(b);
    const std::size_t start = org - p;
    path.push_back({cur[org], b, p});

    // De-substitute outward from the origin block while the next full image
    // is unique; ambiguous or clipped context is dropped.
    std::string lrev;
    for (std::size_t pos = start; pos > 0;) {
      char hit = 0;
      int found = 0;
      for (std::size_t bi = 0; bi < is.letter.size(); ++bi) {
        const std::string& im = *is.img[bi];
        if (im.size() <= pos &&
            cur.compare(pos - im.size(), im.size(), im) == 0) {
          hit = is.letter[bi];
          if (++found > 1) break;
        }
      }
      if (found != 1) break;
      lrev.push_back(hit);
      pos -= s.image(hit).size();
    }
    std::string rfwd;
    for (std::size_t pos = start + img.size(); pos < cur.size();) {
      char hit = 0;
      int found = 0;
      for (std::size_t bi = 0; bi < is.letter.size(); ++bi) {
        const std::string& im = *is.img[bi];
        if (pos + im.size() <= cur.size() &&
            cur.compare(pos, im.size(), im) == 0) {
          hit = is.letter[bi];
          if (++found > 1) break;
        }
      }
      if (found != 1) break;
      rfwd.push_back(hit);
      pos += s.image(hit).size();
    }
    std::string next(lrev.rbegin(), lrev.rend());
    org = next.size();
    next.push_back(b);
    next += rfwd;
    cur = std::move(next);
  }
  return path;
}

double durand_ratio(const SAdicSystem& sys, std::size_t r, std::size_t s) {
  if (r == 0 || r > s) throw Error::invalid("durand_ratio: need 1 <= r <= s");
  if (!sys.periodic && s > sys.schedule.size())
    throw Error::invalid("durand_ratio: window exceeds the schedule");
  // g[c] = |sigma_{r,k}(c)| for c in A_k, advanced from k = r to s+1.
  std::unordered_map<char, std::uint64_t> g;
  for (char a : sys.alphabet(r)) g[a] = 1;
  for (std::size_t k = r; k <= s; ++k) {
    const Substitution& sub = sys.sigma(k);
    std::unordered_map<char, std::uint64_t> next;
    for (char b : sys.alphabet(k + 1)) {
      std::uint64_t total = 0;
      for (char c : sub.image(b)) {
        total += g.at(c);
        if (total > kLenCap)
          throw Error::domain("durand_ratio: image lengths overflow");
      }
      next[b] = total;
    }
    g = std::move(next);
  }
  std::uint64_t lo = std::numeric_limits<std::uint64_t>::max();
  std::uint64_t hi = 0;
  for (const auto& [c, len] : g) {
    lo = std::min(lo, len);
    hi = std::max(hi, len);
  }
  return static_cast<double>(hi) / static_cast<double>(lo);
}

SAdicSystem sadic_from_json_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error::parse(std::string("sadic config: ") + e.what());
  }
  if (!j.is_object()) throw Error::parse("sadic config: expected an object");

  SAdicSystem sys;
  if (!j.contains("substitutions") || !j["substitutions"].is_array() ||
      j["substitutions"].empty())
    throw Error::parse("sadic config: 'substitutions' must be a nonempty array");
  std::unordered_map<std::string, std::size_t> by_name;
  for (const auto& js : j["substitutions"]) {
    Substitution sub;
    if (!js.is_object() || !js.contains("name") || !js["name"].is_string())
      throw Error::parse("sadic config: substitution needs a string 'name'");
    sub.name = js["name"].get<std::string>();
    if (sub.name.empty() || by_name.count(sub.name))
      throw Error::parse("sadic config: substitution names must be unique");
    if (!js.contains("map") || !js["map"].is_object() || js["map"].empty())
      throw Error::parse("sadic config: substitution '" + sub.name +
                         "' needs a nonempty 'map'");
    for (const auto& [key, val] : js["map"].items()) {
      if (key.size() != 1)
        throw Error::parse("sadic config: letters must be single characters");
      if (!val.is_string() || val.get<std::string>().empty())
        throw Error::parse("sadic config: image of '" + key +
                           "' must be a nonempty string");
      sub.images[key[0]] = val.get<std::string>();
    }
    by_name[sub.name] = sys.set.size();
    sys.set.push_back(std::move(sub));
  }

  if (!j.contains("schedule") || !j["schedule"].is_object())
    throw Error::parse("sadic config: 'schedule' must be an object");
  const auto& sch = j["schedule"];
  std::string type = sch.value("type", "");
  const char* key = nullptr;
  if (type == "periodic") {
    sys.periodic = true;
    key = "period";
  } else if (type == "explicit") {
    key = "sequence";
  } else {
    throw Error::parse("sadic config: schedule type must be 'periodic' or "
                       "'explicit'");
  }
  if (!sch.contains(key) || !sch[key].is_array() || sch[key].empty())
    throw Error::parse(std::string("sadic config: schedule '") + key +
                       "' must be a nonempty array of names");
  for (const auto& name : sch[key]) {
    if (!name.is_string() || !by_name.count(name.get<std::string>()))
      throw Error::parse("sadic config: schedule names an unknown "
                         "substitution");
    sys.schedule.push_back(by_name[name.get<std::string>()]);
  }

  // Adjacent levels must compose, and every alphabet letter must actually be
  // produced one level up (vertices without that would never carry edges).
  const std::size_t pairs =
      sys.periodic ? sys.schedule.size() : sys.schedule.size() - 1;
  for (std::size_t i = 0; i < pairs; ++i) {
    const Substitution& a = sys.set[sys.schedule[i]];
    const Substitution& b =
        sys.set[sys.schedule[(i + 1) % sys.schedule.size()]];
    if (a.domain() != b.letters())
      throw Error::parse("sadic config: '" + a.name + "' -> '" + b.name +
                         "' breaks the alphabet chain");
  }

  if (j.contains("alphabets")) {
    if (!j["alphabets"].is_array())
      throw Error::parse("sadic config: 'alphabets' must be an array");
    std::size_t n = 1;
    for (const auto& al : j["alphabets"]) {
      if (!al.is_string())
        throw Error::parse("sadic config: alphabets must be strings");
      if (sys.periodic || n <= sys.schedule.size() + 1) {
        if (sorted_distinct(al.get<std::string>()) != sys.alphabet(n))
          throw Error::parse("sadic config: declared alphabet " +
                             std::to_string(n) + " does not match the maps");
      }
      ++n;
    }
  }

  if (j.contains("proper")) {
    const auto& pr = j["proper"];
    if (!pr.is_object() || !pr.contains("l") || !pr.contains("r") ||
        !pr["l"].is_string() || !pr["r"].is_string() ||
        pr["l"].get<std::string>().size() != 1 ||
        pr["r"].get<std::string>().size() != 1)
      throw Error::parse("sadic config: 'proper' needs single-letter 'l' "
                         "and 'r'");
    ProperCheck pc = check_proper(sys);
    if (!pc.proper || pc.l != pr["l"].get<std::string>()[0] ||
        pc.r != pr["r"].get<std::string>()[0])
      throw Error::parse("sadic config: proper claim does not hold");
  }

  if (j.contains("s0")) {
    if (!j["s0"].is_number_unsigned() || j["s0"].get<std::uint64_t>() == 0)
      throw Error::parse("sadic config: 's0' must be a positive integer");
    sys.s0 = j["s0"].get<std::size_t>();
  }
  return sys;
}

SAdicSystem load_sadic(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error::io("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return sadic_from_json_text(ss.str());
}

}  // namespace ucantor
