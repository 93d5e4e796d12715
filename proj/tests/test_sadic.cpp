#include <doctest.h>

#include <cmath>
#include <set>
#include <string>
#include <vector>

#include "ucantor/errors.hpp"
#include "ucantor/rng.hpp"
#include "ucantor/sadic.hpp"
#include "ucantor/tree.hpp"

using namespace ucantor;

namespace {

// 0 -> 010, 1 -> 0110: proper (l = r = '0') and primitive in one step.
const char* kProperSys = R"({
  "substitutions": [{"name": "c", "map": {"0": "010", "1": "0110"}}],
  "schedule": {"type": "periodic", "period": ["c"]},
  "proper": {"l": "0", "r": "0"},
  "s0": 1
})";

// Fibonacci: 0 -> 01, 1 -> 0. Not proper, primitive with window 2.
const char* kFibSys = R"({
  "substitutions": [{"name": "fib", "map": {"0": "01", "1": "0"}}],
  "schedule": {"type": "periodic", "period": ["fib"]}
})";

// Every image is the same word; edges into a letter read off its positions.
const char* kLabcarSys = R"({
  "substitutions": [{"name": "flat", "map": {
    "l": "labcar", "a": "labcar", "b": "labcar", "c": "labcar", "r": "labcar"
  }}],
  "schedule": {"type": "periodic", "period": ["flat"]}
})";

std::vector<BratteliEdge> random_path(const BratteliDiagram& d,
                                      std::uint64_t key, std::size_t n) {
  std::vector<BratteliEdge> path;
  for (std::size_t k = 0; k < n; ++k) {
    std::vector<BratteliEdge> options;
    for (const BratteliEdge& e : d.edges[k])
      if (path.empty() || e.from == path.back().to) options.push_back(e);
    path.push_back(options[rng_draw(key, k) % options.size()]);
  }
  return path;
}

}  // namespace

TEST_CASE("substitution basics and composition") {
  SAdicSystem sys = sadic_from_json_text(kProperSys);
  const Substitution& s = sys.sigma(1);
  CHECK(s.domain() == "01");
  CHECK(s.letters() == "01");
  CHECK(s.apply("10") == "0110010");
  CHECK(sys.alphabet(1) == "01");
  CHECK(sys.alphabet(5) == "01");
  CHECK(sys.levels() == SIZE_MAX);

  Substitution s13 = compose(sys, 1, 3);
  CHECK(s13.image('0') == "0100110010");
  CHECK(s13.image('1') == "01001100110010");
  CHECK(compose(sys, 1, 2).image('1') == "0110");

  CHECK_THROWS_AS(compose(sys, 2, 2), Error);
  CHECK_THROWS_AS(s.image('x'), Error);
}

TEST_CASE("proper and primitive checks") {
  SAdicSystem proper = sadic_from_json_text(kProperSys);
  ProperCheck pc = check_proper(proper);
  CHECK(pc.proper);
  CHECK(pc.l == '0');
  CHECK(pc.r == '0');
  CHECK(proper.s0 == 1);
  CHECK(check_primitive(proper, 1));

  SAdicSystem fib = sadic_from_json_text(kFibSys);
  CHECK_FALSE(check_proper(fib).proper);
  CHECK_FALSE(check_primitive(fib, 1));  // sigma(1) = "0" misses the 1
  CHECK(check_primitive(fib, 2));

  // 1 -> 11 never reaches 0 again
  SAdicSystem stuck = sadic_from_json_text(R"({
    "substitutions": [{"name": "s", "map": {"0": "01", "1": "11"}}],
    "schedule": {"type": "periodic", "period": ["s"]}
  })");
  for (std::size_t s0 = 1; s0 <= 4; ++s0) CHECK_FALSE(check_primitive(stuck, s0));

  CHECK_THROWS_AS(check_primitive(proper, 0), Error);
}

TEST_CASE("parser rejects inconsistent configs") {
  CHECK_THROWS_AS(sadic_from_json_text("{"), Error);
  CHECK_THROWS_AS(sadic_from_json_text("[]"), Error);
  CHECK_THROWS_AS(sadic_from_json_text(R"({"substitutions": []})"), Error);

  // schedule naming an unknown substitution
  CHECK_THROWS_AS(sadic_from_json_text(R"({
    "substitutions": [{"name": "a", "map": {"0": "00"}}],
    "schedule": {"type": "periodic", "period": ["b"]}
  })"),
                  Error);

  // image letters of the successor must form the domain of the predecessor
  CHECK_THROWS_WITH_AS(sadic_from_json_text(R"({
    "substitutions": [
      {"name": "a", "map": {"0": "01", "1": "10"}},
      {"name": "b", "map": {"0": "0", "1": "12"}}
    ],
    "schedule": {"type": "explicit", "sequence": ["a", "b"]}
  })"),
                       doctest::Contains("breaks the alphabet chain"), Error);

  CHECK_THROWS_WITH_AS(sadic_from_json_text(R"({
    "substitutions": [{"name": "c", "map": {"0": "010", "1": "0110"}}],
    "schedule": {"type": "periodic", "period": ["c"]},
    "proper": {"l": "0", "r": "1"}
  })"),
                       doctest::Contains("proper claim does not hold"), Error);

  CHECK_THROWS_AS(sadic_from_json_text(R"({
    "substitutions": [{"name": "c", "map": {"0": "010", "1": "0110"}}],
    "schedule": {"type": "periodic", "period": ["c"]},
    "alphabets": ["012"]
  })"),
                  Error);

  CHECK_THROWS_AS(sadic_from_json_text(R"({
    "substitutions": [{"name": "c", "map": {"0": "010", "1": "0110"}}],
    "schedule": {"type": "periodic", "period": ["c"]},
    "s0": 0
  })"),
                  Error);
}

TEST_CASE("bratteli weights track minimal image lengths") {
  SAdicSystem fib = sadic_from_json_text(kFibSys);
  BratteliDiagram d = build_bratteli(fib, 7);
  REQUIRE(d.weights.size() == 8);
  std::vector<double> expect = {1.0,       1.0,       1.0 / 2.0, 1.0 / 3.0,
                                1.0 / 5.0, 1.0 / 8.0, 1.0 / 13.0, 1.0 / 21.0};
  for (std::size_t i = 0; i < expect.size(); ++i) CHECK(d.weights[i] == expect[i]);
  // primitivity window 2: one window at least doubles the shortest image
  for (std::size_t k = 0; 2 * k < d.weights.size(); ++k)
    CHECK(d.weights[2 * k] <= std::pow(0.5, double(k)) + 1e-15);

  SAdicSystem proper = sadic_from_json_text(kProperSys);
  BratteliDiagram dp = build_bratteli(proper, 6);
  CHECK(dp.weights[1] == 1.0 / 3.0);
  CHECK(dp.weights[2] == 1.0 / 10.0);
  for (std::size_t k = 0; k < dp.weights.size(); ++k)
    CHECK(dp.weights[k] <= std::pow(0.5, double(k)) + 1e-15);

  CHECK_THROWS_AS(build_bratteli(fib, 0), Error);
}

TEST_CASE("edge labels are occurrence positions") {
  SAdicSystem sys = sadic_from_json_text(kLabcarSys);
  BratteliDiagram d = build_bratteli(sys, 1);
  CHECK(d.alphabets[0] == "abclr");
  std::set<std::uint32_t> a_labels;
  for (const BratteliEdge& e : d.edges[0])
    if (e.from == 'a' && e.to == 'a') a_labels.insert(e.label);
  CHECK(a_labels == std::set<std::uint32_t>{1, 4});
  // six edges into every vertex, one per letter of "labcar"
  for (char b : d.alphabets[1]) {
    std::size_t deg = 0;
    for (const BratteliEdge& e : d.edges[0])
      if (e.to == b) ++deg;
    CHECK(deg == 6);
  }
}

TEST_CASE("diagram_to_tree yields a reduced Michon tree") {
  SAdicSystem fib = sadic_from_json_text(kFibSys);
  WeightedTree t = diagram_to_tree(build_bratteli(fib, 4));
  CHECK(validate(t).valid);
  CHECK(is_reduced(t));
  CHECK(t.weight(t.root()) == 1.0);
  std::size_t leaves = 0;
  for (VertexId v = 0; v < t.size(); ++v)
    if (t.is_leaf(v)) {
      ++leaves;
      CHECK(t.at(v).leaf == LeafKind::frontier);
      CHECK(t.weight(v) == 1.0 / 5.0);
    }
  CHECK(leaves == 13);  // length-4 diagram paths count like Fibonacci

  WeightedTree deep = diagram_to_tree(build_bratteli(fib, 12));
  EmbedCheck ec = check_embeddable(deep);
  CHECK(ec.satisfied);  // golden-ratio decay is geometric
}

TEST_CASE("path_to_word window shape at one edge") {
  SAdicSystem sys = sadic_from_json_text(kProperSys);
  // edge into '1' at occurrence 2 of sigma(1) = "0110"
  std::vector<BratteliEdge> path = {{'1', '1', 2}};
  CenteredWord cw = path_to_word(sys, path, 1);
  CHECK(cw.word == "001100");  // "0" + sigma(1) + "0"
  CHECK(cw.origin == 3);
  CHECK(cw.word[cw.origin] == '1');

  CHECK_THROWS_AS(path_to_word(sys, path, 2), Error);
  CHECK_THROWS_AS(path_to_word(sys, {{'1', '1', 7}}, 1), Error);
  SAdicSystem fib = sadic_from_json_text(kFibSys);
  CHECK_THROWS_AS(path_to_word(fib, path, 1), Error);  // not proper
}

TEST_CASE("windows nest as the level grows") {
  SAdicSystem sys = sadic_from_json_text(kProperSys);
  BratteliDiagram d = build_bratteli(sys, 4);
  for (std::uint64_t key = 1; key <= 6; ++key) {
    std::vector<BratteliEdge> path = random_path(d, key, 4);
    CenteredWord prev = path_to_word(sys, path, 1);
    CHECK(prev.word[prev.origin] == path[0].from);
    for (std::size_t n = 2; n <= 4; ++n) {
      CenteredWord cur = path_to_word(sys, path, n);
      CHECK(cur.word[cur.origin] == path[0].from);
      REQUIRE(cur.origin >= prev.origin);
      REQUIRE(cur.word.size() - cur.origin >= prev.word.size() - prev.origin);
      CHECK(cur.word.substr(cur.origin - prev.origin, prev.word.size()) ==
            prev.word);
      prev = cur;
    }
  }
}

TEST_CASE("word_to_path inverts path_to_word") {
  SAdicSystem sys = sadic_from_json_text(kProperSys);
  BratteliDiagram d = build_bratteli(sys, 8);
  for (std::uint64_t key = 1; key <= 10; ++key) {
    std::vector<BratteliEdge> path = random_path(d, key, 8);
    CenteredWord cw = path_to_word(sys, path, 8);
    std::vector<BratteliEdge> back = word_to_path(sys, cw, 8);
    REQUIRE(back.size() == path.size());
    for (std::size_t k = 0; k < path.size(); ++k) {
      CHECK(back[k].from == path[k].from);
      CHECK(back[k].to == path[k].to);
      CHECK(back[k].label == path[k].label);
    }
  }
}

TEST_CASE("word_to_path failure modes") {
  SAdicSystem sys = sadic_from_json_text(kProperSys);
  CHECK_THROWS_WITH_AS(word_to_path(sys, {"01", 0}, 1),
                       doctest::Contains("word too short"), Error);

  // 0 -> 00 admits two origin blocks in "0000"
  SAdicSystem amb = sadic_from_json_text(R"({
    "substitutions": [{"name": "d", "map": {"0": "00"}}],
    "schedule": {"type": "periodic", "period": ["d"]}
  })");
  CHECK_THROWS_WITH_AS(word_to_path(amb, {"0000", 1}, 1),
                       doctest::Contains("unique decomposition violated"),
                       Error);

  CHECK_THROWS_AS(word_to_path(sys, {"001100", 6}, 1), Error);
  CHECK_THROWS_AS(word_to_path(sys, {"001100", 3}, 0), Error);
}

TEST_CASE("durand_ratio measures length balance") {
  SAdicSystem sys = sadic_from_json_text(kProperSys);
  CHECK(durand_ratio(sys, 1, 1) == 4.0 / 3.0);
  CHECK(durand_ratio(sys, 1, 3) == 48.0 / 34.0);
  for (std::size_t s = 1; s <= 8; ++s) {
    double r = durand_ratio(sys, 1, s);
    CHECK(r >= 1.0);
    CHECK(r <= 1.5);
  }
  // shifting the start does not matter for a one-substitution schedule
  CHECK(durand_ratio(sys, 2, 4) == durand_ratio(sys, 1, 3));

  CHECK_THROWS_AS(durand_ratio(sys, 0, 1), Error);
  CHECK_THROWS_AS(durand_ratio(sys, 3, 2), Error);
}
