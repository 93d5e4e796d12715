// Acceptance gate: one line per criterion, nonzero exit when any fails.
// Every check states its measured value next to the bound it must meet, and
// each criterion also has a wall-clock budget that is part of the verdict.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "support/builders.hpp"
#include "ucantor/embedding.hpp"
#include "ucantor/gw.hpp"
#include "ucantor/hausdorff.hpp"
#include "ucantor/json_io.hpp"
#include "ucantor/metric.hpp"
#include "ucantor/rng.hpp"
#include "ucantor/runner.hpp"
#include "ucantor/sadic.hpp"
#include "ucantor/sturmian.hpp"
#include "ucantor/tree.hpp"

using namespace ucantor;
using namespace ucantor::testing;
using nlohmann::json;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

const char* kProperSys = R"({
  "substitutions": [{"name": "c", "map": {"0": "010", "1": "0110"}}],
  "schedule": {"type": "periodic", "period": ["c"]},
  "proper": {"l": "0", "r": "0"},
  "s0": 1
})";

const char* kLabcarSys = R"({
  "substitutions": [{"name": "labcar", "map": {
    "l": "labcar", "a": "labcar", "b": "labcar", "c": "labcar", "r": "labcar"
  }}],
  "schedule": {"type": "periodic", "period": ["labcar"]}
})";

// 1. Kraft identity: random full cuts of Kraft-weighted trees sum to one.
Outcome kraft_identity() {
  double worst = 0.0;
  std::size_t cuts = 0;
  for (std::uint64_t i = 0; i < 20; ++i) {
    WeightedTree kt = kraft_weight(random_tree(100 + i, 8));
    for (std::uint64_t j = 0; j < 100; ++j) {
      FullSubtree cut = sample_full_cut(kt, rng_draw(i, j));
      worst = std::max(worst, std::abs(kraft_sum(kt, cut) - 1.0));
      ++cuts;
    }
  }
  return {worst < 1e-12, "max |sum - 1| = " + fmt(worst) + " over " +
                             std::to_string(cuts) + " cuts (< 1e-12)"};
}

// 2. Kraft-weighted trees have dimension one.
Outcome kraft_dimension() {
  std::vector<WeightedTree> trees = {
      uniform_tree(2, 8),  uniform_tree(2, 10),       uniform_tree(3, 6),
      uniform_tree(3, 7),  mixed_tree(6),             mixed_tree(7),
      random_tree(11, 7, 3, 0.0),  // perfect boundary, random shape
  };
  for (std::uint64_t seed : {21, 22, 23}) {
    GWConfig cfg;
    cfg.offspring = offspring_from_text("uniform:2,3");
    cfg.weights = weights_from_text("dirac:0.5");
    cfg.depth = 7;
    cfg.seed = seed;
    trees.push_back(sample_tree(cfg));
  }
  double worst = 0.0;
  for (const WeightedTree& t : trees) {
    DimensionReport rep = estimate_dimension(kraft_weight(t));
    worst = std::max(worst, std::abs(rep.s_estimate - 1.0));
  }
  return {worst <= 0.05,
          "max |s - 1| = " + fmt(worst) + " over 10 trees (<= 0.05)"};
}

// 3. The cut DP equals exhaustive enumeration, bitwise.
Outcome dp_equals_brute() {
  const double s_list[4] = {0.0, 0.7, 1.0, 1.5};
  const double delta = 0.95;
  std::size_t done = 0, mismatches = 0;
  for (std::uint64_t key = 0; done < 50; ++key) {
    WeightedTree t = random_tree(5000 + key, 4 + key % 3, 3);
    if (count_cuts(t, t.root(), delta) > 20000) continue;
    const double s = s_list[done % 4];
    if (h_s_delta(t, s, delta) != brute_h_s_delta(t, s, delta)) ++mismatches;
    ++done;
  }
  return {mismatches == 0, std::to_string(mismatches) +
                               " mismatches over 50 trees (exact equality)"};
}

// 4. Distortion box on dyadic trees, with the ternary map forced to L = 2.
Outcome distortion_box() {
  WeightedTree bin = uniform_tree(2, 12);
  EmbedParams pb = make_params(fit_decay(bin), bin.max_depth());
  DistortionReport rb = distortion_report(bin, pb, 10000, 77);

  WeightedTree ter = uniform_tree(3, 8);
  EmbedParams pt = make_params(fit_decay(ter), ter.max_depth(), 2);
  DistortionReport rt = distortion_report(ter, pt, 10000, 78);

  const bool pass = rb.contained && pb.L == 2 && pb.sufficiency_ok &&
                    rt.contained && !pt.sufficiency_ok;
  return {pass, "binary ratios [" + fmt(rb.min_ratio) + ", " +
                    fmt(rb.max_ratio) + "] in [" + fmt(rb.box_lo) + ", " +
                    fmt(rb.box_hi) + "], ternary [" + fmt(rt.min_ratio) +
                    ", " + fmt(rt.max_ratio) + "] in [" + fmt(rt.box_lo) +
                    ", " + fmt(rt.box_hi) + "], 10^4 pairs each"};
}

// 5. Schoenberg: the star is rejected with witness -1, clouds are accepted.
Outcome schoenberg() {
  FiniteMetric star;
  star.labels = {"o", "a", "b", "c"};
  star.d = {{0, 1, 1, 1}, {1, 0, 2, 2}, {1, 2, 0, 2}, {1, 2, 2, 0}};
  SchoenbergResult sr = schoenberg_test(star);
  bool pass = !sr.embeddable && std::abs(sr.min_eigenvalue + 1.0) <= 1e-9;

  std::size_t accepted = 0, rank_le3 = 0;
  for (std::uint64_t k = 0; k < 100; ++k) {
    std::vector<std::vector<double>> pts(6, std::vector<double>(3));
    SplitMix mix(rng_draw(900, k));
    for (auto& p : pts)
      for (double& x : p) x = 10.0 * mix.next_unit() - 5.0;
    SchoenbergResult cr = schoenberg_test(points_to_metric(pts));
    accepted += cr.embeddable;
    rank_le3 += cr.embeddable && cr.rank <= 3;
  }
  pass = pass && accepted == 100 && rank_le3 == 100;
  return {pass, "star witness = " + fmt(sr.min_eigenvalue) + " (~ -1), " +
                    std::to_string(accepted) + "/100 clouds accepted, " +
                    std::to_string(rank_le3) + " with rank <= 3"};
}

// 6. Sturmian dichotomy: bounded type embeds with a stable fit, the
//    unbounded example yields a linear witness, complexity is n + 1.
Outcome sturmian_dichotomy() {
  double spread = 0.0;
  bool all_satisfied = true;
  for (const char* name : {"golden", "sqrt2"}) {
    ContinuedFraction cf = alpha_cf(parse_alpha(name), 64);
    double th_lo = 1.0, th_hi = 0.0, c_lo = 1e300, c_hi = 0.0;
    for (std::size_t depth = 8; depth <= 12; ++depth) {
      EmbedCheck ec = check_embeddable(tree_of_words(cf, depth).tree);
      all_satisfied = all_satisfied && ec.satisfied;
      th_lo = std::min(th_lo, ec.fit.theta);
      th_hi = std::max(th_hi, ec.fit.theta);
      c_lo = std::min(c_lo, ec.fit.c);
      c_hi = std::max(c_hi, ec.fit.c);
    }
    spread = std::max({spread, th_hi / th_lo - 1.0, c_hi / c_lo - 1.0});
  }

  ContinuedFraction ce = alpha_cf(parse_alpha("e"), 200);
  TypeVerdict verdict = bounded_type_verdict(ce, 64);
  WitnessReport w = nonembed_witness(tree_of_words(ce, 160), ce, 0);
  const bool e_ok = verdict.bounded == TypeVerdict::Bounded::no &&
                    verdict.embeddable_known && !verdict.embeddable &&
                    w.correlation >= 0.9;

  bool complexity_ok = true;
  for (const char* name : {"golden", "sqrt2", "e"}) {
    ContinuedFraction cf = alpha_cf(parse_alpha(name), 64);
    std::vector<std::size_t> p = complexity(characteristic_window(cf, 200), 30);
    for (std::size_t n = 1; n <= 30; ++n)
      complexity_ok = complexity_ok && p[n - 1] == n + 1;
  }

  const bool pass = all_satisfied && spread <= 0.10 && e_ok && complexity_ok;
  return {pass, "fit spread over depths 8..12 = " + fmt(spread) +
                    " (<= 0.1), e witness correlation = " +
                    fmt(w.correlation) + " (>= 0.9), p(n) = n+1 for n <= 30: " +
                    (complexity_ok ? "exact" : "violated")};
}

// 7. S-adic pipeline: occurrence labels, path <-> word inversion, weights.
Outcome sadic_pipeline() {
  BratteliDiagram lab = build_bratteli(sadic_from_json_text(kLabcarSys), 1);
  std::vector<std::uint32_t> labels;
  for (const BratteliEdge& e : lab.edges[0])
    if (e.from == 'a' && e.to == 'b') labels.push_back(e.label);
  const bool labels_ok = labels == std::vector<std::uint32_t>{1, 4};

  SAdicSystem sys = sadic_from_json_text(kProperSys);
  const bool claims_ok = check_proper(sys).proper && check_primitive(sys, 1);
  BratteliDiagram d = build_bratteli(sys, 8);
  std::size_t inverted = 0;
  for (std::uint64_t k = 0; k < 50; ++k) {
    std::vector<BratteliEdge> path;
    char at = 0;
    for (std::size_t n = 0; n < 8; ++n) {
      std::vector<BratteliEdge> options;
      for (const BratteliEdge& e : d.edges[n])
        if (n == 0 || e.from == at) options.push_back(e);
      path.push_back(options[rng_draw(k, n) % options.size()]);
      at = path.back().to;
    }
    CenteredWord cw = path_to_word(sys, path, 8);
    std::vector<BratteliEdge> back = word_to_path(sys, cw, 8);
    bool same = back.size() == path.size();
    for (std::size_t n = 0; same && n < path.size(); ++n)
      same = back[n].from == path[n].from && back[n].to == path[n].to &&
             back[n].label == path[n].label;
    inverted += same;
  }

  bool weights_ok = true;
  for (std::size_t k = 0; k <= 6; ++k)
    weights_ok = weights_ok && d.weights[k] <= std::pow(2.0, -double(k));

  const bool pass = labels_ok && claims_ok && inverted == 50 && weights_ok;
  return {pass, std::string("labels {1,4} ") +
                    (labels_ok ? "exact" : "WRONG") + ", psi o phi = id on " +
                    std::to_string(inverted) + "/50 paths, w_k <= 2^-k to k=6: " +
                    (weights_ok ? "holds" : "violated")};
}

// 8. Galton-Watson closed forms against simulation.
Outcome gw_closed_forms() {
  OffspringDist d3 = offspring_from_text("dirac:3");
  OffspringDist u23 = offspring_from_text("uniform:2,3");
  WeightDist half = weights_from_text("dirac:0.5");
  WeightDist unit = weights_from_text("uniform:0,1");

  const double sm_err = std::abs(solve_s_m(d3, half) - std::log2(3.0));

  GWConfig w_cfg;
  w_cfg.offspring = u23;
  w_cfg.weights = half;
  w_cfg.depth = 6;
  w_cfg.seed = 101;
  w_cfg.trials = 10000;
  GWSummary w_sim = simulate(w_cfg, {});
  const double w_err = std::abs(w_sim.var_w - 1.0 / 15.0);
  const bool w_ok = w_err <= 3.0 * w_sim.se_var_w;

  TmResult tm = solve_t_m(d3, unit);
  const double tm_err = std::abs(tm.value - (2.0 + std::sqrt(6.0)));
  GWConfig y_cfg;
  y_cfg.offspring = d3;
  y_cfg.weights = unit;
  y_cfg.depth = 1;
  y_cfg.seed = 202;
  y_cfg.trials = 10000;
  GWSummary y_sim = simulate(y_cfg, {tm.value});
  const double y_exact = variance_y(d3, unit, tm.value, 1);  // 1 - 1/m = 2/3
  const double y_err = std::abs(y_sim.var_y[0] - y_exact);
  const bool y_ok = tm.exists && tm_err <= 1e-9 &&
                    std::abs(y_exact - 2.0 / 3.0) <= 1e-12 &&
                    y_err <= 3.0 * y_sim.se_var_y[0];

  GWConfig mc_cfg;
  mc_cfg.offspring = u23;
  mc_cfg.weights = half;
  mc_cfg.depth = 10;
  mc_cfg.seed = 303;
  McDimension mc = mc_dimension(mc_cfg, 12);
  const double mc_err = std::abs(mc.mean - std::log2(2.5));
  const bool mc_ok = mc_err <= 0.1;

  const bool pass = sm_err <= 1e-9 && w_ok && y_ok && mc_ok;
  return {pass, "|s_m - log2 3| = " + fmt(sm_err) + " (<= 1e-9), |Var W - 1/15| = " +
                    fmt(w_err) + " (<= 3 SE = " + fmt(3 * w_sim.se_var_w) +
                    "), |Var Y(t_m) - 2/3| = " + fmt(y_err) + " (<= 3 SE = " +
                    fmt(3 * y_sim.se_var_y[0]) + "), |mc dim - log2 2.5| = " +
                    fmt(mc_err) + " (<= 0.1)"};
}

// 9. Any report regenerated from its embedded config is byte-identical.
Outcome report_determinism() {
  TempDir dir;
  const std::string tree_path =
      dir.write("t.json", tree_to_json_text(uniform_tree(2, 7)));
  const std::string system_path = dir.write("sys.json", kProperSys);

  std::vector<json> configs = {
      {{"tool", "tree.validate"}, {"tree", tree_path}},
      {{"tool", "embed.check"}, {"tree", tree_path}},
      {{"tool", "dim.estimate"}, {"tree", tree_path}},
      {{"tool", "dim.kraft"}, {"tree", tree_path}, {"cuts", 25}},
      {{"tool", "sadic.check"}, {"system", system_path}},
      {{"tool", "sturmian.verdict"}, {"alpha", "e"}},
      {{"tool", "gw.simulate"},
       {"offspring", "uniform:2,3"},
       {"weights", "dirac:0.5"},
       {"depth", 4},
       {"trials", 100},
       {"s", {0.0, 1.0}}},
      {{"tool", "pipeline"},
       {"stages",
        {{{"tool", "gw.sample"},
          {"offspring", "uniform:2,3"},
          {"weights", "uniform:0,1"},
          {"depth", 6},
          {"seed", 9}},
         {{"tool", "embed.check"}},
         {{"tool", "dim.estimate"}}}}},
  };
  std::size_t identical = 0;
  for (const json& cfg : configs) {
    const std::string first = run_config_text(cfg.dump());
    const std::string again =
        run_config_text(json::parse(first)["config"].dump());
    identical += again == first;
  }
  return {identical == configs.size(),
          std::to_string(identical) + "/" + std::to_string(configs.size()) +
              " reports regenerated byte-identical"};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    double budget_s;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {"kraft identity", 1, kraft_identity},
      {"kraft dimension", 30, kraft_dimension},
      {"cut DP vs brute force", 10, dp_equals_brute},
      {"distortion box", 10, distortion_box},
      {"schoenberg test", 1, schoenberg},
      {"sturmian dichotomy", 60, sturmian_dichotomy},
      {"s-adic pipeline", 10, sadic_pipeline},
      {"gw closed forms", 300, gw_closed_forms},
      {"report determinism", 60, report_determinism},
  };

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = criteria[i].run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    const bool in_budget = secs <= criteria[i].budget_s;
    const bool pass = out.pass && in_budget;
    failures += !pass;
    std::ostringstream line;
    line << (pass ? "PASS" : "FAIL") << "  " << (i + 1) << "  "
         << criteria[i].name << ": " << out.detail << " [" << fmt(secs)
         << " s / budget " << fmt(criteria[i].budget_s) << " s]";
    if (!in_budget) line << " OVER BUDGET";
    std::cout << line.str() << "\n";
  }
  std::cout << "acceptance: " << (criteria.size() - failures) << "/"
            << criteria.size() << " criteria passed\n";
  return failures == 0 ? 0 : 1;
}
