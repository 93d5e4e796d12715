#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "ucantor/errors.hpp"
#include "ucantor/gw.hpp"
#include "ucantor/hausdorff.hpp"
#include "ucantor/tree.hpp"

using namespace ucantor;

TEST_CASE("offspring distributions parse with exact moments") {
  OffspringDist d3 = offspring_from_text("dirac:3");
  CHECK(d3.m == 3.0);
  CHECK(d3.var == 0.0);
  CHECK(d3.sample(0.0) == 3);
  CHECK(d3.sample(0.999) == 3);

  OffspringDist u = offspring_from_text("uniform:2,3");
  CHECK(u.m == doctest::Approx(2.5).epsilon(1e-15));
  CHECK(u.var == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(u.sample(0.0) == 2);
  CHECK(u.sample(0.75) == 3);

  OffspringDist t = offspring_from_text("table:2:0.5,3:0.5");
  CHECK(t.m == u.m);
  CHECK(t.var == u.var);

  // geometric on {2,3,...}: mean 2 + (1-q)/q, variance (1-q)/q^2
  OffspringDist g = offspring_from_text("geometric:0.5");
  CHECK(g.p.size() == 32);
  CHECK(g.p[0] == 0.0);
  CHECK(g.p[1] == 0.0);
  CHECK(g.m == doctest::Approx(3.0).epsilon(1e-6));
  CHECK(g.var == doctest::Approx(2.0).epsilon(1e-5));

  CHECK_THROWS_AS(offspring_from_text("dirac:1"), Error);
  CHECK_THROWS_AS(offspring_from_text("uniform:3,2"), Error);
  CHECK_THROWS_AS(offspring_from_text("bogus"), Error);
  CHECK_THROWS_AS(offspring_from_text("geometric:1.5"), Error);
}

TEST_CASE("weight distributions and their Mellin transforms") {
  WeightDist dl = weights_from_text("dirac:0.5");
  CHECK(dl.h(0.0) == 1.0);
  CHECK(dl.h(2.0) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(dl.atom_at_one() == 0.0);
  CHECK(dl.atom_at_max() == 1.0);
  CHECK(dl.sample(0.3) == 0.5);

  WeightDist un = weights_from_text("uniform:0,1");
  for (double s : {0.0, 1.0, 2.0, 3.5})
    CHECK(un.h(s) == doctest::Approx(1.0 / (s + 1.0)).epsilon(1e-12));
  CHECK(un.atom_at_one() == 0.0);
  CHECK(un.atom_at_max() == 0.0);

  // uniform on (a, 1]: h(s) = (1 - a^{s+1}) / ((1-a)(s+1))
  WeightDist ua = weights_from_text("uniform:0.3,1");
  for (double s : {0.0, 1.0, 2.0})
    CHECK(ua.h(s) == doctest::Approx((1.0 - std::pow(0.3, s + 1.0)) /
                                     (0.7 * (s + 1.0)))
                         .epsilon(1e-12));

  WeightDist tab = weights_from_text("table:0.5:0.5,1:0.5");
  CHECK(tab.h(1.0) == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(tab.atom_at_one() == 0.5);
  CHECK(tab.atom_at_max() == 0.5);

  CHECK(mellin_h(un, 2.0) == un.h(2.0));
  CHECK_THROWS_AS(mellin_h(un, -1.0), Error);
  CHECK_THROWS_AS(weights_from_text("uniform:0,0.9"), Error);
  CHECK_THROWS_AS(weights_from_text("dirac:0"), Error);
  CHECK_THROWS_AS(weights_from_text("dirac:1"), Error);
  CHECK_THROWS_AS(weights_from_text("table:1:1"), Error);
}

TEST_CASE("s_m roots match closed forms") {
  CHECK(solve_s_m(offspring_from_text("dirac:3"), weights_from_text("dirac:0.5")) ==
        doctest::Approx(std::log2(3.0)).epsilon(1e-9));
  CHECK(solve_s_m(offspring_from_text("dirac:2"), weights_from_text("dirac:0.5")) ==
        doctest::Approx(1.0).epsilon(1e-9));
  CHECK(solve_s_m(offspring_from_text("dirac:3"), weights_from_text("uniform:0,1")) ==
        doctest::Approx(2.0).epsilon(1e-9));
  CHECK(solve_s_m(offspring_from_text("uniform:2,3"), weights_from_text("dirac:0.5")) ==
        doctest::Approx(std::log2(2.5)).epsilon(1e-9));

  // rho({1}) >= 1/m keeps m*h(s) above 1 for every s
  CHECK_THROWS_AS(solve_s_m(offspring_from_text("dirac:2"),
                            weights_from_text("table:1:0.6,0.5:0.4")),
                  Error);
}

TEST_CASE("t_m thresholds") {
  TmResult t = solve_t_m(offspring_from_text("dirac:3"), weights_from_text("uniform:0,1"));
  REQUIRE(t.exists);
  CHECK(t.value == doctest::Approx(2.0 + std::sqrt(6.0)).epsilon(1e-9));

  TmResult t2 = solve_t_m(offspring_from_text("dirac:2"), weights_from_text("uniform:0,1"));
  REQUIRE(t2.exists);
  CHECK(t2.value == doctest::Approx(1.0 + std::sqrt(2.0)).epsilon(1e-9));

  TmResult none = solve_t_m(offspring_from_text("dirac:3"), weights_from_text("dirac:0.5"));
  CHECK_FALSE(none.exists);
  CHECK(none.note == "h(2s) = h(s)^2 identically for a point mass; no threshold");

  // a dominant atom caps h(2s)/h(s)^2 below m
  TmResult capped = solve_t_m(offspring_from_text("dirac:3"),
                              weights_from_text("table:0.5:0.9,0.2:0.1"));
  CHECK_FALSE(capped.exists);
  CHECK(capped.note == "sup h(2s)/h(s)^2 = 1/rho({lambda_max}) <= m; no threshold");
}

TEST_CASE("variance_y closed forms") {
  OffspringDist u23 = offspring_from_text("uniform:2,3");
  WeightDist dl = weights_from_text("dirac:0.5");
  // s = 0 reduces to var(W_n) = var * (1 - m^-n) / (m^2 - m)
  for (std::uint32_t n : {1u, 3u, 10u, 30u})
    CHECK(variance_y(u23, dl, 0.0, n) ==
          doctest::Approx((1.0 - std::pow(2.5, -double(n))) / 15.0)
              .epsilon(1e-12));

  // at the threshold r = 1 the increments are constant: 1 - 1/m + var/m^2
  OffspringDist d3 = offspring_from_text("dirac:3");
  WeightDist un = weights_from_text("uniform:0,1");
  const double tm = 2.0 + std::sqrt(6.0);
  CHECK(variance_y(d3, un, tm, 1) == doctest::Approx(2.0 / 3.0).epsilon(1e-9));
  CHECK(variance_y(d3, un, tm, 5) == doctest::Approx(10.0 / 3.0).epsilon(1e-9));
  CHECK(variance_y(d3, un, tm, 0) == 0.0);
}

TEST_CASE("sample_tree is deterministic and reduced") {
  GWConfig cfg;
  cfg.offspring = offspring_from_text("uniform:2,3");
  cfg.weights = weights_from_text("uniform:0,1");
  cfg.depth = 6;
  cfg.seed = 11;

  WeightedTree a = sample_tree(cfg);
  WeightedTree b = sample_tree(cfg);
  CHECK(structurally_equal(a, b));
  CHECK(validate(a).valid);
  CHECK(is_reduced(a));
  CHECK(a.max_depth() == 6);
  CHECK(a.weight(a.root()) == 1.0);

  cfg.seed = 12;
  CHECK_FALSE(structurally_equal(a, sample_tree(cfg)));

  // dirac/dirac pins the whole tree: ternary with weights 2^-n
  GWConfig det;
  det.offspring = offspring_from_text("dirac:3");
  det.weights = weights_from_text("dirac:0.5");
  det.depth = 3;
  WeightedTree t = sample_tree(det);
  CHECK(t.size() == 40);
  for (VertexId v = 0; v < t.size(); ++v)
    CHECK(t.weight(v) == std::pow(0.5, double(t.at(v).depth)));

  GWConfig capped = det;
  capped.depth = 10;
  capped.vertex_cap = 1000;
  CHECK_THROWS_AS(sample_tree(capped), Error);
}

TEST_CASE("martingale traces") {
  GWConfig cfg;
  cfg.offspring = offspring_from_text("uniform:2,3");
  cfg.weights = weights_from_text("dirac:0.5");
  cfg.depth = 6;
  cfg.seed = 5;
  MartingaleTrace tr = martingale_trace(cfg, {0.0, 1.0});
  REQUIRE(tr.z.size() == 7);
  CHECK(tr.z[0] == 1);
  for (std::size_t n = 1; n < tr.z.size(); ++n) CHECK(tr.z[n] >= 2 * tr.z[n - 1]);
  for (std::size_t n = 0; n < tr.z.size(); ++n)
    CHECK(tr.w[n] == doctest::Approx(double(tr.z[n]) / std::pow(2.5, double(n)))
                         .epsilon(1e-12));
  REQUIRE(tr.s_values == std::vector<double>{0.0, 1.0});
  REQUIRE(tr.y.size() == 2);
  // s = 0: the energy is the population, so Y_n(0) = W_n
  for (std::size_t n = 0; n < tr.z.size(); ++n)
    CHECK(tr.y[0][n] == doctest::Approx(tr.w[n]).epsilon(1e-12));
  CHECK(tr.y[1][0] == 1.0);
}

TEST_CASE("simulate aggregates independent trials") {
  GWConfig cfg;
  cfg.offspring = offspring_from_text("uniform:2,3");
  cfg.weights = weights_from_text("dirac:0.5");
  cfg.depth = 8;
  cfg.seed = 3;
  cfg.trials = 1500;
  GWSummary s = simulate(cfg, {0.0});
  CHECK(s.trials == 1500);
  CHECK(s.depth == 8);
  // E W_n = 1; Var W_8 is within a few standard errors of the exact value
  const double exact = variance_y(cfg.offspring, cfg.weights, 0.0, 8);
  CHECK(std::abs(s.mean_w - 1.0) < 4.0 * std::sqrt(exact / 1500.0));
  CHECK(std::abs(s.var_w - exact) < 4.0 * s.se_var_w);
  REQUIRE(s.var_y.size() == 1);
  CHECK(s.var_y[0] == doctest::Approx(s.var_w).epsilon(1e-12));

  GWSummary again = simulate(cfg, {0.0});
  CHECK(again.mean_w == s.mean_w);
  CHECK(again.var_w == s.var_w);
}

TEST_CASE("mc_measure on the deterministic tree") {
  GWConfig cfg;
  cfg.offspring = offspring_from_text("dirac:3");
  cfg.weights = weights_from_text("dirac:0.5");
  cfg.depth = 6;
  cfg.seed = 2;
  McMeasure mm = mc_measure(cfg, 3, 20);
  CHECK(mm.trials == 20);
  CHECK(mm.target_depth == 3);
  CHECK(mm.s_m == doctest::Approx(std::log2(3.0)).epsilon(1e-9));
  // the cylinder mass telescopes exactly to kappa(u)^{s_m} = 1/27
  CHECK(mm.mean_mass == doctest::Approx(1.0 / 27.0).epsilon(1e-12));
  CHECK(mm.mean_reference == doctest::Approx(1.0 / 27.0).epsilon(1e-12));
  CHECK(mm.se_diff < 1e-12);
  CHECK(mm.additivity_error < 1e-12);
}

TEST_CASE("mc_dimension tracks s_m") {
  GWConfig cfg;
  cfg.offspring = offspring_from_text("uniform:2,3");
  cfg.weights = weights_from_text("dirac:0.5");
  cfg.depth = 10;
  cfg.seed = 9;
  McDimension mc = mc_dimension(cfg, 5);
  CHECK(mc.trials == 5);
  CHECK(mc.estimates.size() == 5);
  CHECK(mc.s_m_reference == doctest::Approx(std::log2(2.5)).epsilon(1e-9));
  CHECK(std::abs(mc.mean - std::log2(2.5)) < 0.25);
  CHECK(mc.stddev >= 0.0);

  McDimension rerun = mc_dimension(cfg, 5);
  CHECK(rerun.mean == mc.mean);
}
