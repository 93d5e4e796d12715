#include "ucantor/runner.hpp"

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ucantor/embedding.hpp"
#include "ucantor/errors.hpp"
#include "ucantor/gw.hpp"
#include "ucantor/hausdorff.hpp"
#include "ucantor/json_io.hpp"
#include "ucantor/metric.hpp"
#include "ucantor/rng.hpp"
#include "ucantor/sadic.hpp"
#include "ucantor/sturmian.hpp"
#include "ucantor/tree.hpp"
#include "ucantor/version.hpp"

namespace ucantor {

namespace {

using json = nlohmann::json;

// Pipeline state: the tree produced by the latest generator stage.
struct PipeCtx {
  std::optional<WeightedTree> current;
};

std::string get_str(const json& cfg, const char* key) {
  if (!cfg.contains(key) || !cfg[key].is_string())
    throw Error::invalid(std::string("config: '") + key +
                         "' must be a string");
  return cfg[key].get<std::string>();
}

double get_num(const json& cfg, const char* key, double dflt) {
  if (!cfg.contains(key)) return dflt;
  if (!cfg[key].is_number())
    throw Error::invalid(std::string("config: '") + key +
                         "' must be a number");
  return cfg[key].get<double>();
}

std::uint64_t get_uint(const json& cfg, const char* key, std::uint64_t dflt) {
  if (!cfg.contains(key)) return dflt;
  if (!cfg[key].is_number_unsigned())
    throw Error::invalid(std::string("config: '") + key +
                         "' must be a nonnegative integer");
  return cfg[key].get<std::uint64_t>();
}

/// Resolve the tree input: explicit path beats the pipeline artifact.
WeightedTree need_tree(const json& cfg, json& echo, const PipeCtx& ctx,
                       const char* tool) {
  if (cfg.contains("tree")) {
    std::string path = get_str(cfg, "tree");
    echo["tree"] = path;
    return load_tree(path);
  }
  if (ctx.current) return *ctx.current;
  throw Error::invalid(std::string(tool) +
                       ": expects a tree; give \"tree\" or produce one "
                       "earlier in the pipeline");
}

json finite_or_null(double x) {
  if (std::isfinite(x)) return x;
  return nullptr;
}

json fit_to_json(const DecayFit& fit) {
  json out;
  out["max_children"] = fit.max_children;
  out["theta"] = fit.theta;
  out["c"] = fit.c;
  out["worst_ratio"] = fit.worst_ratio;
  json pd = json::array();
  for (const DepthFit& f : fit.per_depth)
    pd.push_back({{"depth", f.depth}, {"theta", f.theta}, {"c", f.c}});
  out["per_depth"] = pd;
  return out;
}

json run_tree_validate(const json& cfg, json& echo, PipeCtx& ctx) {
  WeightedTree t = need_tree(cfg, echo, ctx, "tree.validate");
  ValidationReport r = validate(t);
  json issues = json::array();
  for (const ValidationIssue& i : r.issues)
    issues.push_back(
        {{"code", i.code}, {"message", i.message}, {"ids", i.ids}});
  return {{"valid", r.valid}, {"issues", issues}};
}

json tree_summary(const WeightedTree& t) {
  return {{"vertices", t.size()},
          {"max_depth", t.max_depth()},
          {"root_weight", t.weight(t.root())},
          {"reduced", is_reduced(t)}};
}

json run_tree_load(const json& cfg, json& echo, PipeCtx& ctx) {
  WeightedTree t = need_tree(cfg, echo, ctx, "tree.load");
  json out = tree_summary(t);
  ctx.current = std::move(t);
  return out;
}

json run_tree_reduce(const json& cfg, json& echo, PipeCtx& ctx) {
  WeightedTree t = need_tree(cfg, echo, ctx, "tree.reduce");
  WeightedTree r = reduce(t);
  json out = tree_summary(r);
  ctx.current = std::move(r);
  return out;
}

json run_tree_telescope(const json& cfg, json& echo, PipeCtx& ctx) {
  WeightedTree t = need_tree(cfg, echo, ctx, "tree.telescope");
  const double delta = get_num(cfg, "delta", 0.5);
  echo["delta"] = delta;
  MappedTree m = telescope(t, delta);
  json out = tree_summary(m.tree);
  ctx.current = std::move(m.tree);
  return out;
}

json run_embed_check(const json& cfg, json& echo, PipeCtx& ctx) {
  WeightedTree t = need_tree(cfg, echo, ctx, "embed.check");
  EmbedCheckOptions opt;
  opt.theta_max = get_num(cfg, "theta_max", opt.theta_max);
  opt.c_ratio = get_num(cfg, "c_ratio", opt.c_ratio);
  opt.window = static_cast<std::uint32_t>(get_uint(cfg, "window", opt.window));
  echo["theta_max"] = opt.theta_max;
  echo["c_ratio"] = opt.c_ratio;
  echo["window"] = opt.window;
  bool reduced = is_reduced(t);
  if (!reduced) t = reduce(t);
  EmbedCheck r = check_embeddable(t, opt);
  json ws = json::array();
  for (const RatioWitness& w : r.witnesses)
    ws.push_back({{"ancestor", w.ancestor},
                  {"descendant", w.descendant},
                  {"gap", w.gap},
                  {"ratio", w.ratio},
                  {"excess", w.excess}});
  return {{"satisfied", r.satisfied},
          {"reason", r.reason},
          {"theta_stable", r.theta_stable},
          {"c_stable", r.c_stable},
          {"input_reduced", reduced},
          {"fit", fit_to_json(r.fit)},
          {"witnesses", ws}};
}

json run_embed_map(const json& cfg, json& echo, PipeCtx& ctx) {
  WeightedTree t = need_tree(cfg, echo, ctx, "embed.map");
  const std::uint32_t L = static_cast<std::uint32_t>(get_uint(cfg, "L", 0));
  const std::size_t samples =
      static_cast<std::size_t>(get_uint(cfg, "samples", 1000));
  const std::uint64_t seed = get_uint(cfg, "seed", 1);
  echo["L"] = L;
  echo["samples"] = samples;
  echo["seed"] = seed;
  if (!is_reduced(t)) t = reduce(t);
  DecayFit fit = fit_decay(t);
  EmbedParams params = make_params(fit, t.max_depth(), L);
  DistortionReport r = distortion_report(t, params, samples, seed);
  return {{"params",
           {{"M", r.params.M},
            {"c", r.params.c},
            {"theta", r.params.theta},
            {"L", r.params.L},
            {"sufficiency_ok", r.params.sufficiency_ok}}},
          {"box_lo", r.box_lo},
          {"box_hi", r.box_hi},
          {"min_ratio", r.min_ratio},
          {"max_ratio", r.max_ratio},
          {"pairs_used", r.pairs_used},
          {"pairs_skipped", r.pairs_skipped},
          {"contained", r.contained},
          {"worst_margin", r.worst_margin}};
}

json run_embed_schoenberg(const json& cfg, json& echo, PipeCtx&) {
  std::string path = get_str(cfg, "metric");
  echo["metric"] = path;
  const std::size_t base =
      static_cast<std::size_t>(get_uint(cfg, "base", 0));
  echo["base"] = base;
  FiniteMetric m = load_metric(path);
  SchoenbergResult r = schoenberg_test(m, base);
  return {{"embeddable", r.embeddable},
          {"rank", r.rank},
          {"min_eigenvalue", r.min_eigenvalue},
          {"tolerance", r.tolerance},
          {"eigenvalues", r.eigenvalues},
          {"base", r.base}};
}

json dim_report_json(const DimensionReport& r) {
  return {{"s_estimate", r.s_estimate},
          {"bracket", {r.s_lo, r.s_hi}},
          {"upper_bound", finite_or_null(r.upper_bound)},
          {"deltas", r.deltas},
          {"s_grid", r.s_grid},
          {"h_table", r.h_table},
          {"warnings", r.warnings}};
}

json run_dim_estimate(const json& cfg, json& echo, PipeCtx& ctx) {
  WeightedTree t = need_tree(cfg, echo, ctx, "dim.estimate");
  DimensionOptions opt;
  opt.tol = get_num(cfg, "tol", opt.tol);
  opt.dead_band = get_num(cfg, "dead_band", opt.dead_band);
  echo["tol"] = opt.tol;
  echo["dead_band"] = opt.dead_band;
  if (cfg.contains("deltas")) {
    if (!cfg["deltas"].is_array())
      throw Error::invalid("config: 'deltas' must be an array of numbers");
    opt.deltas.clear();
    for (const auto& v : cfg["deltas"]) {
      if (!v.is_number())
        throw Error::invalid("config: 'deltas' must be an array of numbers");
      opt.deltas.push_back(v.get<double>());
    }
    echo["deltas"] = opt.deltas;
  }
  return dim_report_json(estimate_dimension(t, opt));
}

json run_dim_kraft(const json& cfg, json& echo, PipeCtx& ctx) {
  WeightedTree t = need_tree(cfg, echo, ctx, "dim.kraft");
  const std::size_t cuts = static_cast<std::size_t>(get_uint(cfg, "cuts", 100));
  const std::uint64_t seed = get_uint(cfg, "seed", 1);
  echo["cuts"] = cuts;
  echo["seed"] = seed;
  double worst = 0.0;
  for (std::size_t i = 0; i < cuts; ++i) {
    FullSubtree cut = sample_full_cut(t, rng_draw(seed, i));
    worst = std::max(worst, std::abs(kraft_sum(t, cut) - 1.0));
  }
  WeightedTree kt = kraft_weight(t);
  json out = dim_report_json(estimate_dimension(kt));
  out["kraft_max_error"] = worst;
  out["cuts"] = cuts;
  return out;
}

json run_sadic_check(const json& cfg, json& echo, PipeCtx&) {
  std::string path = get_str(cfg, "system");
  echo["system"] = path;
  SAdicSystem sys = load_sadic(path);
  ProperCheck pc = check_proper(sys);
  json out;
  out["proper"] = pc.proper;
  if (pc.proper) {
    out["l"] = std::string(1, pc.l);
    out["r"] = std::string(1, pc.r);
  }
  std::size_t s0 = sys.s0;
  bool primitive = false;
  if (s0 > 0) {
    primitive = check_primitive(sys, s0);
  } else {
    const std::size_t cap =
        sys.periodic ? 8 : std::min<std::size_t>(8, sys.schedule.size());
    for (std::size_t w = 1; w <= cap; ++w)
      if (check_primitive(sys, w)) {
        s0 = w;
        primitive = true;
        break;
      }
  }
  out["primitive"] = primitive;
  out["s0"] = primitive || sys.s0 > 0 ? json(s0) : json(nullptr);
  const std::size_t span =
      sys.periodic ? 6 : std::min<std::size_t>(6, sys.schedule.size());
  json durand = json::array();
  for (std::size_t s = 1; s <= span; ++s)
    durand.push_back({{"r", 1}, {"s", s}, {"ratio", durand_ratio(sys, 1, s)}});
  out["durand"] = durand;
  out["weights"] = build_bratteli(sys, span).weights;
  return out;
}

json run_sadic_tree(const json& cfg, json& echo, PipeCtx& ctx) {
  std::string path = get_str(cfg, "system");
  const std::size_t depth = get_uint(cfg, "depth", 4);
  echo["system"] = path;
  echo["depth"] = depth;
  SAdicSystem sys = load_sadic(path);
  BratteliDiagram d = build_bratteli(sys, depth);
  WeightedTree t = diagram_to_tree(d);
  json sizes = json::array();
  for (const auto& lv : d.edges) sizes.push_back(lv.size());
  json out = tree_summary(t);
  out["weights"] = d.weights;
  out["edges_per_level"] = sizes;
  ctx.current = std::move(t);
  return out;
}

json cf_to_json(const ContinuedFraction& cf) {
  json out;
  out["a0"] = cf.a0;
  std::vector<long long> head(cf.quotients.begin(),
                              cf.quotients.begin() +
                                  std::min<std::size_t>(cf.quotients.size(), 16));
  out["quotients"] = head;
  out["periodic"] = cf.periodic;
  if (cf.periodic) {
    out["preperiod"] = cf.preperiod;
    out["period"] = cf.period;
  }
  out["reliable"] = cf.reliable;
  return out;
}

json run_sturmian_verdict(const json& cfg, json& echo, PipeCtx&) {
  std::string alpha = get_str(cfg, "alpha");
  const std::size_t window = get_uint(cfg, "depth", 64);
  echo["alpha"] = alpha;
  echo["depth"] = window;
  AlphaSpec spec = parse_alpha(alpha);
  ContinuedFraction cf = alpha_cf(spec, window);
  TypeVerdict v = bounded_type_verdict(cf, window);
  json bounded = nullptr;
  if (v.bounded == TypeVerdict::Bounded::yes) bounded = true;
  if (v.bounded == TypeVerdict::Bounded::no) bounded = false;
  return {{"alpha", alpha},
          {"value", alpha_value(spec)},
          {"bounded", bounded},
          {"embeddable", v.embeddable_known ? json(v.embeddable) : json(nullptr)},
          {"max_quotient", v.max_quotient},
          {"note", v.note},
          {"cf", cf_to_json(cf)}};
}

json run_sturmian_tree(const json& cfg, json& echo, PipeCtx& ctx) {
  std::string alpha = get_str(cfg, "alpha");
  const std::size_t radius = get_uint(cfg, "depth", 8);
  echo["alpha"] = alpha;
  echo["depth"] = radius;
  AlphaSpec spec = parse_alpha(alpha);
  ContinuedFraction cf = alpha_cf(spec, std::max<std::size_t>(radius, 64));
  WordTree wt = tree_of_words(cf, radius);
  json out = tree_summary(wt.tree);
  out["radius"] = wt.radius;
  out["window_len"] = wt.window_len;
  ctx.current = std::move(wt.tree);
  return out;
}

json run_sturmian_witness(const json& cfg, json& echo, PipeCtx&) {
  std::string alpha = get_str(cfg, "alpha");
  const std::size_t radius = get_uint(cfg, "depth", 30);
  const std::size_t target_b = get_uint(cfg, "n", 0);
  echo["alpha"] = alpha;
  echo["depth"] = radius;
  echo["n"] = target_b;
  AlphaSpec spec = parse_alpha(alpha);
  ContinuedFraction cf = alpha_cf(spec, std::max<std::size_t>(radius, 64));
  WordTree wt = tree_of_words(cf, radius);
  WitnessReport r = nonembed_witness(wt, cf, target_b);
  json chains = json::array();
  for (const WitnessChain& ch : r.chains)
    chains.push_back({{"levels", ch.levels}, {"increment", ch.increment}});
  json pairs = json::array();
  for (std::size_t i = 0; i < r.pairs.size() && i < 64; ++i)
    pairs.push_back({{"distance", r.pairs[i].distance},
                     {"ratio", r.pairs[i].ratio}});
  return {{"alpha", alpha},
          {"b_index", r.b_index},
          {"b_value", r.b_value},
          {"predicted_ratio", r.predicted_ratio},
          {"correlation", r.correlation},
          {"best", {{"distance", r.best.distance}, {"ratio", r.best.ratio}}},
          {"chains", chains},
          {"pairs", pairs}};
}

json tm_to_json(const TmResult& tm) {
  json out;
  out["exists"] = tm.exists;
  out["value"] = tm.exists ? json(tm.value) : json(nullptr);
  if (!tm.note.empty()) out["note"] = tm.note;
  return out;
}

json run_gw_solve(const json& cfg, json& echo, PipeCtx&) {
  std::string off = get_str(cfg, "offspring");
  std::string wei = get_str(cfg, "weights");
  echo["offspring"] = off;
  echo["weights"] = wei;
  OffspringDist p = offspring_from_text(off);
  WeightDist rho = weights_from_text(wei);
  json out;
  out["m"] = p.m;
  out["sigma2"] = p.var;
  out["s_m"] = solve_s_m(p, rho);
  out["t_m"] = tm_to_json(solve_t_m(p, rho));
  return out;
}

GWConfig gw_config(const json& cfg, json& echo) {
  GWConfig g;
  std::string off = get_str(cfg, "offspring");
  std::string wei = get_str(cfg, "weights");
  g.offspring = offspring_from_text(off);
  g.weights = weights_from_text(wei);
  g.depth = static_cast<std::uint32_t>(get_uint(cfg, "depth", 6));
  g.seed = get_uint(cfg, "seed", 1);
  echo["offspring"] = off;
  echo["weights"] = wei;
  echo["depth"] = g.depth;
  echo["seed"] = g.seed;
  return g;
}

json run_gw_simulate(const json& cfg, json& echo, PipeCtx&) {
  GWConfig g = gw_config(cfg, echo);
  g.trials = static_cast<std::size_t>(get_uint(cfg, "trials", 1000));
  echo["trials"] = g.trials;
  std::vector<double> s_list;
  if (cfg.contains("s")) {
    if (!cfg["s"].is_array())
      throw Error::invalid("config: 's' must be an array of numbers");
    for (const auto& v : cfg["s"]) {
      if (!v.is_number())
        throw Error::invalid("config: 's' must be an array of numbers");
      s_list.push_back(v.get<double>());
    }
  }
  echo["s"] = s_list;
  GWSummary sum = simulate(g, s_list);
  const double fn = static_cast<double>(sum.trials);
  json ys = json::array();
  for (std::size_t i = 0; i < s_list.size(); ++i) {
    const double hw = 1.96 * std::sqrt(sum.var_y[i] / fn);
    ys.push_back({{"s", s_list[i]},
                  {"mean", sum.mean_y[i]},
                  {"mean_ci95", {sum.mean_y[i] - hw, sum.mean_y[i] + hw}},
                  {"var", sum.var_y[i]},
                  {"se_var", sum.se_var_y[i]},
                  {"var_exact", variance_y(g.offspring, g.weights, s_list[i],
                                           g.depth)}});
  }
  MartingaleTrace tr = martingale_trace(g, s_list);
  json trace = {{"z", tr.z}, {"w", tr.w}, {"y", tr.y}};
  const double hw = 1.96 * std::sqrt(sum.var_w / fn);
  return {{"trials", sum.trials},
          {"depth", sum.depth},
          {"mean_w", sum.mean_w},
          {"mean_w_ci95", {sum.mean_w - hw, sum.mean_w + hw}},
          {"var_w", sum.var_w},
          {"se_var_w", sum.se_var_w},
          {"var_w_exact", variance_y(g.offspring, g.weights, 0.0, g.depth)},
          {"y", ys},
          {"trace", trace}};
}

json run_gw_sample(const json& cfg, json& echo, PipeCtx& ctx) {
  GWConfig g = gw_config(cfg, echo);
  WeightedTree t = sample_tree(g);
  json out = tree_summary(t);
  ctx.current = std::move(t);
  return out;
}

json run_tool(const std::string& tool, const json& cfg, json& echo,
              PipeCtx& ctx);

json run_pipeline(const json& cfg, json& echo, PipeCtx& ctx) {
  if (cfg.contains("stages") && !cfg["stages"].is_array())
    throw Error::invalid("config: 'stages' must be an array");
  json stages_echo = json::array();
  json stages_out = json::array();
  if (cfg.contains("stages")) {
    std::size_t k = 0;
    for (const auto& stage : cfg["stages"]) {
      if (!stage.is_object() || !stage.contains("tool") ||
          !stage["tool"].is_string())
        throw Error::invalid("pipeline: stage " + std::to_string(k) +
                             " needs a 'tool'");
      const std::string tool = stage["tool"].get<std::string>();
      json stage_echo;
      stage_echo["tool"] = tool;
      try {
        json result = run_tool(tool, stage, stage_echo, ctx);
        stages_out.push_back({{"tool", tool}, {"result", result}});
      } catch (const Error& e) {
        throw Error(e.code(), "pipeline stage " + std::to_string(k) + " (" +
                                  tool + "): " + e.what());
      }
      stages_echo.push_back(stage_echo);
      ++k;
    }
  }
  echo["stages"] = stages_echo;
  return {{"stages", stages_out}};
}

json run_tool(const std::string& tool, const json& cfg, json& echo,
              PipeCtx& ctx) {
  if (tool == "tree.validate") return run_tree_validate(cfg, echo, ctx);
  if (tool == "tree.load") return run_tree_load(cfg, echo, ctx);
  if (tool == "tree.reduce") return run_tree_reduce(cfg, echo, ctx);
  if (tool == "tree.telescope") return run_tree_telescope(cfg, echo, ctx);
  if (tool == "embed.check") return run_embed_check(cfg, echo, ctx);
  if (tool == "embed.map") return run_embed_map(cfg, echo, ctx);
  if (tool == "embed.schoenberg") return run_embed_schoenberg(cfg, echo, ctx);
  if (tool == "dim.estimate") return run_dim_estimate(cfg, echo, ctx);
  if (tool == "dim.kraft") return run_dim_kraft(cfg, echo, ctx);
  if (tool == "sadic.check") return run_sadic_check(cfg, echo, ctx);
  if (tool == "sadic.tree") return run_sadic_tree(cfg, echo, ctx);
  if (tool == "sturmian.verdict") return run_sturmian_verdict(cfg, echo, ctx);
  if (tool == "sturmian.tree") return run_sturmian_tree(cfg, echo, ctx);
  if (tool == "sturmian.witness") return run_sturmian_witness(cfg, echo, ctx);
  if (tool == "gw.solve") return run_gw_solve(cfg, echo, ctx);
  if (tool == "gw.simulate") return run_gw_simulate(cfg, echo, ctx);
  if (tool == "gw.sample") return run_gw_sample(cfg, echo, ctx);
  if (tool == "pipeline") return run_pipeline(cfg, echo, ctx);
  throw Error::invalid("config: unknown tool '" + tool + "'");
}

}  // namespace

std::string run_config_text(const std::string& config_json) {
  json cfg;
  try {
    cfg = json::parse(config_json);
  } catch (const json::exception& e) {
    throw Error::parse(std::string("config: ") + e.what());
  }
  if (!cfg.is_object()) throw Error::parse("config: expected an object");
  const std::string tool = get_str(cfg, "tool");
  PipeCtx ctx;
  json echo;
  echo["tool"] = tool;
  if (cfg.contains("format")) {
    const std::string fmt = get_str(cfg, "format");
    if (fmt != "json" && fmt != "csv")
      throw Error::invalid("config: 'format' must be \"json\" or \"csv\"");
    echo["format"] = fmt;
  }
  json result = run_tool(tool, cfg, echo, ctx);
  json report;
  report["tool"] = tool;
  report["version"] = kVersion;
  report["config"] = echo;
  report["result"] = result;
  return report.dump(1, ' ') + "\n";
}

}  // namespace ucantor
