// Command-line front end. Builds a config document per subcommand, hands it
// to the shared library's report runner, and writes the result; the tree
// producing subcommands go through the opaque handle API instead so their
// output is a plain tree artifact, usable as input elsewhere.

#include <cinttypes>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "ucantor.h"

namespace {

using json = nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitDomain = 1;
constexpr int kExitUsage = 2;

const char* status_name(ucantor_status s) {
  switch (s) {
    case UCANTOR_OK: return "ok";
    case UCANTOR_EINVAL: return "invalid_argument";
    case UCANTOR_EDOMAIN: return "domain";
    case UCANTOR_EPARSE: return "parse";
    case UCANTOR_EIO: return "io";
    case UCANTOR_EINTERNAL: return "internal";
  }
  return "unknown";
}

// Domain and internal failures exit 1, everything else is a usage-class
// failure (bad flags, malformed or missing files) and exits 2.
int exit_code(ucantor_status s) {
  return (s == UCANTOR_EDOMAIN || s == UCANTOR_EINTERNAL) ? kExitDomain
                                                          : kExitUsage;
}

int fail(ucantor_status s, const std::string& message) {
  json err = {{"error",
               {{"code", static_cast<int>(s)},
                {"status", status_name(s)},
                {"message", message}}}};
  std::cerr << err.dump() << "\n";
  const int code = exit_code(s);
  if (code == kExitUsage) std::cerr << "usage: see 'ucantor --help'\n";
  return code;
}

int fail_last(ucantor_status s) { return fail(s, ucantor_last_error()); }

int write_out(const std::string& path, const std::string& text) {
  if (path == "-") {
    std::cout << text;
    return kExitOk;
  }
  std::ofstream f(path, std::ios::binary);
  f << text;
  f.flush();
  if (!f.good()) return fail(UCANTOR_EIO, "cannot write " + path);
  return kExitOk;
}

bool read_file(const std::string& path, std::string& out, int& rc) {
  std::ifstream f(path, std::ios::binary);
  if (!f.good()) {
    rc = fail(UCANTOR_EIO, "cannot read " + path);
    return false;
  }
  std::ostringstream ss;
  ss << f.rdbuf();
  out = ss.str();
  return true;
}

std::string csv_num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// Plot-ready table: rows are s values, columns the delta ladder.
std::string dim_csv(const json& result) {
  std::ostringstream out;
  out << "s";
  for (const auto& d : result["deltas"]) out << "," << csv_num(d.get<double>());
  out << "\n";
  const auto& grid = result["s_grid"];
  const auto& table = result["h_table"];
  for (std::size_t i = 0; i < grid.size(); ++i) {
    out << csv_num(grid[i].get<double>());
    for (const auto& h : table[i]) out << "," << csv_num(h.get<double>());
    out << "\n";
  }
  return out.str();
}

// Per-generation trace of the illustrative tree: populations, the
// normalized martingale, and one column per requested s.
std::string gw_csv(const json& result) {
  const auto& trace = result["trace"];
  std::ostringstream out;
  out << "n,z,w";
  for (const auto& y : result["y"]) out << ",y_" << csv_num(y["s"].get<double>());
  out << "\n";
  const auto& z = trace["z"];
  const auto& w = trace["w"];
  const auto& ys = trace["y"];
  for (std::size_t n = 0; n < z.size(); ++n) {
    out << n << "," << z[n].get<std::uint64_t>() << ","
        << csv_num(w[n].get<double>());
    for (const auto& row : ys) out << "," << csv_num(row[n].get<double>());
    out << "\n";
  }
  return out.str();
}

// Run one config through the library; emit JSON, or the tool's CSV view
// when the config asks for it.
int emit_report(const std::string& config_text, const std::string& out_path) {
  char* report = nullptr;
  ucantor_status s = ucantor_run(config_text.c_str(), &report);
  if (s != UCANTOR_OK) return fail_last(s);
  std::string text(report);
  ucantor_text_free(report);
  json doc = json::parse(text);
  if (doc["config"].value("format", "json") == "csv") {
    const std::string tool = doc["tool"].get<std::string>();
    if (tool == "dim.estimate" || tool == "dim.kraft")
      return write_out(out_path, dim_csv(doc["result"]));
    if (tool == "gw.simulate")
      return write_out(out_path, gw_csv(doc["result"]));
    return fail(UCANTOR_EINVAL, "no csv view for " + tool);
  }
  return write_out(out_path, text);
}

int emit_report(const json& cfg, const std::string& out_path) {
  return emit_report(cfg.dump(), out_path);
}

int emit_tree(ucantor_tree* t, const std::string& out_path) {
  char* text = nullptr;
  ucantor_status s = ucantor_tree_to_json(t, &text);
  ucantor_tree_free(t);
  if (s != UCANTOR_OK) return fail_last(s);
  std::string doc(text);
  ucantor_text_free(text);
  return write_out(out_path, doc);
}

// "auto" or a coordinate count; 0 means choose from the fitted decay.
bool parse_coords(const std::string& text, std::uint64_t& out) {
  if (text == "auto") {
    out = 0;
    return true;
  }
  try {
    std::size_t pos = 0;
    unsigned long long v = std::stoull(text, &pos);
    if (pos != text.size()) return false;
    out = v;
    return true;
  } catch (...) {
    return false;
  }
}

struct SeedOpt {
  std::uint64_t value = 1;
};

void add_seed(CLI::App* cmd, SeedOpt& seed) {
  cmd->add_option("--seed", seed.value, "RNG seed")
      ->envname("UCANTOR_SEED")
      ->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ultrametric Cantor set toolkit"};
  app.set_version_flag("--version", ucantor_version());
  app.require_subcommand(1);
  int rc = kExitOk;

  // tree ------------------------------------------------------------
  auto* tree = app.add_subcommand("tree", "weighted tree utilities");
  tree->require_subcommand(1);
  {
    static std::string path, out = "-";
    auto* c = tree->add_subcommand("validate", "check tree invariants");
    c->add_option("tree", path, "tree JSON file")->required();
    c->add_option("--out", out, "output path, - for stdout");
    c->callback([&] {
      rc = emit_report(json{{"tool", "tree.validate"}, {"tree", path}}, out);
    });
  }
  {
    static std::string path, out = "-";
    auto* c = tree->add_subcommand("reduce", "contract unary chains");
    c->add_option("tree", path, "tree JSON file")->required();
    c->add_option("--out", out, "output path, - for stdout");
    c->callback([&] {
      ucantor_tree* in = nullptr;
      if (auto s = ucantor_tree_load(path.c_str(), &in)) {
        rc = fail_last(s);
        return;
      }
      ucantor_tree* red = nullptr;
      ucantor_status s = ucantor_tree_reduce(in, &red);
      ucantor_tree_free(in);
      rc = s == UCANTOR_OK ? emit_tree(red, out) : fail_last(s);
    });
  }
  {
    static std::string path, out = "-";
    static double delta = 0.5;
    auto* c = tree->add_subcommand("telescope", "regroup levels by weight drop");
    c->add_option("tree", path, "tree JSON file")->required();
    c->add_option("--delta", delta, "weight drop per level, in (0,1)")
        ->capture_default_str();
    c->add_option("--out", out, "output path, - for stdout");
    c->callback([&] {
      ucantor_tree* in = nullptr;
      if (auto s = ucantor_tree_load(path.c_str(), &in)) {
        rc = fail_last(s);
        return;
      }
      ucantor_tree* tt = nullptr;
      ucantor_status s = ucantor_tree_telescope(in, delta, &tt);
      ucantor_tree_free(in);
      rc = s == UCANTOR_OK ? emit_tree(tt, out) : fail_last(s);
    });
  }

  // embed -----------------------------------------------------------
  auto* embed = app.add_subcommand("embed", "Euclidean embedding analysis");
  embed->require_subcommand(1);
  {
    static std::string path, out = "-";
    static double theta_max = 0.995, c_ratio = 2.0;
    static std::uint64_t window = 5;
    auto* c = embed->add_subcommand("check", "geometric decay criterion");
    c->add_option("tree", path, "tree JSON file")->required();
    c->add_option("--theta-max", theta_max, "largest admissible decay rate")
        ->capture_default_str();
    c->add_option("--c-ratio", c_ratio, "allowed c spread across depths")
        ->capture_default_str();
    c->add_option("--window", window, "trailing depths for stability")
        ->capture_default_str();
    c->add_option("--out", out, "output path, - for stdout");
    c->callback([&] {
      rc = emit_report(json{{"tool", "embed.check"},
                            {"tree", path},
                            {"theta_max", theta_max},
                            {"c_ratio", c_ratio},
                            {"window", window}},
                       out);
    });
  }
  {
    static std::string path, out = "-", coords = "auto";
    static std::uint64_t samples = 1000;
    static SeedOpt seed;
    auto* c = embed->add_subcommand("map", "distortion of the coordinate map");
    c->add_option("tree", path, "tree JSON file")->required();
    c->add_option("--L", coords, "coordinate count, or auto")
        ->capture_default_str();
    c->add_option("--samples", samples, "boundary pairs to sample")
        ->capture_default_str();
    add_seed(c, seed);
    c->add_option("--out", out, "output path, - for stdout");
    c->callback([&] {
      std::uint64_t L = 0;
      if (!parse_coords(coords, L)) {
        rc = fail(UCANTOR_EINVAL, "--L wants 'auto' or an integer");
        return;
      }
      rc = emit_report(json{{"tool", "embed.map"},
                            {"tree", path},
                            {"L", L},
                            {"samples", samples},
                            {"seed", seed.value}},
                       out);
    });
  }
  {
    static std::string path, out = "-";
    static std::uint64_t base = 0;
    auto* c = embed->add_subcommand("schoenberg", "finite metric test");
    c->add_option("metric", path, "distance matrix CSV")->required();
    c->add_option("--base", base, "index of the base point")
        ->capture_default_str();
    c->add_option("--out", out, "output path, - for stdout");
    c->callback([&] {
      rc = emit_report(json{{"tool", "embed.schoenberg"},
                            {"metric", path},
                            {"base", base}},
                       out);
    });
  }

  // dim -------------------------------------------------------------
  auto* dim = app.add_subcommand("dim", "Hausdorff dimension estimators");
  dim->require_subcommand(1);
  {
    static std::string path, out = "-", format = "json";
    static std::vector<double> deltas;
    static double tol = 0.01, dead_band = 0.02;
    auto* c = dim->add_subcommand("estimate", "delta ladder bisection");
    c->add_option("tree", path, "tree JSON file")->required();
    c->add_option("--deltas", deltas, "ladder of cut scales")->delimiter(',');
    c->add_option("--tol", tol, "bisection tolerance")->capture_default_str();
    c->add_option("--dead-band", dead_band, "slope band treated as flat")
        ->capture_default_str();
    c->add_option("--format", format, "json or csv (h table)")
        ->check(CLI::IsMember({"json", "csv"}))
        ->capture_default_str();
    c->add_option("--out", out, "output path, - for stdout");
    c->callback([&] {
      json cfg{{"tool", "dim.estimate"},
               {"tree", path},
               {"tol", tol},
               {"dead_band", dead_band},
               {"format", format}};
      if (!deltas.empty()) cfg["deltas"] = deltas;
      rc = emit_report(cfg, out);
    });
  }
  {
    static std::string path, out = "-";
    static std::uint64_t cuts = 100;
    static SeedOpt seed;
    auto* c = dim->add_subcommand("kraft", "Kraft reweighting and identity");
    c->add_option("tree", path, "tree JSON file")->required();
    c->add_option("--cuts", cuts, "random full cuts to check")
        ->capture_default_str();
    add_seed(c, seed);
    c->add_option("--out", out, "output path, - for stdout");
    c->callback([&] {
      rc = emit_report(json{{"tool", "dim.kraft"},
                            {"tree", path},
                            {"cuts", cuts},
                            {"seed", seed.value}},
                       out);
    });
  }

  // sadic -----------------------------------------------------------
  auto* sadic = app.add_subcommand("sadic", "substitution systems");
  sadic->require_subcommand(1);
  {
    static std::string path, out = "-";
    auto* c = sadic->add_subcommand("check", "properness and primitivity");
    c->add_option("system", path, "system JSON file")->required();
    c->add_option("--out", out, "output path, - for stdout");
    c->callback([&] {
      rc = emit_report(json{{"tool", "sadic.check"}, {"system", path}}, out);
    });
  }
  {
    static std::string path, out = "-";
    static std::uint64_t depth = 4;
    auto* c = sadic->add_subcommand("tree", "Michon tree of the diagram");
    c->add_option("system", path, "system JSON file")->required();
    c->add_option("--depth", depth, "diagram levels")->capture_default_str();
    c->add_option("--out", out, "output path, - for stdout");
    c->callback([&] {
      std::string text;
      if (!read_file(path, text, rc)) return;
      ucantor_tree* t = nullptr;
      ucantor_status s = ucantor_sadic_tree(text.c_str(), depth, &t);
      rc = s == UCANTOR_OK ? emit_tree(t, out) : fail_last(s);
    });
  }

  // sturmian ----------------------------------------------------------
  auto* sturmian = app.add_subcommand("sturmian", "rotation subshifts");
  sturmian->require_subcommand(1);
  {
    static std::string alpha, out = "-";
    static std::uint64_t depth = 64;
    auto* c = sturmian->add_subcommand("verdict", "bounded type decision");
    c->add_option("--alpha", alpha, "golden|sqrt2|e|quadratic|float")
        ->required();
    c->add_option("--depth", depth, "quotients inspected")
        ->capture_default_str();
    c->add_option("--out", out, "output path, - for stdout");
    c->callback([&] {
      rc = emit_report(json{{"tool", "sturmian.verdict"},
                            {"alpha", alpha},
                            {"depth", depth}},
                       out);
    });
  }
  {
    static std::string alpha, out = "-";
    static std::uint64_t depth = 8;
    auto* c = sturmian->add_subcommand("tree", "tree of centered words");
    c->add_option("--alpha", alpha, "golden|sqrt2|e|quadratic|float")
        ->required();
    c->add_option("--depth", depth, "cell radius cutoff")
        ->capture_default_str();
    c->add_option("--out", out, "output path, - for stdout");
    c->callback([&] {
      ucantor_tree* t = nullptr;
      ucantor_status s = ucantor_sturmian_tree(alpha.c_str(), depth, &t);
      rc = s == UCANTOR_OK ? emit_tree(t, out) : fail_last(s);
    });
  }
  {
    static std::string alpha, out = "-";
    static std::uint64_t depth = 30, n = 0;
    auto* c = sturmian->add_subcommand("witness", "non-embeddability witness");
    c->add_option("--alpha", alpha, "golden|sqrt2|e|quadratic|float")
        ->required();
    c->add_option("--n", n, "multiplicative quotient index, 0 = largest")
        ->capture_default_str();
    c->add_option("--depth", depth, "cell radius cutoff")
        ->capture_default_str();
    c->add_option("--out", out, "output path, - for stdout");
    c->callback([&] {
      rc = emit_report(json{{"tool", "sturmian.witness"},
                            {"alpha", alpha},
                            {"n", n},
                            {"depth", depth}},
                       out);
    });
  }

  // gw -----------------------------------------------------------------
  auto* gw = app.add_subcommand("gw", "random trees");
  gw->require_subcommand(1);
  {
    static std::string offspring, weights, out = "-", format = "json";
    static std::uint64_t depth = 6, trials = 1000;
    static std::vector<double> s_list;
    static SeedOpt seed;
    auto* c = gw->add_subcommand("simulate", "martingale statistics");
    c->add_option("--offspring", offspring, "dirac:K|uniform:A,B|table:K:P,...")
        ->required();
    c->add_option("--weights", weights, "dirac:L|uniform:A,1|table:L:P,...")
        ->required();
    c->add_option("--depth", depth, "generations")->capture_default_str();
    c->add_option("--trials", trials, "independent trees")
        ->capture_default_str();
    c->add_option("--s", s_list, "martingale exponents")->delimiter(',');
    add_seed(c, seed);
    c->add_option("--format", format, "json or csv (trace)")
        ->check(CLI::IsMember({"json", "csv"}))
        ->capture_default_str();
    c->add_option("--out", out, "output path, - for stdout");
    c->callback([&] {
      rc = emit_report(json{{"tool", "gw.simulate"},
                            {"offspring", offspring},
                            {"weights", weights},
                            {"depth", depth},
                            {"trials", trials},
                            {"s", s_list},
                            {"seed", seed.value},
                            {"format", format}},
                       out);
    });
  }
  {
    static std::string offspring, weights, out = "-";
    auto* c = gw->add_subcommand("solve", "closed-form thresholds");
    c->add_option("--offspring", offspring, "dirac:K|uniform:A,B|table:K:P,...")
        ->required();
    c->add_option("--weights", weights, "dirac:L|uniform:A,1|table:L:P,...")
        ->required();
    c->add_option("--out", out, "output path, - for stdout");
    c->callback([&] {
      rc = emit_report(json{{"tool", "gw.solve"},
                            {"offspring", offspring},
                            {"weights", weights}},
                       out);
    });
  }

  // pipelines ----------------------------------------------------------
  {
    static std::string path, out = "-";
    auto* c = app.add_subcommand("pipeline", "staged generate and analyze");
    c->add_option("spec", path, "stage list JSON file")->required();
    c->add_option("--out", out, "output path, - for stdout");
    c->callback([&] {
      std::string text;
      if (!read_file(path, text, rc)) return;
      json doc;
      try {
        doc = json::parse(text);
      } catch (const json::exception& e) {
        rc = fail(UCANTOR_EPARSE, std::string("pipeline spec: ") + e.what());
        return;
      }
      json cfg{{"tool", "pipeline"}};
      if (doc.is_array())
        cfg["stages"] = doc;
      else if (doc.is_object() && doc.contains("stages"))
        cfg["stages"] = doc["stages"];
      else {
        rc = fail(UCANTOR_EPARSE, "pipeline spec: expected stages");
        return;
      }
      rc = emit_report(cfg, out);
    });
  }
  {
    static std::string path, out = "-";
    auto* c = app.add_subcommand("run", "rerun a saved config");
    c->add_option("config", path, "config JSON file")->required();
    c->add_option("--out", out, "output path, - for stdout");
    c->callback([&] {
      std::string text;
      if (!read_file(path, text, rc)) return;
      rc = emit_report(text, out);
    });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }
  return rc;
}
