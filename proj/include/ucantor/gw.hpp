#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "ucantor/tree.hpp"

namespace ucantor {

// Reduced Galton-Watson random trees with multiplicative random weights:
// offspring laws on {2,3,...}, the weight Mellin transform h(s), the
// dimension root s_m of m*h(s) = 1, the L2 threshold t_m, martingale
// traces, and Monte Carlo estimators. Sampling is counter-based (rng.hpp)
// so a (config, seed) pair pins the tree bit-for-bit.

struct OffspringDist {
  std::vector<double> p;  // p[k] = P(N = k); p[0] = p[1] = 0
  double m = 0.0;         // mean
  double var = 0.0;       // variance
  std::string text;       // canonical "dirac:3" style tag

  std::size_t sample(double u) const;  // u in [0,1)
};

/// "dirac:K" | "uniform:A,B" | "table:K:P,K:P,..." | "geometric:P".
/// Geometric means P(N = k) = P(1-P)^(k-2) on {2,3,...}, truncated at the
/// 1 - 1e-9 quantile and renormalized; m and var reflect the truncation.
OffspringDist offspring_from_text(const std::string& text);

struct WeightDist {
  enum class Kind : std::uint8_t { dirac, uniform, table };
  Kind kind = Kind::dirac;
  double lambda0 = 0.5;  // dirac atom
  double a = 0.0;        // uniform on (a, 1]
  std::vector<std::pair<double, double>> table;  // (lambda, prob)
  std::string text;

  double h(double s) const;        // Mellin transform, closed form
  double atom_at_one() const;      // rho({1})
  double atom_at_max() const;      // mass at the largest lambda (0 if continuous)
  double sample(double u) const;   // u in [0,1) -> lambda in (0,1]
};

/// "dirac:L" | "uniform:A,B" (B must be 1) | "table:L:P,L:P,...".
WeightDist weights_from_text(const std::string& text);

double mellin_h(const WeightDist& rho, double s);

struct GWConfig {
  OffspringDist offspring;
  WeightDist weights;
  std::uint32_t depth = 6;
  std::uint64_t seed = 1;
  std::size_t trials = 1;
  std::size_t vertex_cap = 10'000'000;
};

/// One random tree: kappa(root) = 1, every vertex draws >= 2 children from
/// the offspring law, kappa(child) = lambda * kappa(parent). Deterministic
/// in (config.seed, structure): per-vertex counter keys.
WeightedTree sample_tree(const GWConfig& cfg);

/// Root of m*h(s) = 1, bisected to 1e-12. The map is strictly decreasing;
/// Error::domain when rho({1}) >= 1/m (no root).
double solve_s_m(const OffspringDist& p, const WeightDist& rho);

struct TmResult {
  bool exists = false;
  double value = 0.0;
  std::string note;  // why there is no threshold, when exists = false
};

/// Root of h(2s) = m*h(s)^2. A point-mass rho makes the ratio identically 1
/// (no threshold); a largest atom of mass >= 1/m caps it below m.
TmResult solve_t_m(const OffspringDist& p, const WeightDist& rho);

struct MartingaleTrace {
  std::vector<std::uint64_t> z;           // Z_0..Z_depth
  std::vector<double> w;                  // W_n = Z_n / m^n
  std::vector<double> s_values;           // evaluation points
  std::vector<std::vector<double>> h_s;   // h_s[i][n] = H_n^{s_i}
  std::vector<std::vector<double>> y;     // y[i][n] = Y_n(s_i)
};

/// Per-generation populations and s-energies of the tree drawn from cfg.seed.
MartingaleTrace martingale_trace(const GWConfig& cfg,
                                 const std::vector<double>& s_list);

struct GWSummary {
  std::size_t trials = 0;
  std::uint32_t depth = 0;
  double mean_w = 0.0;   // sample mean of W_depth
  double var_w = 0.0;    // sample variance (unbiased)
  double se_var_w = 0.0; // standard error of that variance estimate
  std::vector<double> s_values;
  std::vector<double> mean_y;
  std::vector<double> var_y;
  std::vector<double> se_var_y;
};

/// Independent trials (seed stream split per trial), aggregated at the final
/// generation.
GWSummary simulate(const GWConfig& cfg, const std::vector<double>& s_list);

/// Exact Var(Y_n(s)) from the second-moment recursion:
/// (r - 1/m + var/m^2) * sum_{j<n} r^j with r = h(2s)/(m*h(s)^2).
/// At s = 0 this is the classical var(W_n) = var*(1-m^-n)/(m^2-m); at the
/// threshold t_m (r = 1) the per-step increment is 1 - 1/m + var/m^2.
double variance_y(const OffspringDist& p, const WeightDist& rho, double s,
                  std::uint32_t n);

struct McDimension {
  double mean = 0.0;
  double stddev = 0.0;
  double se = 0.0;
  double s_m_reference = 0.0;
  std::size_t trials = 0;
  std::vector<double> estimates;
};

/// estimate_dimension over sampled trees vs the closed-form s_m.
McDimension mc_dimension(const GWConfig& cfg, std::size_t trials);

struct McMeasure {
  std::uint32_t target_depth = 0;
  double s_m = 0.0;
  double mean_mass = 0.0;       // mean of mu([u]) over trials
  double mean_reference = 0.0;  // mean of kappa(u)^{s_m}
  double se_diff = 0.0;         // SE of mass - reference
  double additivity_error = 0.0;  // worst relative cut-sum mismatch seen
  std::size_t trials = 0;
};

/// Cylinder-mass estimator: u = leftmost vertex at target_depth, mass =
/// H^{s_m} of the deepest cut restricted below u. E[mass] = kappa(u)^{s_m}.
McMeasure mc_measure(const GWConfig& cfg, std::uint32_t target_depth,
                     std::size_t trials);

}  // namespace ucantor
