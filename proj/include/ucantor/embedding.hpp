#pragma once

#include <cstdint>
#include <vector>

#include "ucantor/metric.hpp"
#include "ucantor/tree.hpp"

namespace ucantor {

// The constructive side of the embedding test: coordinates phi_r built from
// child indexes and weights, distortion measurement against the theoretical
// box, and the classical finite-metric positivity test.

struct EmbedParams {
  std::uint32_t M = 2;
  double c = 1.0;
  double theta = 0.5;
  std::uint32_t L = 2;
  std::uint32_t truncation_depth = 0;
  bool sufficiency_ok = false;  // theta^L < 1/(M c + 1)
};

/// Smallest L with theta^L < 1/(M c + 1). Requires theta in (0,1), c >= 1,
/// M >= 2.
std::uint32_t choose_L(std::uint32_t M, double c, double theta);

/// Params from a decay fit; L_override = 0 picks L via choose_L, a nonzero
/// value is taken as-is with sufficiency_ok recording whether the inequality
/// holds for it.
EmbedParams make_params(const DecayFit& fit, std::uint32_t truncation_depth,
                        std::uint32_t L_override = 0);

struct EmbeddedPoint {
  std::vector<double> coords;  // index r-1 holds phi_r
  double tail_bound = 0.0;     // additive per-coordinate truncation error
};

/// phi_r(x) = sum over j of g(v_{jL+r}) * kappa(v_{jL+r-1}), g = 1-based
/// child index; summed while jL+r stays within the path. Tail bound is
/// M c kappa(root) theta^D / (1 - theta^L) with D the truncation depth.
EmbeddedPoint embed_point(const WeightedTree& t, const EmbedParams& p, const BoundaryPoint& x);

struct PairSample {
  BoundaryPoint x, y;
  double d = 0.0;
  double ratio = 0.0;      // ||phi(x) - phi(y)|| / d
  double inflation = 0.0;  // tail slack added to the box for this pair
};

struct DistortionReport {
  EmbedParams params;
  double box_lo = 0.0;  // max(0, 1 - M c theta^L/(1-theta^L))
  double box_hi = 0.0;  // sqrt(L) M c/(1-theta^L)
  double min_ratio = 0.0;
  double max_ratio = 0.0;
  std::size_t pairs_used = 0;
  std::size_t pairs_skipped = 0;  // x = y draws
  bool contained = false;         // every pair inside its inflated box
  double worst_margin = 0.0;      // smallest slack to the box; negative = violation
  PairSample worst_pair;
};

/// Sample n_samples boundary pairs (uniform child choice at every vertex) and
/// compare ||phi(x)-phi(y)||/d against the box. The truncation tail widens
/// the box per pair by 2 sqrt(L) tail/d.
DistortionReport distortion_report(const WeightedTree& t, const EmbedParams& p,
                                   std::size_t n_samples, std::uint64_t seed);

/// Uniform random boundary point (each child equally likely at every step).
BoundaryPoint sample_boundary(const WeightedTree& t, std::uint64_t key);

struct SchoenbergResult {
  bool embeddable = false;
  std::size_t rank = 0;             // minimal Euclidean dimension when embeddable
  double min_eigenvalue = 0.0;
  double tolerance = 0.0;           // 1e-10 * max(1, spectral radius)
  std::vector<double> eigenvalues;  // ascending
  std::vector<double> witness;      // eigenvector of the most negative eigenvalue
  std::string base;                 // label of the base point used
};

/// Positivity test of the matrix A(x)_{y,z} = (d(x,y)^2 + d(x,z)^2
/// - d(y,z)^2)/2 over points y, z distinct from the base x: the metric
/// embeds isometrically in Euclidean space iff A(x) is PSD, and then the
/// rank of A(x) is the minimal dimension.
SchoenbergResult schoenberg_test(const FiniteMetric& m, std::size_t base_index = 0);

}  // namespace ucantor
