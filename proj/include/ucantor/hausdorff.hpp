#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ucantor/tree.hpp"

namespace ucantor {

// Dimension machinery: s-energy minimization over full finite subtrees,
// Kraft weights, and the delta-ladder dimension estimator.

/// Antichain of vertices whose cylinders partition the boundary, obtained by
/// cutting whole sibling families ("full"). Stored as the boundary set.
struct FullSubtree {
  std::vector<VertexId> boundary;
};

/// Check antichain + coverage + fullness. Throws Error::domain naming the
/// offending vertices when invalid.
void require_full_subtree(const WeightedTree& t, const FullSubtree& cut);

/// Product over strict ancestors u of 1/(child count of u); K(root) = 1.
/// Returns a tree of the same shape with weights replaced by K.
WeightedTree kraft_weight(const WeightedTree& t);

/// Sum of K over the cut; equals 1 for every full subtree (Kraft identity).
double kraft_sum(const WeightedTree& t, const FullSubtree& cut);

/// Random full cut: walking down from the root, every internal vertex either
/// joins the boundary or expands all its children (probability expand_prob,
/// counter-based on key). The root always expands; leaves always stop.
FullSubtree sample_full_cut(const WeightedTree& t, std::uint64_t key,
                            double expand_prob = 0.7);

/// Exact infimum of sum kappa(v)^s over full subtrees all of whose boundary
/// weights are < delta, by bottom-up DP. Requires every leaf weight < delta
/// ("insufficient depth" otherwise) and s >= 0.
double h_s_delta(const WeightedTree& t, double s, double delta);

struct DimensionReport {
  double s_estimate = 0.0;
  double s_lo = 0.0;            // final bisection bracket
  double s_hi = 0.0;
  std::vector<double> deltas;   // ladder actually used, decreasing
  std::vector<double> s_grid;   // rows of the table
  std::vector<std::vector<double>> h_table;  // h_table[i][j] = H^{s_grid[i]}_{deltas[j]}
  double upper_bound = 0.0;     // ln M / |ln theta| from the decay fit; inf if theta = 1
  std::vector<std::string> warnings;
};

struct DimensionOptions {
  std::vector<double> deltas;   // empty = geometric auto-ladder
  double s_lo = 0.0;
  double s_hi = -1.0;           // < 0 = derive from the decay-fit upper bound
  double tol = 0.01;
  double dead_band = 0.02;      // |log-log slope| below this is inconclusive
};

/// Bisect on s for the sign change of the slope of ln H^s_delta against
/// ln(1/delta): a slope clearing the dead band upward means s is below the
/// dimension. Slopes inside the band count as "not below" and add a warning.
DimensionReport estimate_dimension(const WeightedTree& t, const DimensionOptions& opt = {});

/// ln M / |ln theta|; +inf with the convention that theta = 1 carries no
/// decay information.
double dimension_upper_bound(const DecayFit& fit);

}  // namespace ucantor
