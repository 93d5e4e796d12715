#include "ucantor/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "ucantor/rng.hpp"

namespace ucantor {

std::uint32_t choose_L(std::uint32_t M, double c, double theta) {
  if (!(theta > 0.0 && theta < 1.0)) throw Error::invalid("choose_L: theta must lie in (0, 1)");
  if (!(c >= 1.0)) throw Error::invalid("choose_L: c must be >= 1");
  if (M < 2) throw Error::invalid("choose_L: M must be >= 2");
  const double target = 1.0 / (static_cast<double>(M) * c + 1.0);
  double pw = theta;
  for (std::uint32_t L = 1; L <= 1u << 20; ++L) {
    if (pw < target) return L;
    pw *= theta;
  }
  throw Error::internal("choose_L: no L found");
}

EmbedParams make_params(const DecayFit& fit, std::uint32_t truncation_depth,
                        std::uint32_t L_override) {
  EmbedParams p;
  p.M = std::max<std::uint32_t>(fit.max_children, 2);
  p.c = fit.c;
  p.theta = fit.theta;
  p.truncation_depth = truncation_depth;
  p.L = L_override ? L_override : choose_L(p.M, p.c, p.theta);
  p.sufficiency_ok =
      std::pow(p.theta, p.L) < 1.0 / (static_cast<double>(p.M) * p.c + 1.0);
  return p;
}

EmbeddedPoint embed_point(const WeightedTree& t, const EmbedParams& p, const BoundaryPoint& x) {
  if (p.L == 0) throw Error::invalid("embed_point: L must be positive");
  if (t.max_depth() < p.L)
    throw Error::domain("embed_point: truncation too shallow for one full block");
  const std::vector<VertexId> path = resolve(t, x);

  EmbeddedPoint out;
  out.coords.assign(p.L, 0.0);
  // path[k] is the depth-k vertex; term for depth k uses the child index of
  // path[k] within path[k-1] and the weight of path[k-1]
  for (std::size_t k = 1; k < path.size(); ++k) {
    const std::size_t r0 = (k - 1) % p.L;  // r = r0 + 1
    const double g = static_cast<double>(x.steps[k - 1] + 1);
    out.coords[r0] += g * t.weight(path[k - 1]);
  }
  const double thL = std::pow(p.theta, p.L);
  out.tail_bound = static_cast<double>(p.M) * p.c * t.weight(t.root()) *
                   std::pow(p.theta, static_cast<double>(p.truncation_depth)) / (1.0 - thL);
  return out;
}

BoundaryPoint sample_boundary(const WeightedTree& t, std::uint64_t key) {
  BoundaryPoint x;
  VertexId v = t.root();
  std::uint64_t stream = 0;
  while (!t.is_leaf(v)) {
    const std::size_t n = t.at(v).children.size();
    const std::uint64_t draw = rng_draw(key, stream++);
    const std::size_t pick = static_cast<std::size_t>(draw % n);
    x.steps.push_back(static_cast<std::uint32_t>(pick));
    v = t.at(v).children[pick];
  }
  return x;
}

DistortionReport distortion_report(const WeightedTree& t, const EmbedParams& p,
                                   std::size_t n_samples, std::uint64_t seed) {
  require_valid(t, "distortion_report");
  DistortionReport rep;
  rep.params = p;
  const double thL = std::pow(p.theta, p.L);
  rep.box_lo = std::max(0.0, 1.0 - static_cast<double>(p.M) * p.c * thL / (1.0 - thL));
  rep.box_hi = std::sqrt(static_cast<double>(p.L)) * static_cast<double>(p.M) * p.c / (1.0 - thL);
  rep.min_ratio = std::numeric_limits<double>::infinity();
  rep.max_ratio = -std::numeric_limits<double>::infinity();
  rep.contained = true;

  const double sqrtL = std::sqrt(static_cast<double>(p.L));
  double min_margin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n_samples; ++i) {
    const BoundaryPoint x = sample_boundary(t, mix64(seed + 2 * i));
    const BoundaryPoint y = sample_boundary(t, mix64(seed + 2 * i + 1));
    if (x.steps == y.steps) {
      ++rep.pairs_skipped;
      continue;
    }
    const double d = d_kappa(t, x, y);
    const EmbeddedPoint ex = embed_point(t, p, x);
    const EmbeddedPoint ey = embed_point(t, p, y);
    double s = 0.0;
    for (std::size_t r = 0; r < p.L; ++r) {
      const double dr = ex.coords[r] - ey.coords[r];
      s += dr * dr;
    }
    const double ratio = std::sqrt(s) / d;
    const double inflation = 2.0 * sqrtL * ex.tail_bound / d;

    rep.min_ratio = std::min(rep.min_ratio, ratio);
    rep.max_ratio = std::max(rep.max_ratio, ratio);
    const double margin =
        std::min(ratio - (rep.box_lo - inflation), (rep.box_hi + inflation) - ratio);
    if (margin < min_margin) {
      min_margin = margin;
      rep.worst_pair = PairSample{x, y, d, ratio, inflation};
    }
    if (margin < 0.0) rep.contained = false;
    ++rep.pairs_used;
  }
  if (rep.pairs_used == 0) {
    rep.min_ratio = 0.0;
    rep.max_ratio = 0.0;
    min_margin = 0.0;
  }
  rep.worst_margin = min_margin;
  return rep;
}

SchoenbergResult schoenberg_test(const FiniteMetric& m, std::size_t base_index) {
  validate_metric(m);
  if (base_index >= m.labels.size())
    throw Error::invalid("schoenberg_test: base index out of range");
  const std::size_t n = m.labels.size();

  std::vector<std::size_t> rest;
  for (std::size_t i = 0; i < n; ++i)
    if (i != base_index) rest.push_back(i);
  const std::size_t k = rest.size();

  Eigen::MatrixXd A(k, k);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      const double dxy = m.d[base_index][rest[i]];
      const double dxz = m.d[base_index][rest[j]];
      const double dyz = m.d[rest[i]][rest[j]];
      A(i, j) = 0.5 * (dxy * dxy + dxz * dxz - dyz * dyz);
    }
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(A);
  if (solver.info() != Eigen::Success)
    throw Error::internal("schoenberg_test: eigendecomposition failed");

  SchoenbergResult res;
  res.base = m.labels[base_index];
  const auto& ev = solver.eigenvalues();
  double radius = 0.0;
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    res.eigenvalues.push_back(ev[i]);
    radius = std::max(radius, std::abs(ev[i]));
  }
  res.tolerance = 1e-10 * std::max(1.0, radius);
  res.min_eigenvalue = ev.size() ? ev[0] : 0.0;
  res.embeddable = res.min_eigenvalue >= -res.tolerance;
  for (Eigen::Index i = 0; i < ev.size(); ++i)
    if (ev[i] > res.tolerance) ++res.rank;
  if (!res.embeddable) {
    const auto v = solver.eigenvectors().col(0);
    for (Eigen::Index i = 0; i < v.size(); ++i) res.witness.push_back(v[i]);
  }
  return res;
}

}  // namespace ucantor
