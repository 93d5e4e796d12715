#pragma once

#include <string>
#include <vector>

#include "ucantor/errors.hpp"

namespace ucantor {

/// Finite metric space given by a labeled, symmetric distance matrix with
/// zero diagonal, positive off-diagonal entries and the triangle inequality.
struct FiniteMetric {
  std::vector<std::string> labels;
  std::vector<std::vector<double>> d;
};

/// Throws Error::domain on the first violated metric axiom. Symmetry is
/// exact: the matrix is input data, not a computation.
void validate_metric(const FiniteMetric& m);

// CSV layout: header row with the n labels, then n rows of n numbers.
FiniteMetric metric_from_csv_text(const std::string& text);
std::string metric_to_csv_text(const FiniteMetric& m);
FiniteMetric load_metric(const std::string& path);

/// Euclidean distance matrix of a point cloud (row = point), with labels
/// p0, p1, ...
FiniteMetric points_to_metric(const std::vector<std::vector<double>>& points);

}  // namespace ucantor
