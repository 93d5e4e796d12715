#include "ucantor/metric.hpp"

#include <cmath>
#include <sstream>

#include "ucantor/json_io.hpp"

namespace ucantor {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) {
    const auto a = field.find_first_not_of(" \t\r");
    const auto b = field.find_last_not_of(" \t\r");
    out.push_back(a == std::string::npos ? "" : field.substr(a, b - a + 1));
  }
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

}  // namespace

void validate_metric(const FiniteMetric& m) {
  const std::size_t n = m.labels.size();
  if (n < 2) throw Error::domain("metric: need at least 2 points");
  if (m.d.size() != n) throw Error::domain("metric: matrix is not square");
  for (const auto& row : m.d)
    if (row.size() != n) throw Error::domain("metric: matrix is not square");
  for (std::size_t i = 0; i < n; ++i) {
    if (m.d[i][i] != 0.0)
      throw Error::domain("metric: nonzero diagonal at " + m.labels[i]);
    for (std::size_t j = 0; j < n; ++j) {
      if (!std::isfinite(m.d[i][j]))
        throw Error::domain("metric: non-finite entry at (" + m.labels[i] + ", " + m.labels[j] + ")");
      if (i != j && !(m.d[i][j] > 0.0))
        throw Error::domain("metric: non-positive distance (" + m.labels[i] + ", " + m.labels[j] + ")");
      if (m.d[i][j] != m.d[j][i])
        throw Error::domain("metric: asymmetric at (" + m.labels[i] + ", " + m.labels[j] + ")");
    }
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k)
        if (m.d[i][j] > m.d[i][k] + m.d[k][j])
          throw Error::domain("metric: triangle inequality fails on (" + m.labels[i] + ", " +
                              m.labels[j] + ", " + m.labels[k] + ")");
}

FiniteMetric metric_from_csv_text(const std::string& text) {
  FiniteMetric m;
  std::istringstream ss(text);
  std::string line;
  bool header = true;
  while (std::getline(ss, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto fields = split_csv_line(line);
    if (header) {
      m.labels = fields;
      header = false;
      continue;
    }
    if (fields.size() != m.labels.size())
      throw Error::parse("metric csv: row with " + std::to_string(fields.size()) +
                         " fields, expected " + std::to_string(m.labels.size()));
    std::vector<double> row;
    for (const auto& f : fields) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(f, &used));
        if (used != f.size()) throw std::invalid_argument(f);
      } catch (const std::exception&) {
        throw Error::parse("metric csv: bad number \"" + f + "\"");
      }
    }
    m.d.push_back(std::move(row));
  }
  if (m.labels.empty()) throw Error::parse("metric csv: empty file");
  if (m.d.size() != m.labels.size())
    throw Error::parse("metric csv: expected " + std::to_string(m.labels.size()) + " rows, got " +
                       std::to_string(m.d.size()));
  return m;
}

std::string metric_to_csv_text(const FiniteMetric& m) {
  std::ostringstream out;
  for (std::size_t i = 0; i < m.labels.size(); ++i) {
    if (i) out << ",";
    out << m.labels[i];
  }
  out << "\n";
  for (const auto& row : m.d) {
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (j) out << ",";
      out << format_double(row[j]);
    }
    out << "\n";
  }
  return std::move(out).str();
}

FiniteMetric load_metric(const std::string& path) {
  return metric_from_csv_text(read_file(path));
}

FiniteMetric points_to_metric(const std::vector<std::vector<double>>& points) {
  FiniteMetric m;
  const std::size_t n = points.size();
  m.d.assign(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    m.labels.push_back("p" + std::to_string(i));
    for (std::size_t j = i + 1; j < n; ++j) {
      if (points[j].size() != points[i].size())
        throw Error::invalid("points_to_metric: dimension mismatch");
      double s = 0.0;
      for (std::size_t k = 0; k < points[i].size(); ++k) {
        const double dk = points[i][k] - points[j][k];
        s += dk * dk;
      }
      m.d[i][j] = m.d[j][i] = std::sqrt(s);
    }
  }
  return m;
}

}  // namespace ucantor
