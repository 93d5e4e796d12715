#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "ucantor/quadratic.hpp"

namespace ucantor {

enum class CFSource {
  quadratic,   // exact PQa expansion, eventually periodic
  pattern_e,   // quotients of e-2 generated from the arithmetic pattern
  floating,    // double-precision Gauss map, truncated at a trust horizon
  explicit_list,
};

struct ContinuedFraction {
  long long a0 = 0;
  std::vector<long long> quotients;  // a_1, a_2, ... all >= 1
  CFSource source = CFSource::explicit_list;
  // Period data, valid for quadratic sources only: quotients[preperiod ..
  // preperiod+period) repeats forever.
  bool periodic = false;
  std::size_t preperiod = 0;
  std::size_t period = 0;
  // False once a floating expansion runs past its trust horizon.
  bool reliable = true;

  /// a_k for k >= 1, extending a detected period past the stored prefix.
  long long quotient(std::size_t k) const;
  /// Largest a_k over k = 1..depth.
  long long max_quotient(std::size_t depth) const;
};

/// Exact expansion of an irrational quadratic to `depth` partial quotients.
/// Rational inputs raise Error::domain("rational input").
ContinuedFraction cf_from_quad(const Quad& x, std::size_t depth);

/// Quotients of e-2 = [0; 1, 2, 1, 1, 4, 1, 1, 6, ...]: a_{3l-1} = 2l,
/// everything else 1.
ContinuedFraction cf_pattern_e(std::size_t depth);

/// Gauss-map expansion of a double. Quotients beyond `kFloatHorizon` are not
/// trustworthy at 53-bit precision and are dropped (reliable = false). An
/// exactly terminating expansion raises Error::domain("rational input").
ContinuedFraction cf_from_double(double x, std::size_t depth);

constexpr std::size_t kFloatHorizon = 15;

ContinuedFraction cf_from_quotients(long long a0, std::vector<long long> quots);

/// Value of the convergent [a0; a1, ..., a_terms], evaluated backward in
/// extended precision.
double cf_value(const ContinuedFraction& cf, std::size_t terms);

std::string cf_to_string(const ContinuedFraction& cf, std::size_t terms);

}  // namespace ucantor
