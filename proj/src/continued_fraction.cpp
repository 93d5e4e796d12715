#include "ucantor/continued_fraction.hpp"

#include <cmath>
#include <map>
#include <sstream>
#include <utility>

namespace ucantor {

namespace {

using i128 = __int128;

long long fdiv(i128 num, i128 den) {
  i128 q = num / den;
  if (num % den != 0 && ((num < 0) != (den < 0))) --q;
  return static_cast<long long>(q);
}

i128 iabs(i128 v) { return v < 0 ? -v : v; }

constexpr i128 kStateCap = static_cast<i128>(1) << 100;

}  // namespace

long long ContinuedFraction::quotient(std::size_t k) const {
  if (k == 0) return a0;
  if (k <= quotients.size()) return quotients[k - 1];
  if (periodic && period > 0) {
    std::size_t idx = preperiod + (k - 1 - preperiod) % period;
    return quotients[idx];
  }
  throw Error::domain("cf quotient index " + std::to_string(k) +
                      " beyond expansion of length " +
                      std::to_string(quotients.size()));
}

long long ContinuedFraction::max_quotient(std::size_t depth) const {
  long long best = 0;
  for (std::size_t k = 1; k <= depth; ++k) best = std::max(best, quotient(k));
  return best;
}

ContinuedFraction cf_from_quad(const Quad& x, std::size_t depth) {
  if (quad_is_rational(x)) throw Error::domain("cf_from_quad: rational input");

  // Bring (a + b sqrt(d))/c into PQa form (P + sqrt(D))/Q with Q | D - P^2.
  i128 P, Q, D;
  if (x.b > 0) {
    P = x.a;
    Q = x.c;
    D = static_cast<i128>(x.b) * x.b * x.d;
  } else {
    P = -static_cast<i128>(x.a);
    Q = -static_cast<i128>(x.c);
    D = static_cast<i128>(x.b) * x.b * x.d;
  }
  if ((D - P * P) % Q != 0) {
    P *= iabs(Q);
    D *= Q * Q;
    Q *= iabs(Q);
  }
  if (D >= kStateCap)
    throw Error::domain("cf_from_quad: radicand too large for exact expansion");

  ContinuedFraction cf;
  cf.source = CFSource::quadratic;

  std::map<std::pair<long long, long long>, std::size_t> seen;
  std::size_t cycle_from = 0, cycle_to = 0;
  for (std::size_t step = 0; step <= depth; ++step) {
    if (iabs(P) >= kStateCap || iabs(Q) >= kStateCap)
      throw Error::internal("cf_from_quad: PQa state overflow");
    if (!cf.periodic) {
      auto key = std::make_pair(static_cast<long long>(P),
                                static_cast<long long>(Q));
      auto [it, fresh] = seen.emplace(key, step);
      if (!fresh) {
        cf.periodic = true;
        cycle_from = it->second;
        cycle_to = step;
      }
    }
    i128 s = static_cast<i128>(
        isqrt_u128(static_cast<unsigned __int128>(D)));
    long long a = Q > 0 ? fdiv(P + s, Q) : fdiv(-P - s - 1, -Q);
    if (step == 0)
      cf.a0 = a;
    else
      cf.quotients.push_back(a);
    i128 Pn = static_cast<i128>(a) * Q - P;
    i128 Qn = (D - Pn * Pn) / Q;
    P = Pn;
    Q = Qn;
  }
  if (cf.periodic) {
    cf.period = cycle_to - cycle_from;
    cf.preperiod = cycle_from >= 1 ? cycle_from - 1 : 0;
  }
  return cf;
}

ContinuedFraction cf_pattern_e(std::size_t depth) {
  ContinuedFraction cf;
  cf.source = CFSource::pattern_e;
  cf.a0 = 0;
  cf.quotients.reserve(depth);
  for (std::size_t k = 1; k <= depth; ++k)
    cf.quotients.push_back(k % 3 == 2 ? 2ll * ((k + 1) / 3) : 1ll);
  return cf;
}

ContinuedFraction cf_from_double(double x, std::size_t depth) {
  if (!std::isfinite(x)) throw Error::invalid("cf_from_double: non-finite input");
  ContinuedFraction cf;
  cf.source = CFSource::floating;
  cf.a0 = static_cast<long long>(std::floor(x));
  cf.reliable = depth <= kFloatHorizon;
  std::size_t want = std::min(depth, kFloatHorizon);
  long double frac = static_cast<long double>(x) - cf.a0;
  for (std::size_t k = 1; k <= want; ++k) {
    if (frac < 1e-13L) throw Error::domain("cf_from_double: rational input");
    long double inv = 1.0L / frac;
    long long a = static_cast<long long>(std::floor(inv));
    if (a < 1) a = 1;
    cf.quotients.push_back(a);
    frac = inv - a;
  }
  return cf;
}

ContinuedFraction cf_from_quotients(long long a0, std::vector<long long> quots) {
  for (long long a : quots)
    if (a < 1) throw Error::invalid("cf_from_quotients: quotients must be >= 1");
  ContinuedFraction cf;
  cf.source = CFSource::explicit_list;
  cf.a0 = a0;
  cf.quotients = std::move(quots);
  return cf;
}

double cf_value(const ContinuedFraction& cf, std::size_t terms) {
  std::size_t k = terms;
  if (!cf.periodic) k = std::min(k, cf.quotients.size());
  if (k == 0) return static_cast<double>(cf.a0);
  long double acc = static_cast<long double>(cf.quotient(k));
  for (std::size_t i = k; i-- > 1;)
    acc = static_cast<long double>(cf.quotient(i)) + 1.0L / acc;
  return static_cast<double>(cf.a0 + 1.0L / acc);
}

std::string cf_to_string(const ContinuedFraction& cf, std::size_t terms) {
  std::ostringstream os;
  os << "[" << cf.a0 << ";";
  std::size_t k = terms;
  if (!cf.periodic) k = std::min(k, cf.quotients.size());
  for (std::size_t i = 1; i <= k; ++i) {
    os << " " << cf.quotient(i);
    if (i < k) os << ",";
  }
  os << (cf.source == CFSource::quadratic || cf.source == CFSource::pattern_e
             ? ", ...]"
             : "]");
  return os.str();
}

}  // namespace ucantor
