#include "ucantor/quadratic.hpp"

#include <cmath>
#include <cstdlib>
#include <numeric>
#include <sstream>

namespace ucantor {

namespace {

using i128 = __int128;

constexpr long long kComponentCap = (1ll << 62);

long long narrow(i128 v, const char* op) {
  if (v >= kComponentCap || v <= -kComponentCap)
    throw Error::domain(std::string(op) + ": quadratic component overflow");
  return static_cast<long long>(v);
}

i128 iabs(i128 v) { return v < 0 ? -v : v; }

i128 gcd128(i128 x, i128 y) {
  x = iabs(x);
  y = iabs(y);
  while (y != 0) {
    i128 t = x % y;
    x = y;
    y = t;
  }
  return x;
}

// Floor division for a positive divisor.
long long fdiv(i128 num, i128 den) {
  i128 q = num / den;
  if (num % den != 0 && ((num < 0) != (den < 0))) --q;
  return narrow(q, "fdiv");
}

Quad normalize(i128 a, i128 b, i128 c, long long d, const char* op) {
  if (c == 0) throw Error::invalid(std::string(op) + ": zero denominator");
  if (c < 0) {
    a = -a;
    b = -b;
    c = -c;
  }
  if (b != 0) {
    if (d < 0) throw Error::invalid(std::string(op) + ": negative radicand");
    unsigned long long s = isqrt_u128(static_cast<unsigned __int128>(d));
    if (static_cast<i128>(s) * static_cast<i128>(s) == d) {
      // Perfect square: fold sqrt(d) into the rational part.
      a += b * static_cast<i128>(s);
      b = 0;
    }
  }
  if (b == 0) d = 0;
  i128 g = gcd128(gcd128(a, b), c);
  if (g > 1) {
    a /= g;
    b /= g;
    c /= g;
  }
  Quad q;
  q.a = narrow(a, op);
  q.b = narrow(b, op);
  q.c = narrow(c, op);
  q.d = d;
  return q;
}

// Shared-field radicand for a binary op; rational operands are field-agnostic.
long long join_field(const Quad& x, const Quad& y, const char* op) {
  if (x.b == 0) return y.d;
  if (y.b == 0) return x.d;
  if (x.d != y.d)
    throw Error::domain(std::string(op) + ": mixed radicands " +
                        std::to_string(x.d) + " and " + std::to_string(y.d));
  return x.d;
}

}  // namespace

unsigned long long isqrt_u128(unsigned __int128 n) {
  if (n == 0) return 0;
  // Newton iteration seeded from the float estimate; converges in a few steps.
  unsigned __int128 x = static_cast<unsigned __int128>(
      std::sqrt(static_cast<double>(static_cast<unsigned long long>(
          n >> (n > 0xffffffffffffffffull ? 64 : 0))))) +
      1;
  if (n > 0xffffffffffffffffull) x <<= 32;
  x += 2;
  while (true) {
    unsigned __int128 y = (x + n / x) / 2;
    if (y >= x) break;
    x = y;
  }
  while (x * x > n) --x;
  return static_cast<unsigned long long>(x);
}

Quad quad_make(long long a, long long b, long long c, long long d) {
  return normalize(a, b, c, d, "quad_make");
}

bool quad_is_rational(const Quad& x) { return x.b == 0; }

int quad_sign(const Quad& x) {
  // c > 0, so the sign is that of a + b*sqrt(d).
  if (x.b == 0) return (x.a > 0) - (x.a < 0);
  if (x.a >= 0 && x.b > 0) return 1;
  if (x.a <= 0 && x.b < 0) return -1;
  // Opposite signs: compare a^2 against b^2 d. Equality is impossible since
  // d is not a perfect square once b != 0.
  i128 lhs = static_cast<i128>(x.a) * x.a;
  i128 rhs = static_cast<i128>(x.b) * x.b * x.d;
  if (x.a > 0) return lhs > rhs ? 1 : -1;  // b < 0
  return lhs > rhs ? -1 : 1;               // a < 0, b > 0
}

long long quad_floor(const Quad& x) {
  if (x.b == 0) return fdiv(x.a, x.c);
  // floor(b sqrt(d)) via integer sqrt; b sqrt(d) is irrational here, so
  // a + b sqrt(d) is never an integer and floor(value/c) = floor(floor/c).
  unsigned __int128 sq = static_cast<unsigned __int128>(iabs(x.b)) *
                         static_cast<unsigned __int128>(iabs(x.b)) *
                         static_cast<unsigned __int128>(x.d);
  i128 s = static_cast<i128>(isqrt_u128(sq));
  i128 fl = x.b > 0 ? s : -s - 1;
  return fdiv(static_cast<i128>(x.a) + fl, x.c);
}

double quad_to_double(const Quad& x) {
  return (static_cast<double>(x.a) +
          static_cast<double>(x.b) * std::sqrt(static_cast<double>(x.d))) /
         static_cast<double>(x.c);
}

std::string quad_to_string(const Quad& x) {
  std::ostringstream os;
  if (x.b == 0) {
    os << x.a;
    if (x.c != 1) os << "/" << x.c;
    return os.str();
  }
  os << "(" << x.a << (x.b < 0 ? "-" : "+") << std::llabs(x.b) << "*sqrt("
     << x.d << "))/" << x.c;
  return os.str();
}

Quad quad_neg(const Quad& x) { return normalize(-i128(x.a), -i128(x.b), x.c, x.d, "quad_neg"); }

Quad quad_add(const Quad& x, const Quad& y) {
  long long d = join_field(x, y, "quad_add");
  i128 a = static_cast<i128>(x.a) * y.c + static_cast<i128>(y.a) * x.c;
  i128 b = static_cast<i128>(x.b) * y.c + static_cast<i128>(y.b) * x.c;
  i128 c = static_cast<i128>(x.c) * y.c;
  return normalize(a, b, c, d, "quad_add");
}

Quad quad_sub(const Quad& x, const Quad& y) { return quad_add(x, quad_neg(y)); }

Quad quad_mul(const Quad& x, const Quad& y) {
  long long d = join_field(x, y, "quad_mul");
  i128 a = static_cast<i128>(x.a) * y.a +
           static_cast<i128>(x.b) * y.b * d;
  i128 b = static_cast<i128>(x.a) * y.b + static_cast<i128>(x.b) * y.a;
  i128 c = static_cast<i128>(x.c) * y.c;
  return normalize(a, b, c, d, "quad_mul");
}

Quad quad_div(const Quad& x, const Quad& y) {
  if (quad_sign(y) == 0) throw Error::domain("quad_div: division by zero");
  long long d = join_field(x, y, "quad_div");
  // Multiply by the conjugate of y: norm is a2^2 - b2^2 d, an integer.
  i128 norm = static_cast<i128>(y.a) * y.a - static_cast<i128>(y.b) * y.b * d;
  i128 a = (static_cast<i128>(x.a) * y.a - static_cast<i128>(x.b) * y.b * d) *
           y.c;
  i128 b = (static_cast<i128>(x.b) * y.a - static_cast<i128>(x.a) * y.b) * y.c;
  i128 c = static_cast<i128>(x.c) * norm;
  return normalize(a, b, c, d, "quad_div");
}

Quad quad_add_int(const Quad& x, long long n) {
  i128 a = static_cast<i128>(x.a) + static_cast<i128>(n) * x.c;
  return normalize(a, x.b, x.c, x.d, "quad_add_int");
}

Quad quad_mul_int(const Quad& x, long long n) {
  return normalize(static_cast<i128>(x.a) * n, static_cast<i128>(x.b) * n, x.c,
                   x.d, "quad_mul_int");
}

bool quad_eq(const Quad& x, const Quad& y) {
  return quad_sign(quad_sub(x, y)) == 0;
}

bool quad_less(const Quad& x, const Quad& y) {
  return quad_sign(quad_sub(x, y)) < 0;
}

}  // namespace ucantor
