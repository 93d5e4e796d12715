#pragma once

#include <cstdint>
#include <string>

#include "ucantor/errors.hpp"

namespace ucantor {

// Exact arithmetic over Q(sqrt(d)): values (a + b*sqrt(d))/c with 64-bit
// normalized components and 128-bit intermediates. Partial quotients and
// mechanical-word letters are catastrophically float-sensitive, hence the
// integer path. Components that outgrow 62 bits raise Error::domain rather
// than wrapping.

struct Quad {
  long long a = 0;
  long long b = 0;  // b = 0 encodes a rational
  long long c = 1;  // c > 0, gcd(|a|, |b|, c) = 1
  long long d = 0;  // radicand; >= 2 and squarefree-checked only for b != 0
};

/// Normalize (a + b sqrt(d))/c: fold perfect-square d into a, fix signs,
/// divide out the gcd. c = 0 is invalid; d < 0 is invalid.
Quad quad_make(long long a, long long b, long long c, long long d);

bool quad_is_rational(const Quad& x);
int quad_sign(const Quad& x);             // -1, 0, +1
long long quad_floor(const Quad& x);
double quad_to_double(const Quad& x);
std::string quad_to_string(const Quad& x);

Quad quad_neg(const Quad& x);
Quad quad_add(const Quad& x, const Quad& y);   // same field (or rational operand)
Quad quad_sub(const Quad& x, const Quad& y);
Quad quad_mul(const Quad& x, const Quad& y);
Quad quad_div(const Quad& x, const Quad& y);   // y != 0
Quad quad_add_int(const Quad& x, long long n);
Quad quad_mul_int(const Quad& x, long long n);

bool quad_eq(const Quad& x, const Quad& y);
bool quad_less(const Quad& x, const Quad& y);

/// floor(sqrt(n)) for n >= 0 over 128-bit range.
unsigned long long isqrt_u128(unsigned __int128 n);

}  // namespace ucantor
