#pragma once

#include <gmpxx.h>

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qpdec/errors.hpp"

namespace qpdec {

// Exact rational scalar. mpq_class keeps values canonical (reduced, positive
// denominator), which is exactly the invariant the domain type needs.
using Rational = mpq_class;
using BigInt = mpz_class;

inline Rational rat(long num, long den = 1) {
  if (den == 0) throw InternalInconsistency("rational with zero denominator");
  Rational q(num, den);
  q.canonicalize();
  return q;
}

inline bool is_integer(const Rational& q) { return q.get_den() == 1; }

inline long to_long(const BigInt& z) {
  if (!z.fits_slong_p()) throw ScaleTooLarge("integer does not fit in a machine word: " + z.get_str());
  return z.get_si();
}

// "n" or "n/d"; used by CLI flags like --p 14/3.
inline Rational parse_rational(const std::string& text) {
  Rational q;
  if (q.set_str(text, 10) != 0) throw SyntaxError("not a rational number: '" + text + "'");
  if (q.get_den() == 0) throw SyntaxError("zero denominator: '" + text + "'");
  q.canonicalize();
  return q;
}

inline std::string to_string(const Rational& q) { return q.get_str(); }

// Exact square root when the argument is the square of a rational.
inline std::optional<Rational> rational_sqrt(const Rational& q) {
  if (sgn(q) < 0) return std::nullopt;
  const BigInt& num = q.get_num();
  const BigInt& den = q.get_den();
  if (!mpz_perfect_square_p(num.get_mpz_t()) || !mpz_perfect_square_p(den.get_mpz_t()))
    return std::nullopt;
  BigInt rn, rd;
  mpz_sqrt(rn.get_mpz_t(), num.get_mpz_t());
  mpz_sqrt(rd.get_mpz_t(), den.get_mpz_t());
  return Rational(rn, rd);
}

// Scale a rational vector to a primitive integer vector (gcd 1) whose first
// nonzero entry is positive. Zero vectors pass through unchanged.
template <typename Vec>
Vec normalize_primitive(const Vec& v) {
  BigInt den_lcm = 1;
  for (const Rational& q : v) mpz_lcm(den_lcm.get_mpz_t(), den_lcm.get_mpz_t(), q.get_den().get_mpz_t());
  BigInt num_gcd = 0;
  for (const Rational& q : v) {
    BigInt scaled = q.get_num() * (den_lcm / q.get_den());
    mpz_gcd(num_gcd.get_mpz_t(), num_gcd.get_mpz_t(), scaled.get_mpz_t());
  }
  if (num_gcd == 0) return v;
  Rational scale(den_lcm, num_gcd);
  scale.canonicalize();
  Vec out = v;
  int lead = 0;
  for (auto& q : out) {
    q *= scale;
    q.canonicalize();
    if (lead == 0) lead = sgn(q);
  }
  if (lead < 0)
    for (auto& q : out) q = -q;
  return out;
}

inline BigInt u128_to_bigint(unsigned __int128 v) {
  BigInt hi(static_cast<unsigned long>(v >> 64));
  BigInt lo(static_cast<unsigned long>(v));
  return (hi << 64) + lo;
}

}  // namespace qpdec
