#pragma once

#include <string>
#include <vector>

#include "qpdec/forms.hpp"
#include "qpdec/rational.hpp"

namespace qpdec::exponents {

using formalg::PairClass;
using qpdec::Rational;

// Lebesgue exponent p in [2, infinity]; infinity is held as 1/p = 0 so that
// every breakpoint comparison stays exact.
class PValue {
 public:
  static PValue infinity() { return PValue(Rational(0)); }
  static PValue of(const Rational& p);
  static PValue from_string(const std::string& text);  // "14/3" or "inf"

  bool is_infinity() const { return inv_ == 0; }
  Rational inv() const { return inv_; }   // 1/p, zero at infinity
  Rational value() const;                 // throws on infinity
  std::string to_string() const;

 private:
  explicit PValue(Rational inv) : inv_(std::move(inv)) {}
  Rational inv_;
};

// Piecewise-linear exponent as a function of a = 1/p on [0, 1/2]. Segment i
// covers [breakpoints[i-1], breakpoints[i]] (with 0 and 1/2 as the outer
// endpoints) and evaluates to alpha - beta * a.
struct ExponentProfile {
  struct Segment {
    Rational alpha;
    Rational beta;
  };
  std::string label;
  std::vector<Rational> breakpoints;  // interior breakpoints, ascending in 1/p
  std::vector<Segment> segments;      // breakpoints.size() + 1 entries

  Rational value_at_inv_p(const Rational& a) const;
};

// Sharp decoupling exponent of the class at p. LinearlyDependent reduces to
// the single-form theory and is rejected (UnsupportedClass).
Rational gamma_of_class(PairClass cls, const PValue& p);

ExponentProfile profile_of_class(PairClass cls);

// Partition of the surface data (d', d'', n', n'') for the skew lower bound.
struct SkewParams {
  int d_prime = 0;
  int d_double_prime = 0;
  int n_prime = 0;
  int n_double_prime = 0;
};

// d'(1/2 - 1/p) + d''(1 - 1/p) - (d'' + 2n'')/p.
Rational skew_lower_exponent(const SkewParams& params, const PValue& p);

// max(dt(1/2 - 1/p), dt(1 - 1/p) - kt/p) for a restriction to a subspace of
// dimension dt with kt = dt + 2*(number of forms).
Rational subspace_lower_exponent(int d_tilde, int k_tilde, const PValue& p);

// True iff the max of the applicable lower-bound formulas matches the class
// profile exactly on the grid p in {2, 5/2, 3, ..., 20}.
bool sharpness_check(PairClass cls);

// Exponent of N in the sharp bound for the solution count at s: 3 + 2s*gamma(2s).
Rational count_exponent_prediction(PairClass cls, int s);

}  // namespace qpdec::exponents
