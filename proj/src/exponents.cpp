#include "qpdec/exponents.hpp"

#include <algorithm>

#include "qpdec/errors.hpp"

namespace qpdec::exponents {

PValue PValue::of(const Rational& p) {
  if (p < 2) throw DegenerateInput("p must be at least 2, got " + qpdec::to_string(p));
  return PValue(1 / p);
}

PValue PValue::from_string(const std::string& text) {
  if (text == "inf" || text == "infinity" || text == "oo") return infinity();
  return of(parse_rational(text));
}

Rational PValue::value() const {
  if (is_infinity()) throw DegenerateInput("p is infinite");
  return 1 / inv_;
}

std::string PValue::to_string() const {
  return is_infinity() ? std::string("inf") : qpdec::to_string(value());
}

Rational ExponentProfile::value_at_inv_p(const Rational& a) const {
  if (a < 0 || a > rat(1, 2)) throw DegenerateInput("1/p outside [0, 1/2]");
  std::size_t seg = 0;
  while (seg < breakpoints.size() && a > breakpoints[seg]) ++seg;
  return segments[seg].alpha - segments[seg].beta * a;
}

namespace {

ExponentProfile make_profile(const std::string& label, std::vector<Rational> breakpoints,
                             std::vector<ExponentProfile::Segment> segments) {
  ExponentProfile p{label, std::move(breakpoints), std::move(segments)};
  for (std::size_t i = 0; i < p.breakpoints.size(); ++i) {
    Rational a = p.breakpoints[i];
    Rational left = p.segments[i].alpha - p.segments[i].beta * a;
    Rational right = p.segments[i + 1].alpha - p.segments[i + 1].beta * a;
    if (left != right) throw InternalInconsistency("exponent profile discontinuous at " + qpdec::to_string(a));
  }
  return p;
}

}  // namespace

ExponentProfile profile_of_class(PairClass cls) {
  // Segments ordered by increasing 1/p; the first one starts at p = infinity.
  switch (cls) {
    case PairClass::NonDegenerate:
      return make_profile("NonDegenerate", {rat(3, 14)}, {{rat(3), rat(10)}, {rat(3, 2), rat(3)}});
    case PairClass::CommonFactor:
      return make_profile("CommonFactor", {rat(1, 6)}, {{rat(3), rat(10)}, {rat(2), rat(4)}});
    case PairClass::OmitsVariable:
      return make_profile("OmitsVariable", {rat(1, 6)}, {{rat(3), rat(10)}, {rat(2), rat(4)}});
    case PairClass::SquareElliptic:
    case PairClass::SquareHyperbolic:
    case PairClass::SquareParabolic:
      return make_profile(formalg::to_string(cls), {rat(1, 6), rat(1, 4)},
                          {{rat(3), rat(10)}, {rat(5, 2), rat(7)}, {rat(3, 2), rat(3)}});
    case PairClass::LinearlyDependent:
      throw UnsupportedClass("LinearlyDependent reduces to the single-form theory");
  }
  throw InternalInconsistency("unknown class");
}

Rational gamma_of_class(PairClass cls, const PValue& p) {
  return profile_of_class(cls).value_at_inv_p(p.inv());
}

Rational skew_lower_exponent(const SkewParams& params, const PValue& p) {
  Rational a = p.inv();
  Rational k2(params.d_double_prime + 2 * params.n_double_prime);
  return params.d_prime * (rat(1, 2) - a) + params.d_double_prime * (1 - a) - k2 * a;
}

Rational subspace_lower_exponent(int d_tilde, int k_tilde, const PValue& p) {
  Rational a = p.inv();
  return std::max<Rational>(d_tilde * (rat(1, 2) - a), d_tilde * (1 - a) - k_tilde * a);
}

bool sharpness_check(PairClass cls) {
  ExponentProfile profile = profile_of_class(cls);
  for (int half = 4; half <= 40; ++half) {
    PValue p = PValue::of(rat(half, 2));
    // Lower bounds available to every class: the full-surface bound with
    // d = 3, K = 7 in both regimes.
    Rational lower = subspace_lower_exponent(3, 7, p);
    if (cls == PairClass::CommonFactor || cls == PairClass::OmitsVariable)
      lower = std::max(lower, subspace_lower_exponent(2, 2, p));
    if (cls == PairClass::SquareElliptic || cls == PairClass::SquareHyperbolic ||
        cls == PairClass::SquareParabolic)
      lower = std::max(lower, skew_lower_exponent(SkewParams{1, 2, 1, 1}, p));
    if (lower != profile.value_at_inv_p(p.inv())) return false;
  }
  return true;
}

Rational count_exponent_prediction(PairClass cls, int s) {
  if (s < 1) throw DegenerateInput("s must be at least 1");
  return 3 + 2 * s * gamma_of_class(cls, PValue::of(Rational(2 * s)));
}

}  // namespace qpdec::exponents
