#pragma once

#include <array>
#include <string>

#include "qpdec/matrix.hpp"
#include "qpdec/rational.hpp"

namespace qpdec::formalg {

using qpdec::Mat3;
using qpdec::Rational;
using qpdec::Vec3;

// The seven outcomes of the pair classification.
enum class PairClass {
  LinearlyDependent,
  OmitsVariable,
  NonDegenerate,
  CommonFactor,
  SquareElliptic,
  SquareHyperbolic,
  SquareParabolic,
};

const char* to_string(PairClass c);
PairClass pair_class_from_string(const std::string& name);

// Linear form c_r*r + c_s*s + c_t*t.
struct LinearForm {
  Vec3 coeffs{};

  Rational evaluate(const Vec3& v) const { return coeffs[0] * v[0] + coeffs[1] * v[1] + coeffs[2] * v[2]; }
  bool is_zero() const { return coeffs[0] == 0 && coeffs[1] == 0 && coeffs[2] == 0; }
  // Primitive integer coefficients, first nonzero positive.
  LinearForm normalized() const { return LinearForm{normalize_primitive(coeffs)}; }
  bool operator==(const LinearForm& o) const = default;
  std::string to_string() const;
};

// Quadratic form in (r,s,t) held as a symmetric 3x3 rational matrix,
// Q(v) = v^T m v. Diagonal entries are the square coefficients, off-diagonal
// entries half the mixed coefficients.
class QuadForm {
 public:
  QuadForm() {
    for (auto& row : m_)
      for (auto& e : row) e = 0;
  }
  explicit QuadForm(const Mat3& m);

  // Polynomial coefficients (rr, ss, tt, rs, rt, st).
  static QuadForm from_coeffs(const Rational& rr, const Rational& ss, const Rational& tt,
                              const Rational& rs, const Rational& rt, const Rational& st);

  const Mat3& matrix() const { return m_; }
  const Rational& at(int i, int j) const { return m_[i][j]; }

  // Coefficient vector in the (rr, ss, tt, rs, rt, st) monomial basis.
  std::array<Rational, 6> coeff_vector() const;

  Rational evaluate(const Vec3& v) const;
  bool is_zero() const;
  bool has_integer_coeffs() const;

  QuadForm operator+(const QuadForm& o) const;
  QuadForm operator-(const QuadForm& o) const;
  QuadForm scaled(const Rational& c) const;
  bool operator==(const QuadForm& o) const = default;

  std::string to_string() const;

 private:
  Mat3 m_;
};

struct FormPair {
  QuadForm first;
  QuadForm second;
  bool operator==(const FormPair& o) const = default;
};

// Product of two linear forms as a quadratic form.
QuadForm lf_product(const LinearForm& a, const LinearForm& b);

// Parses a homogeneous degree-2 polynomial in r,s,t. Terms are joined by +/-;
// a term is [coef][*]var[^2|*var] with integer or parenthesized rational
// coefficients such as (3/2). Throws SyntaxError, DegreeError, UnknownVariable.
QuadForm parse_quadform(const std::string& text);

FormPair parse_pair(const std::string& text_p, const std::string& text_q);

}  // namespace qpdec::formalg
