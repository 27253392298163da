#include "qpdec/forms.hpp"

#include <cctype>
#include <sstream>

#include "qpdec/errors.hpp"

namespace qpdec::formalg {

const char* to_string(PairClass c) {
  switch (c) {
    case PairClass::LinearlyDependent: return "LinearlyDependent";
    case PairClass::OmitsVariable: return "OmitsVariable";
    case PairClass::NonDegenerate: return "NonDegenerate";
    case PairClass::CommonFactor: return "CommonFactor";
    case PairClass::SquareElliptic: return "SquareElliptic";
    case PairClass::SquareHyperbolic: return "SquareHyperbolic";
    case PairClass::SquareParabolic: return "SquareParabolic";
  }
  return "?";
}

PairClass pair_class_from_string(const std::string& name) {
  for (PairClass c : {PairClass::LinearlyDependent, PairClass::OmitsVariable, PairClass::NonDegenerate,
                      PairClass::CommonFactor, PairClass::SquareElliptic, PairClass::SquareHyperbolic,
                      PairClass::SquareParabolic})
    if (name == to_string(c)) return c;
  throw UnsupportedClass("unknown class name '" + name + "'");
}

std::string LinearForm::to_string() const {
  static const char* vars[3] = {"r", "s", "t"};
  std::ostringstream out;
  bool first = true;
  for (int i = 0; i < 3; ++i) {
    if (coeffs[i] == 0) continue;
    Rational c = coeffs[i];
    if (!first) {
      out << (sgn(c) < 0 ? " - " : " + ");
      c = abs(c);
    } else if (sgn(c) < 0) {
      out << "-";
      c = abs(c);
    }
    if (c != 1) out << qpdec::to_string(c) << "*";
    out << vars[i];
    first = false;
  }
  if (first) out << "0";
  return out.str();
}

QuadForm::QuadForm(const Mat3& m) : m_(m) {
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j)
      if (m_[i][j] != m_[j][i]) throw InternalInconsistency("quadratic form matrix not symmetric");
}

QuadForm QuadForm::from_coeffs(const Rational& rr, const Rational& ss, const Rational& tt,
                               const Rational& rs, const Rational& rt, const Rational& st) {
  QuadForm q;
  q.m_[0][0] = rr;
  q.m_[1][1] = ss;
  q.m_[2][2] = tt;
  q.m_[0][1] = q.m_[1][0] = rs / 2;
  q.m_[0][2] = q.m_[2][0] = rt / 2;
  q.m_[1][2] = q.m_[2][1] = st / 2;
  return q;
}

std::array<Rational, 6> QuadForm::coeff_vector() const {
  return {m_[0][0], m_[1][1], m_[2][2], 2 * m_[0][1], 2 * m_[0][2], 2 * m_[1][2]};
}

Rational QuadForm::evaluate(const Vec3& v) const {
  Rational acc = 0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) acc += m_[i][j] * v[i] * v[j];
  return acc;
}

bool QuadForm::is_zero() const {
  for (const auto& row : m_)
    for (const auto& e : row)
      if (e != 0) return false;
  return true;
}

bool QuadForm::has_integer_coeffs() const {
  for (const Rational& c : coeff_vector())
    if (!is_integer(c)) return false;
  return true;
}

QuadForm QuadForm::operator+(const QuadForm& o) const {
  QuadForm q;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) q.m_[i][j] = m_[i][j] + o.m_[i][j];
  return q;
}

QuadForm QuadForm::operator-(const QuadForm& o) const {
  QuadForm q;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) q.m_[i][j] = m_[i][j] - o.m_[i][j];
  return q;
}

QuadForm QuadForm::scaled(const Rational& c) const {
  QuadForm q;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) q.m_[i][j] = m_[i][j] * c;
  return q;
}

std::string QuadForm::to_string() const {
  static const char* mono[6] = {"r^2", "s^2", "t^2", "r*s", "r*t", "s*t"};
  auto coeffs = coeff_vector();
  std::ostringstream out;
  bool first = true;
  for (int k = 0; k < 6; ++k) {
    if (coeffs[k] == 0) continue;
    Rational c = coeffs[k];
    if (!first) {
      out << (sgn(c) < 0 ? " - " : " + ");
      c = abs(c);
    } else if (sgn(c) < 0) {
      out << "-";
      c = abs(c);
    }
    if (c != 1) {
      if (is_integer(c))
        out << qpdec::to_string(c) << "*";
      else
        out << "(" << qpdec::to_string(c) << ")*";
    }
    out << mono[k];
    first = false;
  }
  if (first) out << "0";
  return out.str();
}

QuadForm lf_product(const LinearForm& a, const LinearForm& b) {
  Mat3 m;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m[i][j] = (a.coeffs[i] * b.coeffs[j] + a.coeffs[j] * b.coeffs[i]) / 2;
  return QuadForm(m);
}

namespace {

class TermParser {
 public:
  explicit TermParser(const std::string& text) : s_(text) {}

  QuadForm parse() {
    skip_ws();
    if (eof()) throw SyntaxError("empty expression");
    std::array<Rational, 6> coeffs{};
    bool first_term = true;
    while (!eof()) {
      int sign = 1;
      if (peek() == '+' || peek() == '-') {
        sign = (get() == '-') ? -1 : 1;
        skip_ws();
        if (eof()) throw SyntaxError("dangling sign at end of expression");
      } else if (!first_term) {
        throw SyntaxError(std::string("expected '+' or '-' before '") + peek() + "'");
      }
      parse_term(sign, coeffs);
      first_term = false;
      skip_ws();
    }
    return QuadForm::from_coeffs(coeffs[0], coeffs[1], coeffs[2], coeffs[3], coeffs[4], coeffs[5]);
  }

 private:
  bool eof() const { return pos_ >= s_.size(); }
  char peek() const { return s_[pos_]; }
  char get() { return s_[pos_++]; }
  void skip_ws() {
    while (!eof() && std::isspace(static_cast<unsigned char>(peek()))) ++pos_;
  }

  BigInt parse_integer() {
    skip_ws();
    bool neg = false;
    if (!eof() && (peek() == '-' || peek() == '+')) neg = (get() == '-');
    skip_ws();
    if (eof() || !std::isdigit(static_cast<unsigned char>(peek()))) throw SyntaxError("expected a number");
    std::string digits;
    while (!eof() && std::isdigit(static_cast<unsigned char>(peek()))) digits += get();
    BigInt z(digits);
    return neg ? BigInt(-z) : z;
  }

  // integer | '(' integer ['/' integer] ')'
  Rational parse_coefficient() {
    skip_ws();
    if (peek() == '(') {
      get();
      BigInt num = parse_integer();
      BigInt den = 1;
      skip_ws();
      if (!eof() && peek() == '/') {
        get();
        den = parse_integer();
        if (den == 0) throw SyntaxError("zero denominator in coefficient");
      }
      skip_ws();
      if (eof() || get() != ')') throw SyntaxError("unbalanced parenthesis in coefficient");
      Rational q(num, den);
      q.canonicalize();
      return q;
    }
    return Rational(parse_integer());
  }

  int parse_variable() {
    char c = get();
    switch (c) {
      case 'r': return 0;
      case 's': return 1;
      case 't': return 2;
    }
    if (std::isalpha(static_cast<unsigned char>(c)))
      throw UnknownVariable(std::string("variable '") + c + "' (expected r, s or t)");
    throw SyntaxError(std::string("unexpected character '") + c + "'");
  }

  void parse_term(int sign, std::array<Rational, 6>& coeffs) {
    skip_ws();
    Rational coef = sign;
    bool have_coef = false;
    if (std::isdigit(static_cast<unsigned char>(peek())) || peek() == '(') {
      coef *= parse_coefficient();
      have_coef = true;
      skip_ws();
      if (!eof() && peek() == '*') {
        get();
        skip_ws();
        if (eof()) throw SyntaxError("dangling '*' at end of term");
      }
    }
    // Collect variable exponents; total degree must be exactly 2.
    int exps[3] = {0, 0, 0};
    int degree = 0;
    bool expect_var = !eof() && !term_boundary();
    if (!expect_var && !have_coef) throw SyntaxError("empty term");
    while (expect_var) {
      int var = parse_variable();
      int e = 1;
      skip_ws();
      if (!eof() && peek() == '^') {
        get();
        BigInt z = parse_integer();
        if (z < 0 || z > 8) throw DegreeError("exponent " + z.get_str() + " out of range");
        e = static_cast<int>(z.get_si());
      }
      exps[var] += e;
      degree += e;
      skip_ws();
      expect_var = false;
      if (!eof() && peek() == '*') {
        get();
        skip_ws();
        if (eof()) throw SyntaxError("dangling '*' at end of term");
        if (std::isdigit(static_cast<unsigned char>(peek())) || peek() == '(')
          throw SyntaxError("coefficient must precede the variables in a term");
        expect_var = true;
      }
    }
    if (degree != 2) throw DegreeError("monomial of degree " + std::to_string(degree) + " (every term must have degree 2)");
    int idx;
    if (exps[0] == 2) idx = 0;
    else if (exps[1] == 2) idx = 1;
    else if (exps[2] == 2) idx = 2;
    else if (exps[0] == 1 && exps[1] == 1) idx = 3;
    else if (exps[0] == 1 && exps[2] == 1) idx = 4;
    else idx = 5;
    coeffs[idx] += coef;
  }

  bool term_boundary() const { return peek() == '+' || peek() == '-'; }

  const std::string& s_;
  std::size_t pos_ = 0;
};

}  // namespace

QuadForm parse_quadform(const std::string& text) { return TermParser(text).parse(); }

FormPair parse_pair(const std::string& text_p, const std::string& text_q) {
  return FormPair{parse_quadform(text_p), parse_quadform(text_q)};
}

}  // namespace qpdec::formalg
