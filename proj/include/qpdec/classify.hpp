#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "qpdec/forms.hpp"
#include "qpdec/matrix.hpp"

namespace qpdec::formalg {

using Mat3d = std::array<std::array<double, 3>, 3>;
using Mat2d = std::array<std::array<double, 2>, 2>;

// Change of variables (L1 on coordinates, L2 on the form pair). The class
// decision never needs this; witnesses may be floating when a real square
// root enters a rescaling step.
struct PairTransform {
  bool exact = false;
  std::optional<Mat3> L1;  // set when exact
  std::optional<Mat2> L2;
  Mat3d L1d{};  // always set
  Mat2d L2d{};
};

PairTransform make_exact_transform(const Mat3& l1, const Mat2& l2);
PairTransform make_float_transform(const Mat3d& l1, const Mat2d& l2);
PairTransform identity_transform();

struct ClassReport {
  PairClass cls;
  std::optional<std::pair<Rational, Rational>> square_direction;
  std::optional<LinearForm> square_root;
  std::optional<LinearForm> common_factor;
  std::optional<Vec3> common_kernel;
  std::optional<PairTransform> witness;
  std::optional<double> residual;
};

struct SquareCombination {
  std::pair<Rational, Rational> direction;  // (lambda : mu), primitive integers
  LinearForm root;                          // ell with lambda*A + mu*B = scale * ell^2
  Rational scale;
};

// Projective ratio (lambda : mu) with lambda*A + mu*B = 0, if the forms are
// proportional. Throws BothZero when both forms vanish identically.
std::optional<std::pair<Rational, Rational>> linear_dependence(const FormPair& pair);

// Nonzero v with A v = B v = 0; certifies that both forms omit a variable
// after a linear change of coordinates.
std::optional<Vec3> common_kernel(const FormPair& pair);

// The 6x3 coefficient matrix of det(grad P, grad Q, u), rows indexed by the
// monomials (rr, ss, tt, rs, rt, st) and columns by u.
RatMat det_condition_matrix(const FormPair& pair);

// True iff det(grad P, grad Q, u) is not identically zero for every u != 0.
bool det_condition(const FormPair& pair);

// Rank-<=1 pencil direction, if one exists. Pre: independent pair without a
// common kernel (throws PreconditionViolated otherwise).
std::optional<SquareCombination> square_combination(const FormPair& pair);

// Rational linear factors of a single form (empty, one repeated, or two).
std::vector<LinearForm> linear_factors(const QuadForm& q);

// m with q = ell * m, when ell divides q exactly.
std::optional<LinearForm> divide_by_linear(const QuadForm& q, const LinearForm& ell);

// Shared rational linear factor of both forms. Pre: independent pair.
std::optional<LinearForm> common_linear_factor(const FormPair& pair);

ClassReport classify(const FormPair& pair);

FormPair canonical_pair(PairClass cls);

// Exact transport of a pair through an exact transform.
FormPair apply_transform(const FormPair& pair, const PairTransform& t);

struct ApproxPair {
  Mat3d first{};
  Mat3d second{};
};

// Floating-point transport; valid for exact and floating transforms alike.
ApproxPair apply_transform_approx(const FormPair& pair, const PairTransform& t);

// Max absolute coefficient difference between the transformed pair and the
// canonical pair of the given class.
double witness_residual(const FormPair& pair, const PairTransform& t, PairClass cls);

inline constexpr double kWitnessResidualBound = 1e-9;

}  // namespace qpdec::formalg
