#include "qpdec/classify.hpp"

#include <algorithm>
#include <cmath>

#include "qpdec/errors.hpp"

namespace qpdec::formalg {

namespace {

Mat3d to_double(const Mat3& m) {
  Mat3d d{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) d[i][j] = m[i][j].get_d();
  return d;
}

Mat2d to_double(const Mat2& m) {
  Mat2d d{};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) d[i][j] = m[i][j].get_d();
  return d;
}

double det3(const Mat3d& m) {
  return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
         m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
         m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

Rational det2(const Mat2& m) { return m[0][0] * m[1][1] - m[0][1] * m[1][0]; }

}  // namespace

PairTransform make_exact_transform(const Mat3& l1, const Mat2& l2) {
  if (from_mat3(l1).det() == 0 || det2(l2) == 0) throw SingularTransform("exact transform is singular");
  PairTransform t;
  t.exact = true;
  t.L1 = l1;
  t.L2 = l2;
  t.L1d = to_double(l1);
  t.L2d = to_double(l2);
  return t;
}

PairTransform make_float_transform(const Mat3d& l1, const Mat2d& l2) {
  if (std::abs(det3(l1)) <= 1e-9 || std::abs(l2[0][0] * l2[1][1] - l2[0][1] * l2[1][0]) <= 1e-9)
    throw SingularTransform("floating transform is numerically singular");
  PairTransform t;
  t.exact = false;
  t.L1d = l1;
  t.L2d = l2;
  return t;
}

PairTransform identity_transform() {
  Mat3 l1;
  Mat2 l2;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) l1[i][j] = (i == j) ? 1 : 0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) l2[i][j] = (i == j) ? 1 : 0;
  return make_exact_transform(l1, l2);
}

std::optional<std::pair<Rational, Rational>> linear_dependence(const FormPair& pair) {
  if (pair.first.is_zero() && pair.second.is_zero()) throw BothZero("both forms are identically zero");
  auto va = pair.first.coeff_vector();
  auto vb = pair.second.coeff_vector();
  RatMat m(6, 2);
  for (int i = 0; i < 6; ++i) {
    m(i, 0) = va[i];
    m(i, 1) = vb[i];
  }
  auto basis = m.kernel();
  if (basis.empty()) return std::nullopt;
  std::array<Rational, 2> v{basis[0][0], basis[0][1]};
  v = normalize_primitive(v);
  return std::make_pair(v[0], v[1]);
}

std::optional<Vec3> common_kernel(const FormPair& pair) {
  RatMat m(6, 3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      m(i, j) = pair.first.at(i, j);
      m(3 + i, j) = pair.second.at(i, j);
    }
  auto basis = m.kernel();
  if (basis.empty()) return std::nullopt;
  Vec3 v{basis[0][0], basis[0][1], basis[0][2]};
  return normalize_primitive(v);
}

RatMat det_condition_matrix(const FormPair& pair) {
  // Columns of the gradient are linear forms: (grad P)_i = 2 * A[i][.] . (r,s,t).
  LinearForm gp[3], gq[3];
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      gp[i].coeffs[j] = 2 * pair.first.at(i, j);
      gq[i].coeffs[j] = 2 * pair.second.at(i, j);
    }
  // det(grad P, grad Q, u) = u . (grad P x grad Q); each cross-product entry
  // is a quadratic form in (r,s,t).
  QuadForm cross[3] = {
      lf_product(gp[1], gq[2]) - lf_product(gp[2], gq[1]),
      lf_product(gp[2], gq[0]) - lf_product(gp[0], gq[2]),
      lf_product(gp[0], gq[1]) - lf_product(gp[1], gq[0]),
  };
  RatMat m(6, 3);
  for (int k = 0; k < 3; ++k) {
    auto coeffs = cross[k].coeff_vector();
    for (int i = 0; i < 6; ++i) m(i, k) = coeffs[i];
  }
  return m;
}

bool det_condition(const FormPair& pair) { return det_condition_matrix(pair).rank() == 3; }

namespace {

// Univariate polynomial over the rationals, low-to-high coefficients.
using RatPoly = std::vector<Rational>;

void trim(RatPoly& p) {
  while (!p.empty() && p.back() == 0) p.pop_back();
}

RatPoly poly_mod(RatPoly a, const RatPoly& b) {
  trim(a);
  while (!a.empty() && a.size() >= b.size()) {
    Rational f = a.back() / b.back();
    std::size_t shift = a.size() - b.size();
    for (std::size_t i = 0; i < b.size(); ++i) a[shift + i] -= f * b[i];
    trim(a);
  }
  return a;
}

RatPoly poly_gcd(RatPoly a, RatPoly b) {
  trim(a);
  trim(b);
  while (!b.empty()) {
    RatPoly r = poly_mod(a, b);
    a = std::move(b);
    b = std::move(r);
  }
  if (!a.empty()) {
    Rational lead = a.back();
    for (auto& c : a) c /= lead;
  }
  return a;
}

// The six independent adjugate entries of lambda*A + mu*B, each a binary
// quadratic alpha*lambda^2 + beta*lambda*mu + gamma*mu^2.
struct AdjQuad {
  Rational alpha, beta, gamma;
};

std::vector<AdjQuad> adjugate_pencil_quadratics(const Mat3& a, const Mat3& b) {
  std::vector<AdjQuad> out;
  auto minor2 = [](const Mat3& m, int r0, int r1, int c0, int c1) {
    return m[r0][c0] * m[r1][c1] - m[r0][c1] * m[r1][c0];
  };
  // adj(M)_{ij} = (-1)^{i+j} minor of M with row j, column i removed; only the
  // vanishing of all entries matters, so signs are irrelevant.
  static const int rows[6][2] = {{1, 2}, {0, 2}, {0, 1}, {1, 2}, {1, 2}, {0, 2}};
  static const int cols[6][2] = {{1, 2}, {0, 2}, {0, 1}, {0, 2}, {0, 1}, {0, 1}};
  for (int k = 0; k < 6; ++k) {
    int r0 = rows[k][0], r1 = rows[k][1], c0 = cols[k][0], c1 = cols[k][1];
    AdjQuad q;
    q.alpha = minor2(a, r0, r1, c0, c1);
    q.gamma = minor2(b, r0, r1, c0, c1);
    q.beta = a[r0][c0] * b[r1][c1] + b[r0][c0] * a[r1][c1] - a[r0][c1] * b[r1][c0] - b[r0][c1] * a[r1][c0];
    out.push_back(q);
  }
  return out;
}

Mat3 pencil_member(const Mat3& a, const Mat3& b, const Rational& lambda, const Rational& mu) {
  Mat3 m;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m[i][j] = lambda * a[i][j] + mu * b[i][j];
  return m;
}

// Writes a symmetric rank-1 matrix as scale * v v^T with v primitive integer.
std::optional<std::pair<Vec3, Rational>> rank1_decompose(const Mat3& m) {
  int i0 = -1;
  for (int i = 0; i < 3; ++i)
    if (m[i][i] != 0) i0 = i;
  if (i0 < 0) return std::nullopt;  // symmetric rank-1 has a nonzero diagonal entry
  Vec3 w{m[i0][0], m[i0][1], m[i0][2]};
  Vec3 v = normalize_primitive(w);
  Rational scale = m[i0][i0] / (v[i0] * v[i0]);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      if (m[i][j] != scale * v[i] * v[j]) return std::nullopt;
  return std::make_pair(v, scale);
}

void require_combination_preconditions(const FormPair& pair, const char* op) {
  bool dependent;
  try {
    dependent = linear_dependence(pair).has_value();
  } catch (const BothZero&) {
    dependent = true;
  }
  if (dependent) throw PreconditionViolated(std::string(op) + " requires a linearly independent pair");
  if (common_kernel(pair).has_value())
    throw PreconditionViolated(std::string(op) + " requires a pair that does not omit a variable");
}

}  // namespace

std::optional<SquareCombination> square_combination(const FormPair& pair) {
  require_combination_preconditions(pair, "square_combination");
  const Mat3& a = pair.first.matrix();
  const Mat3& b = pair.second.matrix();

  std::vector<std::pair<Rational, Rational>> candidates;
  candidates.emplace_back(1, 0);

  // Directions with mu = 1: common rational roots of the adjugate quadratics.
  auto quads = adjugate_pencil_quadratics(a, b);
  RatPoly g;
  bool any_nonzero = false;
  for (const AdjQuad& q : quads) {
    RatPoly p{q.gamma, q.beta, q.alpha};
    trim(p);
    if (p.empty()) continue;
    any_nonzero = true;
    g = g.empty() ? p : poly_gcd(g, p);
  }
  if (!any_nonzero)
    throw InternalInconsistency("entire pencil has rank <= 1 for an independent pair");
  if (g.size() == 2) {
    candidates.emplace_back(-g[0] / g[1], 1);
  } else if (g.size() == 3) {
    // After the dependence and kernel screens the rank-<=1 direction is
    // unique, so a quadratic common divisor has a rational (double) root
    // whenever it has a root realized by the pencil.
    Rational disc = g[1] * g[1] - 4 * g[2] * g[0];
    if (auto root = rational_sqrt(disc)) {
      candidates.emplace_back((-g[1] + *root) / (2 * g[2]), 1);
      candidates.emplace_back((-g[1] - *root) / (2 * g[2]), 1);
    }
  }

  for (const auto& [lambda, mu] : candidates) {
    if (from_mat3(pencil_member(a, b, lambda, mu)).rank() != 1) continue;
    std::array<Rational, 2> dir{lambda, mu};
    dir = normalize_primitive(dir);
    auto dec = rank1_decompose(pencil_member(a, b, dir[0], dir[1]));
    if (!dec) throw InternalInconsistency("rank-1 pencil member failed to decompose");
    return SquareCombination{{dir[0], dir[1]}, LinearForm{dec->first}, dec->second};
  }
  return std::nullopt;
}

std::vector<LinearForm> linear_factors(const QuadForm& q) {
  RatMat m = from_mat3(q.matrix());
  std::size_t rank = m.rank();
  if (rank == 0 || rank == 3) return {};
  if (rank == 1) {
    auto dec = rank1_decompose(q.matrix());
    if (!dec) throw InternalInconsistency("rank-1 form failed to decompose");
    return {LinearForm{dec->first}.normalized()};
  }

  // Rank 2: restrict to a complement of the kernel and split the binary form.
  auto kernel = m.kernel();
  Vec3 k{kernel[0][0], kernel[0][1], kernel[0][2]};
  int i = -1, j = -1;
  for (int bi = 0; bi < 3 && i < 0; ++bi)
    for (int bj = bi + 1; bj < 3; ++bj) {
      RatMat basis(3, 3);
      basis(bi, 0) = 1;
      basis(bj, 1) = 1;
      for (int r = 0; r < 3; ++r) basis(r, 2) = k[r];
      if (basis.det() != 0) {
        i = bi;
        j = bj;
        break;
      }
    }
  if (i < 0) throw InternalInconsistency("no complement basis for rank-2 form");

  // q(x e_i + y e_j) = alpha x^2 + 2 B x y + gamma y^2
  const Rational alpha = q.at(i, i);
  const Rational bil = q.at(i, j);
  const Rational gamma = q.at(j, j);

  // Dual functionals of (e_i, e_j, k).
  RatMat basis(3, 3);
  basis(i, 0) = 1;
  basis(j, 1) = 1;
  for (int r = 0; r < 3; ++r) basis(r, 2) = k[r];
  RatMat dual = *basis.inverse();
  LinearForm phi1{Vec3{dual(0, 0), dual(0, 1), dual(0, 2)}};
  LinearForm phi2{Vec3{dual(1, 0), dual(1, 1), dual(1, 2)}};

  auto combine = [&](const Rational& cx, const Rational& cy) {
    LinearForm f;
    for (int c = 0; c < 3; ++c) f.coeffs[c] = cx * phi1.coeffs[c] + cy * phi2.coeffs[c];
    return f.normalized();
  };

  std::vector<LinearForm> out;
  if (alpha == 0 && gamma == 0) {
    out = {combine(1, 0), combine(0, 1)};
  } else if (alpha == 0) {
    // 2B x y + gamma y^2 = y (2B x + gamma y)
    out = {combine(0, 1), combine(2 * bil, gamma)};
  } else {
    Rational disc = bil * bil - alpha * gamma;
    auto root = rational_sqrt(disc);
    if (!root) return {};  // splits only over an extension field
    Rational z1 = (-bil + *root) / alpha;
    Rational z2 = (-bil - *root) / alpha;
    out = {combine(1, z1), combine(1, z2)};
  }

  // The factorization must reproduce q up to a rational scale.
  QuadForm prod = lf_product(out[0], out.size() > 1 ? out[1] : out[0]);
  auto pc = prod.coeff_vector();
  auto qc = q.coeff_vector();
  Rational scale;
  bool have_scale = false;
  for (int c = 0; c < 6 && !have_scale; ++c)
    if (pc[c] != 0) {
      scale = qc[c] / pc[c];
      have_scale = true;
    }
  if (!have_scale || !(prod.scaled(scale) == q))
    throw InternalInconsistency("linear factorization does not reproduce the form");
  if (out.size() == 2 && out[0] == out[1]) out.pop_back();
  return out;
}

std::optional<LinearForm> divide_by_linear(const QuadForm& q, const LinearForm& ell) {
  if (ell.is_zero()) return std::nullopt;
  RatMat system(6, 3);
  for (int k = 0; k < 3; ++k) {
    LinearForm unit;
    unit.coeffs[k] = 1;
    auto col = lf_product(ell, unit).coeff_vector();
    for (int i = 0; i < 6; ++i) system(i, k) = col[i];
  }
  auto qc = q.coeff_vector();
  auto sol = system.solve(std::vector<Rational>(qc.begin(), qc.end()));
  if (!sol) return std::nullopt;
  LinearForm m{Vec3{(*sol)[0], (*sol)[1], (*sol)[2]}};
  if (!(lf_product(ell, m) == q)) return std::nullopt;
  return m;
}

std::optional<LinearForm> common_linear_factor(const FormPair& pair) {
  bool dependent;
  try {
    dependent = linear_dependence(pair).has_value();
  } catch (const BothZero&) {
    dependent = true;
  }
  if (dependent) throw PreconditionViolated("common_linear_factor requires a linearly independent pair");
  auto f1 = linear_factors(pair.first);
  auto f2 = linear_factors(pair.second);
  for (const LinearForm& a : f1)
    for (const LinearForm& b : f2)
      if (a == b) return a;
  return std::nullopt;
}

namespace {

Mat3 columns_matrix(const Vec3& c0, const Vec3& c1, const Vec3& c2) {
  Mat3 m;
  for (int r = 0; r < 3; ++r) {
    m[r][0] = c0[r];
    m[r][1] = c1[r];
    m[r][2] = c2[r];
  }
  return m;
}

Mat3 congruence(const Mat3& g, const Mat3& m) {
  RatMat gm = from_mat3(g);
  return to_mat3(gm.transposed() * from_mat3(m) * gm);
}

Mat3 mat_mul(const Mat3& a, const Mat3& b) { return to_mat3(from_mat3(a) * from_mat3(b)); }

struct ScaledAxis {
  Rational value;              // |value| is the squared scale
  std::optional<Rational> sq;  // exact sqrt of |value| when it is a perfect square
  double approx;
};

ScaledAxis axis_of(const Rational& value) {
  Rational a = abs(value);
  return ScaledAxis{value, rational_sqrt(a), std::sqrt(a.get_d())};
}

// Builds the final transform from the rational stage (x = W * w, forms already
// canonical up to positive axis scales d_i) and the axis scales.
PairTransform assemble_transform(const Mat3& w_stage, const Mat2& l2, const std::array<ScaledAxis, 3>& axes) {
  bool exact = axes[0].sq && axes[1].sq && axes[2].sq;
  if (exact) {
    Mat3 dinv;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) dinv[i][j] = 0;
    for (int i = 0; i < 3; ++i) {
      Rational d = *axes[i].sq;
      if (sgn(axes[i].value) < 0) d = -d;  // sign folded into the axis scale
      dinv[i][i] = 1 / d;
    }
    return make_exact_transform(mat_mul(w_stage, dinv), l2);
  }
  Mat3d l1d{};
  Mat3d wd = to_double(w_stage);
  for (int i = 0; i < 3; ++i) {
    double d = axes[i].approx;
    if (axes[i].value.get_d() < 0) d = -d;
    for (int r = 0; r < 3; ++r) l1d[r][i] = wd[r][i] / d;
  }
  return make_float_transform(l1d, to_double(l2));
}

// Witness for the three square classes. On entry S = scale * root^2 is the
// rank-1 pencil member and T an independent pencil complement.
struct SquareWitness {
  PairClass cls;
  PairTransform transform;
};

SquareWitness build_square_witness(const FormPair& pair, const SquareCombination& sq) {
  const Mat3& a = pair.first.matrix();
  const Mat3& b = pair.second.matrix();
  const auto& [lambda, mu] = sq.direction;

  Mat3 s_mat = pencil_member(a, b, lambda, mu);
  Rational lp, mp;  // complement direction
  if (mu == 0) {
    lp = 0;
    mp = 1;
  } else {
    lp = 1;
    mp = 0;
  }
  Mat3 t_mat = pencil_member(a, b, lp, mp);

  // Basis (e0, b1, b2): ell(e0) = 1, plane ell = 0 spanned by b1, b2.
  const Vec3& v = sq.root.coeffs;
  int i0 = 0;
  while (v[i0] == 0) ++i0;
  Vec3 e0{0, 0, 0};
  e0[i0] = 1 / v[i0];
  RatMat row(1, 3);
  for (int c = 0; c < 3; ++c) row(0, c) = v[c];
  auto plane = row.kernel();
  Vec3 b1{plane[0][0], plane[0][1], plane[0][2]};
  Vec3 b2{plane[1][0], plane[1][1], plane[1][2]};
  Mat3 e = columns_matrix(e0, b1, b2);

  Mat3 se = congruence(e, s_mat);
  if (se[0][0] != sq.scale || se[0][1] != 0 || se[0][2] != 0 || se[1][1] != 0 || se[2][2] != 0 ||
      se[1][2] != 0)
    throw InternalInconsistency("square pencil member is not c*ell^2 in the adapted basis");
  Mat3 te = congruence(e, t_mat);

  Mat2 q0{{{te[1][1], te[1][2]}, {te[2][1], te[2][2]}}};
  int q0_rank;
  if (q0[0][0] == 0 && q0[0][1] == 0 && q0[1][1] == 0)
    q0_rank = 0;
  else
    q0_rank = (det2(q0) == 0) ? 1 : 2;
  if (q0_rank == 0)
    throw InternalInconsistency("plane restriction of the complement vanished after the factor screen");

  // Stage 1: diagonalize the plane block by a rational congruence.
  Mat3 g2;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) g2[i][j] = (i == j) ? 1 : 0;
  if (q0[0][0] != 0) {
    g2[1][2] = -q0[0][1] / q0[0][0];
  } else if (q0[1][1] != 0) {
    g2[1][1] = 0;
    g2[1][2] = 1;
    g2[2][1] = 1;
    g2[2][2] = -q0[0][1] / q0[1][1];
  } else {
    g2[1][1] = 1;
    g2[1][2] = 1;
    g2[2][1] = 1;
    g2[2][2] = -1;
  }
  Mat3 te2 = congruence(g2, te);

  const Rational alpha = te2[1][1];
  if (alpha == 0) throw InternalInconsistency("plane diagonalization lost its leading entry");

  PairClass cls;
  Mat3 g3;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) g3[i][j] = (i == j) ? 1 : 0;
  std::array<ScaledAxis, 3> axes{axis_of(sq.scale), axis_of(alpha), axis_of(1)};

  if (q0_rank == 2) {
    const Rational beta = te2[2][2];
    cls = (sgn(alpha) * sgn(beta) > 0) ? PairClass::SquareElliptic : PairClass::SquareHyperbolic;
    g3[1][0] = -te2[0][1] / alpha;
    g3[2][0] = -te2[0][2] / beta;
    axes[2] = axis_of(beta);
  } else {
    cls = PairClass::SquareParabolic;
    const Rational a2 = te2[0][2];
    if (a2 == 0)
      throw InternalInconsistency("parabolic cross term vanished after the kernel screen");
    g3[1][0] = -te2[0][1] / alpha;
    // Third axis absorbs the cross term: X1*X3 = 2*sgn(alpha)*a2*u*z needs
    // d1*d3 = 2*sgn(alpha)*a2, i.e. d3 = (2*sgn(alpha)*a2)^2 / |scale| as a
    // squared axis value with the sign of the product itself.
    Rational d3_sq = (4 * a2 * a2) / abs(sq.scale);
    Rational signed_axis = (sgn(alpha) * sgn(a2) * sgn(sq.scale) > 0) ? d3_sq : -d3_sq;
    axes[2] = axis_of(signed_axis);
  }

  Mat3 te3 = congruence(g3, te2);
  Rational k = te3[0][0] / sq.scale;

  Mat3 w_stage = mat_mul(mat_mul(e, g2), g3);
  int sigma_s = sgn(sq.scale);
  int sigma_t = sgn(alpha);
  if (cls == PairClass::SquareHyperbolic && sigma_t < 0) {
    // Put the positive plane axis first: swap the last two coordinates.
    Mat3 swap;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) swap[i][j] = 0;
    swap[0][0] = 1;
    swap[1][2] = 1;
    swap[2][1] = 1;
    w_stage = mat_mul(w_stage, swap);
    std::swap(axes[1], axes[2]);
    sigma_t = -sigma_t;
  }

  // L2 = diag(sigma_s, sigma_t) * [[1,0],[-k,1]] * [[lambda,mu],[l',m']]
  Mat2 l2{{{Rational(sigma_s) * lambda, Rational(sigma_s) * mu},
           {Rational(sigma_t) * (lp - k * lambda), Rational(sigma_t) * (mp - k * mu)}}};

  return SquareWitness{cls, assemble_transform(w_stage, l2, axes)};
}

PairTransform build_common_factor_witness(const FormPair& pair, const LinearForm& ell) {
  auto m1 = divide_by_linear(pair.first, ell);
  auto m2 = divide_by_linear(pair.second, ell);
  if (!m1 || !m2) throw InternalInconsistency("common factor does not divide both forms");
  Mat3 rows;
  for (int c = 0; c < 3; ++c) {
    rows[0][c] = ell.coeffs[c];
    rows[1][c] = m1->coeffs[c];
    rows[2][c] = m2->coeffs[c];
  }
  auto inv = from_mat3(rows).inverse();
  if (!inv)
    throw InternalInconsistency("factor coordinates are dependent after the kernel screen");
  Mat2 id{{{Rational(1), Rational(0)}, {Rational(0), Rational(1)}}};
  return make_exact_transform(to_mat3(*inv), id);
}

}  // namespace

ClassReport classify(const FormPair& pair) {
  ClassReport report{PairClass::NonDegenerate, {}, {}, {}, {}, {}, {}};

  if (auto dep = linear_dependence(pair)) {
    report.cls = PairClass::LinearlyDependent;
    return report;
  }
  if (auto ker = common_kernel(pair)) {
    report.cls = PairClass::OmitsVariable;
    report.common_kernel = *ker;
    return report;
  }
  if (auto factor = common_linear_factor(pair)) {
    report.cls = PairClass::CommonFactor;
    report.common_factor = *factor;
    report.witness = build_common_factor_witness(pair, *factor);
    report.residual = witness_residual(pair, *report.witness, report.cls);
    return report;
  }
  auto sq = square_combination(pair);
  if (!sq) {
    report.cls = PairClass::NonDegenerate;
    return report;
  }
  SquareWitness witness = build_square_witness(pair, *sq);
  report.cls = witness.cls;
  report.square_direction = sq->direction;
  report.square_root = sq->root;
  report.witness = witness.transform;
  report.residual = witness_residual(pair, witness.transform, witness.cls);
  return report;
}

FormPair canonical_pair(PairClass cls) {
  switch (cls) {
    case PairClass::LinearlyDependent: return parse_pair("r^2", "2r^2");
    case PairClass::OmitsVariable: return parse_pair("r^2", "s^2");
    case PairClass::NonDegenerate: return parse_pair("r^2+s^2+t^2", "r*s+s*t");
    case PairClass::CommonFactor: return parse_pair("r*s", "r*t");
    case PairClass::SquareElliptic: return parse_pair("r^2", "s^2+t^2");
    case PairClass::SquareHyperbolic: return parse_pair("r^2", "s^2-t^2");
    case PairClass::SquareParabolic: return parse_pair("r^2", "s^2+r*t");
  }
  throw InternalInconsistency("unknown class");
}

FormPair apply_transform(const FormPair& pair, const PairTransform& t) {
  if (!t.exact) throw SingularTransform("exact transport requires an exact transform");
  RatMat l1 = from_mat3(*t.L1);
  RatMat a = l1.transposed() * from_mat3(pair.first.matrix()) * l1;
  RatMat b = l1.transposed() * from_mat3(pair.second.matrix()) * l1;
  const Mat2& l2 = *t.L2;
  Mat3 first, second;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      first[i][j] = l2[0][0] * a(i, j) + l2[0][1] * b(i, j);
      second[i][j] = l2[1][0] * a(i, j) + l2[1][1] * b(i, j);
    }
  return FormPair{QuadForm(first), QuadForm(second)};
}

ApproxPair apply_transform_approx(const FormPair& pair, const PairTransform& t) {
  Mat3d a = {};
  Mat3d b = {};
  Mat3d am{}, bm{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      am[i][j] = pair.first.at(i, j).get_d();
      bm[i][j] = pair.second.at(i, j).get_d();
    }
  const Mat3d& l1 = t.L1d;
  // a = L1^T * am * L1
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      double sa = 0, sb = 0;
      for (int p = 0; p < 3; ++p)
        for (int q = 0; q < 3; ++q) {
          sa += l1[p][i] * am[p][q] * l1[q][j];
          sb += l1[p][i] * bm[p][q] * l1[q][j];
        }
      a[i][j] = sa;
      b[i][j] = sb;
    }
  ApproxPair out;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      out.first[i][j] = t.L2d[0][0] * a[i][j] + t.L2d[0][1] * b[i][j];
      out.second[i][j] = t.L2d[1][0] * a[i][j] + t.L2d[1][1] * b[i][j];
    }
  return out;
}

double witness_residual(const FormPair& pair, const PairTransform& t, PairClass cls) {
  ApproxPair got = apply_transform_approx(pair, t);
  FormPair target = canonical_pair(cls);
  double residual = 0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      residual = std::max(residual, std::abs(got.first[i][j] - target.first.at(i, j).get_d()));
      residual = std::max(residual, std::abs(got.second[i][j] - target.second.at(i, j).get_d()));
    }
  return residual;
}

}  // namespace qpdec::formalg
