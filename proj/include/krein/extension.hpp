#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/LU>

#include "krein/hspace.hpp"
#include "krein/linalg.hpp"
#include "krein/polynomial.hpp"
#include "krein/qherglotz.hpp"
#include "krein/types.hpp"

namespace krein {

/// Parameters (v, c) of a regular extension relative to the fixed reference
/// pair A = A_h and phi = defect_vector(i).
struct ExtensionParams {
  SpaceElement v;
  Complex c{};
};

/// phi_v(w) = (I + (w - i)(A - w)^{-1}) v, coordinates (t_k - i)/(t_k - w) v_k.
inline SpaceElement phi_field(const HerglotzSpace& s, const SpaceElement& v, Complex w,
                              double sep_min = Tolerances{}.sep_min) {
  s.check_element(v);
  s.check_off_atoms(w, sep_min);
  Vector out(s.dim());
  for (Eigen::Index k = 0; k < s.dim(); ++k) out(k) = (s.atoms()(k) - kI) / (s.atoms()(k) - w) * v.coords(k);
  return SpaceElement(std::move(out));
}

/// The reference defect element phi = defect_vector(i).
inline SpaceElement reference_defect(const HerglotzSpace& s) { return defect_vector(s, kI); }

/// Normalized Q-function of v: a = 0, b = 0, weights v_k mu_k / (t_k + i).
inline QuasiHerglotz normalized_q(const HerglotzSpace& s, const SpaceElement& v) {
  s.check_element(v);
  std::vector<Atom<Complex>> atoms;
  for (Eigen::Index k = 0; k < s.dim(); ++k)
    atoms.push_back({s.atoms()(k), v.coords(k) * s.mu()(k) / (s.atoms()(k) + kI)});
  return {0.0, 0.0, ComplexAtomicMeasure(std::move(atoms), 0.0)};
}

/// g = q_v + c, the defining function of the extension.
inline QuasiHerglotz defining_function(const HerglotzSpace& s, const ExtensionParams& p) {
  return shift_constant(normalized_q(s, p.v), p.c);
}

inline ExtensionParams make_params(const HerglotzSpace& s, SpaceElement v, Complex c) {
  s.check_element(v);
  ExtensionParams p{std::move(v), c};
  if (defining_function(s, p).is_zero())
    throw Error(ErrorKind::IdenticallyZero, "q_v + c vanishes identically");
  return p;
}

namespace detail {

/// |g(z)| relative to the magnitude of the terms summed to form it.
inline double relative_magnitude(const QuasiHerglotz& g, Complex z) {
  double scale = std::abs(g.a) + std::abs(g.b * z);
  Complex val = g.a + g.b * z;
  for (const auto& at : g.nu) {
    const Complex term = (1.0 + at.t * z) / (at.t - z) * at.w;
    val += term;
    scale += std::abs(term);
  }
  return scale > 0.0 ? std::abs(val) / scale : 0.0;
}

}  // namespace detail

/// T(z) = (A - z)^{-1} - [., phi_phi(conj z)] / (q(z) + c) * phi_v(z) as an n x n matrix.
inline Matrix krein_resolvent(const HerglotzSpace& s, const ExtensionParams& p, Complex z,
                              const Tolerances& tol = {}) {
  const Vector d = s.resolvent_diagonal(z, tol.sep_min);
  const Complex m = evaluate(defining_function(s, p), z, tol.sep_min);
  if (std::abs(m) <= tol.degenerate_tol) throw Error(ErrorKind::QZero, "q(z) + c vanishes at the resolvent point");
  const Vector left = phi_field(s, p.v, z, tol.sep_min).coords;
  // [f, phi_phi(conj z)] = sum_j f_j mu_j / (t_j - z)
  const Vector right = d.cwiseProduct(s.mu().cast<Complex>());
  Matrix t = d.asDiagonal();
  t -= (left * right.transpose()) / m;
  return t;
}

/// A deterministic non-real point where q + c is well away from zero.
inline Complex sample_point(const HerglotzSpace& s, const ExtensionParams& p) {
  const auto g = defining_function(s, p);
  const double spread = std::max(1.0, s.atoms().cwiseAbs().maxCoeff());
  static constexpr std::array<std::array<double, 2>, 12> kCandidates{{{0.31, 1.17},
                                                                      {-0.43, 0.89},
                                                                      {0.77, -1.31},
                                                                      {-0.19, -0.71},
                                                                      {1.37, 0.53},
                                                                      {-1.21, 1.63},
                                                                      {0.05, 2.11},
                                                                      {-0.61, -1.93},
                                                                      {1.83, -0.47},
                                                                      {-1.71, 0.37},
                                                                      {0.93, 2.47},
                                                                      {-0.27, -2.59}}};
  Complex best = Complex(kCandidates[0][0], kCandidates[0][1]) * spread;
  double best_score = -1.0;
  for (const auto& c : kCandidates) {
    const Complex z = Complex(c[0], c[1]) * spread;
    const double score = detail::relative_magnitude(g, z);
    if (score > best_score) {
      best_score = score;
      best = z;
    }
  }
  return best;
}

/// The extension as the subspace {(T(z) u, (I + z T(z)) u)}.
inline LinearRelationFD reconstruct_relation(const HerglotzSpace& s, const ExtensionParams& p, Complex z,
                                             const Tolerances& tol = {}) {
  const Matrix t = krein_resolvent(s, p, z, tol);
  const Matrix f = Matrix::Identity(s.dim(), s.dim()) + z * t;
  return LinearRelationFD::from_pencil(t, f, tol.rank_tol);
}

inline LinearRelationFD reconstruct_relation(const HerglotzSpace& s, const ExtensionParams& p,
                                             const Tolerances& tol = {}) {
  return reconstruct_relation(s, p, sample_point(s, p), tol);
}

struct SpectralPoint {
  bool infinite = false;
  Complex location{};
  int algebraic = 0;
  int geometric = 0;
};

struct SpectrumReport {
  std::vector<SpectralPoint> eigenvalues;
  std::vector<Complex> resolvent_set_certified;

  int total_algebraic() const {
    int s = 0;
    for (const auto& e : eigenvalues) s += e.algebraic;
    return s;
  }

  /// finite points sorted by (re, im), then infinity.
  void sort() {
    std::sort(eigenvalues.begin(), eigenvalues.end(), [](const SpectralPoint& l, const SpectralPoint& r) {
      if (l.infinite != r.infinite) return r.infinite;
      if (l.location.real() != r.location.real()) return l.location.real() < r.location.real();
      return l.location.imag() < r.location.imag();
    });
  }
};

namespace detail {

/// Spectrum of the relation spanned by a 2n x n basis [E; F] via its pencil:
/// for a shift sigma with F - sigma E invertible, the eigenvalues theta of
/// (F - sigma E)^{-1} E carry the relation's Jordan structure at
/// lambda = sigma + 1/theta, with theta = 0 standing for infinity.
template <class S>
SpectrumReport pencil_spectrum(const linalg::DenseMatrix<S>& basis, Eigen::Index n, const Tolerances& tol) {
  using Mat = linalg::DenseMatrix<S>;
  using Real = typename S::value_type;
  if (basis.cols() != n) throw Error(ErrorKind::NotAnExtension, "relation dimension differs from space dimension");
  // orthonormal basis: E and F then have norm <= 1
  const Mat q = linalg::orthonormal_basis(basis, 1e-14);
  if (q.cols() != n) throw Error(ErrorKind::NotAnExtension, "relation basis is rank deficient");
  const Mat e = q.topRows(n);
  const Mat f = q.bottomRows(n);
  static constexpr std::array<std::array<double, 2>, 8> kShifts{{{0.23, 0.97},
                                                                 {-0.61, -0.83},
                                                                 {1.13, -0.41},
                                                                 {-1.07, 1.29},
                                                                 {0.0, 0.0},
                                                                 {2.3, 1.9},
                                                                 {-2.9, -1.7},
                                                                 {0.4, -2.6}}};
  S sigma{};
  Real best = -1;
  for (const auto& c : kShifts) {
    const S sh(static_cast<Real>(c[0]), static_cast<Real>(c[1]));
    Eigen::JacobiSVD<Mat> svd(f - sh * e);
    const Real score = svd.singularValues()(n - 1) / (1 + std::abs(sh));
    if (score > best) {
      best = score;
      sigma = sh;
    }
  }
  if (best <= tol.rank_tol) throw Error(ErrorKind::NotAnExtension, "singular pencil: empty resolvent set");
  const Mat m = (f - sigma * e).partialPivLu().solve(e);
  // entries of M below rank_tol / (1 + |sigma|) are rounding in an orthonormal pencil
  const double ref = 1.0 / (1.0 + static_cast<double>(std::abs(sigma)));

  SpectrumReport out;
  out.resolvent_set_certified.push_back(Complex(sigma));
  for (const auto& ev : linalg::matrix_spectrum(m, tol.rank_tol, ref)) {
    SpectralPoint pt;
    pt.algebraic = ev.algebraic;
    pt.geometric = ev.geometric;
    if (std::abs(ev.location) <= 1e-8 * ref) {
      const auto at_zero = linalg::staircase(m, S{}, tol.rank_tol, ref);
      if (at_zero.algebraic == ev.algebraic) {
        pt.infinite = true;
        pt.geometric = std::clamp(at_zero.geometric, 1, ev.algebraic);
      }
    }
    if (!pt.infinite) {
      const S lambda = sigma + Real(1) / ev.location;
      pt.location = Complex(static_cast<double>(lambda.real()), static_cast<double>(lambda.imag()));
    }
    out.eigenvalues.push_back(pt);
  }
  out.sort();
  return out;
}

inline WideComplex widen(Complex z) { return {z.real(), z.imag()}; }

}  // namespace detail

/// Spectrum of an n-dimensional relation via its pencil, computed in
/// extended precision.
inline SpectrumReport relation_spectrum(const LinearRelationFD& r, const Tolerances& tol = {}) {
  return detail::pencil_spectrum<WideComplex>(r.basis().cast<WideComplex>(), r.space_dim(), tol);
}

/// Pencil spectrum of the extension, with T(z) and the relation basis formed
/// in extended precision directly from (v, c). A defective eigenvalue moves
/// by about the square root of the rounding level, so the oracle needs the
/// extra digits to certify clustered spectra at 1e-8.
inline SpectrumReport extension_pencil_spectrum(const HerglotzSpace& s, const ExtensionParams& p,
                                                const Tolerances& tol = {}) {
  s.check_element(p.v);
  const Eigen::Index n = s.dim();
  const Complex zd = sample_point(s, p);
  s.check_off_atoms(zd, tol.sep_min);
  const WideComplex z = detail::widen(zd), i(0, 1);
  std::vector<long double> t(static_cast<std::size_t>(n)), mu(static_cast<std::size_t>(n));
  WideComplex m = detail::widen(p.c);
  for (Eigen::Index k = 0; k < n; ++k) {
    const auto kk = static_cast<std::size_t>(k);
    t[kk] = s.atoms()(k);
    mu[kk] = (1.0L + t[kk] * t[kk]) * static_cast<long double>(s.nu()(k));
    const WideComplex term = detail::widen(p.v.coords(k)) * mu[kk] / (t[kk] + i) * (1.0L + t[kk] * z) / (t[kk] - z);
    m += term;
  }
  if (static_cast<double>(std::abs(m)) <= tol.degenerate_tol)
    throw Error(ErrorKind::QZero, "q(z) + c vanishes at the resolvent point");
  WideMatrix basis = WideMatrix::Zero(2 * n, n);
  for (Eigen::Index a = 0; a < n; ++a) {
    const auto ka = static_cast<std::size_t>(a);
    const WideComplex u = (t[ka] - i) / (t[ka] - z) * detail::widen(p.v.coords(a));
    for (Eigen::Index b = 0; b < n; ++b) {
      const auto kb = static_cast<std::size_t>(b);
      WideComplex tab = -u * (mu[kb] / (t[kb] - z)) / m;
      if (a == b) tab += 1.0L / (t[ka] - z);
      basis(a, b) = tab;
      basis(n + a, b) = z * tab + (a == b ? WideComplex(1) : WideComplex(0));
    }
  }
  return detail::pencil_spectrum<WideComplex>(basis, n, tol);
}

/// Spectrum from the defining function g = q + c: zeros off the atoms are
/// geometrically simple eigenvalues of algebraic multiplicity equal to their
/// order; at an atom, a pole of g gives a resolvent point, a finite nonzero
/// value an eigenvalue of multiplicity 1, and a zero of order m an
/// eigenvalue of multiplicity m + 1. Infinity takes the remaining count.
inline SpectrumReport extension_spectrum(const HerglotzSpace& s, const ExtensionParams& p,
                                         const Tolerances& tol = {}) {
  const auto g = defining_function(s, p);
  if (g.is_zero()) throw Error(ErrorKind::IdenticallyZero, "q_v + c vanishes identically");
  const Complex z0 = sample_point(s, p);
  krein_resolvent(s, p, z0, tol);

  SpectrumReport out;
  out.resolvent_set_certified.push_back(z0);
  const auto zeros = zeros_with_multiplicity(g, tol);
  std::vector<int> atom_zero_order(static_cast<std::size_t>(s.dim()), 0);
  for (const auto& zc : zeros) {
    bool at_atom = false;
    for (Eigen::Index k = 0; k < s.dim(); ++k) {
      const double t = s.atoms()(k);
      if (std::abs(zc.location - t) <= tol.root_tol * (1.0 + std::abs(t))) {
        atom_zero_order[static_cast<std::size_t>(k)] += zc.multiplicity;
        at_atom = true;
        break;
      }
    }
    if (!at_atom) out.eigenvalues.push_back({false, zc.location, zc.multiplicity, 1});
  }
  for (Eigen::Index k = 0; k < s.dim(); ++k) {
    const double t = s.atoms()(k);
    bool pole = false;
    for (const auto& at : g.nu)
      if (at.t == t) pole = true;
    if (pole) {
      out.resolvent_set_certified.push_back(t);
      continue;
    }
    out.eigenvalues.push_back({false, Complex(t, 0.0), atom_zero_order[static_cast<std::size_t>(k)] + 1, 1});
  }
  const int remaining = static_cast<int>(s.dim()) - out.total_algebraic();
  if (remaining > 0) out.eigenvalues.push_back({true, {}, remaining, 1});
  out.sort();
  return out;
}

struct SpectrumComparison {
  bool match = false;
  double max_location_error = 0.0;
};

/// Matches two spectra point by point: same multiplicities, locations within
/// loc_tol * max(1, |lambda|).
inline SpectrumComparison compare_spectra(const SpectrumReport& a, const SpectrumReport& b, double loc_tol) {
  SpectrumComparison out;
  out.match = a.eigenvalues.size() == b.eigenvalues.size();
  std::vector<bool> used(b.eigenvalues.size(), false);
  for (const auto& pa : a.eigenvalues) {
    std::size_t best = b.eigenvalues.size();
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < b.eigenvalues.size(); ++j) {
      const auto& pb = b.eigenvalues[j];
      if (used[j] || pb.infinite != pa.infinite) continue;
      const double d = pa.infinite ? 0.0 : std::abs(pa.location - pb.location);
      if (d < best_d) {
        best_d = d;
        best = j;
      }
    }
    if (best == b.eigenvalues.size()) {
      out.match = false;
      continue;
    }
    used[best] = true;
    const auto& pb = b.eigenvalues[best];
    const double rel = best_d / std::max(1.0, std::abs(pa.location));
    out.max_location_error = std::max(out.max_location_error, rel);
    if (rel > loc_tol || pa.algebraic != pb.algebraic || pa.geometric != pb.geometric) out.match = false;
  }
  return out;
}

/// phi_v(w) for a zero w of q + c, certified to satisfy (phi_v(w), w phi_v(w)) in the extension.
inline SpaceElement eigenvector_check(const HerglotzSpace& s, const ExtensionParams& p, Complex w,
                                      const Tolerances& tol = {}) {
  const auto g = defining_function(s, p);
  for (Eigen::Index k = 0; k < s.dim(); ++k)
    if (std::abs(w - s.atoms()(k)) < tol.sep_min)
      throw Error(ErrorKind::NotAnEigenvalue, "eigenvector check at an atom");
  if (detail::relative_magnitude(g, w) > tol.root_tol)
    throw Error(ErrorKind::NotAnEigenvalue, "q(w) + c does not vanish");
  const SpaceElement f = phi_field(s, p.v, w, tol.sep_min);
  const auto rel = reconstruct_relation(s, p, tol);
  Matrix pair(2 * s.dim(), 1);
  pair << f.coords, w * f.coords;
  if (f.coords.norm() == 0.0 || linalg::containment_residual(rel.basis(), pair) > 1e-9)
    throw Error(ErrorKind::NotAnEigenvalue, "phi_v(w) is not an eigenvector of the extension");
  return f;
}

/// Converse direction: recovers (v, c) from R = (A~ - w)^{-1} sampled at one
/// non-real point, fixing the gauge q(w) + c = 1.
inline ExtensionParams identify_params(const HerglotzSpace& s, const Matrix& r_sample, Complex w,
                                       const Tolerances& tol = {}) {
  if (w.imag() == 0.0) throw Error(ErrorKind::InvalidArgument, "identify_params needs a non-real point");
  const Eigen::Index n = s.dim();
  if (r_sample.rows() != n || r_sample.cols() != n)
    throw Error(ErrorKind::DimensionMismatch, "sampled resolvent has wrong shape");
  const Vector d = s.resolvent_diagonal(w, tol.sep_min);
  const Matrix delta = r_sample - Matrix(d.asDiagonal());
  const double ref = Eigen::JacobiSVD<Matrix>(r_sample).singularValues()(0) + d.cwiseAbs().maxCoeff();
  const auto sv = Eigen::JacobiSVD<Matrix>(delta).singularValues();
  if (sv(0) <= tol.rank_tol * ref) return {SpaceElement::zero(n), 1.0};
  if (n > 1 && sv(1) > tol.rank_tol * ref) throw Error(ErrorKind::NotRankOne, "resolvent difference has rank > 1");
  // delta = -y r^T with r_j = mu_j / (t_j - w), i.e. -[., phi_phi(conj w)] y
  const Vector r = d.cwiseProduct(s.mu().cast<Complex>());
  const Vector y = -(delta * r.conjugate()) / r.squaredNorm();
  const double resid = (delta + y * r.transpose()).norm() / delta.norm();
  if (resid > 1e-8) throw Error(ErrorKind::NotAnExtension, "left factor is not proportional to phi_phi(conj w)");
  // v = (I + (i - w)(A - i)^{-1}) y
  Vector v(n);
  for (Eigen::Index k = 0; k < n; ++k) v(k) = (s.atoms()(k) - w) / (s.atoms()(k) - kI) * y(k);
  const SpaceElement ve(std::move(v));
  const Complex q_w = evaluate(normalized_q(s, ve), w, tol.sep_min);
  return {ve, 1.0 - q_w};
}

/// Parameters whose defining function is P(z) / prod_k (t_k - z), deg P <= n.
/// A value |P(t_k)| at rounding level relative to P's scale at t_k is taken
/// as an exact root, so a factor (t_k - z) in P really cancels the pole.
inline ExtensionParams params_from_numerator(const HerglotzSpace& s, const Polynomial& num,
                                             double root_snap = 64 * std::numeric_limits<double>::epsilon()) {
  const Eigen::Index n = s.dim();
  if (num.degree() > n) throw Error(ErrorKind::InvalidArgument, "numerator degree exceeds space dimension");
  // g = g_inf + sum_k beta_k / (t_k - z)
  const Complex g_inf = num.coeff(static_cast<std::size_t>(n)) * (n % 2 == 0 ? 1.0 : -1.0);
  Vector rho(n);
  Complex c = g_inf;
  for (Eigen::Index k = 0; k < n; ++k) {
    const double tk = s.atoms()(k);
    Complex denom = 1.0;
    for (Eigen::Index j = 0; j < n; ++j)
      if (j != k) denom *= s.atoms()(j) - tk;
    const Complex ptk = num(tk);
    const Complex beta = std::abs(ptk) <= root_snap * num.scale_at(tk) ? Complex{} : ptk / denom;
    rho(k) = beta / (1.0 + tk * tk);
    c += rho(k) * tk;
  }
  Vector v(n);
  for (Eigen::Index k = 0; k < n; ++k) v(k) = rho(k) * (s.atoms()(k) + kI) / s.mu()(k);
  return {SpaceElement(std::move(v)), c};
}

/// Parameters (v, c) whose defining function has exactly the prescribed
/// non-real zeros; any remaining multiplicity is placed at infinity.
/// Written as P(z) / prod_k (t_k - z), the conditions g^(j)(z_l) = 0 for
/// j < m_l and vanishing at infinity to order n - M force P to be a multiple
/// of prod_l (z - z_l)^{m_l}, so the problem is solvable iff M <= n.
inline ExtensionParams interpolate_spectrum(const HerglotzSpace& s, const std::vector<RootCluster>& zeros,
                                            const Tolerances& tol = {}) {
  const Eigen::Index n = s.dim();
  int total = 0;
  for (std::size_t l = 0; l < zeros.size(); ++l) {
    const auto& z = zeros[l];
    if (z.multiplicity < 1) throw Error(ErrorKind::InvalidArgument, "multiplicities must be positive");
    if (std::abs(z.location.imag()) <= tol.sep_min)
      throw Error(ErrorKind::InvalidArgument, "prescribed zeros must be non-real");
    for (std::size_t j = 0; j < l; ++j)
      if (std::abs(zeros[j].location - z.location) <= tol.sep_min)
        throw Error(ErrorKind::InvalidArgument, "prescribed zeros must be distinct");
    total += z.multiplicity;
  }
  if (total > n) throw Error(ErrorKind::Infeasible, "total multiplicity exceeds the space dimension");
  if (total == 0) return {SpaceElement::zero(n), 1.0};

  // The solution space of the interpolation conditions is spanned by the
  // numerator prod_l (z - z_l)^{m_l}; its partial fractions over the atoms
  // give (v, c) without forming the ill-conditioned derivative rows.
  std::vector<Complex> roots;
  for (const auto& z : zeros)
    for (int j = 0; j < z.multiplicity; ++j) roots.push_back(z.location);
  ExtensionParams p = params_from_numerator(s, Polynomial::from_roots(roots));
  // (v, c) and a common multiple define the same extension; fix the scale
  const double scale = std::max(std::abs(p.c), p.v.coords.cwiseAbs().maxCoeff());
  if (!(scale > 0.0) || !std::isfinite(scale)) throw Error(ErrorKind::Infeasible, "degenerate interpolation data");
  p.v.coords /= scale;
  p.c /= scale;
  return make_params(s, std::move(p.v), p.c);
}

struct BlaschkeSum {
  bool satisfied;
  double sum;
};

/// Blaschke sum sum_k |Im(1/z_k)| for points in one open half-plane.
inline BlaschkeSum blaschke_condition(const std::vector<Complex>& zs) {
  if (zs.empty()) return {true, 0.0};
  const bool upper = zs.front().imag() > 0.0;
  double sum = 0.0;
  for (const auto& z : zs) {
    if (z.imag() == 0.0 || (z.imag() > 0.0) != upper)
      throw Error(ErrorKind::MixedHalfPlanes, "points are not in a single open half-plane");
    sum += std::abs((1.0 / z).imag());
  }
  return {true, sum};
}

}  // namespace krein
