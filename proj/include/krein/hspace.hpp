#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include "krein/linalg.hpp"
#include "krein/measures.hpp"
#include "krein/qherglotz.hpp"
#include "krein/types.hpp"

namespace krein {

/// An element of L(h), stored by its L^2(mu) coordinates f; the function
/// itself is the Cauchy transform z -> sum_k f_k mu_k / (t_k - z).
struct SpaceElement {
  Vector coords;

  SpaceElement() = default;
  explicit SpaceElement(Vector c) : coords(std::move(c)) {}

  static SpaceElement zero(Eigen::Index n) { return SpaceElement(Vector::Zero(n)); }

  Eigen::Index size() const noexcept { return coords.size(); }

  friend SpaceElement operator+(const SpaceElement& l, const SpaceElement& r) {
    return SpaceElement(l.coords + r.coords);
  }
  friend SpaceElement operator*(Complex s, const SpaceElement& e) { return SpaceElement(s * e.coords); }
};

/// The Herglotz space of h = a + sum_k nu_k (1 + t_k z)/(t_k - z), realised on
/// the n atoms with weights mu_k = (1 + t_k^2) nu_k.
class HerglotzSpace {
 public:
  HerglotzSpace(const NonnegAtomicMeasure& nu, double a) : h_{a, 0.0, to_complex(nu)} {
    if (nu.empty()) throw Error(ErrorKind::EmptyMeasure, "Herglotz space needs at least one atom");
    const auto n = static_cast<Eigen::Index>(nu.size());
    t_.resize(n);
    nu_.resize(n);
    mu_.resize(n);
    for (Eigen::Index k = 0; k < n; ++k) {
      const auto& at = nu.atoms()[static_cast<std::size_t>(k)];
      t_(k) = at.t;
      nu_(k) = at.w;
      mu_(k) = (1.0 + at.t * at.t) * at.w;
    }
    measure_ = nu;
  }

  Eigen::Index dim() const noexcept { return t_.size(); }
  const QuasiHerglotz& h() const noexcept { return h_; }
  double a() const noexcept { return h_.a.real(); }
  const NonnegAtomicMeasure& nu_measure() const noexcept { return measure_; }
  const Eigen::VectorXd& atoms() const noexcept { return t_; }
  const Eigen::VectorXd& nu() const noexcept { return nu_; }
  const Eigen::VectorXd& mu() const noexcept { return mu_; }

  void check_off_atoms(Complex z, double sep_min = Tolerances{}.sep_min) const {
    for (Eigen::Index k = 0; k < dim(); ++k)
      if (std::abs(z - t_(k)) < sep_min) throw PoleError(t_(k));
  }

  void check_element(const SpaceElement& f) const {
    if (f.size() != dim()) throw Error(ErrorKind::DimensionMismatch, "element length does not match space dimension");
  }

  /// diag(1 / (t_k - z))
  Vector resolvent_diagonal(Complex z, double sep_min = Tolerances{}.sep_min) const {
    check_off_atoms(z, sep_min);
    Vector d(dim());
    for (Eigen::Index k = 0; k < dim(); ++k) d(k) = 1.0 / (t_(k) - z);
    return d;
  }

 private:
  QuasiHerglotz h_;
  NonnegAtomicMeasure measure_;
  Eigen::VectorXd t_, nu_, mu_;
};

inline HerglotzSpace make_space(const NonnegAtomicMeasure& nu, double a) { return HerglotzSpace(nu, a); }

/// Finite-dimensional linear relation: the column space of a 2n x k basis
/// in H + H, i.e. {(E u, F u)} with E the top and F the bottom block.
class LinearRelationFD {
 public:
  LinearRelationFD(Matrix basis, Eigen::Index space_dim, double rank_tol = Tolerances{}.rank_tol)
      : n_(space_dim) {
    if (basis.rows() != 2 * space_dim)
      throw Error(ErrorKind::DimensionMismatch, "relation basis must have 2n rows");
    if (basis.cols() > 0 && linalg::numerical_rank(basis, rank_tol) != basis.cols())
      throw Error(ErrorKind::InvalidArgument, "relation basis columns are linearly dependent");
    basis_ = std::move(basis);
  }

  static LinearRelationFD from_pencil(const Matrix& e, const Matrix& f, double rank_tol = Tolerances{}.rank_tol) {
    Matrix b(e.rows() + f.rows(), e.cols());
    b << e, f;
    return LinearRelationFD(std::move(b), e.rows(), rank_tol);
  }

  /// Graph {(x, B x)} of a square matrix.
  static LinearRelationFD graph(const Matrix& op) {
    return from_pencil(Matrix::Identity(op.rows(), op.cols()), op);
  }

  Eigen::Index space_dim() const noexcept { return n_; }
  Eigen::Index dim() const noexcept { return basis_.cols(); }
  const Matrix& basis() const noexcept { return basis_; }
  Matrix e() const { return basis_.topRows(n_); }
  Matrix f() const { return basis_.bottomRows(n_); }

  int dom_dim(double rank_tol = Tolerances{}.rank_tol) const {
    return linalg::numerical_rank(e(), rank_tol, basis_.norm());
  }

  /// dim {g : (0, g) in R}
  int mul_dim(double rank_tol = Tolerances{}.rank_tol) const {
    return static_cast<int>(dim()) - dom_dim(rank_tol);
  }

  /// Relative norm of the part of `other` outside this relation.
  double containment_residual(const LinearRelationFD& other) const {
    return linalg::containment_residual(basis_, other.basis_);
  }

  double distance(const LinearRelationFD& other) const {
    return linalg::subspace_distance(basis_, other.basis_);
  }

 private:
  Eigen::Index n_;
  Matrix basis_;
};

/// Nevanlinna kernel via the coordinate sum sum_k mu_k / ((t_k - z)(t_k - conj w)).
inline Complex kernel(const HerglotzSpace& s, Complex z, Complex w, double sep_min = Tolerances{}.sep_min) {
  s.check_off_atoms(z, sep_min);
  s.check_off_atoms(w, sep_min);
  Complex acc{};
  for (Eigen::Index k = 0; k < s.dim(); ++k)
    acc += s.mu()(k) / ((s.atoms()(k) - z) * (s.atoms()(k) - std::conj(w)));
  return acc;
}

/// Nevanlinna kernel from h: (h(z) - conj h(w)) / (z - conj w), with h'(z) on
/// the diagonal z = conj w.
inline Complex kernel_from_h(const HerglotzSpace& s, Complex z, Complex w,
                             double sep_min = Tolerances{}.sep_min) {
  s.check_off_atoms(z, sep_min);
  s.check_off_atoms(w, sep_min);
  const Complex wb = std::conj(w);
  if (std::abs(z - wb) <= 1e-12 * (1.0 + std::abs(z))) return derivative(s.h(), z, 1, sep_min);
  return (evaluate(s.h(), z, sep_min) - std::conj(evaluate(s.h(), w, sep_min))) / (z - wb);
}

inline Complex eval_element(const HerglotzSpace& s, const SpaceElement& f, Complex z,
                            double sep_min = Tolerances{}.sep_min) {
  s.check_element(f);
  s.check_off_atoms(z, sep_min);
  Complex acc{};
  for (Eigen::Index k = 0; k < s.dim(); ++k) acc += f.coords(k) * s.mu()(k) / (s.atoms()(k) - z);
  return acc;
}

inline Complex inner(const HerglotzSpace& s, const SpaceElement& f, const SpaceElement& g) {
  if (f.size() != g.size() || f.size() != s.dim())
    throw Error(ErrorKind::DimensionMismatch, "inner product of mismatched elements");
  Complex acc{};
  for (Eigen::Index k = 0; k < s.dim(); ++k) acc += f.coords(k) * std::conj(g.coords(k)) * s.mu()(k);
  return acc;
}

/// D_w f = (A - w)^{-1} f, coordinates f_k / (t_k - w).
inline SpaceElement diff_quotient(const HerglotzSpace& s, const SpaceElement& f, Complex w,
                                  double sep_min = Tolerances{}.sep_min) {
  s.check_element(f);
  return SpaceElement(s.resolvent_diagonal(w, sep_min).cwiseProduct(f.coords));
}

/// Coordinates 1 / (t_k - w), spanning ker(S* - w).
inline SpaceElement defect_vector(const HerglotzSpace& s, Complex w, double sep_min = Tolerances{}.sep_min) {
  return SpaceElement(s.resolvent_diagonal(w, sep_min));
}

/// Coordinates of the kernel function N_h(., w): 1 / (t_k - conj w).
inline SpaceElement kernel_element(const HerglotzSpace& s, Complex w, double sep_min = Tolerances{}.sep_min) {
  return defect_vector(s, std::conj(w), sep_min);
}

/// Orthonormal (Euclidean) basis of dom S = {f : sum_k f_k mu_k = 0}.
inline Matrix sym_domain_basis(const HerglotzSpace& s) {
  Matrix row(1, s.dim());
  for (Eigen::Index k = 0; k < s.dim(); ++k) row(0, k) = s.mu()(k);
  return linalg::null_space(row, 1e-14);
}

inline Matrix multiplication_operator(const HerglotzSpace& s) {
  return s.atoms().cast<Complex>().asDiagonal();
}

struct SymmetricPair {
  LinearRelationFD sym;
  LinearRelationFD selfadjoint;
};

/// S_h as {(u, A u) : u in dom S} and A_h as the graph of diag(t).
inline SymmetricPair sym_and_selfadjoint(const HerglotzSpace& s) {
  const Matrix a = multiplication_operator(s);
  const Matrix dom = sym_domain_basis(s);
  return {LinearRelationFD::from_pencil(dom, a * dom), LinearRelationFD::graph(a)};
}

/// Numerical rank of the matrix of defect vectors at the probes.
inline int simplicity_rank(const HerglotzSpace& s, const std::vector<Complex>& probes,
                           const Tolerances& tol = {}) {
  if (static_cast<Eigen::Index>(probes.size()) < s.dim())
    throw Error(ErrorKind::TooFewProbes, "need at least n probes");
  Matrix cols(s.dim(), static_cast<Eigen::Index>(probes.size()));
  for (std::size_t j = 0; j < probes.size(); ++j) {
    if (probes[j].imag() == 0.0) throw Error(ErrorKind::InvalidArgument, "simplicity probes must be non-real");
    cols.col(static_cast<Eigen::Index>(j)) = defect_vector(s, probes[j], tol.sep_min).coords;
  }
  return linalg::numerical_rank(cols, tol.rank_tol);
}

}  // namespace krein
