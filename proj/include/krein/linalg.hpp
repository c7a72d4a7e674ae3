#pragma once

#include <algorithm>
#include <cmath>
#include <type_traits>
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "krein/polynomial.hpp"
#include "krein/types.hpp"

namespace krein::linalg {

template <class S>
using DenseMatrix = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;

/// Number of singular values above rel_tol * sigma_max (or above rel_tol * ref when ref > 0).
template <class S>
int numerical_rank(const DenseMatrix<S>& m, double rel_tol, double ref = 0.0) {
  if (m.rows() == 0 || m.cols() == 0) return 0;
  Eigen::JacobiSVD<DenseMatrix<S>> svd(m);
  const auto& s = svd.singularValues();
  const auto base = ref > 0.0 ? static_cast<typename S::value_type>(ref) : s(0);
  if (base == 0) return 0;
  int r = 0;
  for (Eigen::Index k = 0; k < s.size(); ++k)
    if (s(k) > rel_tol * base) ++r;
  return r;
}

/// Orthonormal basis of the column space.
template <class S>
DenseMatrix<S> orthonormal_basis(const DenseMatrix<S>& m, double rel_tol) {
  if (m.cols() == 0) return DenseMatrix<S>(m.rows(), 0);
  Eigen::JacobiSVD<DenseMatrix<S>> svd(m, Eigen::ComputeThinU);
  const auto& s = svd.singularValues();
  int r = 0;
  for (Eigen::Index k = 0; k < s.size(); ++k)
    if (s(0) > 0 && s(k) > rel_tol * s(0)) ++r;
  return svd.matrixU().leftCols(r);
}

/// Orthonormal basis of the right null space.
inline Matrix null_space(const Matrix& m, double rel_tol, double ref = 0.0) {
  const Eigen::Index n = m.cols();
  if (m.rows() == 0) return Matrix::Identity(n, n);
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  const double base = ref > 0.0 ? ref : (s.size() ? s(0) : 0.0);
  int r = 0;
  for (Eigen::Index k = 0; k < s.size(); ++k)
    if (base > 0.0 && s(k) > rel_tol * base) ++r;
  return svd.matrixV().rightCols(n - r);
}

/// Largest principal-angle sine between two column spaces (equal dimension
/// assumed); returns 1 when the dimensions differ.
inline double subspace_distance(const Matrix& a, const Matrix& b, double rel_tol = 1e-12) {
  const Matrix qa = orthonormal_basis(a, rel_tol);
  const Matrix qb = orthonormal_basis(b, rel_tol);
  if (qa.cols() != qb.cols()) return 1.0;
  if (qa.cols() == 0) return 0.0;
  const Matrix diff = qa * qa.adjoint() - qb * qb.adjoint();
  Eigen::JacobiSVD<Matrix> svd(diff);
  return svd.singularValues()(0);
}

/// Norm of the component of `cols` outside span(basis), relative to ||cols||.
inline double containment_residual(const Matrix& basis, const Matrix& cols, double rel_tol = 1e-12) {
  if (cols.cols() == 0) return 0.0;
  const double nc = cols.norm();
  if (nc == 0.0) return 0.0;
  const Matrix q = orthonormal_basis(basis, rel_tol);
  const Matrix resid = cols - q * (q.adjoint() * cols);
  return resid.norm() / nc;
}

struct LocalMultiplicity {
  int algebraic = 0;
  int geometric = 0;
};

/// Rank-sequence (staircase) multiplicities of M at theta: nullities of
/// (M - theta)^k computed by repeatedly restricting to the column space of
/// the previous power. Rank threshold is rel_tol * max(||M||, ref).
template <class S>
LocalMultiplicity staircase(const DenseMatrix<S>& m, std::type_identity_t<S> theta, double rel_tol,
                            double ref_norm = 0.0) {
  using Real = typename S::value_type;
  using Mat = DenseMatrix<S>;
  const Eigen::Index n = m.rows();
  LocalMultiplicity out;
  if (n == 0) return out;
  const Mat shifted = m - theta * Mat::Identity(n, n);
  Eigen::JacobiSVD<Mat> norm_svd(m);
  const Real norm = norm_svd.singularValues()(0);
  const Real ref = std::max(norm, Real(ref_norm)) > 0 ? std::max(norm, Real(ref_norm)) : Real(1);
  Mat range = Mat::Identity(n, n);
  int prev_rank = static_cast<int>(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const Mat img = shifted * range;
    Eigen::JacobiSVD<Mat> svd(img, Eigen::ComputeThinU);
    const auto& s = svd.singularValues();
    int r = 0;
    for (Eigen::Index j = 0; j < s.size(); ++j)
      if (s(j) > rel_tol * ref) ++r;
    if (k == 0) out.geometric = static_cast<int>(n) - r;
    if (r == prev_rank) break;
    prev_rank = r;
    range = svd.matrixU().leftCols(r);
    if (r == 0) break;
  }
  out.algebraic = static_cast<int>(n) - prev_rank;
  return out;
}

template <class S = Complex>
struct MatrixEigenvalue {
  S location;
  int algebraic;
  int geometric;
};

/// Eigenvalues of a dense square matrix with multiplicities. Eigenvalues
/// from the dense solver are grouped around centroids; a group of size m is
/// accepted when the staircase at its centroid reports algebraic
/// multiplicity exactly m.
template <class S>
std::vector<MatrixEigenvalue<S>> matrix_spectrum(const DenseMatrix<S>& m, double rank_tol, double ref_norm = 0.0) {
  if (m.rows() == 0) return {};
  Eigen::ComplexEigenSolver<DenseMatrix<S>> es(m, /*computeEigenvectors=*/false);
  const auto& ev = es.eigenvalues();
  std::vector<S> pts(ev.data(), ev.data() + ev.size());
  std::vector<MatrixEigenvalue<S>> out;
  auto accept = [&](S center, int mult, S& refined) {
    refined = center;
    return staircase(m, center, rank_tol, ref_norm).algebraic == mult;
  };
  for (const auto& c : detail::cluster_points(pts, accept)) {
    const auto lm = staircase(m, c.location, rank_tol, ref_norm);
    out.push_back({c.location, c.multiplicity, std::clamp(lm.geometric, 1, c.multiplicity)});
  }
  return out;
}

}  // namespace krein::linalg
