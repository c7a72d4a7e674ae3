#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <Eigen/Eigenvalues>

#include "krein/types.hpp"

namespace krein {

/// Dense complex polynomial, coefficients in ascending powers.
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(std::vector<Complex> coeffs) : c_(std::move(coeffs)) {}

  static Polynomial constant(Complex a) { return Polynomial({a}); }

  /// a + b*z
  static Polynomial linear(Complex a, Complex b) { return Polynomial({a, b}); }

  static Polynomial from_roots(const std::vector<Complex>& roots, Complex lead = 1.0) {
    Polynomial p = constant(lead);
    for (const auto& r : roots) p = p * linear(-r, 1.0);
    return p;
  }

  const std::vector<Complex>& coeffs() const noexcept { return c_; }
  Complex coeff(std::size_t k) const { return k < c_.size() ? c_[k] : Complex{}; }

  /// Formal degree (length - 1); -1 for the empty polynomial.
  int degree() const noexcept { return static_cast<int>(c_.size()) - 1; }

  bool is_zero() const {
    return std::all_of(c_.begin(), c_.end(), [](Complex x) { return x == Complex{}; });
  }

  double max_abs_coeff() const {
    double m = 0.0;
    for (const auto& x : c_) m = std::max(m, std::abs(x));
    return m;
  }

  /// Sum_k |c_k| max(1,|z|)^k: the natural scale for |p(z)|.
  double scale_at(Complex z) const {
    const double r = std::max(1.0, std::abs(z));
    double s = 0.0, pw = 1.0;
    for (const auto& x : c_) {
      s += std::abs(x) * pw;
      pw *= r;
    }
    return s;
  }

  Complex operator()(Complex z) const {
    Complex acc{};
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * z + *it;
    return acc;
  }

  Polynomial derivative() const {
    if (c_.size() <= 1) return Polynomial({Complex{}});
    std::vector<Complex> d(c_.size() - 1);
    for (std::size_t k = 1; k < c_.size(); ++k) d[k - 1] = static_cast<double>(k) * c_[k];
    return Polynomial(std::move(d));
  }

  Polynomial derivative(int order) const {
    Polynomial p = *this;
    for (int j = 0; j < order; ++j) p = p.derivative();
    return p;
  }

  /// Drops leading coefficients with |c| <= rel_tol * max|c|.
  Polynomial trimmed(double rel_tol) const {
    const double cut = rel_tol * max_abs_coeff();
    std::vector<Complex> c = c_;
    while (!c.empty() && std::abs(c.back()) <= cut) c.pop_back();
    return Polynomial(std::move(c));
  }

  friend Polynomial operator+(const Polynomial& l, const Polynomial& r) {
    std::vector<Complex> c(std::max(l.c_.size(), r.c_.size()));
    for (std::size_t k = 0; k < c.size(); ++k) c[k] = l.coeff(k) + r.coeff(k);
    return Polynomial(std::move(c));
  }

  friend Polynomial operator-(const Polynomial& l, const Polynomial& r) { return l + (-1.0) * r; }

  friend Polynomial operator*(const Polynomial& l, const Polynomial& r) {
    if (l.c_.empty() || r.c_.empty()) return Polynomial();
    std::vector<Complex> c(l.c_.size() + r.c_.size() - 1);
    for (std::size_t i = 0; i < l.c_.size(); ++i)
      for (std::size_t j = 0; j < r.c_.size(); ++j) c[i + j] += l.c_[i] * r.c_[j];
    return Polynomial(std::move(c));
  }

  friend Polynomial operator*(Complex s, const Polynomial& p) {
    std::vector<Complex> c = p.c_;
    for (auto& x : c) x *= s;
    return Polynomial(std::move(c));
  }

 private:
  std::vector<Complex> c_;
};

/// Roots of p (leading zeros must already be trimmed) as eigenvalues of the companion matrix.
inline std::vector<Complex> companion_roots(const Polynomial& p) {
  const int d = p.degree();
  if (d < 1) return {};
  const Complex lead = p.coeff(static_cast<std::size_t>(d));
  if (lead == Complex{}) throw Error(ErrorKind::InvalidArgument, "companion_roots: zero leading coefficient");
  Matrix comp = Matrix::Zero(d, d);
  for (int k = 1; k < d; ++k) comp(k, k - 1) = 1.0;
  for (int k = 0; k < d; ++k) comp(k, d - 1) = -p.coeff(static_cast<std::size_t>(k)) / lead;
  Eigen::ComplexEigenSolver<Matrix> es(comp, /*computeEigenvectors=*/false);
  std::vector<Complex> roots(es.eigenvalues().data(), es.eigenvalues().data() + d);
  return roots;
}

template <class Point>
struct BasicRootCluster {
  Point location;
  int multiplicity;
};

using RootCluster = BasicRootCluster<Complex>;

namespace detail {

/// Greedy nearest-neighbour clustering. For each unassigned point the
/// largest group of its nearest neighbours whose centroid passes `accept`
/// is taken; singletons are always accepted.
template <class Point, class Accept>
std::vector<BasicRootCluster<Point>> cluster_points(const std::vector<Point>& pts, Accept&& accept) {
  const std::size_t n = pts.size();
  std::vector<bool> used(n, false);
  std::vector<BasicRootCluster<Point>> out;
  for (std::size_t i = 0; i < n; ++i) {
    if (used[i]) continue;
    std::vector<std::size_t> cand;
    for (std::size_t j = 0; j < n; ++j)
      if (!used[j] && j != i) cand.push_back(j);
    std::sort(cand.begin(), cand.end(), [&](std::size_t a, std::size_t b) {
      return std::abs(pts[a] - pts[i]) < std::abs(pts[b] - pts[i]);
    });
    std::size_t best = 0;
    Point best_center = pts[i];
    for (std::size_t extra = cand.size(); extra > 0; --extra) {
      Point center = pts[i];
      for (std::size_t k = 0; k < extra; ++k) center += pts[cand[k]];
      center /= static_cast<typename Point::value_type>(extra + 1);
      Point refined = center;
      if (accept(center, static_cast<int>(extra + 1), refined)) {
        best = extra;
        best_center = refined;
        break;
      }
    }
    used[i] = true;
    for (std::size_t k = 0; k < best; ++k) used[cand[k]] = true;
    if (best == 0) {
      Point refined = pts[i];
      accept(pts[i], 1, refined);
      best_center = refined;
    }
    out.push_back({best_center, static_cast<int>(best + 1)});
  }
  return out;
}

}  // namespace detail

/// True when p and its first m-1 derivatives (scaled by 1/j!) vanish at z
/// relative to tol * scale(p, z), and the m-th does not.
inline bool has_zero_of_order(const Polynomial& p, Complex z, int m, double tol) {
  const double scale = p.scale_at(z);
  Polynomial d = p;
  double fact = 1.0;
  for (int j = 0; j < m; ++j) {
    if (j > 0) fact *= j;
    if (std::abs(d(z)) / fact > tol * scale) return false;
    d = d.derivative();
  }
  fact *= std::max(1, m);
  return std::abs(d(z)) / fact > tol * scale;
}

/// Roots of p with multiplicities. Candidate groups are centroids of
/// companion eigenvalues, accepted when the derivative test passes at
/// `root_tol`; accepted centroids are polished by Newton steps on p^(m-1).
inline std::vector<RootCluster> roots_with_multiplicity(const Polynomial& p, double root_tol) {
  const auto raw = companion_roots(p);
  auto accept = [&](Complex center, int m, Complex& refined) {
    Complex z = center;
    const Polynomial dm1 = p.derivative(m - 1);
    const Polynomial dm = dm1.derivative();
    for (int it = 0; it < 4; ++it) {
      const Complex fz = dm1(z);
      const Complex dz = dm(z);
      if (dz == Complex{}) break;
      const Complex next = z - fz / dz;
      if (std::abs(dm1(next)) >= std::abs(fz)) break;
      z = next;
    }
    if (has_zero_of_order(p, z, m, root_tol)) {
      refined = z;
      return true;
    }
    if (has_zero_of_order(p, center, m, root_tol)) {
      refined = center;
      return true;
    }
    refined = (m == 1) ? z : center;
    return false;
  };
  return detail::cluster_points(raw, accept);
}

}  // namespace krein
