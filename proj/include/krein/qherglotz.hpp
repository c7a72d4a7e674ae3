#pragma once

#include <array>
#include <cmath>
#include <vector>

#include "krein/measures.hpp"
#include "krein/polynomial.hpp"
#include "krein/types.hpp"

namespace krein {

/// q(z) = a + b z + sum_k (1 + t_k z) / (t_k - z) w_k for an atomic complex
/// measure nu = {(t_k, w_k)}. The triple is the canonical representation.
struct QuasiHerglotz {
  Complex a{};
  Complex b{};
  ComplexAtomicMeasure nu;

  bool is_zero() const { return a == Complex{} && b == Complex{} && nu.empty(); }

  friend bool operator==(const QuasiHerglotz&, const QuasiHerglotz&) = default;
};

/// numerator / denominator with denominator = prod_k (t_k - z) over the atoms.
struct RationalForm {
  Polynomial numerator;
  Polynomial denominator;

  Complex operator()(Complex z) const { return numerator(z) / denominator(z); }
};

namespace detail {

inline void check_off_atoms(const ComplexAtomicMeasure& nu, Complex z, double sep_min) {
  for (const auto& at : nu) {
    if (std::abs(z - Complex(at.t, 0.0)) < sep_min) throw PoleError(at.t);
  }
}

}  // namespace detail

inline Complex evaluate(const QuasiHerglotz& q, Complex z, double sep_min = Tolerances{}.sep_min) {
  detail::check_off_atoms(q.nu, z, sep_min);
  Complex acc = q.a + q.b * z;
  for (const auto& at : q.nu) acc += (1.0 + at.t * z) / (at.t - z) * at.w;
  return acc;
}

/// j-th derivative of q at z (j >= 0).
inline Complex derivative(const QuasiHerglotz& q, Complex z, int order,
                          double sep_min = Tolerances{}.sep_min) {
  if (order == 0) return evaluate(q, z, sep_min);
  detail::check_off_atoms(q.nu, z, sep_min);
  double fact = 1.0;
  for (int j = 2; j <= order; ++j) fact *= j;
  Complex acc = order == 1 ? q.b : Complex{};
  for (const auto& at : q.nu)
    acc += at.w * (1.0 + at.t * at.t) * fact / std::pow(Complex(at.t, 0.0) - z, order + 1);
  return acc;
}

inline QuasiHerglotz shift_constant(const QuasiHerglotz& q, Complex c) { return {q.a + c, q.b, q.nu}; }

inline QuasiHerglotz scaled(const QuasiHerglotz& q, Complex s) {
  return {s * q.a, s * q.b, linear_combination(s, q.nu, 0.0, {})};
}

/// alpha * l + beta * r as a triple.
inline QuasiHerglotz linear_combination(Complex alpha, const QuasiHerglotz& l, Complex beta,
                                        const QuasiHerglotz& r) {
  return {alpha * l.a + beta * r.a, alpha * l.b + beta * r.b,
          linear_combination(alpha, l.nu, beta, r.nu)};
}

inline RationalForm rational_form(const QuasiHerglotz& q) {
  Polynomial den = Polynomial::constant(1.0);
  for (const auto& at : q.nu) den = den * Polynomial::linear(at.t, -1.0);
  Polynomial num = Polynomial::linear(q.a, q.b) * den;
  for (std::size_t k = 0; k < q.nu.size(); ++k) {
    const auto& at = q.nu.atoms()[k];
    Polynomial term = Polynomial::linear(at.w, at.w * at.t);
    for (std::size_t j = 0; j < q.nu.size(); ++j) {
      if (j != k) term = term * Polynomial::linear(q.nu.atoms()[j].t, -1.0);
    }
    num = num + term;
  }
  return {num, den};
}

/// Zeros of q with multiplicities: roots of the (trimmed) numerator, minus
/// roots that coincide with atoms of nu.
inline std::vector<RootCluster> zeros_with_multiplicity(const QuasiHerglotz& q,
                                                        const Tolerances& tol = {}) {
  if (q.is_zero()) throw Error(ErrorKind::IdenticallyZero, "zeros of the zero function");
  const auto rf = rational_form(q);
  const Polynomial num = rf.numerator.trimmed(tol.coeff_trim);
  if (num.degree() < 1) return {};
  std::vector<RootCluster> out;
  for (auto c : roots_with_multiplicity(num, tol.root_tol)) {
    for (const auto& at : q.nu) {
      if (c.multiplicity > 0 && std::abs(c.location - at.t) <= tol.root_tol * (1.0 + std::abs(at.t)))
        --c.multiplicity;
    }
    if (c.multiplicity > 0) out.push_back(c);
  }
  return out;
}

/// Membership in the Herglotz class: a real, b real and nonnegative, all
/// weights positive. Imaginary parts up to rel_tol times the modulus count
/// as rounding.
inline bool is_herglotz(const QuasiHerglotz& q, double rel_tol = 1e-14) {
  auto real = [&](Complex x) { return std::abs(x.imag()) <= rel_tol * std::abs(x); };
  if (!real(q.a) || !real(q.b) || q.b.real() < 0.0) return false;
  for (const auto& at : q.nu)
    if (!real(at.w) || !(at.w.real() > 0.0)) return false;
  return true;
}

/// Four Herglotz functions with q = (h1 - h2) + i (h3 - h4).
inline std::array<QuasiHerglotz, 4> herglotz_quadruple(const QuasiHerglotz& q) {
  const auto jd = jordan_decompose(q.nu);
  auto pos = [](double x) { return x > 0 ? x : 0.0; };
  auto neg = [](double x) { return x < 0 ? -x : 0.0; };
  return {QuasiHerglotz{pos(q.a.real()), pos(q.b.real()), to_complex(jd.pos_re)},
          QuasiHerglotz{neg(q.a.real()), neg(q.b.real()), to_complex(jd.neg_re)},
          QuasiHerglotz{pos(q.a.imag()), pos(q.b.imag()), to_complex(jd.pos_im)},
          QuasiHerglotz{neg(q.a.imag()), neg(q.b.imag()), to_complex(jd.neg_im)}};
}

inline std::vector<double> analyticity_domain(const QuasiHerglotz& q) {
  return support(total_variation(q.nu));
}

}  // namespace krein
