#pragma once

#include <cmath>
#include <random>
#include <utility>
#include <vector>

#include "krein/extension.hpp"
#include "krein/hspace.hpp"
#include "krein/linalg.hpp"
#include "krein/polynomial.hpp"
#include "krein/qherglotz.hpp"
#include "krein/types.hpp"

namespace krein {

/// g(z) = a + sum_k (1 + t_k z)/(t_k - z) * f_k mu_k / (t_k - i), an element of M(h).
struct MFunction {
  Complex a{};
  SpaceElement f;
};

inline QuasiHerglotz to_quasi_herglotz(const HerglotzSpace& s, const MFunction& g) {
  s.check_element(g.f);
  std::vector<Atom<Complex>> atoms;
  for (Eigen::Index k = 0; k < s.dim(); ++k)
    atoms.push_back({s.atoms()(k), g.f.coords(k) * s.mu()(k) / (s.atoms()(k) - kI)});
  return {g.a, 0.0, ComplexAtomicMeasure(std::move(atoms), 0.0)};
}

inline Complex m_eval(const HerglotzSpace& s, const MFunction& g, Complex z,
                      double sep_min = Tolerances{}.sep_min) {
  return evaluate(to_quasi_herglotz(s, g), z, sep_min);
}

/// M-function representing q_v + c.
inline MFunction from_extension(const HerglotzSpace& s, const ExtensionParams& p) {
  s.check_element(p.v);
  Vector f(s.dim());
  for (Eigen::Index k = 0; k < s.dim(); ++k)
    f(k) = p.v.coords(k) * (s.atoms()(k) - kI) / (s.atoms()(k) + kI);
  return {p.c, SpaceElement(std::move(f))};
}

/// Coordinates of the difference quotient D_w g = (g(.) - g(w)) / (. - w).
inline SpaceElement dq_of_mfunction(const HerglotzSpace& s, const MFunction& g, Complex w,
                                    double sep_min = Tolerances{}.sep_min) {
  s.check_element(g.f);
  s.check_off_atoms(w, sep_min);
  Vector out(s.dim());
  for (Eigen::Index k = 0; k < s.dim(); ++k) {
    const double t = s.atoms()(k);
    const Complex rho = g.f.coords(k) * s.mu()(k) / (t - kI);
    out(k) = rho / (s.nu()(k) * (t - w));
  }
  return SpaceElement(std::move(out));
}

/// v = D_i g and c = the constant a of g.
inline ExtensionParams to_extension(const HerglotzSpace& s, const MFunction& g) {
  if (to_quasi_herglotz(s, g).is_zero()) throw Error(ErrorKind::IdenticallyZero, "defining function is zero");
  return make_params(s, dq_of_mfunction(s, g, kI), g.a);
}

/// The Cauchy transform of f written as an M-function.
inline MFunction as_mfunction(const HerglotzSpace& s, const SpaceElement& f) {
  s.check_element(f);
  Complex a{};
  Vector out(s.dim());
  for (Eigen::Index k = 0; k < s.dim(); ++k) {
    const double t = s.atoms()(k);
    a += f.coords(k) * s.nu()(k) * t;
    out(k) = f.coords(k) / (t + kI);
  }
  return {a, SpaceElement(std::move(out))};
}

/// Kernel of (1/g) L(h): N_h(z, w) / (g(z) conj g(w)).
inline Complex conjugated_kernel(const HerglotzSpace& s, const MFunction& g, Complex z, Complex w,
                                 const Tolerances& tol = {}) {
  const Complex gz = m_eval(s, g, z, tol.sep_min);
  const Complex gw = m_eval(s, g, w, tol.sep_min);
  if (std::abs(gz) <= tol.degenerate_tol || std::abs(gw) <= tol.degenerate_tol)
    throw Error(ErrorKind::ZeroOfG, "g vanishes at a kernel point");
  return kernel(s, z, w, tol.sep_min) / (gz * std::conj(gw));
}

namespace detail {

inline Complex random_nonreal(std::mt19937_64& rng, double scale) {
  std::uniform_real_distribution<double> re(-scale, scale), im(0.3, scale);
  std::bernoulli_distribution lower(0.5);
  return {re(rng), lower(rng) ? -im(rng) : im(rng)};
}

inline bool near_atom(const HerglotzSpace& s, Complex z, double gap) {
  for (Eigen::Index k = 0; k < s.dim(); ++k)
    if (std::abs(z - s.atoms()(k)) < gap) return true;
  return false;
}

}  // namespace detail

/// Compares (1/g) (A~ - w)^{-1} (g f^) with D_w f^ for f^ = F/g, F in L(h),
/// at random probes; returns the largest relative deviation.
inline double diagram_check(const HerglotzSpace& s, const MFunction& g, Complex w, int samples,
                            std::uint64_t seed = 1, const Tolerances& tol = {}) {
  const Complex gw = m_eval(s, g, w, tol.sep_min);
  if (std::abs(gw) <= tol.degenerate_tol) throw Error(ErrorKind::ZeroOfG, "g vanishes at w");
  const auto p = to_extension(s, g);
  const Matrix t = krein_resolvent(s, p, w, tol);
  const double scale = 2.0 + s.atoms().cwiseAbs().maxCoeff();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  double worst = 0.0;
  for (int j = 0; j < samples; ++j) {
    Vector fc(s.dim());
    for (auto& x : fc) x = {nd(rng), nd(rng)};
    const SpaceElement f(fc);
    const SpaceElement tf(t * fc);
    const Complex fhat_w = eval_element(s, f, w, tol.sep_min) / gw;
    for (int probe = 0; probe < 4; ++probe) {
      Complex z = detail::random_nonreal(rng, scale);
      while (std::abs(z - w) < 0.1) z = detail::random_nonreal(rng, scale);
      const Complex gz = m_eval(s, g, z, tol.sep_min);
      if (std::abs(gz) <= 1e-8) continue;
      const Complex lhs = eval_element(s, tf, z, tol.sep_min) / gz;
      const Complex fhat_z = eval_element(s, f, z, tol.sep_min) / gz;
      const Complex rhs = (fhat_z - fhat_w) / (z - w);
      worst = std::max(worst, std::abs(lhs - rhs) / (1.0 + std::abs(rhs)));
    }
  }
  return worst;
}

/// |D_w(g f) - g D_w f - f(w) D_w g| at z for the M-function g and the L(h)
/// element f, relative to the size of the terms.
inline double leibniz_residual(const HerglotzSpace& s, const MFunction& g, const SpaceElement& f, Complex w,
                               Complex z, double sep_min = Tolerances{}.sep_min) {
  const Complex gz = m_eval(s, g, z, sep_min), gw = m_eval(s, g, w, sep_min);
  const Complex fz = eval_element(s, f, z, sep_min), fw = eval_element(s, f, w, sep_min);
  const Complex dgf = (gz * fz - gw * fw) / (z - w);
  const Complex df = eval_element(s, diff_quotient(s, f, w, sep_min), z, sep_min);
  const Complex dg = eval_element(s, dq_of_mfunction(s, g, w, sep_min), z, sep_min);
  const Complex rhs = gz * df + fw * dg;
  return std::abs(dgf - rhs) / (1.0 + std::abs(gz * df) + std::abs(fw * dg));
}

struct RankOnePerturbation {
  Matrix matrix;
  SpectrumReport spectrum;
};

/// B = diag(t) + y <., x> with x = (1, ..., 1), so <f, x> = sum_k f_k mu_k.
inline RankOnePerturbation rank_one_forward(const HerglotzSpace& s, const SpaceElement& y,
                                            const Tolerances& tol = {}) {
  s.check_element(y);
  Matrix b = multiplication_operator(s);
  b += y.coords * s.mu().cast<Complex>().transpose();
  SpectrumReport rep;
  for (const auto& ev : linalg::matrix_spectrum(b, tol.rank_tol))
    rep.eigenvalues.push_back({false, ev.location, ev.algebraic, ev.geometric});
  rep.sort();
  return {std::move(b), std::move(rep)};
}

/// Parameters of the extension whose relation is the graph of
/// diag(t) + y <., x>: v = (A - i)^{-1} y, c = 1 + sum_k y_k nu_k t_k.
inline ExtensionParams rank_one_bridge(const HerglotzSpace& s, const SpaceElement& y) {
  s.check_element(y);
  Vector v(s.dim());
  Complex c = 1.0;
  for (Eigen::Index k = 0; k < s.dim(); ++k) {
    const double t = s.atoms()(k);
    v(k) = y.coords(k) / (t - kI);
    c += y.coords(k) * s.nu()(k) * t;
  }
  return {SpaceElement(std::move(v)), c};
}

/// v(z) = phase * prod_j (z - z_j) / (z - conj z_j), zeros in the upper half-plane.
struct BlaschkeProduct {
  std::vector<Complex> zeros;
  Complex phase{1.0, 0.0};

  BlaschkeProduct() = default;
  BlaschkeProduct(std::vector<Complex> zs, Complex ph) : zeros(std::move(zs)), phase(ph) {
    if (std::abs(std::abs(phase) - 1.0) > 1e-12) throw Error(ErrorKind::InvalidArgument, "phase must be unimodular");
    phase /= std::abs(phase);
    for (const auto& z : zeros)
      if (!(z.imag() > 0.0)) throw Error(ErrorKind::InvalidArgument, "Blaschke zeros must lie in the upper half-plane");
  }

  static BlaschkeProduct from_angle(std::vector<Complex> zs, double theta) {
    return BlaschkeProduct(std::move(zs), std::polar(1.0, theta));
  }

  Polynomial zero_polynomial() const { return Polynomial::from_roots(zeros); }
  Polynomial pole_polynomial() const {
    std::vector<Complex> c;
    for (const auto& z : zeros) c.push_back(std::conj(z));
    return Polynomial::from_roots(c);
  }

  Complex operator()(Complex z) const {
    Complex acc = phase;
    for (const auto& zj : zeros) acc *= (z - zj) / (z - std::conj(zj));
    return acc;
  }

  /// v'(z) / v(z)
  Complex log_derivative(Complex z) const {
    Complex acc{};
    for (const auto& zj : zeros) acc += 1.0 / (z - zj) - 1.0 / (z - std::conj(zj));
    return acc;
  }
};

struct ModelSpace {
  HerglotzSpace space;
  MFunction g;
};

/// Cayley transform h = i (1 - v)/(1 + v): its poles are the real solutions
/// of v = -1 with weights nu_j = -res(h, p_j) / (1 + p_j^2); g = 1/(1 + v) = (h + i)/(2i).
inline ModelSpace blaschke_cayley(const BlaschkeProduct& bp, double phase_tol = 1e-6) {
  if (std::abs(1.0 + bp.phase) <= phase_tol)
    throw Error(ErrorKind::PhaseMinusOne, "v(infinity) = -1 gives h a linear term");
  if (bp.zeros.empty()) throw Error(ErrorKind::EmptyMeasure, "constant inner function has no atoms");
  const Polynomial r = bp.pole_polynomial() + bp.phase * bp.zero_polynomial();
  const Polynomial dr = r.derivative(1);
  std::vector<Atom<double>> atoms;
  for (Complex p : companion_roots(r)) {
    for (int it = 0; it < 3; ++it) {
      const Complex d = dr(p);
      if (d == Complex{}) break;
      p -= r(p) / d;
    }
    const double x = p.real();
    if (std::abs(p.imag()) > 1e-8 * (1.0 + std::abs(x)))
      throw Error(ErrorKind::NonHerglotzResidue, "non-real solution of v = -1");
    // residue of h at x is 2i / v'(x), and -res = mu
    const Complex vprime = bp(x) * bp.log_derivative(x);
    const Complex mu = -2.0 * kI / vprime;
    if (!(mu.real() > 0.0) || std::abs(mu.imag()) > 1e-8 * std::abs(mu))
      throw Error(ErrorKind::NonHerglotzResidue, "residue of the Cayley transform is not negative real");
    atoms.push_back({x, mu.real() / (1.0 + x * x)});
  }
  const NonnegAtomicMeasure nu(std::move(atoms));
  if (nu.size() != bp.zeros.size())
    throw Error(ErrorKind::NonHerglotzResidue, "solutions of v = -1 are not simple");
  double a = (kI * (1.0 - bp.phase) / (1.0 + bp.phase)).real();
  for (const auto& at : nu) a += at.w * at.t;
  HerglotzSpace space(nu, a);
  Vector f(space.dim());
  for (Eigen::Index k = 0; k < space.dim(); ++k) f(k) = 1.0 / (2.0 * kI * (space.atoms()(k) + kI));
  MFunction g{(a + kI) / (2.0 * kI), SpaceElement(std::move(f))};
  return {std::move(space), std::move(g)};
}

/// (1 + v(z)) N_h(z, w) (1 + conj v(w)) / 2 against the model kernel
/// (1 - v(z) conj v(w)) / (-i (z - conj w)).
inline double blaschke_kernel_residual(const ModelSpace& m, const BlaschkeProduct& bp, Complex z, Complex w) {
  const Complex vz = bp(z), vw = bp(w);
  const Complex lhs = (1.0 + vz) * kernel(m.space, z, w) * (1.0 + std::conj(vw)) / 2.0;
  const Complex rhs = (1.0 - vz * std::conj(vw)) / (-kI * (z - std::conj(w)));
  return std::abs(lhs - rhs) / (1.0 + std::abs(rhs));
}

}  // namespace krein
