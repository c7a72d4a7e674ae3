#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "krein/extension.hpp"
#include "krein/hspace.hpp"
#include "krein/linalg.hpp"
#include "krein/measures.hpp"
#include "krein/models.hpp"
#include "krein/qherglotz.hpp"
#include "krein/random.hpp"

namespace krein::verify {

// Per-instance residuals. Each returns a relative deviation.

inline double resolvent_identity(const HerglotzSpace& s, const ExtensionParams& p, Complex w, Complex z,
                                 const Tolerances& tol = {}) {
  const Matrix tw = krein_resolvent(s, p, w, tol), tz = krein_resolvent(s, p, z, tol);
  const double lhs = ((w - z) * tw * tz - tw + tz).norm();
  return lhs / (1.0 + tw.norm() * tz.norm());
}

/// Difference quotient of q_v against <phi_v(z), phi_phi(w)>.
inline double q_identity(const HerglotzSpace& s, const SpaceElement& v, Complex z, Complex w) {
  const auto q = normalized_q(s, v);
  const Complex wb = std::conj(w);
  const Complex lhs = (evaluate(q, z) - evaluate(q, wb)) / (z - wb);
  const Complex rhs = inner(s, phi_field(s, v, z), phi_field(s, reference_defect(s), w));
  return std::abs(lhs - rhs) / (1.0 + std::abs(rhs));
}

/// max_u |T(w)(S - w)u - u| over an orthonormal basis of dom S.
inline double extension_property(const HerglotzSpace& s, const ExtensionParams& p, Complex w,
                                 const Tolerances& tol = {}) {
  const Matrix dom = sym_domain_basis(s);
  if (dom.cols() == 0) return 0.0;
  const Matrix t = krein_resolvent(s, p, w, tol);
  const Matrix shifted = multiplication_operator(s) - w * Matrix::Identity(s.dim(), s.dim());
  return (t * shifted * dom - dom).cwiseAbs().maxCoeff();
}

inline double sym_containment(const HerglotzSpace& s, const ExtensionParams& p, Complex z,
                              const Tolerances& tol = {}) {
  const auto rel = reconstruct_relation(s, p, z, tol);
  const auto sym = sym_and_selfadjoint(s).sym;
  if (sym.dim() == 0) return 0.0;
  return rel.containment_residual(sym);
}

inline double z_independence(const HerglotzSpace& s, const ExtensionParams& p, Complex z1, Complex z2,
                             const Tolerances& tol = {}) {
  return reconstruct_relation(s, p, z1, tol).distance(reconstruct_relation(s, p, z2, tol));
}

/// identify_params applied to T(w): distance between the reconstructed
/// relations, and the deviation of the recovered resolvent at w.
inline double identify_roundtrip(const HerglotzSpace& s, const ExtensionParams& p, Complex w,
                                 const Tolerances& tol = {}) {
  const Matrix r = krein_resolvent(s, p, w, tol);
  const auto back = identify_params(s, r, w, tol);
  const double res_dev = (krein_resolvent(s, back, w, tol) - r).norm() / (1.0 + r.norm());
  const double dist = reconstruct_relation(s, p, w, tol).distance(reconstruct_relation(s, back, w, tol));
  return std::max(res_dev, dist);
}

inline SpectrumComparison spectrum_equivalence(const HerglotzSpace& s, const ExtensionParams& p,
                                               const Tolerances& tol = {}, double loc_tol = 1e-8) {
  const auto analytic = extension_spectrum(s, p, tol);
  const auto pencil = extension_pencil_spectrum(s, p, tol);
  return compare_spectra(analytic, pencil, loc_tol);
}

/// 1 if some finite eigenvalue off the atoms has geometric multiplicity != 1.
inline bool finite_eigenvalues_geometrically_simple(const HerglotzSpace& s, const ExtensionParams& p,
                                                    const Tolerances& tol = {}) {
  const auto pencil = extension_pencil_spectrum(s, p, tol);
  for (const auto& e : pencil.eigenvalues) {
    if (e.infinite || detail::near_atom(s, e.location, 1e-6)) continue;
    if (e.geometric != 1) return false;
  }
  return true;
}

/// Resolvent built from the reference defect element lambda * phi with
/// target v / lambda and the matching gauge; should coincide with T(z).
inline double rescaling(const HerglotzSpace& s, const ExtensionParams& p, Complex lambda, Complex z,
                        const Tolerances& tol = {}) {
  const Vector d = s.resolvent_diagonal(z, tol.sep_min);
  const SpaceElement v_scaled((1.0 / lambda) * p.v.coords);
  // the normalized Q-function relative to lambda * phi is conj(lambda) q_{v / lambda}
  const Complex c_scaled = std::conj(lambda) / lambda * p.c;
  const Complex m = std::conj(lambda) * evaluate(normalized_q(s, v_scaled), z) + c_scaled;
  const Vector left = phi_field(s, v_scaled, z).coords;
  const Vector right = std::conj(lambda) * d.cwiseProduct(s.mu().cast<Complex>());
  Matrix t2 = d.asDiagonal();
  t2 -= left * right.transpose() / m;
  const Matrix t1 = krein_resolvent(s, p, z, tol);
  return (t1 - t2).norm() / (1.0 + t1.norm());
}

struct PropertyResult {
  std::string name;
  double max_residual = 0.0;
  double tolerance = 0.0;
  int checks = 0;
  int failures = 0;
  bool pass() const { return failures == 0; }
};

/// Accumulates named checks; a thrown library error counts as a failure.
class PropertyTable {
 public:
  void record(const std::string& name, double tol, const std::function<double()>& residual) {
    auto& r = slot(name, tol);
    double x;
    try {
      x = residual();
    } catch (const Error&) {
      x = std::numeric_limits<double>::infinity();
    }
    ++r.checks;
    if (!(x <= tol)) ++r.failures;
    if (std::isnan(x) || x > r.max_residual) r.max_residual = std::isnan(x) ? std::numeric_limits<double>::infinity() : x;
  }

  void record_bool(const std::string& name, const std::function<bool()>& ok) {
    record(name, 0.0, [&] { return ok() ? 0.0 : 1.0; });
  }

  const std::vector<PropertyResult>& results() const { return results_; }

  bool all_pass() const {
    return std::all_of(results_.begin(), results_.end(), [](const PropertyResult& r) { return r.pass(); });
  }

 private:
  PropertyResult& slot(const std::string& name, double tol) {
    for (auto& r : results_)
      if (r.name == name) return r;
    results_.push_back({name, 0.0, tol, 0, 0});
    return results_.back();
  }

  std::vector<PropertyResult> results_;
};

struct Instance {
  HerglotzSpace space;
  ExtensionParams params;
};

struct VerifyOptions {
  int dim = 6;
  int trials = 50;
  std::uint64_t seed = 7;
  Tolerances tol;
  std::optional<Instance> instance;
  std::string inject_fault;  // "" or "kernel"
};

namespace detail {

inline QuasiHerglotz random_quasi_herglotz(random::Engine& rng, int n) {
  std::vector<Atom<Complex>> at;
  for (double t : random::atoms(rng, n)) at.push_back({t, random::complex_normal(rng)});
  return {random::complex_normal(rng), random::complex_normal(rng), ComplexAtomicMeasure(std::move(at))};
}

inline std::vector<Complex> random_upper(random::Engine& rng, int k) {
  std::vector<Complex> zs;
  for (int j = 0; j < k; ++j) {
    const Complex z = random::nonreal_point(rng, 2.0);
    zs.push_back({z.real(), std::abs(z.imag())});
  }
  return zs;
}

}  // namespace detail

/// One trial of every invariant suite.
inline void run_trial(PropertyTable& tab, const HerglotzSpace& s, const ExtensionParams& p, random::Engine& rng,
                      const VerifyOptions& opt) {
  const auto& tol = opt.tol;
  const Eigen::Index n = s.dim();
  const SpaceElement f = random::element(rng, n), g = random::element(rng, n);
  const Complex w = random::nonreal_point(rng), z = random::nonreal_point(rng);

  // measures
  tab.record("measures.jordan_recombination", 1e-14, [&] {
    const auto q = detail::random_quasi_herglotz(rng, static_cast<int>(n));
    const auto jd = jordan_decompose(q.nu);
    auto tc = [](const NonnegAtomicMeasure& m) { return to_complex(m); };
    const auto re = linear_combination(1.0, tc(jd.pos_re), -1.0, tc(jd.neg_re));
    const auto im = linear_combination(1.0, tc(jd.pos_im), -1.0, tc(jd.neg_im));
    const auto back = linear_combination(1.0, re, kI, im);
    double dev = 0.0;
    if (back.size() != q.nu.size()) return 1.0;
    for (std::size_t k = 0; k < back.size(); ++k)
      dev = std::max(dev, std::abs(back.atoms()[k].w - q.nu.atoms()[k].w) / std::abs(q.nu.atoms()[k].w));
    return dev;
  });

  // qherglotz
  tab.record("qherglotz.rational_form_agreement", 1e-12, [&] {
    const auto q = detail::random_quasi_herglotz(rng, static_cast<int>(n));
    const auto rf = rational_form(q);
    double dev = 0.0;
    for (int k = 0; k < 20; ++k) {
      const Complex x = random::nonreal_point(rng);
      const Complex e = evaluate(q, x);
      dev = std::max(dev, std::abs(rf(x) - e) / std::max(1.0, std::abs(e)));
    }
    return dev;
  });
  tab.record("qherglotz.quadruple_recombination", 1e-12, [&] {
    const auto q = detail::random_quasi_herglotz(rng, static_cast<int>(n));
    const auto hs = herglotz_quadruple(q);
    for (const auto& h : hs)
      if (!h.is_zero() && !is_herglotz(h)) return 1.0;
    const Complex x = random::nonreal_point(rng);
    const Complex r = evaluate(hs[0], x) - evaluate(hs[1], x) + kI * (evaluate(hs[2], x) - evaluate(hs[3], x));
    return std::abs(r - evaluate(q, x)) / (1.0 + std::abs(evaluate(q, x)));
  });
  tab.record("qherglotz.herglotz_symmetry_positivity", 1e-12, [&] {
    const Complex x{w.real(), std::abs(w.imag())};
    const Complex hx = evaluate(s.h(), x), hxb = evaluate(s.h(), std::conj(x));
    return std::max(std::abs(hxb - std::conj(hx)) / (1.0 + std::abs(hx)), std::max(0.0, -hx.imag()));
  });
  tab.record_bool("qherglotz.zero_multiplicity_certificate", [&] {
    const auto g_fn = defining_function(s, p);
    const Polynomial num = rational_form(g_fn).numerator.trimmed(tol.coeff_trim);
    for (const auto& c : zeros_with_multiplicity(g_fn, tol))
      if (!has_zero_of_order(num, c.location, c.multiplicity, tol.root_tol)) return false;
    return true;
  });

  // hspace
  tab.record("hspace.reproducing_property", 1e-11, [&] {
    SpaceElement kw = kernel_element(s, w);
    if (opt.inject_fault == "kernel") kw = 1.001 * kw;
    const Complex e = eval_element(s, f, w);
    return std::abs(inner(s, f, kw) - e) / (1.0 + std::abs(e));
  });
  tab.record("hspace.kernel_consistency", 1e-11, [&] {
    const Complex k1 = kernel(s, z, w), k2 = kernel_from_h(s, z, w);
    return std::abs(k1 - k2) / std::abs(k1);
  });
  tab.record("hspace.kernel_gram_psd", 1e-10, [&] {
    constexpr int m = 6;
    std::vector<Complex> pts;
    for (int j = 0; j < m; ++j) pts.push_back(random::nonreal_point(rng));
    Matrix gram(m, m);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) gram(i, j) = kernel(s, pts[i], pts[j]);
    const double herm = (gram - gram.adjoint()).norm();
    const Matrix hg = (gram + gram.adjoint()) / 2.0;
    Eigen::SelfAdjointEigenSolver<Matrix> es(hg);
    const double trace = hg.trace().real();
    return std::max(herm / trace, std::max(0.0, -es.eigenvalues().minCoeff() / trace));
  });
  tab.record("hspace.diff_quotient_adjoint", 1e-11, [&] {
    const Complex l = inner(s, diff_quotient(s, f, w), g), r = inner(s, f, diff_quotient(s, g, std::conj(w)));
    return std::abs(l - r) / (1.0 + std::abs(l));
  });
  tab.record("hspace.resolvent_identity", 1e-11, [&] {
    double dev = 0.0;
    for (Eigen::Index k = 0; k < n; ++k) {
      SpaceElement e = SpaceElement::zero(n);
      e.coords(k) = 1.0;
      const Vector l = (w - z) * diff_quotient(s, diff_quotient(s, e, z), w).coords;
      const Vector r = diff_quotient(s, e, w).coords - diff_quotient(s, e, z).coords;
      dev = std::max(dev, (l - r).cwiseAbs().maxCoeff());
    }
    return dev;
  });
  tab.record("hspace.sym_in_selfadjoint", 1e-10, [&] {
    const auto pair = sym_and_selfadjoint(s);
    return pair.sym.dim() == 0 ? 0.0 : pair.selfadjoint.containment_residual(pair.sym);
  });
  tab.record("hspace.defect_orthogonality", 1e-11, [&] {
    const Matrix dom = sym_domain_basis(s);
    double dev = 0.0;
    const Matrix a = multiplication_operator(s);
    for (Eigen::Index j = 0; j < dom.cols(); ++j) {
      const SpaceElement img(a * dom.col(j) - std::conj(w) * dom.col(j));
      dev = std::max(dev, std::abs(inner(s, img, defect_vector(s, w))));
    }
    return dev;
  });
  tab.record("hspace.phi_field_membership", 1e-12, [&] {
    const Vector l = phi_field(s, reference_defect(s), w).coords;
    return (l - defect_vector(s, w).coords).norm() / l.norm();
  });
  tab.record_bool("hspace.simplicity_rank", [&] {
    std::vector<Complex> probes;
    for (Eigen::Index k = 0; k < n; ++k) probes.push_back(random::nonreal_point(rng));
    return simplicity_rank(s, probes, tol) == n;
  });

  // krein
  const Complex w2 = random::resolvent_point(rng, s, p), z2 = random::resolvent_point(rng, s, p);
  tab.record("krein.resolvent_identity", 1e-10, [&] { return resolvent_identity(s, p, w2, z2, tol); });
  tab.record("krein.q_function_identity", 1e-11, [&] {
    return std::max(q_identity(s, p.v, z, w), q_identity(s, p.v, z, kI));
  });
  tab.record_bool("krein.q_structure", [&] {
    const auto q = normalized_q(s, p.v);
    const auto qphi = normalized_q(s, reference_defect(s));
    return q.b == Complex{} && q.a == Complex{} && is_herglotz(qphi);
  });
  tab.record("krein.q_linearity", 1e-12, [&] {
    const Complex alpha = random::complex_normal(rng);
    const auto lhs = normalized_q(s, alpha * f + g);
    const auto rhs = linear_combination(alpha, normalized_q(s, f), 1.0, normalized_q(s, g));
    const Complex x = random::nonreal_point(rng);
    return std::abs(evaluate(lhs, x) - evaluate(rhs, x)) / (1.0 + std::abs(evaluate(rhs, x)));
  });
  tab.record("krein.extension_property", 1e-11, [&] { return extension_property(s, p, w2, tol); });
  tab.record("krein.contains_symmetric", 1e-10, [&] { return sym_containment(s, p, w2, tol); });
  tab.record("krein.z_independence", 1e-10, [&] { return z_independence(s, p, w2, z2, tol); });
  tab.record("krein.identify_roundtrip", 1e-10, [&] { return identify_roundtrip(s, p, w2, tol); });
  tab.record("krein.spectrum_equivalence", 1e-8, [&] {
    const auto cmp = spectrum_equivalence(s, p, tol);
    return cmp.match ? cmp.max_location_error : std::numeric_limits<double>::infinity();
  });
  tab.record_bool("krein.geometric_simplicity", [&] { return finite_eigenvalues_geometrically_simple(s, p, tol); });
  tab.record("krein.defect_rescaling", 1e-10, [&] {
    return rescaling(s, p, random::complex_normal(rng), w2, tol);
  });

  // models
  const MFunction gm = from_extension(s, p);
  tab.record("models.diagram_commutes", 1e-9, [&] { return diagram_check(s, gm, w2, 3, rng(), tol); });
  tab.record("models.leibniz_rule", 1e-11, [&] { return leibniz_residual(s, gm, f, w, z); });
  tab.record("models.dq_matches_phi_field", 1e-12, [&] {
    const Vector l = dq_of_mfunction(s, gm, w).coords, r = phi_field(s, p.v, w).coords;
    return (l - r).norm() / (1.0 + r.norm());
  });
  tab.record("models.space_in_m", 1e-12, [&] {
    const Complex l = m_eval(s, as_mfunction(s, f), z), r = eval_element(s, f, z);
    return std::abs(l - r) / (1.0 + std::abs(r));
  });
  tab.record("models.rank_one_bridge", 1e-10, [&] {
    const SpaceElement y = random::element(rng, n);
    const auto fwd = rank_one_forward(s, y, tol);
    const auto bp = rank_one_bridge(s, y);
    const double dist = LinearRelationFD::graph(fwd.matrix).distance(reconstruct_relation(s, bp, tol));
    const auto cmp = compare_spectra(fwd.spectrum, extension_spectrum(s, bp, tol), 1e-8);
    return cmp.match ? dist : std::numeric_limits<double>::infinity();
  });
  tab.record("models.blaschke_kernel_identity", 1e-10, [&] {
    std::uniform_int_distribution<int> deg(1, 4);
    std::uniform_real_distribution<double> ang(-2.5, 2.5);
    const BlaschkeProduct b = BlaschkeProduct::from_angle(detail::random_upper(rng, deg(rng)), ang(rng));
    const auto model = blaschke_cayley(b);
    return blaschke_kernel_residual(model, b, random::nonreal_point(rng), random::nonreal_point(rng));
  });
  tab.record_bool("models.blaschke_pseudocontinuation", [&] {
    const BlaschkeProduct b(detail::random_upper(rng, 3), 1.0);
    const Complex x = random::nonreal_point(rng);
    return std::abs(b(x) * std::conj(b(std::conj(x))) - 1.0) <= 1e-12;
  });
}

inline PropertyTable run(const VerifyOptions& opt) {
  PropertyTable tab;
  for (int trial = 0; trial < opt.trials; ++trial) {
    random::Engine rng(random::derive_seed(opt.seed, static_cast<std::uint64_t>(trial)));
    if (opt.instance) {
      run_trial(tab, opt.instance->space, opt.instance->params, rng, opt);
    } else {
      const HerglotzSpace s = random::space(rng, opt.dim);
      const ExtensionParams p = random::params(rng, s);
      run_trial(tab, s, p, rng, opt);
    }
  }
  return tab;
}

}  // namespace krein::verify
