#include <gtest/gtest.h>

#include "krein/extension.hpp"
#include "krein/random.hpp"
#include "krein/verify.hpp"

using namespace krein;

namespace {

HerglotzSpace one_atom() { return make_space(NonnegAtomicMeasure({{0.0, 1.0}}), 0.0); }
HerglotzSpace two_atoms() { return make_space(NonnegAtomicMeasure({{-1.0, 0.5}, {1.0, 0.5}}), 0.0); }

ExtensionParams phi_params(const HerglotzSpace& s, Complex c) { return make_params(s, reference_defect(s), c); }

void expect_single(const SpectrumReport& r, bool inf, Complex loc, int alg, int geo) {
  ASSERT_EQ(r.eigenvalues.size(), 1u);
  const auto& e = r.eigenvalues[0];
  EXPECT_EQ(e.infinite, inf);
  if (!inf) {
    EXPECT_LE(std::abs(e.location - loc), 1e-10);
  }
  EXPECT_EQ(e.algebraic, alg);
  EXPECT_EQ(e.geometric, geo);
}

}  // namespace

TEST(PhiField, Examples) {
  const auto s = one_atom();
  const auto phi = reference_defect(s);
  const Complex w = 0.4 - 1.3 * kI;
  EXPECT_LE((phi_field(s, phi, w).coords - defect_vector(s, w).coords).norm(), 1e-15);

  SpaceElement one(Vector::Ones(1));
  EXPECT_LE(std::abs(phi_field(s, one, 2.0 * kI).coords(0) - 0.5), 1e-15);

  random::Engine rng(1);
  const auto s6 = random::space(rng, 6);
  const auto v = random::element(rng, 6);
  EXPECT_LE((phi_field(s6, v, kI).coords - v.coords).norm(), 1e-15);
  EXPECT_THROW(phi_field(s, one, 0.0), PoleError);
}

TEST(NormalizedQ, Examples) {
  const auto s = one_atom();
  const auto phi = reference_defect(s);
  const auto q = normalized_q(s, phi);
  EXPECT_EQ(q.a, Complex(0.0));
  EXPECT_EQ(q.b, Complex(0.0));
  ASSERT_EQ(q.nu.size(), 1u);
  EXPECT_LE(std::abs(q.nu.atoms()[0].w - 1.0), 1e-15);
  EXPECT_TRUE(normalized_q(s, SpaceElement::zero(1)).is_zero());
  const Complex z = 1.5 + 0.5 * kI;
  EXPECT_LE(std::abs(evaluate(normalized_q(s, 2.0 * phi), z) + 2.0 / z), 1e-15);
}

TEST(NormalizedQ, DefiningIdentityAndStructure) {
  random::Engine rng(2);
  for (int trial = 0; trial < 50; ++trial) {
    const auto s = random::space(rng, 8);
    const auto v = random::element(rng, 8);
    const Complex z = random::nonreal_point(rng), w = random::nonreal_point(rng);
    EXPECT_LE(verify::q_identity(s, v, z, w), 1e-11);
    EXPECT_LE(verify::q_identity(s, v, z, kI), 1e-11);
    const auto q = normalized_q(s, v);
    EXPECT_EQ(q.b, Complex(0.0));
    EXPECT_EQ(q.a, Complex(0.0));
    const auto qphi = normalized_q(s, reference_defect(s));
    EXPECT_TRUE(is_herglotz(qphi));
  }
}

TEST(NormalizedQ, Linearity) {
  random::Engine rng(3);
  const auto s = random::space(rng, 5);
  const auto v1 = random::element(rng, 5), v2 = random::element(rng, 5);
  const Complex alpha(0.3, -1.7), z(0.2, 0.9);
  const auto lhs = normalized_q(s, alpha * v1 + v2);
  const auto rhs = linear_combination(alpha, normalized_q(s, v1), 1.0, normalized_q(s, v2));
  EXPECT_LE(std::abs(evaluate(lhs, z) - evaluate(rhs, z)), 1e-13);
}

TEST(KreinResolvent, Examples) {
  const auto s = one_atom();
  const Complex z = 2.0 * kI;
  EXPECT_LE(std::abs(krein_resolvent(s, phi_params(s, 1.0), z)(0, 0) + 1.0 / (z - 1.0)), 1e-15);
  EXPECT_LE(std::abs(krein_resolvent(s, phi_params(s, 0.0), z)(0, 0)), 1e-15);
  EXPECT_LE(std::abs(krein_resolvent(s, phi_params(s, 0.0), 0.3 - kI)(0, 0)), 1e-15);

  random::Engine rng(4);
  const auto s5 = random::space(rng, 5);
  const ExtensionParams a_itself{SpaceElement::zero(5), 1.0};
  const Complex w = random::nonreal_point(rng);
  const Matrix t = krein_resolvent(s5, a_itself, w);
  EXPECT_LE((t - Matrix(s5.resolvent_diagonal(w).asDiagonal())).norm(), 1e-15);
}

TEST(KreinResolvent, Errors) {
  const auto s = one_atom();
  EXPECT_THROW(krein_resolvent(s, phi_params(s, 1.0), 0.0), PoleError);
  try {
    krein_resolvent(s, phi_params(s, -kI), kI);  // -i - 1/z vanishes at i
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::QZero);
  }
  try {
    make_params(s, SpaceElement::zero(1), 0.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::IdenticallyZero);
  }
}

TEST(KreinResolvent, ResolventIdentity) {
  random::Engine rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    const auto s = random::space(rng, 1 + trial % 12);
    const auto p = random::params(rng, s);
    for (int k = 0; k < 5; ++k) {
      const Complex w = random::resolvent_point(rng, s, p), z = random::resolvent_point(rng, s, p);
      EXPECT_LE(verify::resolvent_identity(s, p, w, z), 1e-10);
    }
  }
}

TEST(ReconstructRelation, Examples) {
  const auto s = one_atom();
  auto rel = reconstruct_relation(s, phi_params(s, 1.0), 2.0 * kI);
  Matrix one(1, 1);
  one(0, 0) = 1.0;
  EXPECT_LE(rel.distance(LinearRelationFD::graph(one)), 1e-14);

  rel = reconstruct_relation(s, phi_params(s, 0.0), 2.0 * kI);
  EXPECT_EQ(rel.dim(), 1);
  EXPECT_EQ(rel.mul_dim(), 1);

  random::Engine rng(6);
  const auto s4 = random::space(rng, 4);
  rel = reconstruct_relation(s4, {SpaceElement::zero(4), 1.0}, kI);
  EXPECT_LE(rel.distance(sym_and_selfadjoint(s4).selfadjoint), 1e-14);
}

TEST(ReconstructRelation, ContainsSymmetricAndIsPointIndependent) {
  random::Engine rng(7);
  for (int trial = 0; trial < 30; ++trial) {
    const auto s = random::space(rng, 2 + trial % 10);
    const auto p = random::params(rng, s);
    const Complex w = random::resolvent_point(rng, s, p), z = random::resolvent_point(rng, s, p);
    EXPECT_LE(verify::extension_property(s, p, w), 1e-11);
    EXPECT_LE(verify::sym_containment(s, p, w), 1e-10);
    EXPECT_LE(verify::z_independence(s, p, w, z), 1e-10);
  }
}

TEST(RelationSpectrum, Examples) {
  Matrix one(1, 1);
  one(0, 0) = 1.0;
  expect_single(relation_spectrum(LinearRelationFD::graph(one)), false, 1.0, 1, 1);

  Matrix zero = Matrix::Zero(1, 1), id = Matrix::Identity(1, 1);
  expect_single(relation_spectrum(LinearRelationFD::from_pencil(zero, id)), true, {}, 1, 1);

  Matrix jb(2, 2);
  jb << 1, 1, 0, 1;
  expect_single(relation_spectrum(LinearRelationFD::graph(jb)), false, 1.0, 2, 1);

  Matrix thin(4, 1);
  thin << 1, 0, 0, 1;
  try {
    relation_spectrum(LinearRelationFD(thin, 2));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NotAnExtension);
  }
}

TEST(RelationSpectrum, InfiniteJordanChain) {
  // {(E u, F u)} with E nilpotent of order 2, F = I: infinity with multiplicity 2
  Matrix e(2, 2);
  e << 0, 1, 0, 0;
  const auto r = relation_spectrum(LinearRelationFD::from_pencil(e, Matrix::Identity(2, 2)));
  expect_single(r, true, {}, 2, 1);
}

TEST(ExtensionSpectrum, Examples) {
  const auto s = one_atom();
  expect_single(extension_spectrum(s, phi_params(s, -kI)), false, kI, 1, 1);
  expect_single(extension_spectrum(s, phi_params(s, 1.0)), false, 1.0, 1, 1);
  const auto r = extension_spectrum(s, phi_params(s, 0.0));
  expect_single(r, true, {}, 1, 1);
  bool atom_certified = false;
  for (auto z : r.resolvent_set_certified) atom_certified |= z == Complex(0.0);
  EXPECT_TRUE(atom_certified);
  for (Complex c : {-kI, Complex(1.0), Complex(0.0)})
    EXPECT_TRUE(verify::spectrum_equivalence(s, phi_params(s, c)).match);
}

TEST(ExtensionSpectrum, AgreesWithPencilOnRandomInstances) {
  random::Engine rng(8);
  for (int trial = 0; trial < 40; ++trial) {
    const auto s = random::space(rng, 1 + trial % 12);
    const auto p = random::params(rng, s);
    const auto cmp = verify::spectrum_equivalence(s, p);
    EXPECT_TRUE(cmp.match) << "trial " << trial << " err " << cmp.max_location_error;
    EXPECT_EQ(extension_spectrum(s, p).total_algebraic(), s.dim());
    EXPECT_TRUE(verify::finite_eigenvalues_geometrically_simple(s, p));
  }
}

namespace {

/// g = P / prod (t_k - z) with P chosen to give the requested behaviour at atom t_0.
ExtensionParams trichotomy_instance(const HerglotzSpace& s, int zero_order_at_first_atom, bool pole) {
  std::vector<Complex> roots;
  const double t0 = s.atoms()(0);
  if (!pole) {
    // denominator factor (t_0 - z) cancels one root at t_0
    for (int j = 0; j < zero_order_at_first_atom + 1; ++j) roots.push_back(t0);
  }
  const Complex extra[] = {2.0 * kI, -1.0 - kI, 0.5 + 3.0 * kI, 1.0 + kI};
  for (int j = 0; static_cast<Eigen::Index>(roots.size()) < s.dim(); ++j) roots.push_back(extra[j]);
  return params_from_numerator(s, Polynomial::from_roots(roots));
}

}  // namespace

TEST(Trichotomy, AllBranchesAtAnAtom) {
  const auto s = make_space(NonnegAtomicMeasure({{-1.0, 0.7}, {0.5, 1.1}, {2.0, 0.4}, {3.0, 0.9}}), 0.2);
  const double t0 = s.atoms()(0);
  auto point_at = [&](const SpectrumReport& r) -> const SpectralPoint* {
    for (const auto& e : r.eigenvalues)
      if (!e.infinite && std::abs(e.location - t0) < 1e-6) return &e;
    return nullptr;
  };
  // pole
  {
    const auto p = trichotomy_instance(s, 0, true);
    const auto r = extension_spectrum(s, p);
    EXPECT_EQ(point_at(r), nullptr);
    EXPECT_TRUE(verify::spectrum_equivalence(s, p).match);
  }
  for (int m : {0, 1, 2}) {
    const auto p = trichotomy_instance(s, m, false);
    const auto r = extension_spectrum(s, p);
    const auto* e = point_at(r);
    ASSERT_NE(e, nullptr) << "order " << m;
    EXPECT_EQ(e->algebraic, m + 1);
    EXPECT_EQ(e->geometric, 1);
    const auto cmp = verify::spectrum_equivalence(s, p);
    EXPECT_TRUE(cmp.match) << "order " << m << " err " << cmp.max_location_error;
  }
}

TEST(EigenvectorCheck, Examples) {
  const auto s = one_atom();
  const auto f = eigenvector_check(s, phi_params(s, 1.0), 1.0);
  EXPECT_LE(std::abs(f.coords(0) + 1.0), 1e-15);
  try {
    eigenvector_check(s, phi_params(s, 1.0), 2.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NotAnEigenvalue);
  }
  const auto s2 = two_atoms();
  const auto p = interpolate_spectrum(s2, {{kI, 1}, {-2.0 * kI, 1}});
  EXPECT_NO_THROW(eigenvector_check(s2, p, kI));
  EXPECT_NO_THROW(eigenvector_check(s2, p, -2.0 * kI));
}

TEST(IdentifyParams, Examples) {
  random::Engine rng(9);
  const auto s4 = random::space(rng, 4);
  const Complex w = 0.3 + kI;
  const auto back = identify_params(s4, Matrix(s4.resolvent_diagonal(w).asDiagonal()), w);
  EXPECT_EQ(back.c, Complex(1.0));
  EXPECT_EQ(back.v.coords.norm(), 0.0);

  const auto s = one_atom();
  Matrix r(1, 1);
  r(0, 0) = -1.0 / (2.0 * kI - 1.0);
  const auto p = identify_params(s, r, 2.0 * kI);
  EXPECT_LE(reconstruct_relation(s, p).distance(reconstruct_relation(s, phi_params(s, 1.0))), 1e-14);
}

TEST(IdentifyParams, RoundTripOnRandomInstances) {
  random::Engine rng(10);
  for (int trial = 0; trial < 30; ++trial) {
    const auto s = random::space(rng, 1 + trial % 12);
    const auto p = random::params(rng, s);
    EXPECT_LE(verify::identify_roundtrip(s, p, random::resolvent_point(rng, s, p)), 1e-10);
  }
}

TEST(IdentifyParams, RejectsNonExtensions) {
  const auto s = two_atoms();
  const Complex w = kI;
  Matrix r = s.resolvent_diagonal(w).asDiagonal();
  Matrix rank2 = r + Matrix::Identity(2, 2);
  try {
    identify_params(s, rank2, w);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NotRankOne);
  }
  // rank one, but the right factor is not <., phi_phi(conj w)>
  Matrix bad = r;
  bad(0, 0) += 1.0;
  try {
    identify_params(s, bad, w);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NotAnExtension);
  }
}

TEST(InterpolateSpectrum, Examples) {
  const auto s = one_atom();
  const auto p = interpolate_spectrum(s, {{kI, 1}});
  EXPECT_LE(reconstruct_relation(s, p).distance(reconstruct_relation(s, phi_params(s, -kI))), 1e-12);

  const auto s2 = two_atoms();
  const auto p2 = interpolate_spectrum(s2, {{kI, 1}, {-2.0 * kI, 1}});
  const auto r = relation_spectrum(reconstruct_relation(s2, p2));
  SpectrumReport want;
  want.eigenvalues = {{false, kI, 1, 1}, {false, -2.0 * kI, 1, 1}};
  EXPECT_TRUE(compare_spectra(r, want, 1e-10).match);

  const auto p0 = interpolate_spectrum(s2, {});
  EXPECT_EQ(p0.c, Complex(1.0));
  EXPECT_EQ(p0.v.coords.norm(), 0.0);

  try {
    interpolate_spectrum(s2, {{kI, 2}, {-kI, 1}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Infeasible);
  }
}

TEST(InterpolateSpectrum, MultiplicitiesAndInfinity) {
  random::Engine rng(11);
  const auto s = random::space(rng, 6);
  const auto p = interpolate_spectrum(s, {{0.5 + kI, 2}, {-1.0 - 0.5 * kI, 1}});
  const auto r = extension_spectrum(s, p);
  int finite = 0;
  for (const auto& e : r.eigenvalues) {
    if (e.infinite) {
      EXPECT_EQ(e.algebraic, 3);
      continue;
    }
    finite += e.algebraic;
    if (std::abs(e.location - (0.5 + kI)) < 1e-6) {
      EXPECT_EQ(e.algebraic, 2);
    }
  }
  EXPECT_EQ(finite, 3);
  EXPECT_TRUE(verify::spectrum_equivalence(s, p).match);
}

TEST(BlaschkeCondition, Examples) {
  auto b = blaschke_condition({kI});
  EXPECT_TRUE(b.satisfied);
  EXPECT_DOUBLE_EQ(b.sum, 1.0);
  b = blaschke_condition({2.0 * kI, 1.0 + kI});
  EXPECT_DOUBLE_EQ(b.sum, 1.0);
  b = blaschke_condition({});
  EXPECT_EQ(b.sum, 0.0);
  try {
    blaschke_condition({kI, -kI});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::MixedHalfPlanes);
  }
}

TEST(DefectRescaling, SameRelation) {
  random::Engine rng(12);
  for (int trial = 0; trial < 20; ++trial) {
    const auto s = random::space(rng, 5);
    const auto p = random::params(rng, s);
    EXPECT_LE(verify::rescaling(s, p, random::complex_normal(rng), random::resolvent_point(rng, s, p)), 1e-10);
  }
}
