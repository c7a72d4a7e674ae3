#include <gtest/gtest.h>

#include <random>

#include "krein/measures.hpp"

using namespace krein;

namespace {

ComplexAtomicMeasure cm(std::vector<Atom<Complex>> a) { return ComplexAtomicMeasure(std::move(a)); }
NonnegAtomicMeasure nm(std::vector<Atom<double>> a) { return NonnegAtomicMeasure(std::move(a)); }

}  // namespace

TEST(AtomicMeasure, SortsMergesAndDropsZeros) {
  const auto m = cm({{2.0, {1, 0}}, {0.0, {0, 1}}, {2.0 + 1e-12, {2, 0}}, {1.0, {0, 0}}});
  ASSERT_EQ(m.size(), 2u);
  EXPECT_EQ(m.atoms()[0].t, 0.0);
  EXPECT_EQ(m.atoms()[1].w, Complex(3, 0));
}

TEST(AtomicMeasure, RejectsNegativeRealWeights) {
  EXPECT_THROW(nm({{0.0, -1.0}}), Error);
  EXPECT_TRUE(nm({{0.0, 0.0}}).empty());
}

TEST(TotalVariation, Moduli) {
  EXPECT_EQ(total_variation(cm({{0.0, {3, -4}}})), nm({{0.0, 5.0}}));
  EXPECT_EQ(total_variation(cm({{1.0, {-2, 0}}, {2.0, {0, 1}}})), nm({{1.0, 2.0}, {2.0, 1.0}}));
  EXPECT_TRUE(total_variation(ComplexAtomicMeasure{}).empty());
}

TEST(JordanDecompose, SignSplit) {
  auto jd = jordan_decompose(cm({{0.0, {3, -2}}}));
  EXPECT_EQ(jd.pos_re, nm({{0.0, 3.0}}));
  EXPECT_TRUE(jd.neg_re.empty());
  EXPECT_TRUE(jd.pos_im.empty());
  EXPECT_EQ(jd.neg_im, nm({{0.0, 2.0}}));

  jd = jordan_decompose(cm({{0.0, {-1, 0}}}));
  EXPECT_TRUE(jd.pos_re.empty());
  EXPECT_EQ(jd.neg_re, nm({{0.0, 1.0}}));
  EXPECT_TRUE(jd.pos_im.empty() && jd.neg_im.empty());

  jd = jordan_decompose(cm({{1.0, {2, 0}}, {2.0, {0, -1}}}));
  EXPECT_EQ(jd.pos_re, nm({{1.0, 2.0}}));
  EXPECT_EQ(jd.neg_im, nm({{2.0, 1.0}}));
  EXPECT_TRUE(jd.neg_re.empty() && jd.pos_im.empty());
}

TEST(JordanDecompose, RecombinesAndIsMinimal) {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> nd;
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Atom<Complex>> at;
    for (int k = 0; k < 8; ++k) at.push_back({k * 0.7 - 2.0, {nd(rng), nd(rng)}});
    const auto m = cm(at);
    const auto jd = jordan_decompose(m);
    const auto back = linear_combination(1.0,
                                         linear_combination(1.0, to_complex(jd.pos_re), -1.0, to_complex(jd.neg_re)),
                                         kI, linear_combination(1.0, to_complex(jd.pos_im), -1.0, to_complex(jd.neg_im)));
    ASSERT_EQ(back.size(), m.size());
    for (std::size_t k = 0; k < m.size(); ++k) EXPECT_LE(std::abs(back.atoms()[k].w - m.atoms()[k].w), 1e-15);
    for (const auto& a : jd.pos_re)
      for (const auto& b : jd.neg_re) EXPECT_NE(a.t, b.t);
    for (const auto& a : jd.pos_im)
      for (const auto& b : jd.neg_im) EXPECT_NE(a.t, b.t);
    // |Re w| + ... never below |w|
    const auto tv = total_variation(m);
    for (std::size_t k = 0; k < tv.size(); ++k) EXPECT_DOUBLE_EQ(tv.atoms()[k].w, std::abs(m.atoms()[k].w));
  }
}

TEST(Support, SortedCoordinates) {
  EXPECT_EQ(support(cm({{0.0, {1, 0}}})), std::vector<double>{0.0});
  EXPECT_EQ(support(cm({{1.0, kI}, {-1.0, kI}})), (std::vector<double>{-1.0, 1.0}));
  EXPECT_TRUE(support(ComplexAtomicMeasure{}).empty());
}
