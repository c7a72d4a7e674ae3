#pragma once

#include <algorithm>
#include <cmath>
#include <type_traits>
#include <vector>

#include "krein/types.hpp"

namespace krein {

template <class Weight>
struct Atom {
  double t;
  Weight w;

  friend bool operator==(const Atom&, const Atom&) = default;
};

/// Finitely many real atoms with weights of type `Weight` (double or Complex).
///
/// Construction sorts by coordinate, merges atoms closer than `sep_min` by
/// adding their weights, and drops zero weights. For real weights every
/// stored weight must be strictly positive.
template <class Weight>
class AtomicMeasure {
 public:
  using atom_type = Atom<Weight>;

  AtomicMeasure() = default;

  explicit AtomicMeasure(std::vector<atom_type> atoms, double sep_min = Tolerances{}.sep_min) {
    std::stable_sort(atoms.begin(), atoms.end(),
                     [](const atom_type& l, const atom_type& r) { return l.t < r.t; });
    for (const auto& a : atoms) {
      if (!std::isfinite(a.t)) throw Error(ErrorKind::InvalidMeasure, "non-finite atom coordinate");
      if (!atoms_.empty() && a.t - atoms_.back().t < sep_min) {
        atoms_.back().w += a.w;
      } else {
        atoms_.push_back(a);
      }
    }
    std::erase_if(atoms_, [](const atom_type& a) { return a.w == Weight{}; });
    if constexpr (std::is_same_v<Weight, double>) {
      for (const auto& a : atoms_) {
        if (!(a.w > 0.0)) throw Error(ErrorKind::InvalidMeasure, "nonnegative measure with negative weight");
      }
    }
  }

  const std::vector<atom_type>& atoms() const noexcept { return atoms_; }
  std::size_t size() const noexcept { return atoms_.size(); }
  bool empty() const noexcept { return atoms_.empty(); }

  auto begin() const noexcept { return atoms_.begin(); }
  auto end() const noexcept { return atoms_.end(); }

  friend bool operator==(const AtomicMeasure&, const AtomicMeasure&) = default;

 private:
  std::vector<atom_type> atoms_;
};

using ComplexAtomicMeasure = AtomicMeasure<Complex>;
using NonnegAtomicMeasure = AtomicMeasure<double>;

inline ComplexAtomicMeasure to_complex(const NonnegAtomicMeasure& m) {
  std::vector<Atom<Complex>> atoms;
  atoms.reserve(m.size());
  for (const auto& a : m) atoms.push_back({a.t, Complex(a.w, 0.0)});
  return ComplexAtomicMeasure(std::move(atoms));
}

inline NonnegAtomicMeasure total_variation(const ComplexAtomicMeasure& m) {
  std::vector<Atom<double>> atoms;
  atoms.reserve(m.size());
  for (const auto& a : m) atoms.push_back({a.t, std::abs(a.w)});
  return NonnegAtomicMeasure(std::move(atoms), 0.0);
}

/// m = (pos_re - neg_re) + i (pos_im - neg_im), minimal per atom.
struct JordanDecomposition {
  NonnegAtomicMeasure pos_re, neg_re, pos_im, neg_im;
};

inline JordanDecomposition jordan_decompose(const ComplexAtomicMeasure& m) {
  std::vector<Atom<double>> p1, p2, p3, p4;
  for (const auto& a : m) {
    const double re = a.w.real();
    const double im = a.w.imag();
    if (re > 0) p1.push_back({a.t, re});
    if (re < 0) p2.push_back({a.t, -re});
    if (im > 0) p3.push_back({a.t, im});
    if (im < 0) p4.push_back({a.t, -im});
  }
  return {NonnegAtomicMeasure(std::move(p1), 0.0), NonnegAtomicMeasure(std::move(p2), 0.0),
          NonnegAtomicMeasure(std::move(p3), 0.0), NonnegAtomicMeasure(std::move(p4), 0.0)};
}

template <class Weight>
std::vector<double> support(const AtomicMeasure<Weight>& m) {
  std::vector<double> out;
  out.reserve(m.size());
  for (const auto& a : m) out.push_back(a.t);
  return out;
}

/// alpha * l + beta * r, atoms merged at sep_min.
inline ComplexAtomicMeasure linear_combination(Complex alpha, const ComplexAtomicMeasure& l,
                                               Complex beta, const ComplexAtomicMeasure& r,
                                               double sep_min = Tolerances{}.sep_min) {
  std::vector<Atom<Complex>> atoms;
  atoms.reserve(l.size() + r.size());
  for (const auto& a : l) atoms.push_back({a.t, alpha * a.w});
  for (const auto& a : r) atoms.push_back({a.t, beta * a.w});
  return ComplexAtomicMeasure(std::move(atoms), sep_min);
}

}  // namespace krein
