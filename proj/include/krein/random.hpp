#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "krein/extension.hpp"
#include "krein/hspace.hpp"
#include "krein/types.hpp"

namespace krein::random {

using Engine = std::mt19937_64;

/// Independent per-trial seed derived from a base seed (splitmix64 step).
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
  std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

struct SpaceOptions {
  double span = 3.0;
  double min_gap = 0.05;
  double nu_lo = 0.2, nu_hi = 2.0;
};

inline std::vector<double> atoms(Engine& rng, int n, const SpaceOptions& opt = {}) {
  std::uniform_real_distribution<double> u(-opt.span, opt.span);
  std::vector<double> t;
  while (static_cast<int>(t.size()) < n) {
    const double x = u(rng);
    bool ok = true;
    for (double y : t)
      if (std::abs(x - y) < opt.min_gap) ok = false;
    if (ok) t.push_back(x);
  }
  return t;
}

inline HerglotzSpace space(Engine& rng, int n, const SpaceOptions& opt = {}) {
  std::uniform_real_distribution<double> w(opt.nu_lo, opt.nu_hi), a(-1.0, 1.0);
  std::vector<Atom<double>> at;
  for (double t : atoms(rng, n, opt)) at.push_back({t, w(rng)});
  return HerglotzSpace(NonnegAtomicMeasure(std::move(at)), a(rng));
}

inline Complex complex_normal(Engine& rng) {
  std::normal_distribution<double> nd;
  return {nd(rng), nd(rng)};
}

inline SpaceElement element(Engine& rng, Eigen::Index n) {
  Vector v(n);
  for (auto& x : v) x = complex_normal(rng);
  return SpaceElement(std::move(v));
}

/// Non-real point with |Im| in [0.3, scale], away from the atoms.
inline Complex nonreal_point(Engine& rng, double scale = 3.0) {
  std::uniform_real_distribution<double> re(-scale, scale), im(0.3, scale);
  std::bernoulli_distribution lower(0.5);
  const double y = im(rng);
  return {re(rng), lower(rng) ? -y : y};
}

inline ExtensionParams params(Engine& rng, const HerglotzSpace& s) {
  return make_params(s, element(rng, s.dim()), complex_normal(rng));
}

/// A non-real point where q + c is not small relative to its terms.
inline Complex resolvent_point(Engine& rng, const HerglotzSpace& s, const ExtensionParams& p,
                               double min_rel = 1e-3) {
  const auto g = defining_function(s, p);
  for (int attempt = 0; attempt < 200; ++attempt) {
    const Complex z = nonreal_point(rng);
    if (detail::relative_magnitude(g, z) > min_rel) return z;
  }
  return sample_point(s, p);
}

}  // namespace krein::random
