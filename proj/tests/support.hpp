#pragma once

// Random instance generators shared by the property tests and the acceptance
// suite. Every generator is driven by an explicit std::mt19937_64 so failures
// reproduce from the seed.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <random>
#include <span>
#include <vector>

#include "reluspan/core.hpp"
#include "reluspan/dual_checker.hpp"
#include "reluspan/pl_algebra.hpp"

namespace reluspan::testing {

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline std::size_t index(Rng& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

/// Slope bounded away from zero: |a| in [0.1, max_abs].
inline double nonzero_slope(Rng& rng, double max_abs) {
  const double magnitude = uniform(rng, 0.1, max_abs);
  return std::bernoulli_distribution(0.5)(rng) ? magnitude : -magnitude;
}

/// Up to max_units units with a in ±[0.1, 5], b in [-10, 10], c in [-5, 5].
inline ReLUNetwork random_network(Rng& rng, std::size_t max_units) {
  const std::size_t n = index(rng, 0, max_units);
  std::vector<ReLUUnit> units;
  for (std::size_t i = 0; i < n; ++i) {
    units.emplace_back(nonzero_slope(rng, 5.0), uniform(rng, -10.0, 10.0), uniform(rng, -5.0, 5.0));
  }
  return ReLUNetwork(std::move(units));
}

/// Canonical PL function with at most max_knots knots; knots, values and
/// tail slopes drawn from [-10, 10], knots at least 1e-3 apart.
inline PiecewiseLinear random_pl(Rng& rng, std::size_t max_knots) {
  const std::size_t n = index(rng, 0, max_knots);
  if (n == 0) {
    const double m = uniform(rng, -10.0, 10.0);
    return PiecewiseLinear::line(m, uniform(rng, -10.0, 10.0));
  }
  std::vector<double> knots;
  while (knots.size() < n) {
    const double x = uniform(rng, -10.0, 10.0);
    const bool crowded = std::any_of(knots.begin(), knots.end(),
                                     [x](double k) { return std::abs(k - x) < 1e-3; });
    if (!crowded) knots.push_back(x);
  }
  std::sort(knots.begin(), knots.end());
  std::vector<double> values(n);
  for (double& v : values) v = uniform(rng, -10.0, 10.0);
  return canonicalize(PiecewiseLinear(std::move(knots), std::move(values),
                                      uniform(rng, -10.0, 10.0), uniform(rng, -10.0, 10.0)));
}

/// Sorted sample points: a uniform sweep of [lo, hi] plus every knot.
inline std::vector<double> sample_points(double lo, double hi, std::size_t count,
                                         std::span<const double> knots = {}) {
  std::vector<double> xs;
  xs.reserve(count + knots.size());
  for (std::size_t i = 0; i < count; ++i) {
    xs.push_back(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1));
  }
  xs.insert(xs.end(), knots.begin(), knots.end());
  std::sort(xs.begin(), xs.end());
  return xs;
}

/// Atomic measure with up to max_finite finite atoms in [-lo_hi, lo_hi] on a
/// 1/64 lattice and, with probability 1/2 each, atoms at ±inf. Weight
/// magnitudes are 10^u with u uniform in [log_lo, log_hi].
inline DiscreteMeasure random_measure(Rng& rng, std::size_t max_finite, double lo_hi,
                                      double log_lo, double log_hi) {
  auto weight = [&] {
    const double w = std::pow(10.0, uniform(rng, log_lo, log_hi));
    return std::bernoulli_distribution(0.5)(rng) ? w : -w;
  };
  std::vector<Atom> atoms;
  std::vector<double> used;
  const std::size_t n = index(rng, 0, max_finite);
  const auto cells = static_cast<long long>(lo_hi * 64.0);
  while (atoms.size() < n) {
    const double x =
        static_cast<double>(std::uniform_int_distribution<long long>(-cells, cells)(rng)) / 64.0;
    if (std::find(used.begin(), used.end(), x) != used.end()) continue;
    used.push_back(x);
    atoms.push_back({ExtendedPoint::finite(x), weight()});
  }
  if (std::bernoulli_distribution(0.5)(rng)) atoms.push_back({ExtendedPoint::plus_infinity(), weight()});
  if (std::bernoulli_distribution(0.5)(rng)) atoms.push_back({ExtendedPoint::minus_infinity(), weight()});
  return DiscreteMeasure(std::move(atoms));
}

}  // namespace reluspan::testing
