#pragma once

// Finite signed atomic measures on the extended line and the pairing
// <mu, f> = sum w * (A f)(location). Used to replay the annihilation argument
// at desk scale: hats detect finite atoms, ramps detect the atoms at ±inf.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "reluspan/core.hpp"

namespace reluspan {

struct Atom {
  ExtendedPoint location;
  double weight;
};

class DiscreteMeasure {
 public:
  DiscreteMeasure() = default;
  /// Throws InvalidArgument on repeated locations or non-finite weights.
  explicit DiscreteMeasure(std::vector<Atom> atoms);

  /// Atoms sorted by location.
  std::span<const Atom> atoms() const noexcept { return atoms_; }
  bool empty() const noexcept { return atoms_.empty(); }

  /// Weight at the given point, 0 when there is no atom there.
  double mass_at(const ExtendedPoint& p) const noexcept;

 private:
  std::vector<Atom> atoms_;
};

/// Weighted pairing through A.
double pair(const DiscreteMeasure& mu, const ReLUNetwork& f);
double pair(const DiscreteMeasure& mu, const YTarget& f);

/// Unweighted pairing sum w * f(location), where f(±inf) is the limit of a
/// network with flat tails. Empty when an atom sits at an infinity on whose
/// side f is unbounded.
std::optional<double> pair_bounded_extension(const DiscreteMeasure& mu, const ReLUNetwork& f);

struct HatPairing {
  double center;
  double value;
};

struct AnnihilationVerdict {
  bool annihilates = false;
  bool hats_vanish = false;
  bool ramps_vanish = false;
  double halfwidth = 0.0;
  std::vector<HatPairing> hat_pairings;
  double ramp_plus_pairing = 0.0;
  double ramp_minus_pairing = 0.0;
  double max_abs_pairing = 0.0;
  /// Finite atoms with weights recovered from the hat pairings (least squares).
  std::vector<Atom> recovered_finite;
  /// Boundary masses recovered from the ramp pairings.
  double recovered_plus = 0.0;
  double recovered_minus = 0.0;
};

/// Pairs mu with hat(c, halfwidth) for every center and with both ramps.
/// Centers must be sorted, spaced at most `halfwidth` apart, and every finite
/// atom must lie strictly inside the support of some hat.
AnnihilationVerdict annihilation_test(const DiscreteMeasure& mu, std::span<const double> centers,
                                      double halfwidth, double tol);

/// Largest power-of-two halfwidth <= 1 that is below 0.4 times the smallest
/// gap between finite atoms, so each atom has its own hat.
double auto_halfwidth(const DiscreteMeasure& mu);

/// Centers k*halfwidth covering all finite atoms with one spare on each side.
std::vector<double> covering_centers(const DiscreteMeasure& mu, double halfwidth);

enum class SpanningSet {
  /// {step_f, step_g} ∪ hats.
  literal,
  /// {relu(x), relu(-x)} ∪ hats.
  corrected,
};

struct SeparationResult {
  double residual = 0.0;
  ExtendedPoint witness = ExtendedPoint::minus_infinity();
  std::size_t features = 0;
  std::size_t rank = 0;
};

/// Least-squares fit of relu(x) by the chosen spanning set on the A-values
/// over a compact grid; the residual is its grid Y-norm. The hats (budget of
/// them, possibly 0) are centered uniformly on [-10, 10].
SeparationResult separation_demo(int grid_resolution, int candidate_budget,
                                 SpanningSet set = SpanningSet::literal);

inline constexpr double kLeastSquaresCutoff = 1e-10;

struct DualDemo {
  AnnihilationVerdict verdict;
  std::string transcript;
};

/// Runs the hat step, the ramp step and the bounded-extension comparison and
/// renders a transcript in proof order. A nonpositive halfwidth picks one
/// with auto_halfwidth.
DualDemo dual_demo(const DiscreteMeasure& mu, double tol, double halfwidth = 0.0);

}  // namespace reluspan
