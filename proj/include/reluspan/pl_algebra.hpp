#pragma once

// Lossless conversion between two-layer ReLU networks and canonical
// piecewise-linear functions, the elementary gadgets (hats, ramps, steps,
// constants) and the linear-space operations on both representations.

#include <cstddef>
#include <string>
#include <vector>

#include "reluspan/core.hpp"

namespace reluspan {

/// Kinks closer than this (absolute) are merged into one knot.
inline constexpr double kKnotMergeTolerance = 1e-12;
/// A knot whose slope jump is at most this times
/// max(1, |m_L|, |m_R|, max |jump|) is removed.
inline constexpr double kSlopeJumpTolerance = 1e-12;

/// Merges near-duplicate knots and removes knots without a slope change.
PiecewiseLinear canonicalize(const PiecewiseLinear& pl);

/// Outgoing minus incoming slope at every knot.
std::vector<double> slope_jumps(const PiecewiseLinear& pl);

PiecewiseLinear network_to_pl(const ReLUNetwork& net);

/// Affine part m_L*(relu(x) - relu(-x)) plus the four-unit constant gadget,
/// then one unit relu(x - x_j) per knot, sorted by knot. Zero terms are omitted.
ReLUNetwork pl_to_network(const PiecewiseLinear& pl);

/// max(1 - |x - center| / halfwidth, 0) as three units.
ReLUNetwork hat(double center, double halfwidth);

/// relu(x)
ReLUNetwork ramp_plus();
/// relu(-x)
ReLUNetwork ramp_minus();
/// relu(x) - relu(x - 1)
ReLUNetwork step_f();
/// relu(-x) - relu(-x - 1), the mirror image of step_f.
ReLUNetwork step_g();
/// value * (relu(x) - relu(-x) - relu(x - 1) + relu(1 - x)); empty for value 0.
ReLUNetwork constant_gadget(double value);

PiecewiseLinear pl_add(const PiecewiseLinear& p, const PiecewiseLinear& q);
PiecewiseLinear pl_scale(const PiecewiseLinear& p, double s);
ReLUNetwork net_add(const ReLUNetwork& p, const ReLUNetwork& q);
ReLUNetwork net_scale(const ReLUNetwork& p, double s);

struct IdentityCheck {
  std::string name;
  double max_deviation = 0.0;
};

struct IdentityReport {
  std::vector<IdentityCheck> checks;
  double max_deviation = 0.0;
  bool passed = false;
};

inline constexpr double kIdentityTolerance = 1e-12;

/// Checks the hat identity, x = relu(x) - relu(-x), the constant gadget and the
/// step functions against closed forms on `points` equispaced samples of
/// [lo, hi]. `inject_fault` perturbs one hat coefficient by 1e-6.
IdentityReport verify_identities(double lo, double hi, std::size_t points,
                                 bool inject_fault = false);

}  // namespace reluspan
