#pragma once

// Constructive global approximation: given f in Y and a tolerance, build a
// ReLU network whose weighted distance to f, measured by the compact-grid
// oracle, is at most the tolerance.
//
// Outline:
//   1. alpha_± from the target (declared or estimated).
//   2. h0 = alpha_+ relu(x) + alpha_- relu(-x) absorbs the asymptotics, so the
//      residual r = f - h0 has A r(±inf) = 0.
//   3. R doubles from initial_radius until |A r| <= tol/4 on every grid point
//      with |x| >= R.
//   4. r is interpolated on [-R, R] (uniform start, constant tails) and the
//      worst segment is bisected until the weighted deviation is <= tol/2.
//   5. The network h0 + pl_to_network(p) is certified by the grid oracle.

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "reluspan/core.hpp"

namespace reluspan {

struct ApproxConfig {
  double tolerance = 1e-2;
  std::size_t max_knots = 1'000'000;
  double initial_radius = 1.0;
  int oracle_resolution = 100'000;
  /// Uniform knots on [-R, R] before refinement.
  std::size_t initial_knots = 33;
  /// Extra equispaced probes per segment on top of the oracle grid points
  /// it contains, so segments wider than the grid spacing are still scanned.
  int segment_probes = 8;
  /// Upper bound on the distance between probes, so wide segments of an
  /// oscillating residual get proportionally more probes.
  double max_probe_spacing = 0.25;
};

struct ApproximationCertificate {
  ReLUNetwork network;
  std::string target_label;
  double tolerance = 0.0;
  /// Grid-oracle Y-norm of f - network at oracle_resolution.
  double measured_error = 0.0;
  double radius = 0.0;
  /// Knots of the canonical interior interpolant.
  std::size_t knot_count = 0;
  double alpha_plus = 0.0;
  double alpha_minus = 0.0;
  int oracle_resolution = 0;
  bool succeeded = false;
  std::string failure_reason;
  /// Weighted deviation of the interpolant after each refinement step.
  std::vector<double> refinement_history;
};

/// Throws InvalidArgument for a nonpositive tolerance or a malformed config
/// and NotInY when the asymptotic values cannot be established. Running out
/// of knots is not an error: the certificate comes back with succeeded = false.
ApproximationCertificate approximate(const YTarget& f, const ApproxConfig& config);

/// Piecewise-linear interpolant of f on the knots, with zero tail slopes. The
/// extreme knots take left_value and right_value instead of f.
PiecewiseLinear interp_pl(const std::function<double(double)>& f, std::span<const double> knots,
                          double left_value, double right_value);

/// f - net as a target, with boundary values alpha(f) - A net(±inf).
YTarget residual_target(const YTarget& f, const ReLUNetwork& net);

/// Grid-oracle Y-norm of f - net at the given resolution.
double measure_residual(const YTarget& f, const ReLUNetwork& net, int resolution);

/// CSV rows x,target,network,weighted_residual over the finite points of a
/// compact grid, 17 significant digits.
std::string samples_csv(const YTarget& f, const ReLUNetwork& net, int resolution);

}  // namespace reluspan
