#pragma once

// The weight map A f = f / (1 + |x|) onto the compactified line, the exact
// Y-norm of piecewise-linear functions, a brute-force grid oracle for
// arbitrary targets and the bounded-domain recapture inequality.

#include <cstddef>
#include <vector>

#include "reluspan/core.hpp"

namespace reluspan {

/// 2n+1 points t_k = k/n of [-1, 1], mapped to x_k = t_k / (1 - |t_k|) = k / (n - |k|).
/// The end points t = ±1 stand for ±inf.
class CompactGrid {
 public:
  explicit CompactGrid(int resolution);

  int resolution() const noexcept { return resolution_; }
  std::size_t size() const noexcept { return 2 * static_cast<std::size_t>(resolution_) + 1; }

  /// Point k in [0, size()): index 0 is -inf, size()-1 is +inf.
  ExtendedPoint point(std::size_t index) const;
  double t(std::size_t index) const noexcept;

  /// The 2n-1 finite coordinates, strictly increasing.
  const std::vector<double>& finite_points() const noexcept { return finite_; }

 private:
  int resolution_;
  std::vector<double> finite_;
};

inline double weight(double x) noexcept { return 1.0 + (x < 0.0 ? -x : x); }

enum class NormMethod { exact_pl, grid_oracle };

const char* to_string(NormMethod method) noexcept;

struct NormReport {
  double value = 0.0;
  ExtendedPoint witness = ExtendedPoint::minus_infinity();
  NormMethod method = NormMethod::exact_pl;
};

/// lim f(x)/(1+|x|) at the given side: m_R at +inf, -m_L at -inf.
double boundary_value(const PiecewiseLinear& pl, Side side) noexcept;
/// Sum of c*|a| over the units active on the given side.
double boundary_value(const ReLUNetwork& net, Side side) noexcept;

/// Declared alpha, or the estimate from `estimate_alpha`.
double alpha(const YTarget& f, Side side);

double apply_A(const PiecewiseLinear& pl, const ExtendedPoint& p);
double apply_A(const ReLUNetwork& net, const ExtendedPoint& p);
/// Throws NotInY when a boundary value must be estimated and the estimate fails.
double apply_A(const YTarget& f, const ExtendedPoint& p);

/// Exact sup |pl(x)| / (1+|x|). On every interval between consecutive
/// breakpoints (knots and 0) the ratio is monotone, so the sup is the max over
/// knots, 0 and the two tail limits. Ties go to the smallest witness.
NormReport y_norm_exact(const PiecewiseLinear& pl);
NormReport y_norm_exact(const ReLUNetwork& net);

/// max over the grid of |A f|. Ties go to the smallest witness.
NormReport y_norm_grid(const ReLUNetwork& net, const CompactGrid& grid);
NormReport y_norm_grid(const YTarget& f, const CompactGrid& grid);

/// Richardson-style limit of A f at ±inf sampled at ±2^k. Throws NotInY when
/// the samples do not settle.
double estimate_alpha(const YTarget& f, Side side);

struct LinfBound {
  double lhs = 0.0;  ///< sup_{|x| <= R} |net(x)|
  double rhs = 0.0;  ///< (1 + R) * ||net||_Y
};

LinfBound linf_bound_check(const ReLUNetwork& net, double radius);

}  // namespace reluspan
