#pragma once

// Value types shared by every module: ReLU units and two-layer networks,
// continuous piecewise-linear functions, targets in the weighted space Y and
// points of the two-point compactification of the real line.

#include <compare>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace reluspan {

inline double relu(double x) noexcept { return x > 0.0 ? x : 0.0; }

/// x -> c * relu(a*x + b) with a != 0.
class ReLUUnit {
 public:
  ReLUUnit(double slope, double offset, double coefficient);

  double slope() const noexcept { return slope_; }
  double offset() const noexcept { return offset_; }
  double coefficient() const noexcept { return coefficient_; }

  /// Location of the kink, -b/a.
  double kink() const noexcept { return -offset_ / slope_; }

  double operator()(double x) const noexcept {
    return coefficient_ * relu(slope_ * x + offset_);
  }

  friend bool operator==(const ReLUUnit&, const ReLUUnit&) = default;

 private:
  double slope_;
  double offset_;
  double coefficient_;
};

/// Finite sum of ReLU units. The empty network is the zero function.
class ReLUNetwork {
 public:
  ReLUNetwork() = default;
  explicit ReLUNetwork(std::vector<ReLUUnit> units) : units_(std::move(units)) {}

  std::span<const ReLUUnit> units() const noexcept { return units_; }
  std::size_t size() const noexcept { return units_.size(); }
  bool empty() const noexcept { return units_.empty(); }

  double operator()(double x) const noexcept;

  friend bool operator==(const ReLUNetwork&, const ReLUNetwork&) = default;

 private:
  std::vector<ReLUUnit> units_;
};

double eval_network(const ReLUNetwork& net, double x) noexcept;

/// Continuous piecewise-linear function on the real line.
///
/// Between consecutive knots the function interpolates the knot values; left
/// of the first knot it continues with slope `left_slope`, right of the last
/// with `right_slope`. Without knots it is the line `left_slope * x + intercept`
/// and both slopes must agree. The intercept is ignored when knots exist.
///
/// Construction validates the representation; it does not canonicalize (see
/// `canonicalize` in pl_algebra.hpp).
class PiecewiseLinear {
 public:
  PiecewiseLinear(std::vector<double> knots, std::vector<double> values,
                  double left_slope, double right_slope);

  static PiecewiseLinear line(double slope, double intercept);
  static PiecewiseLinear zero() { return line(0.0, 0.0); }

  std::span<const double> knots() const noexcept { return knots_; }
  std::span<const double> values() const noexcept { return values_; }
  double left_slope() const noexcept { return left_slope_; }
  double right_slope() const noexcept { return right_slope_; }
  double intercept() const noexcept { return intercept_; }
  bool is_line() const noexcept { return knots_.empty(); }

  double operator()(double x) const noexcept;

  /// Slope of the segment to the right of knot `i` (right_slope for the last knot).
  double outgoing_slope(std::size_t i) const noexcept;
  /// Slope of the segment to the left of knot `i` (left_slope for the first knot).
  double incoming_slope(std::size_t i) const noexcept;

  friend bool operator==(const PiecewiseLinear&, const PiecewiseLinear&) = default;

 private:
  PiecewiseLinear() = default;

  std::vector<double> knots_;
  std::vector<double> values_;
  double left_slope_ = 0.0;
  double right_slope_ = 0.0;
  double intercept_ = 0.0;
};

double eval_pl(const PiecewiseLinear& pl, double x) noexcept;

enum class Side { minus, plus };

/// Point of the extended line R ∪ {-inf, +inf}. Ordered -inf < finite < +inf.
class ExtendedPoint {
 public:
  enum class Kind { minus_infinity, finite, plus_infinity };

  static ExtendedPoint finite(double x);
  static ExtendedPoint plus_infinity() noexcept { return ExtendedPoint(Kind::plus_infinity, 0.0); }
  static ExtendedPoint minus_infinity() noexcept { return ExtendedPoint(Kind::minus_infinity, 0.0); }
  static ExtendedPoint infinity(Side side) noexcept {
    return side == Side::plus ? plus_infinity() : minus_infinity();
  }

  Kind kind() const noexcept { return kind_; }
  bool is_finite() const noexcept { return kind_ == Kind::finite; }
  /// Coordinate of a finite point; 0 for the infinities.
  double x() const noexcept { return x_; }

  std::string to_string() const;

  friend bool operator==(const ExtendedPoint&, const ExtendedPoint&) = default;
  friend std::partial_ordering operator<=>(const ExtendedPoint& a, const ExtendedPoint& b) noexcept {
    if (a.kind_ != b.kind_) return a.kind_ <=> b.kind_;
    return a.x_ <=> b.x_;
  }

 private:
  ExtendedPoint(Kind kind, double x) noexcept : kind_(kind), x_(x) {}

  Kind kind_;
  double x_;
};

/// Knobs of the limit detector behind `estimate_alpha`: A f is sampled at
/// +-2^k for k in [k_min, k_max] and accepted when the last `window`
/// successive differences are all within `threshold`.
struct AlphaEstimateOptions {
  int k_min = 10;
  int k_max = 40;
  double threshold = 1e-8;
  int window = 3;
};

/// A function in Y given by a pointwise evaluator, with optionally declared
/// limits alpha_± = lim f(x)/(1+|x|) at ±inf.
class YTarget {
 public:
  using Evaluator = std::function<double(double)>;

  YTarget(Evaluator evaluator, std::optional<double> alpha_plus,
          std::optional<double> alpha_minus, std::string label = {});

  /// Evaluates f(x); throws DomainError when the evaluator returns a non-finite value.
  double operator()(double x) const;

  const std::optional<double>& alpha_plus() const noexcept { return alpha_plus_; }
  const std::optional<double>& alpha_minus() const noexcept { return alpha_minus_; }
  std::optional<double> declared_alpha(Side side) const noexcept {
    return side == Side::plus ? alpha_plus_ : alpha_minus_;
  }
  const std::string& label() const noexcept { return label_; }

  const AlphaEstimateOptions& estimation() const noexcept { return estimation_; }
  YTarget with_estimation(AlphaEstimateOptions options) const;

 private:
  Evaluator evaluator_;
  std::optional<double> alpha_plus_;
  std::optional<double> alpha_minus_;
  std::string label_;
  AlphaEstimateOptions estimation_;
};

}  // namespace reluspan
