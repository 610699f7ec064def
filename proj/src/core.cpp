#include "reluspan/core.hpp"

#include <algorithm>
#include <cmath>

#include "reluspan/errors.hpp"
#include "reluspan/io.hpp"

namespace reluspan {

DomainError::DomainError(std::string op, double value, double x)
    : Error("domain error in " + op + ": offending value " + format_number(value) +
            " at x = " + format_number(x)),
      op_(std::move(op)),
      value_(value),
      x_(x) {}

ReLUUnit::ReLUUnit(double slope, double offset, double coefficient)
    : slope_(slope), offset_(offset), coefficient_(coefficient) {
  if (!std::isfinite(slope) || !std::isfinite(offset) || !std::isfinite(coefficient)) {
    throw InvalidArgument("ReLU unit parameters must be finite");
  }
  if (slope == 0.0) throw InvalidArgument("ReLU unit slope must be nonzero");
}

double ReLUNetwork::operator()(double x) const noexcept {
  double sum = 0.0;
  for (const auto& unit : units_) sum += unit(x);
  return sum;
}

double eval_network(const ReLUNetwork& net, double x) noexcept { return net(x); }

PiecewiseLinear::PiecewiseLinear(std::vector<double> knots, std::vector<double> values,
                                 double left_slope, double right_slope)
    : knots_(std::move(knots)),
      values_(std::move(values)),
      left_slope_(left_slope),
      right_slope_(right_slope) {
  if (knots_.size() != values_.size()) {
    throw InvalidArgument("piecewise-linear function needs one value per knot");
  }
  if (knots_.empty()) {
    throw InvalidArgument("piecewise-linear function without knots must be built with line()");
  }
  if (!std::isfinite(left_slope_) || !std::isfinite(right_slope_)) {
    throw InvalidArgument("tail slopes must be finite");
  }
  for (std::size_t i = 0; i < knots_.size(); ++i) {
    if (!std::isfinite(knots_[i]) || !std::isfinite(values_[i])) {
      throw InvalidArgument("knots and knot values must be finite");
    }
    if (i > 0 && !(knots_[i - 1] < knots_[i])) {
      throw InvalidArgument("knots must be strictly increasing");
    }
  }
}

PiecewiseLinear PiecewiseLinear::line(double slope, double intercept) {
  if (!std::isfinite(slope) || !std::isfinite(intercept)) {
    throw InvalidArgument("line slope and intercept must be finite");
  }
  PiecewiseLinear pl;
  pl.left_slope_ = slope;
  pl.right_slope_ = slope;
  pl.intercept_ = intercept;
  return pl;
}

double PiecewiseLinear::operator()(double x) const noexcept {
  if (knots_.empty()) return left_slope_ * x + intercept_;
  if (x <= knots_.front()) return values_.front() + left_slope_ * (x - knots_.front());
  if (x >= knots_.back()) return values_.back() + right_slope_ * (x - knots_.back());
  const auto it = std::upper_bound(knots_.begin(), knots_.end(), x);
  const auto hi = static_cast<std::size_t>(it - knots_.begin());
  const auto lo = hi - 1;
  const double h = knots_[hi] - knots_[lo];
  const double s = (x - knots_[lo]) / h;
  return values_[lo] + s * (values_[hi] - values_[lo]);
}

double PiecewiseLinear::outgoing_slope(std::size_t i) const noexcept {
  if (i + 1 >= knots_.size()) return right_slope_;
  return (values_[i + 1] - values_[i]) / (knots_[i + 1] - knots_[i]);
}

double PiecewiseLinear::incoming_slope(std::size_t i) const noexcept {
  if (i == 0) return left_slope_;
  return outgoing_slope(i - 1);
}

double eval_pl(const PiecewiseLinear& pl, double x) noexcept { return pl(x); }

ExtendedPoint ExtendedPoint::finite(double x) {
  if (!std::isfinite(x)) throw InvalidArgument("finite point needs a finite coordinate");
  return ExtendedPoint(Kind::finite, x);
}

std::string ExtendedPoint::to_string() const {
  switch (kind_) {
    case Kind::plus_infinity: return "+inf";
    case Kind::minus_infinity: return "-inf";
    case Kind::finite: break;
  }
  return format_number(x_);
}

YTarget::YTarget(Evaluator evaluator, std::optional<double> alpha_plus,
                 std::optional<double> alpha_minus, std::string label)
    : evaluator_(std::move(evaluator)),
      alpha_plus_(alpha_plus),
      alpha_minus_(alpha_minus),
      label_(std::move(label)) {
  if (!evaluator_) throw InvalidArgument("target needs an evaluator");
  if ((alpha_plus_ && !std::isfinite(*alpha_plus_)) ||
      (alpha_minus_ && !std::isfinite(*alpha_minus_))) {
    throw InvalidArgument("declared asymptotic values must be finite");
  }
}

double YTarget::operator()(double x) const {
  const double y = evaluator_(x);
  if (!std::isfinite(y)) throw DomainError("target evaluation", y, x);
  return y;
}

YTarget YTarget::with_estimation(AlphaEstimateOptions options) const {
  if (options.k_min < 0 || options.k_max > 1000 || options.k_min >= options.k_max ||
      options.window < 1 || options.window > options.k_max - options.k_min ||
      !(options.threshold > 0.0)) {
    throw InvalidArgument("invalid asymptotic estimation options");
  }
  YTarget copy = *this;
  copy.estimation_ = options;
  return copy;
}

}  // namespace reluspan
