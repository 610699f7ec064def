#include "reluspan/pl_algebra.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "detail/summation.hpp"
#include "reluspan/errors.hpp"

namespace reluspan {
namespace {

double jump_threshold(double left_slope, double right_slope, const std::vector<double>& jumps) {
  double scale = std::max({1.0, std::abs(left_slope), std::abs(right_slope)});
  for (double d : jumps) scale = std::max(scale, std::abs(d));
  return kSlopeJumpTolerance * scale;
}

// Keeps the knots whose jump exceeds the threshold. When nothing survives the
// function is affine and collapses to a line through (anchor_x, anchor_y).
PiecewiseLinear drop_flat_knots(const std::vector<double>& knots, const std::vector<double>& values,
                                const std::vector<double>& jumps, double left_slope,
                                double right_slope, double anchor_x, double anchor_y) {
  const double threshold = jump_threshold(left_slope, right_slope, jumps);
  std::vector<double> kept_knots;
  std::vector<double> kept_values;
  for (std::size_t i = 0; i < knots.size(); ++i) {
    if (std::abs(jumps[i]) > threshold) {
      kept_knots.push_back(knots[i]);
      kept_values.push_back(values[i]);
    }
  }
  if (kept_knots.empty()) {
    return PiecewiseLinear::line(left_slope, anchor_y - left_slope * anchor_x);
  }
  return PiecewiseLinear(std::move(kept_knots), std::move(kept_values), left_slope, right_slope);
}

}  // namespace

std::vector<double> slope_jumps(const PiecewiseLinear& pl) {
  std::vector<double> jumps(pl.knots().size());
  for (std::size_t i = 0; i < jumps.size(); ++i) {
    jumps[i] = pl.outgoing_slope(i) - pl.incoming_slope(i);
  }
  return jumps;
}

PiecewiseLinear canonicalize(const PiecewiseLinear& pl) {
  if (pl.is_line()) return pl;

  std::vector<double> knots;
  std::vector<double> values;
  for (std::size_t i = 0; i < pl.knots().size(); ++i) {
    const double x = pl.knots()[i];
    if (!knots.empty() && x - knots.back() <= kKnotMergeTolerance) continue;
    knots.push_back(x);
    values.push_back(pl.values()[i]);
  }
  const PiecewiseLinear merged(knots, values, pl.left_slope(), pl.right_slope());
  return drop_flat_knots(knots, values, slope_jumps(merged), pl.left_slope(), pl.right_slope(),
                         knots.front(), values.front());
}

PiecewiseLinear network_to_pl(const ReLUNetwork& net) {
  struct Kink {
    double x;
    double jump;
  };
  std::vector<Kink> kinks;
  kinks.reserve(net.size());
  detail::NeumaierSum left_slope;
  detail::NeumaierSum right_slope;
  for (const auto& unit : net.units()) {
    const double contribution = unit.coefficient() * unit.slope();
    // A unit with a > 0 is active to the right of its kink, a < 0 to the left;
    // either way the slope increases by c*|a| across the kink.
    if (unit.slope() > 0.0) {
      right_slope.add(contribution);
    } else {
      left_slope.add(contribution);
    }
    // "+ 0.0" turns a kink at -0.0 into 0.0 so documents never show "-0.0".
    kinks.push_back({unit.kink() + 0.0, unit.coefficient() * std::abs(unit.slope())});
  }
  std::stable_sort(kinks.begin(), kinks.end(),
                   [](const Kink& a, const Kink& b) { return a.x < b.x; });

  std::vector<double> knots;
  std::vector<detail::NeumaierSum> merged_jumps;
  for (const auto& kink : kinks) {
    if (knots.empty() || kink.x - knots.back() > kKnotMergeTolerance) {
      knots.push_back(kink.x);
      merged_jumps.emplace_back();
    }
    merged_jumps.back().add(kink.jump);
  }

  std::vector<double> jumps(knots.size());
  std::vector<double> values(knots.size());
  for (std::size_t i = 0; i < knots.size(); ++i) {
    jumps[i] = merged_jumps[i].value();
    values[i] = net(knots[i]);
  }
  return drop_flat_knots(knots, values, jumps, left_slope.value(), right_slope.value(), 0.0,
                         net(0.0));
}

ReLUNetwork pl_to_network(const PiecewiseLinear& pl) {
  std::vector<ReLUUnit> units;
  const double m_left = pl.left_slope();
  const double c_left = pl.is_line() ? pl.intercept() : pl.values()[0] - m_left * pl.knots()[0];

  if (m_left != 0.0) {
    units.emplace_back(1.0, 0.0, m_left);
    units.emplace_back(-1.0, 0.0, -m_left);
  }
  const auto gadget = constant_gadget(c_left);
  units.insert(units.end(), gadget.units().begin(), gadget.units().end());

  if (!pl.is_line()) {
    auto jumps = slope_jumps(pl);
    // Pin the last jump so the right tail slope, summed the way boundary
    // values are, reproduces m_R.
    detail::NeumaierSum running;
    running.add(m_left);
    for (std::size_t i = 0; i + 1 < jumps.size(); ++i) running.add(jumps[i]);
    jumps.back() = pl.right_slope() - running.value();

    for (std::size_t i = 0; i < jumps.size(); ++i) {
      if (jumps[i] != 0.0) units.emplace_back(1.0, -pl.knots()[i], jumps[i]);
    }
  }
  return ReLUNetwork(std::move(units));
}

ReLUNetwork hat(double center, double halfwidth) {
  if (!std::isfinite(center)) throw InvalidArgument("hat center must be finite");
  if (!(halfwidth > 0.0) || !std::isfinite(halfwidth)) {
    throw InvalidArgument("hat halfwidth must be positive and finite");
  }
  const double height = 1.0 / halfwidth;
  return ReLUNetwork({
      ReLUUnit(1.0, halfwidth - center, height),
      ReLUUnit(1.0, -center - halfwidth, height),
      ReLUUnit(1.0, -center, -2.0 * height),
  });
}

ReLUNetwork ramp_plus() { return ReLUNetwork({ReLUUnit(1.0, 0.0, 1.0)}); }
ReLUNetwork ramp_minus() { return ReLUNetwork({ReLUUnit(-1.0, 0.0, 1.0)}); }

ReLUNetwork step_f() {
  return ReLUNetwork({ReLUUnit(1.0, 0.0, 1.0), ReLUUnit(1.0, -1.0, -1.0)});
}

ReLUNetwork step_g() {
  return ReLUNetwork({ReLUUnit(-1.0, 0.0, 1.0), ReLUUnit(-1.0, -1.0, -1.0)});
}

ReLUNetwork constant_gadget(double value) {
  if (value == 0.0) return {};
  return ReLUNetwork({
      ReLUUnit(1.0, 0.0, value),
      ReLUUnit(-1.0, 0.0, -value),
      ReLUUnit(1.0, -1.0, -value),
      ReLUUnit(-1.0, 1.0, value),
  });
}

PiecewiseLinear pl_add(const PiecewiseLinear& p, const PiecewiseLinear& q) {
  const double left = p.left_slope() + q.left_slope();
  const double right = p.right_slope() + q.right_slope();
  if (p.is_line() && q.is_line()) {
    return PiecewiseLinear::line(left, p.intercept() + q.intercept());
  }
  std::vector<double> knots;
  std::merge(p.knots().begin(), p.knots().end(), q.knots().begin(), q.knots().end(),
             std::back_inserter(knots));
  knots.erase(std::unique(knots.begin(), knots.end()), knots.end());
  std::vector<double> values(knots.size());
  std::transform(knots.begin(), knots.end(), values.begin(),
                 [&](double x) { return p(x) + q(x); });
  return canonicalize(PiecewiseLinear(std::move(knots), std::move(values), left, right));
}

PiecewiseLinear pl_scale(const PiecewiseLinear& p, double s) {
  if (!std::isfinite(s)) throw InvalidArgument("scale factor must be finite");
  if (s == 0.0) return PiecewiseLinear::zero();
  if (p.is_line()) return PiecewiseLinear::line(s * p.left_slope(), s * p.intercept());
  std::vector<double> values(p.values().begin(), p.values().end());
  for (double& v : values) v *= s;
  return canonicalize(PiecewiseLinear(std::vector<double>(p.knots().begin(), p.knots().end()),
                                      std::move(values), s * p.left_slope(),
                                      s * p.right_slope()));
}

ReLUNetwork net_add(const ReLUNetwork& p, const ReLUNetwork& q) {
  std::vector<ReLUUnit> units(p.units().begin(), p.units().end());
  units.insert(units.end(), q.units().begin(), q.units().end());
  return ReLUNetwork(std::move(units));
}

ReLUNetwork net_scale(const ReLUNetwork& p, double s) {
  if (!std::isfinite(s)) throw InvalidArgument("scale factor must be finite");
  std::vector<ReLUUnit> units;
  units.reserve(p.size());
  for (const auto& u : p.units()) units.emplace_back(u.slope(), u.offset(), s * u.coefficient());
  return ReLUNetwork(std::move(units));
}

IdentityReport verify_identities(double lo, double hi, std::size_t points, bool inject_fault) {
  if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi)) {
    throw InvalidArgument("identity grid needs finite bounds with lo < hi");
  }
  if (points < 2) throw InvalidArgument("identity grid needs at least two points");

  ReLUNetwork hat_net = hat(1.0, 1.0);
  if (inject_fault) {
    std::vector<ReLUUnit> units(hat_net.units().begin(), hat_net.units().end());
    const auto& u = units.back();
    units.back() = ReLUUnit(u.slope(), u.offset(), u.coefficient() + 1e-6);
    hat_net = ReLUNetwork(std::move(units));
  }
  const ReLUNetwork identity = net_add(ramp_plus(), net_scale(ramp_minus(), -1.0));
  const ReLUNetwork constant = pl_to_network(PiecewiseLinear::line(0.0, 1.0));
  const ReLUNetwork f = step_f();
  const ReLUNetwork g = step_g();

  IdentityReport report;
  report.checks = {{"hat: max(1-|x-1|,0) = relu(x)+relu(x-2)-2relu(x-1)", 0.0},
                   {"line: x = relu(x)-relu(-x)", 0.0},
                   {"constant: 1 = relu(x)-relu(-x)-relu(x-1)+relu(1-x)", 0.0},
                   {"step_f: relu(x)-relu(x-1) = clamp(x,0,1)", 0.0},
                   {"step_g: relu(-x)-relu(-x-1) = clamp(-x,0,1)", 0.0}};
  const double step = (hi - lo) / static_cast<double>(points - 1);
  for (std::size_t i = 0; i < points; ++i) {
    const double x = i + 1 == points ? hi : lo + step * static_cast<double>(i);
    const double deviations[] = {
        std::abs(std::max(1.0 - std::abs(x - 1.0), 0.0) - hat_net(x)),
        std::abs(x - identity(x)),
        std::abs(1.0 - constant(x)),
        std::abs(std::clamp(x, 0.0, 1.0) - f(x)),
        std::abs(std::clamp(-x, 0.0, 1.0) - g(x)),
    };
    for (std::size_t k = 0; k < report.checks.size(); ++k) {
      report.checks[k].max_deviation = std::max(report.checks[k].max_deviation, deviations[k]);
    }
  }
  for (const auto& check : report.checks) {
    report.max_deviation = std::max(report.max_deviation, check.max_deviation);
  }
  report.passed = report.max_deviation <= kIdentityTolerance;
  return report;
}

}  // namespace reluspan
