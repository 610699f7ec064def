#include "reluspan/weighted_norm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>

#include "detail/parallel.hpp"
#include "detail/summation.hpp"
#include "reluspan/errors.hpp"
#include "reluspan/io.hpp"
#include "reluspan/pl_algebra.hpp"

namespace reluspan {
namespace {

struct Best {
  double value = -1.0;
  ExtendedPoint witness = ExtendedPoint::minus_infinity();

  void offer(double v, const ExtendedPoint& p) {
    if (v > value) {
      value = v;
      witness = p;
    }
  }
};

// Max of |A f| over the finite grid points, evaluated in parallel. Chunks are
// merged in index order with a strict comparison, so the result equals the
// sequential scan.
template <class WeightedAbs>
Best finite_grid_max(const CompactGrid& grid, WeightedAbs&& weighted_abs) {
  const auto& xs = grid.finite_points();
  std::vector<std::pair<std::size_t, Best>> results;
  std::mutex lock;
  detail::parallel_chunks(xs.size(), [&](std::size_t begin, std::size_t end) {
    Best local;
    for (std::size_t i = begin; i < end; ++i) {
      local.offer(weighted_abs(xs[i]), ExtendedPoint::finite(xs[i]));
    }
    std::lock_guard guard(lock);
    results.emplace_back(begin, local);
  });
  std::sort(results.begin(), results.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  Best best;
  for (const auto& [begin, local] : results) best.offer(local.value, local.witness);
  return best;
}

}  // namespace

CompactGrid::CompactGrid(int resolution) : resolution_(resolution) {
  if (resolution < 1) throw InvalidArgument("grid resolution must be positive");
  finite_.reserve(2 * static_cast<std::size_t>(resolution) - 1);
  for (int k = -resolution + 1; k < resolution; ++k) {
    finite_.push_back(static_cast<double>(k) / static_cast<double>(resolution - std::abs(k)));
  }
}

ExtendedPoint CompactGrid::point(std::size_t index) const {
  if (index >= size()) throw InvalidArgument("grid index out of range");
  if (index == 0) return ExtendedPoint::minus_infinity();
  if (index + 1 == size()) return ExtendedPoint::plus_infinity();
  return ExtendedPoint::finite(finite_[index - 1]);
}

double CompactGrid::t(std::size_t index) const noexcept {
  const auto k = static_cast<long>(index) - resolution_;
  return static_cast<double>(k) / static_cast<double>(resolution_);
}

const char* to_string(NormMethod method) noexcept {
  return method == NormMethod::exact_pl ? "exact_pl" : "grid_oracle";
}

double boundary_value(const PiecewiseLinear& pl, Side side) noexcept {
  return side == Side::plus ? pl.right_slope() : -pl.left_slope();
}

double boundary_value(const ReLUNetwork& net, Side side) noexcept {
  detail::NeumaierSum sum;
  for (const auto& unit : net.units()) {
    if ((unit.slope() > 0.0) == (side == Side::plus)) {
      sum.add(unit.coefficient() * std::abs(unit.slope()));
    }
  }
  return sum.value();
}

double alpha(const YTarget& f, Side side) {
  if (auto declared = f.declared_alpha(side)) return *declared;
  return estimate_alpha(f, side);
}

double apply_A(const PiecewiseLinear& pl, const ExtendedPoint& p) {
  switch (p.kind()) {
    case ExtendedPoint::Kind::plus_infinity: return boundary_value(pl, Side::plus);
    case ExtendedPoint::Kind::minus_infinity: return boundary_value(pl, Side::minus);
    case ExtendedPoint::Kind::finite: break;
  }
  return pl(p.x()) / weight(p.x());
}

double apply_A(const ReLUNetwork& net, const ExtendedPoint& p) {
  switch (p.kind()) {
    case ExtendedPoint::Kind::plus_infinity: return boundary_value(net, Side::plus);
    case ExtendedPoint::Kind::minus_infinity: return boundary_value(net, Side::minus);
    case ExtendedPoint::Kind::finite: break;
  }
  return net(p.x()) / weight(p.x());
}

double apply_A(const YTarget& f, const ExtendedPoint& p) {
  switch (p.kind()) {
    case ExtendedPoint::Kind::plus_infinity: return alpha(f, Side::plus);
    case ExtendedPoint::Kind::minus_infinity: return alpha(f, Side::minus);
    case ExtendedPoint::Kind::finite: break;
  }
  return f(p.x()) / weight(p.x());
}

NormReport y_norm_exact(const PiecewiseLinear& pl) {
  std::vector<double> breakpoints(pl.knots().begin(), pl.knots().end());
  const auto zero_at = std::lower_bound(breakpoints.begin(), breakpoints.end(), 0.0);
  if (zero_at == breakpoints.end() || *zero_at != 0.0) breakpoints.insert(zero_at, 0.0);

  Best best;
  best.offer(std::abs(pl.left_slope()), ExtendedPoint::minus_infinity());
  for (double x : breakpoints) best.offer(std::abs(pl(x)) / weight(x), ExtendedPoint::finite(x));
  best.offer(std::abs(pl.right_slope()), ExtendedPoint::plus_infinity());
  return {best.value, best.witness, NormMethod::exact_pl};
}

NormReport y_norm_exact(const ReLUNetwork& net) { return y_norm_exact(network_to_pl(net)); }

NormReport y_norm_grid(const ReLUNetwork& net, const CompactGrid& grid) {
  Best best;
  best.offer(std::abs(boundary_value(net, Side::minus)), ExtendedPoint::minus_infinity());
  const Best inner = finite_grid_max(grid, [&](double x) { return std::abs(net(x)) / weight(x); });
  best.offer(inner.value, inner.witness);
  best.offer(std::abs(boundary_value(net, Side::plus)), ExtendedPoint::plus_infinity());
  return {best.value, best.witness, NormMethod::grid_oracle};
}

NormReport y_norm_grid(const YTarget& f, const CompactGrid& grid) {
  const double minus = alpha(f, Side::minus);
  const double plus = alpha(f, Side::plus);
  Best best;
  best.offer(std::abs(minus), ExtendedPoint::minus_infinity());
  const Best inner = finite_grid_max(grid, [&](double x) { return std::abs(f(x)) / weight(x); });
  best.offer(inner.value, inner.witness);
  best.offer(std::abs(plus), ExtendedPoint::plus_infinity());
  return {best.value, best.witness, NormMethod::grid_oracle};
}

double estimate_alpha(const YTarget& f, Side side) {
  const auto& opt = f.estimation();
  const double sign = side == Side::plus ? 1.0 : -1.0;
  std::vector<double> samples;
  samples.reserve(static_cast<std::size_t>(opt.k_max - opt.k_min + 1));
  for (int k = opt.k_min; k <= opt.k_max; ++k) {
    const double x = sign * std::ldexp(1.0, k);
    double y = 0.0;
    try {
      y = f(x);
    } catch (const DomainError& e) {
      throw NotInY("target may not lie in Y: evaluation failed at x = " + format_number(x) +
                   " (" + e.what() + ")");
    }
    samples.push_back(y / weight(x));
  }
  const std::size_t n = samples.size();
  for (std::size_t i = n - static_cast<std::size_t>(opt.window); i < n; ++i) {
    const double diff = samples[i] - samples[i - 1];
    if (!(std::abs(diff) <= opt.threshold)) {
      throw NotInY(std::string("target may not lie in Y: f(x)/(1+|x|) does not settle as x -> ") +
                   (side == Side::plus ? "+inf" : "-inf") + " (successive difference " +
                   format_number(diff) + ")");
    }
  }
  // The samples behave like alpha + beta/|x|; one extrapolation step removes
  // the 1/|x| term.
  return 2.0 * samples[n - 1] - samples[n - 2];
}

LinfBound linf_bound_check(const ReLUNetwork& net, double radius) {
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw InvalidArgument("radius must be positive and finite");
  }
  const PiecewiseLinear pl = network_to_pl(net);
  double lhs = std::max(std::abs(net(-radius)), std::abs(net(radius)));
  for (double x : pl.knots()) {
    if (std::abs(x) <= radius) lhs = std::max(lhs, std::abs(net(x)));
  }
  return {lhs, (1.0 + radius) * y_norm_exact(pl).value};
}

}  // namespace reluspan
