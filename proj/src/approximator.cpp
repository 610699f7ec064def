#include "reluspan/approximator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>

#include "detail/parallel.hpp"
#include "reluspan/errors.hpp"
#include "reluspan/pl_algebra.hpp"
#include "reluspan/weighted_norm.hpp"

namespace reluspan {
namespace {

void validate(const ApproxConfig& cfg) {
  if (!(cfg.tolerance > 0.0) || !std::isfinite(cfg.tolerance)) {
    throw InvalidArgument("tolerance must be positive and finite");
  }
  if (cfg.max_knots < 2) throw InvalidArgument("max_knots must be at least 2");
  if (!(cfg.initial_radius > 0.0) || !std::isfinite(cfg.initial_radius)) {
    throw InvalidArgument("initial radius must be positive and finite");
  }
  if (cfg.oracle_resolution < 1) throw InvalidArgument("oracle resolution must be positive");
  if (cfg.initial_knots < 2) throw InvalidArgument("at least two initial knots are needed");
  if (cfg.segment_probes < 0) throw InvalidArgument("segment probes must be nonnegative");
  if (!(cfg.max_probe_spacing > 0.0)) throw InvalidArgument("probe spacing must be positive");
}

struct Segment {
  double deviation;
  double left;
  double right;
  double left_value;
  double right_value;
};

// Worst deviation first; among equals the leftmost segment.
struct WorstFirst {
  bool operator()(const Segment& a, const Segment& b) const {
    if (a.deviation != b.deviation) return a.deviation > b.deviation;
    return a.left < b.left;
  }
};

// Residual r = f - h0 sampled once on the oracle grid.
struct SampledResidual {
  std::function<double(double)> r;
  const std::vector<double>& xs;
  std::vector<double> values;
  /// |alpha_+| + |alpha_-|: h0 grows like this times |x|, which sets the
  /// rounding scale of r = f - h0.
  double ramp_scale = 0.0;
};

double chord(const Segment& s, double x) {
  const double u = (x - s.left) / (s.right - s.left);
  return s.left_value + u * (s.right_value - s.left_value);
}

double segment_deviation(const SampledResidual& res, Segment s, const ApproxConfig& cfg) {
  double worst = 0.0;
  const auto first = std::upper_bound(res.xs.begin(), res.xs.end(), s.left);
  const auto last = std::lower_bound(first, res.xs.end(), s.right);
  for (auto it = first; it != last; ++it) {
    const auto k = static_cast<std::size_t>(it - res.xs.begin());
    worst = std::max(worst, std::abs(res.values[k] - chord(s, *it)) / weight(*it));
  }
  const double by_spacing = std::ceil((s.right - s.left) / cfg.max_probe_spacing) - 1.0;
  const auto probes = static_cast<long long>(
      std::min(std::max(static_cast<double>(cfg.segment_probes), by_spacing), 1e7));
  for (long long j = 1; j <= probes; ++j) {
    const double x = s.left + (s.right - s.left) * static_cast<double>(j) /
                                  static_cast<double>(probes + 1);
    worst = std::max(worst, std::abs(res.r(x) - chord(s, x)) / weight(x));
  }
  return worst;
}

// Weighted deviation of the constant tails r(±R) from r on grid points outside [-R, R].
double tail_deviation(const SampledResidual& res, double radius, double left_value,
                      double right_value) {
  double worst = 0.0;
  for (std::size_t k = 0; k < res.xs.size(); ++k) {
    const double x = res.xs[k];
    if (x < -radius) {
      worst = std::max(worst, std::abs(res.values[k] - left_value) / weight(x));
    } else if (x > radius) {
      worst = std::max(worst, std::abs(res.values[k] - right_value) / weight(x));
    }
  }
  return worst;
}

// Where to split a segment. If r is linear near both ends and the two lines
// meet inside the segment at a point where r lies on both of them, the
// segment holds a single kink of r and splitting there makes both halves
// exact. Otherwise the midpoint.
double split_point(const SampledResidual& res, const Segment& s) {
  const double a = s.left;
  const double b = s.right;
  const double mid = a + 0.5 * (b - a);
  const double delta = (b - a) / 1024.0;
  const double fa = s.left_value;
  const double fb = s.right_value;
  const double fa_in = res.r(a + delta);
  const double fb_in = res.r(b - delta);
  const double slope_left = (fa_in - fa) / delta;
  const double slope_right = (fb - fb_in) / delta;
  const double jump = slope_left - slope_right;
  if (!(std::abs(jump) > 1e-12 * (std::abs(slope_left) + std::abs(slope_right)))) return mid;
  const double k = a + (fb - fa - slope_right * (b - a)) / jump;
  if (!(k > a + delta && k < b - delta)) return mid;
  const auto on_left = [&](double x) { return fa + slope_left * (x - a); };
  const auto on_right = [&](double x) { return fb + slope_right * (x - b); };
  const double q1 = 0.5 * (a + k);
  const double q2 = 0.5 * (k + b);
  const double fk = res.r(k);
  const double f1 = res.r(q1);
  const double f2 = res.r(q2);
  const double scale = 1.0 + std::max({std::abs(fa), std::abs(fb), std::abs(fk), std::abs(f1),
                                       std::abs(f2)}) +
                       res.ramp_scale * std::max(std::abs(a), std::abs(b));
  const double tol = 1e-10 * scale;
  const bool single_kink = std::abs(fk - on_left(k)) <= tol && std::abs(fk - on_right(k)) <= tol &&
                           std::abs(f1 - on_left(q1)) <= tol && std::abs(f2 - on_right(q2)) <= tol;
  return single_kink ? k : mid;
}

struct Refinement {
  std::map<double, double> knots;  // location -> r(location)
  double tail = 0.0;
  bool tail_too_large = false;
  bool exhausted = false;
  std::string failure;
};

Refinement refine(const SampledResidual& res, double radius, const ApproxConfig& cfg,
                  std::vector<double>& history) {
  Refinement out;
  const double interior_budget = cfg.tolerance / 2.0;
  const double left_value = res.r(-radius);
  const double right_value = res.r(radius);
  out.tail = tail_deviation(res, radius, left_value, right_value);
  if (out.tail > interior_budget) {
    out.tail_too_large = true;
    return out;
  }

  const std::size_t n = std::min(cfg.initial_knots, cfg.max_knots);
  for (std::size_t i = 0; i < n; ++i) {
    double x = -radius + 2.0 * radius * static_cast<double>(i) / static_cast<double>(n - 1);
    if (i + 1 == n) x = radius;
    if (out.knots.count(x) != 0) continue;
    out.knots.emplace(x, i == 0 ? left_value : i + 1 == n ? right_value : res.r(x));
  }

  std::set<Segment, WorstFirst> segments;
  for (auto it = out.knots.begin(); std::next(it) != out.knots.end(); ++it) {
    const auto nx = std::next(it);
    Segment s{0.0, it->first, nx->first, it->second, nx->second};
    s.deviation = segment_deviation(res, s, cfg);
    segments.insert(s);
  }

  auto current = [&] { return std::max(out.tail, segments.begin()->deviation); };
  history.push_back(current());
  while (segments.begin()->deviation > interior_budget) {
    if (out.knots.size() >= cfg.max_knots) {
      out.exhausted = true;
      out.failure = "knot budget exhausted";
      break;
    }
    const Segment worst = *segments.begin();
    const double mid = split_point(res, worst);
    if (!(worst.left < mid && mid < worst.right)) {
      out.exhausted = true;
      out.failure = "segment too narrow to bisect";
      break;
    }
    segments.erase(segments.begin());
    const double mid_value = res.r(mid);
    out.knots.emplace(mid, mid_value);
    Segment lo{0.0, worst.left, mid, worst.left_value, mid_value};
    Segment hi{0.0, mid, worst.right, mid_value, worst.right_value};
    lo.deviation = segment_deviation(res, lo, cfg);
    hi.deviation = segment_deviation(res, hi, cfg);
    segments.insert(lo);
    segments.insert(hi);
    history.push_back(current());
  }
  return out;
}

}  // namespace

PiecewiseLinear interp_pl(const std::function<double(double)>& f, std::span<const double> knots,
                          double left_value, double right_value) {
  if (knots.size() < 2) throw InvalidArgument("interpolation needs at least two knots");
  for (std::size_t i = 1; i < knots.size(); ++i) {
    if (!(knots[i - 1] < knots[i])) {
      throw InvalidArgument("interpolation knots must be strictly increasing without duplicates");
    }
  }
  std::vector<double> values(knots.size());
  values.front() = left_value;
  values.back() = right_value;
  for (std::size_t i = 1; i + 1 < knots.size(); ++i) values[i] = f(knots[i]);
  return canonicalize(
      PiecewiseLinear(std::vector<double>(knots.begin(), knots.end()), std::move(values), 0.0, 0.0));
}

YTarget residual_target(const YTarget& f, const ReLUNetwork& net) {
  const double plus = alpha(f, Side::plus) - boundary_value(net, Side::plus);
  const double minus = alpha(f, Side::minus) - boundary_value(net, Side::minus);
  return YTarget([f, net](double x) { return f(x) - net(x); }, plus, minus,
                 f.label() + " - network");
}

double measure_residual(const YTarget& f, const ReLUNetwork& net, int resolution) {
  return y_norm_grid(residual_target(f, net), CompactGrid(resolution)).value;
}

ApproximationCertificate approximate(const YTarget& f, const ApproxConfig& cfg) {
  validate(cfg);
  ApproximationCertificate cert;
  cert.target_label = f.label();
  cert.tolerance = cfg.tolerance;
  cert.oracle_resolution = cfg.oracle_resolution;
  cert.alpha_plus = alpha(f, Side::plus);
  cert.alpha_minus = alpha(f, Side::minus);

  std::vector<ReLUUnit> asymptotic;
  if (cert.alpha_plus != 0.0) asymptotic.emplace_back(1.0, 0.0, cert.alpha_plus);
  if (cert.alpha_minus != 0.0) asymptotic.emplace_back(-1.0, 0.0, cert.alpha_minus);
  const ReLUNetwork h0(std::move(asymptotic));

  const CompactGrid grid(cfg.oracle_resolution);
  SampledResidual res{[&f, &h0](double x) { return f(x) - h0(x); }, grid.finite_points(), {},
                      std::abs(cert.alpha_plus) + std::abs(cert.alpha_minus)};
  res.values.resize(res.xs.size());
  detail::parallel_chunks(res.xs.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t k = begin; k < end; ++k) res.values[k] = res.r(res.xs[k]);
  });

  // Radius search. Once R passes the largest finite grid point the tail set
  // is empty, so the loop terminates.
  auto outer_sup = [&](double radius) {
    double worst = 0.0;
    for (std::size_t k = 0; k < res.xs.size(); ++k) {
      if (std::abs(res.xs[k]) >= radius) {
        worst = std::max(worst, std::abs(res.values[k]) / weight(res.xs[k]));
      }
    }
    return worst;
  };
  double radius = cfg.initial_radius;
  while (outer_sup(radius) > cfg.tolerance / 4.0) radius *= 2.0;

  Refinement refined;
  while (true) {
    refined = refine(res, radius, cfg, cert.refinement_history);
    if (!refined.tail_too_large) break;
    radius *= 2.0;
  }
  cert.radius = radius;

  std::vector<double> knots;
  std::vector<double> values;
  for (const auto& [x, v] : refined.knots) {
    knots.push_back(x);
    values.push_back(v);
  }
  const auto lookup = [&](double x) { return refined.knots.at(x); };
  const PiecewiseLinear interior = interp_pl(lookup, knots, values.front(), values.back());
  cert.knot_count = interior.knots().size();
  cert.network = net_add(h0, pl_to_network(interior));

  cert.measured_error = measure_residual(f, cert.network, cfg.oracle_resolution);
  cert.succeeded = cert.measured_error <= cfg.tolerance;
  if (!cert.succeeded) {
    cert.failure_reason = refined.exhausted ? refined.failure
                                            : "oracle residual exceeds tolerance";
  }
  return cert;
}

std::string samples_csv(const YTarget& f, const ReLUNetwork& net, int resolution) {
  const CompactGrid grid(resolution);
  std::string out = "x,target,network,weighted_residual\n";
  char line[128];
  for (double x : grid.finite_points()) {
    const double fx = f(x);
    const double nx = net(x);
    std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g,%.17g\n", x, fx, nx,
                  (fx - nx) / weight(x));
    out += line;
  }
  return out;
}

}  // namespace reluspan
