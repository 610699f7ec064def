#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "reluspan/approximator.hpp"
#include "reluspan/errors.hpp"
#include "reluspan/pl_algebra.hpp"
#include "reluspan/weighted_norm.hpp"
#include "support.hpp"

using namespace reluspan;

namespace {
const ExtendedPoint kPlus = ExtendedPoint::plus_infinity();
const ExtendedPoint kMinus = ExtendedPoint::minus_infinity();

ApproxConfig config(double tol, int resolution = 20'000) {
  ApproxConfig c;
  c.tolerance = tol;
  c.oracle_resolution = resolution;
  return c;
}

YTarget sqrt_target() {
  return YTarget([](double x) { return std::sqrt(1 + x * x); }, 1.0, 1.0, "sqrt(1+x^2)");
}

YTarget arctan_target() {
  return YTarget([](double x) { return std::atan(x); }, 0.0, 0.0, "arctan(x)");
}

YTarget bump_target() {
  return YTarget([](double x) { return std::exp(-x * x); }, 0.0, 0.0, "exp_neg_sq(x)");
}

YTarget network_target(const ReLUNetwork& net) {
  return YTarget([net](double x) { return net(x); }, apply_A(net, kPlus), apply_A(net, kMinus));
}
}  // namespace

TEST_CASE("interp_pl reproduces the hat from its knots") {
  const ReLUNetwork h = hat(1.0, 1.0);
  const std::vector<double> knots{0.0, 1.0, 2.0};
  const PiecewiseLinear p = interp_pl([&](double x) { return h(x); }, knots, 0.0, 0.0);
  for (double x = -3.0; x <= 5.0; x += 0.125) CHECK(p(x) == h(x));
}

TEST_CASE("interp_pl of a constant is that constant") {
  const std::vector<double> knots{-3.0, -0.5, 0.25, 8.0};
  const PiecewiseLinear p = interp_pl([](double) { return 5.0; }, knots, 5.0, 5.0);
  for (double x = -10.0; x <= 10.0; x += 0.5) CHECK(p(x) == 5.0);
}

TEST_CASE("interp_pl of x^2 deviates by 1/4 at the segment midpoints") {
  const std::vector<double> knots{0.0, 1.0, 2.0};
  const auto sq = [](double x) { return x * x; };
  const PiecewiseLinear p = interp_pl(sq, knots, 0.0, 4.0);
  CHECK(p(0.0) == 0.0);
  CHECK(p(1.0) == 1.0);
  CHECK(p(2.0) == 4.0);
  CHECK(p(0.5) - sq(0.5) == 0.25);
  CHECK(p(1.5) - sq(1.5) == 0.25);
  double worst = 0.0;
  for (int i = 0; i <= 2000; ++i) worst = std::max(worst, std::abs(p(i * 1e-3) - sq(i * 1e-3)));
  CHECK(worst == 0.25);
  // Constant tails.
  CHECK(p(-7.0) == 0.0);
  CHECK(p(9.0) == 4.0);
}

TEST_CASE("interp_pl uses the given extreme values") {
  const std::vector<double> knots{-1.0, 0.0, 1.0};
  const PiecewiseLinear p = interp_pl([](double x) { return x; }, knots, 10.0, 20.0);
  CHECK(p(-1.0) == 10.0);
  CHECK(p(0.0) == 0.0);
  CHECK(p(1.0) == 20.0);
}

TEST_CASE("interp_pl rejects malformed knots") {
  const auto f = [](double x) { return x; };
  const std::vector<double> dup{0.0, 1.0, 1.0};
  const std::vector<double> unsorted{1.0, 0.0};
  const std::vector<double> one{0.0};
  const std::vector<double> none;
  CHECK_THROWS_AS((void)interp_pl(f, dup, 0, 0), InvalidArgument);
  CHECK_THROWS_AS((void)interp_pl(f, unsorted, 0, 0), InvalidArgument);
  CHECK_THROWS_AS((void)interp_pl(f, one, 0, 0), InvalidArgument);
  CHECK_THROWS_AS((void)interp_pl(f, none, 0, 0), InvalidArgument);
}

TEST_CASE("approximate the identity exactly") {
  const YTarget id([](double x) { return x; }, 1.0, -1.0, "x");
  for (double tol : {1e-1, 1e-9}) {
    const ApproximationCertificate c = approximate(id, config(tol));
    REQUIRE(c.succeeded);
    CHECK(c.network.size() == 2);
    CHECK(c.measured_error == 0.0);
    CHECK(c.alpha_plus == 1.0);
    CHECK(c.alpha_minus == -1.0);
    CHECK(c.tolerance == tol);
    CHECK(c.target_label == "x");
    for (double x : {-3.0, 0.0, 2.5}) CHECK(c.network(x) == x);
  }
}

TEST_CASE("approximate sqrt(1+x^2) at 0.1") {
  const ApproximationCertificate c = approximate(sqrt_target(), config(0.1));
  REQUIRE(c.succeeded);
  CHECK(c.measured_error <= 0.1);
  CHECK(std::isfinite(c.radius));
  CHECK(c.radius >= 1.0);
  CHECK(c.knot_count >= 2);
  CHECK(c.failure_reason.empty());
  CHECK(measure_residual(sqrt_target(), c.network, c.oracle_resolution) == c.measured_error);
}

TEST_CASE("approximate step_f as an opaque target") {
  const ReLUNetwork f = step_f();
  const YTarget opaque([f](double x) { return f(x); }, std::nullopt, std::nullopt, "step_f");
  const ApproximationCertificate c = approximate(opaque, config(1e-3));
  REQUIRE(c.succeeded);
  CHECK(c.measured_error <= 1e-3);
  CHECK(c.knot_count <= 100);
}

TEST_CASE("certificates have exact boundary values") {
  for (const YTarget& f : {sqrt_target(), arctan_target(), bump_target()}) {
    const ApproximationCertificate c = approximate(f, config(1e-2));
    REQUIRE(c.succeeded);
    CHECK(apply_A(c.network, kPlus) == *f.alpha_plus());
    CHECK(apply_A(c.network, kMinus) == *f.alpha_minus());
  }
  // Random declared alphas: the ramp pair is constructed from them directly.
  testing::Rng rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    const double ap = testing::uniform(rng, -3, 3);
    const double am = testing::uniform(rng, -3, 3);
    const YTarget f([=](double x) { return (x > 0 ? ap * x : -am * x) + std::cos(x); }, ap, am);
    const ApproximationCertificate c = approximate(f, config(5e-2));
    REQUIRE(c.succeeded);
    CHECK(apply_A(c.network, kPlus) == doctest::Approx(ap).epsilon(1e-15));
    CHECK(apply_A(c.network, kMinus) == doctest::Approx(am).epsilon(1e-15));
  }
}

TEST_CASE("refinement is monotone on convex targets") {
  // On a convex residual, bisecting a segment never raises the deviation of
  // its halves, so the worst-segment history cannot increase.
  for (const YTarget& f : {sqrt_target(), YTarget([](double x) { return std::abs(x - 0.3) + 0.1 * x * x / (1 + std::abs(x)); },
                                                   std::nullopt, std::nullopt)}) {
    const ApproximationCertificate c = approximate(f, config(1e-3));
    REQUIRE(c.succeeded);
    REQUIRE(!c.refinement_history.empty());
    for (std::size_t i = 1; i < c.refinement_history.size(); ++i) {
      CHECK(c.refinement_history[i] <= c.refinement_history[i - 1]);
    }
  }
}

TEST_CASE("knot count grows as the tolerance shrinks") {
  for (const YTarget& f : {sqrt_target(), arctan_target(), bump_target()}) {
    std::size_t prev = 0;
    for (double tol : {1e-1, 1e-2, 1e-3}) {
      const ApproximationCertificate c = approximate(f, config(tol));
      REQUIRE(c.succeeded);
      CHECK(c.measured_error <= tol);
      CHECK(c.knot_count >= prev);
      prev = c.knot_count;
    }
  }
}

TEST_CASE("networks as targets are recovered with few knots") {
  testing::Rng rng(22);
  for (int trial = 0; trial < 10; ++trial) {
    const ReLUNetwork net = testing::random_network(rng, 6);
    const ApproximationCertificate c = approximate(network_target(net), config(1e-6));
    REQUIRE(c.succeeded);
    CHECK(c.measured_error <= 1e-6);
    // Splits snap onto the target's kinks, so every knot of the result with a
    // real slope change is a target kink (or 0 or ±R, where the construction
    // joins its pieces). Midpoint splits made before a snap leave knots with
    // jumps at rounding level only.
    const PiecewiseLinear got = network_to_pl(c.network);
    double slope_scale = 1.0;
    for (const auto& u : net.units()) slope_scale += std::abs(u.slope() * u.coefficient());
    int stray = 0;
    for (std::size_t i = 0; i < got.knots().size(); ++i) {
      const double k = got.knots()[i];
      if (std::abs(got.outgoing_slope(i) - got.incoming_slope(i)) <= 1e-6 * slope_scale) continue;
      bool explained = k == 0.0 || std::abs(std::abs(k) - c.radius) <= 1e-9 * c.radius;
      for (const auto& u : net.units()) explained = explained || std::abs(k - u.kink()) <= 1e-9 * (1 + std::abs(k));
      stray += explained ? 0 : 1;
    }
    CHECK(stray == 0);
  }
}

TEST_CASE("an exhausted knot budget is reported, not thrown") {
  const YTarget wiggly([](double x) { return std::sin(5 * x); }, 0.0, 0.0, "sin(5x)");
  ApproxConfig c = config(1e-4);
  c.max_knots = 40;
  const ApproximationCertificate cert = approximate(wiggly, c);
  CHECK_FALSE(cert.succeeded);
  CHECK_FALSE(cert.failure_reason.empty());
  CHECK(cert.knot_count <= 40);
}

TEST_CASE("approximate validates its configuration") {
  const YTarget f = sqrt_target();
  CHECK_THROWS_AS((void)approximate(f, config(0.0)), InvalidArgument);
  CHECK_THROWS_AS((void)approximate(f, config(-1.0)), InvalidArgument);
  CHECK_THROWS_AS((void)approximate(f, config(std::nan(""))), InvalidArgument);
  ApproxConfig c = config(0.1);
  c.max_knots = 1;
  CHECK_THROWS_AS((void)approximate(f, c), InvalidArgument);
  c = config(0.1);
  c.initial_radius = 0.0;
  CHECK_THROWS_AS((void)approximate(f, c), InvalidArgument);
  c = config(0.1, 0);
  CHECK_THROWS_AS((void)approximate(f, c), InvalidArgument);
  c = config(0.1);
  c.max_probe_spacing = 0.0;
  CHECK_THROWS_AS((void)approximate(f, c), InvalidArgument);
}

TEST_CASE("targets outside Y are rejected") {
  const YTarget square([](double x) { return x * x; }, std::nullopt, std::nullopt);
  CHECK_THROWS_AS((void)approximate(square, config(0.1)), NotInY);
}

TEST_CASE("approximate is deterministic") {
  const ApproximationCertificate a = approximate(arctan_target(), config(1e-3));
  const ApproximationCertificate b = approximate(arctan_target(), config(1e-3));
  REQUIRE(a.network.size() == b.network.size());
  for (std::size_t i = 0; i < a.network.size(); ++i) {
    CHECK(a.network.units()[i].slope() == b.network.units()[i].slope());
    CHECK(a.network.units()[i].offset() == b.network.units()[i].offset());
    CHECK(a.network.units()[i].coefficient() == b.network.units()[i].coefficient());
  }
  CHECK(a.measured_error == b.measured_error);
  CHECK(a.refinement_history == b.refinement_history);
}

TEST_CASE("residual_target subtracts and carries boundary values") {
  const YTarget f = sqrt_target();
  const YTarget r = residual_target(f, ramp_plus());
  CHECK(r(2.0) == doctest::Approx(std::sqrt(5.0) - 2.0));
  CHECK(r.alpha_plus() == 0.0);
  CHECK(r.alpha_minus() == 1.0);
}

TEST_CASE("samples_csv layout") {
  const std::string csv = samples_csv(sqrt_target(), ramp_plus(), 4);
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  CHECK(line == "x,target,network,weighted_residual");
  int rows = 0;
  while (std::getline(in, line)) {
    if (!line.empty()) ++rows;
  }
  CHECK(rows == 7);  // 2n-1 finite grid points
  CHECK(csv.find("0,1,0,1") != std::string::npos);
  CHECK_THROWS_AS((void)samples_csv(sqrt_target(), ramp_plus(), 0), InvalidArgument);
}
