// Acceptance suite: one PASS/FAIL line per criterion, exit status 0 iff all pass.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "expr_reference.hpp"
#include "reluspan/approximator.hpp"
#include "reluspan/dual_checker.hpp"
#include "reluspan/errors.hpp"
#include "reluspan/expr.hpp"
#include "reluspan/pl_algebra.hpp"
#include "reluspan/weighted_norm.hpp"
#include "support.hpp"

using namespace reluspan;
using namespace reluspan::testing;

namespace {

struct Outcome {
  bool passed = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      passed = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
};

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string num(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

// 1. Hat identity on 1e5 points of [-10, 10] within 1e-12, under 1 s.
Outcome hat_identity() {
  Outcome out;
  const auto start = std::chrono::steady_clock::now();
  const ReLUNetwork net = hat(1.0, 1.0);
  const ReLUNetwork literal({ReLUUnit(1, 0, 1), ReLUUnit(1, -2, 1), ReLUUnit(1, -1, -2)});
  double worst = 0.0;
  constexpr int kPoints = 100'000;
  for (int i = 0; i < kPoints; ++i) {
    const double x = -10.0 + 20.0 * i / (kPoints - 1);
    const double closed = std::max(1.0 - std::abs(x - 1.0), 0.0);
    worst = std::max({worst, std::abs(closed - net(x)), std::abs(closed - literal(x))});
  }
  const double elapsed = seconds_since(start);
  out.require(worst <= 1e-12, "max deviation " + num(worst));
  out.require(elapsed < 1.0, "runtime " + num(elapsed) + " s");
  out.detail = "max deviation " + num(worst) + ", " + num(elapsed) + " s" +
               (out.passed ? "" : " — " + out.detail);
  return out;
}

// 2. PL <-> network round trips for 1000 random PL functions and 1000 random
//    networks, pointwise within 1e-9 x scale, under 10 s.
Outcome round_trip() {
  Outcome out;
  const auto start = std::chrono::steady_clock::now();
  Rng rng(20240601);
  double worst_pl = 0.0;
  double worst_net = 0.0;
  int knot_mismatches = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const PiecewiseLinear p = random_pl(rng, 20);
    const PiecewiseLinear back = network_to_pl(pl_to_network(p));
    if (back.knots().size() != p.knots().size()) {
      ++knot_mismatches;
    } else {
      for (std::size_t i = 0; i < p.knots().size(); ++i) {
        if (std::abs(back.knots()[i] - p.knots()[i]) > 1e-9) ++knot_mismatches;
      }
    }
    const auto xs = sample_points(-15.0, 15.0, 10'000, p.knots());
    double scale = 1.0;
    for (double x : xs) scale = std::max(scale, std::abs(p(x)));
    for (double x : xs) worst_pl = std::max(worst_pl, std::abs(p(x) - back(x)) / scale);
  }
  for (int trial = 0; trial < 1000; ++trial) {
    const ReLUNetwork net = random_network(rng, 20);
    const PiecewiseLinear pl = network_to_pl(net);
    const auto xs = sample_points(-60.0, 60.0, 10'000, pl.knots());
    double scale = 1.0;
    for (double x : xs) scale = std::max(scale, std::abs(net(x)));
    for (double x : xs) worst_net = std::max(worst_net, std::abs(net(x) - pl(x)) / scale);
  }
  const double elapsed = seconds_since(start);
  out.require(knot_mismatches == 0, std::to_string(knot_mismatches) + " knot mismatches");
  out.require(worst_pl <= 1e-9, "PL round trip deviation " + num(worst_pl));
  out.require(worst_net <= 1e-9, "network round trip deviation " + num(worst_net));
  out.require(elapsed < 10.0, "runtime " + num(elapsed) + " s");
  const std::string summary = "PL->net->PL " + num(worst_pl) + ", net->PL " + num(worst_net) +
                              " (relative), " + num(elapsed) + " s";
  out.detail = out.passed ? summary : summary + " — " + out.detail;
  return out;
}

// 3. Exact norm vs grid oracle (n = 1e5) on 500 random networks, and the two
//    closed-form spot values.
Outcome exact_vs_oracle() {
  Outcome out;
  Rng rng(777);
  const CompactGrid grid(100'000);
  double worst_excess = 0.0;
  for (int trial = 0; trial < 500; ++trial) {
    const ReLUNetwork net = random_network(rng, 15);
    const double exact = y_norm_exact(net).value;
    const double oracle = y_norm_grid(net, grid).value;
    const double excess = std::abs(exact - oracle) - (1e-3 * exact + 1e-9);
    worst_excess = std::max(worst_excess, excess);
    if (excess > 0.0) {
      out.require(false, "trial " + std::to_string(trial) + ": exact " + num(exact) +
                             " oracle " + num(oracle));
    }
  }
  const NormReport ramp = y_norm_exact(ramp_plus());
  out.require(ramp.value == 1.0 && ramp.witness == ExtendedPoint::plus_infinity(),
              "||relu||_Y = " + num(ramp.value) + " at " + ramp.witness.to_string());
  const NormReport step = y_norm_exact(step_f());
  out.require(step.value == 0.5 && step.witness == ExtendedPoint::finite(1.0),
              "||step_f||_Y = " + num(step.value) + " at " + step.witness.to_string());
  const NormReport ramp_grid = y_norm_grid(ramp_plus(), grid);
  const NormReport step_grid = y_norm_grid(step_f(), grid);
  out.require(std::abs(ramp_grid.value - 1.0) <= 1e-4, "oracle ||relu||_Y " + num(ramp_grid.value));
  out.require(std::abs(step_grid.value - 0.5) <= 1e-4, "oracle ||step_f||_Y " + num(step_grid.value));
  const std::string summary = "500 networks agree; ||relu||_Y = " + num(ramp.value) + " at " +
                              ramp.witness.to_string() + ", ||step_f||_Y = " + num(step.value) +
                              " at " + step.witness.to_string();
  out.detail = out.passed ? summary : out.detail;
  return out;
}

// 4. sup_{|x|<=R} |f| <= (1+R) ||f||_Y on 500 random pairs; equality for step_f, R = 1.
Outcome recapture() {
  Outcome out;
  Rng rng(4242);
  int violations = 0;
  double tightest = 0.0;
  for (int trial = 0; trial < 500; ++trial) {
    const ReLUNetwork net = random_network(rng, 15);
    const double radius = std::exp(uniform(rng, std::log(0.1), std::log(100.0)));
    const LinfBound b = linf_bound_check(net, radius);
    // Both sides are exact up to the rounding of a handful of operations.
    if (b.lhs > b.rhs * (1.0 + 8.0 * 2.220446049250313e-16)) ++violations;
    if (b.rhs > 0.0) tightest = std::max(tightest, b.lhs / b.rhs);
  }
  const LinfBound eq = linf_bound_check(step_f(), 1.0);
  out.require(violations == 0, std::to_string(violations) + " violations");
  out.require(eq.lhs == 1.0 && eq.rhs == 1.0,
              "step_f at R=1: lhs " + num(eq.lhs) + " rhs " + num(eq.rhs));
  const std::string summary = "0 violations in 500 pairs (largest lhs/rhs " + num(tightest) +
                              "); step_f, R=1: lhs " + num(eq.lhs) + " = rhs " + num(eq.rhs);
  out.detail = out.passed ? summary : out.detail;
  return out;
}

// 5. Constructive density over the target corpus at eps = 1e-1, 1e-2, 1e-3.
Outcome density() {
  Outcome out;
  const auto start = std::chrono::steady_clock::now();
  const ReLUNetwork step = step_f();
  std::vector<YTarget> corpus;
  for (const char* e : {"x", "abs(x)", "sqrt(1+x^2)", "x*arctan(x)*2/pi", "sin(x)"}) {
    corpus.push_back(to_target(parse_expression(e), std::nullopt, std::nullopt, e));
  }
  corpus.emplace_back([step](double x) { return step(x); }, std::nullopt, std::nullopt,
                      "step_f (opaque)");
  double worst_drift = 0.0;
  std::size_t runs = 0;
  for (const auto& f : corpus) {
    for (double eps : {1e-1, 1e-2, 1e-3}) {
      ApproxConfig cfg;
      cfg.tolerance = eps;
      cfg.oracle_resolution = 100'000;
      const ApproximationCertificate cert = approximate(f, cfg);
      const double fine = measure_residual(f, cert.network, 4 * cfg.oracle_resolution);
      const double drift = std::abs(fine - cert.measured_error);
      ++runs;
      const std::string tag = f.label() + " @ " + num(eps);
      out.require(cert.succeeded, tag + " failed: " + cert.failure_reason);
      out.require(cert.measured_error <= eps, tag + " error " + num(cert.measured_error));
      out.require(drift <= 0.1 * cert.measured_error,
                  tag + " drift " + num(cert.measured_error) + " -> " + num(fine));
      if (cert.measured_error > 0.0) worst_drift = std::max(worst_drift, drift / cert.measured_error);
    }
  }
  const double elapsed = seconds_since(start);
  out.require(elapsed < 60.0, "runtime " + num(elapsed) + " s");
  const std::string summary = std::to_string(runs) + " runs certified, worst 4x drift " +
                              num(100.0 * worst_drift) + "%, " + num(elapsed) + " s";
  out.detail = out.passed ? summary : out.detail;
  return out;
}

// 6. Dual-proof mechanics.
Outcome dual_mechanics() {
  Outcome out;
  // (a) delta_0 against hats of halfwidth 1 on the integers.
  const DiscreteMeasure delta0({{ExtendedPoint::finite(0.0), 1.0}});
  const std::vector<double> centers{-2, -1, 0, 1, 2};
  const AnnihilationVerdict a = annihilation_test(delta0, centers, 1.0, 1e-9);
  double at_zero = 0.0;
  for (const auto& hp : a.hat_pairings) {
    if (hp.center == 0.0) at_zero = hp.value;
  }
  out.require(!a.annihilates && at_zero == 1.0, "(a) <delta_0, hat(0,1)> = " + num(at_zero));

  // (b) delta_{+inf}: 1 against ramp_plus, 0 against every hat.
  const DiscreteMeasure delta_inf({{ExtendedPoint::plus_infinity(), 1.0}});
  out.require(pair(delta_inf, ramp_plus()) == 1.0, "(b) <delta_inf, ramp_plus> != 1");
  double worst_hat = 0.0;
  for (double h : {0.25, 1.0, 7.5}) {
    for (int k = -400; k <= 400; ++k) {
      worst_hat = std::max(worst_hat, std::abs(pair(delta_inf, hat(k * 0.25, h))));
    }
  }
  out.require(worst_hat == 0.0, "(b) hat pairing " + num(worst_hat));

  // (c) random measures that pass at 1e-9 have recovered weights <= 1e-8.
  Rng rng(99);
  int passing = 0;
  double worst_recovered = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const DiscreteMeasure mu = random_measure(rng, 6, 5.0, -16.0, -6.0);
    const double h = auto_halfwidth(mu);
    const auto grid = covering_centers(mu, h);
    const AnnihilationVerdict v = annihilation_test(mu, grid, h, 1e-9);
    if (!v.annihilates) continue;
    ++passing;
    double largest = std::max(std::abs(v.recovered_plus), std::abs(v.recovered_minus));
    for (const auto& atom : v.recovered_finite) largest = std::max(largest, std::abs(atom.weight));
    worst_recovered = std::max(worst_recovered, largest);
  }
  out.require(passing > 0, "(c) no random measure passed");
  out.require(worst_recovered <= 1e-8, "(c) recovered weight " + num(worst_recovered));
  const std::string summary = "(a) pairing " + num(at_zero) + "; (b) ramp 1, hats " +
                              num(worst_hat) + "; (c) " + std::to_string(passing) +
                              " passing measures, largest recovered weight " + num(worst_recovered);
  out.detail = out.passed ? summary : out.detail;
  return out;
}

// 7. The literal spanning set stays at distance ~1 from relu; the corrected one does not.
Outcome remark_probe() {
  Outcome out;
  constexpr int kGrid = 2000;
  double literal_min = 1e300;
  double corrected_max = 0.0;
  for (int budget : {0, 1, 10, 50, 100, 200}) {
    const SeparationResult lit = separation_demo(kGrid, budget, SpanningSet::literal);
    literal_min = std::min(literal_min, lit.residual);
    out.require(lit.residual >= 0.999,
                "literal budget " + std::to_string(budget) + ": " + num(lit.residual));
    const SeparationResult cor = separation_demo(kGrid, budget, SpanningSet::corrected);
    corrected_max = std::max(corrected_max, cor.residual);
    out.require(cor.residual <= 1e-2,
                "corrected budget " + std::to_string(budget) + ": " + num(cor.residual));
  }
  const std::string summary = "literal residual >= " + num(literal_min) +
                              ", corrected residual <= " + num(corrected_max) +
                              " (budgets 0..200)";
  out.detail = out.passed ? summary : out.detail;
  return out;
}

// 8. Parser fuzz and precedence oracle.
Outcome parser_suite() {
  Outcome out;
  Rng rng(8);
  int parsed = 0;
  int positioned = 0;
  int crashes = 0;
  for (int trial = 0; trial < 10'000; ++trial) {
    const std::string input = random_fuzz_input(rng, 4096);
    try {
      const ExprAst ast = parse_expression(input);
      ++parsed;
      for (double x : {-1.5, 0.0, 2.0}) {
        try {
          (void)ast(x);
        } catch (const DomainError&) {
        }
      }
    } catch (const ParseError& e) {
      if (e.position() <= input.size()) {
        ++positioned;
      } else {
        ++crashes;
      }
    } catch (...) {
      ++crashes;
    }
  }
  out.require(crashes == 0, std::to_string(crashes) + " fuzz inputs escaped as non-positioned errors");

  int compared = 0;
  int mismatches = 0;
  while (compared < 200) {
    const std::string src = random_arithmetic(rng, 5);
    const double x = uniform(rng, -3.0, 3.0);
    ReferenceEvaluator reference(src, x);
    const auto expected = reference.run();
    if (!expected) {
      ++mismatches;
      out.require(false, "reference rejected generated '" + src + "'");
      continue;
    }
    ++compared;
    double actual = 0.0;
    try {
      actual = parse_expression(src)(x);
    } catch (const DomainError&) {
      if (!reference.domain_error()) {
        ++mismatches;
        out.require(false, "'" + src + "' at " + num(x) + ": unexpected domain error");
      }
      continue;
    }
    if (reference.domain_error() ||
        std::abs(actual - *expected) > 1e-12 * std::max(1.0, std::abs(*expected))) {
      ++mismatches;
      out.require(false, "'" + src + "' at " + num(x) + ": " + num(actual) + " vs " +
                             num(*expected));
    }
  }
  const std::string summary = "fuzz: " + std::to_string(parsed) + " parsed, " +
                              std::to_string(positioned) + " positioned errors, " +
                              std::to_string(crashes) + " crashes; precedence: " +
                              std::to_string(compared - mismatches) + "/200 agree";
  out.detail = out.passed ? summary : out.detail;
  return out;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"hat identity", hat_identity},
      {"PL/network round trip", round_trip},
      {"exact vs oracle norm", exact_vs_oracle},
      {"recapture inequality", recapture},
      {"constructive density", density},
      {"dual-proof mechanics", dual_mechanics},
      {"spanning-set probe", remark_probe},
      {"parser suite", parser_suite},
  };
  int failures = 0;
  int index = 0;
  for (const auto& [name, run] : criteria) {
    ++index;
    Outcome outcome;
    try {
      outcome = run();
    } catch (const std::exception& e) {
      outcome.passed = false;
      outcome.detail = std::string("exception: ") + e.what();
    }
    if (!outcome.passed) ++failures;
    std::printf("criterion %d (%s): %s — %s\n", index, name, outcome.passed ? "PASS" : "FAIL",
                outcome.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
              criteria.size());
  return failures == 0 ? 0 : 1;
}
