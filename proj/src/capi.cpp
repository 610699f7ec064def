#include <cstdlib>
#include <cstring>
#include <string>

#include "json.hpp"
#include "reluspan/approximator.hpp"
#include "reluspan/dual_checker.hpp"
#include "reluspan/errors.hpp"
#include "reluspan/expr.hpp"
#include "reluspan/io.hpp"
#include "reluspan/pl_algebra.hpp"
#include "reluspan/reluspan.h"
#include "reluspan/version.hpp"
#include "reluspan/weighted_norm.hpp"

struct rs_network {
  reluspan::ReLUNetwork value;
};
struct rs_pl {
  reluspan::PiecewiseLinear value;
};
struct rs_target {
  reluspan::YTarget value;
};
struct rs_certificate {
  reluspan::ApproximationCertificate value;
};
struct rs_measure {
  reluspan::DiscreteMeasure value;
};

namespace {

thread_local std::string last_error;
thread_local long last_error_position = -1;

rs_status fail(rs_status status, const char* message, long position = -1) {
  last_error = message;
  last_error_position = position;
  return status;
}

// Runs body and maps library exceptions onto status codes.
template <class Body>
rs_status guarded(Body&& body) noexcept {
  try {
    body();
    return RS_OK;
  } catch (const reluspan::ParseError& e) {
    return fail(RS_ERR_PARSE, e.what(), static_cast<long>(e.position()));
  } catch (const reluspan::DomainError& e) {
    return fail(RS_ERR_DOMAIN, e.what());
  } catch (const reluspan::NotInY& e) {
    return fail(RS_ERR_NOT_IN_Y, e.what());
  } catch (const reluspan::FormatError& e) {
    return fail(RS_ERR_FORMAT, e.what());
  } catch (const reluspan::InvalidArgument& e) {
    return fail(RS_ERR_INVALID_ARGUMENT, e.what());
  } catch (const std::exception& e) {
    return fail(RS_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(RS_ERR_INTERNAL, "unknown error");
  }
}

char* copy_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.data(), s.size() + 1);
  return out;
}

void require(const void* p, const char* what) {
  if (p == nullptr) throw reluspan::InvalidArgument(std::string(what) + " must not be null");
}

void fill(const reluspan::NormReport& r, rs_norm_report* out) {
  out->value = r.value;
  out->witness_x = r.witness.x();
  switch (r.witness.kind()) {
    case reluspan::ExtendedPoint::Kind::finite: out->witness_kind = RS_FINITE; break;
    case reluspan::ExtendedPoint::Kind::plus_infinity: out->witness_kind = RS_PLUS_INFINITY; break;
    case reluspan::ExtendedPoint::Kind::minus_infinity: out->witness_kind = RS_MINUS_INFINITY; break;
  }
  out->method = r.method == reluspan::NormMethod::exact_pl ? RS_NORM_EXACT_PL : RS_NORM_GRID_ORACLE;
}

reluspan::ExtendedPoint to_point(rs_point_kind kind, double x) {
  switch (kind) {
    case RS_PLUS_INFINITY: return reluspan::ExtendedPoint::plus_infinity();
    case RS_MINUS_INFINITY: return reluspan::ExtendedPoint::minus_infinity();
    case RS_FINITE: return reluspan::ExtendedPoint::finite(x);
  }
  throw reluspan::InvalidArgument("point kind must be -1, 0 or 1");
}

reluspan::Side to_side(int side) {
  if (side == 1) return reluspan::Side::plus;
  if (side == -1) return reluspan::Side::minus;
  throw reluspan::InvalidArgument("side must be +1 or -1");
}

}  // namespace

extern "C" {

const char* rs_version(void) { return reluspan::kVersion; }
const char* rs_last_error(void) { return last_error.c_str(); }
long rs_last_error_position(void) { return last_error_position; }
void rs_string_free(char* s) { std::free(s); }

rs_status rs_network_create(const double* slopes, const double* offsets,
                            const double* coefficients, size_t count, rs_network** out) {
  return guarded([&] {
    require(out, "out");
    if (count > 0) {
      require(slopes, "slopes");
      require(offsets, "offsets");
      require(coefficients, "coefficients");
    }
    std::vector<reluspan::ReLUUnit> units;
    units.reserve(count);
    for (size_t i = 0; i < count; ++i) units.emplace_back(slopes[i], offsets[i], coefficients[i]);
    *out = new rs_network{reluspan::ReLUNetwork(std::move(units))};
  });
}

rs_status rs_network_builtin(const char* name, rs_network** out) {
  return guarded([&] {
    require(name, "name");
    require(out, "out");
    const std::string n(name);
    reluspan::ReLUNetwork net;
    if (n == "ramp_plus") {
      net = reluspan::ramp_plus();
    } else if (n == "ramp_minus") {
      net = reluspan::ramp_minus();
    } else if (n == "step_f") {
      net = reluspan::step_f();
    } else if (n == "step_g") {
      net = reluspan::step_g();
    } else {
      throw reluspan::InvalidArgument("unknown builtin network '" + n + "'");
    }
    *out = new rs_network{std::move(net)};
  });
}

rs_status rs_network_hat(double center, double halfwidth, rs_network** out) {
  return guarded([&] {
    require(out, "out");
    *out = new rs_network{reluspan::hat(center, halfwidth)};
  });
}

rs_status rs_network_add(const rs_network* p, const rs_network* q, rs_network** out) {
  return guarded([&] {
    require(p, "p");
    require(q, "q");
    require(out, "out");
    *out = new rs_network{reluspan::net_add(p->value, q->value)};
  });
}

rs_status rs_network_scale(const rs_network* p, double s, rs_network** out) {
  return guarded([&] {
    require(p, "p");
    require(out, "out");
    *out = new rs_network{reluspan::net_scale(p->value, s)};
  });
}

rs_status rs_network_from_json(const char* text, rs_network** out) {
  return guarded([&] {
    require(text, "text");
    require(out, "out");
    *out = new rs_network{reluspan::network_from_json(text)};
  });
}

rs_status rs_network_to_json(const rs_network* net, char** out) {
  return guarded([&] {
    require(net, "net");
    require(out, "out");
    *out = copy_string(reluspan::network_to_json(net->value));
  });
}

size_t rs_network_size(const rs_network* net) { return net ? net->value.size() : 0; }

rs_status rs_network_unit(const rs_network* net, size_t index, double* slope, double* offset,
                          double* coefficient) {
  return guarded([&] {
    require(net, "net");
    if (index >= net->value.size()) throw reluspan::InvalidArgument("unit index out of range");
    const auto& u = net->value.units()[index];
    if (slope) *slope = u.slope();
    if (offset) *offset = u.offset();
    if (coefficient) *coefficient = u.coefficient();
  });
}

rs_status rs_network_eval(const rs_network* net, double x, double* out) {
  return guarded([&] {
    require(net, "net");
    require(out, "out");
    *out = net->value(x);
  });
}

void rs_network_free(rs_network* net) { delete net; }

rs_status rs_pl_from_json(const char* text, rs_pl** out) {
  return guarded([&] {
    require(text, "text");
    require(out, "out");
    *out = new rs_pl{reluspan::pl_from_json(text)};
  });
}

rs_status rs_pl_to_json(const rs_pl* pl, char** out) {
  return guarded([&] {
    require(pl, "pl");
    require(out, "out");
    *out = copy_string(reluspan::pl_to_json(pl->value));
  });
}

rs_status rs_pl_eval(const rs_pl* pl, double x, double* out) {
  return guarded([&] {
    require(pl, "pl");
    require(out, "out");
    *out = pl->value(x);
  });
}

size_t rs_pl_knot_count(const rs_pl* pl) { return pl ? pl->value.knots().size() : 0; }

rs_status rs_pl_knot(const rs_pl* pl, size_t index, double* x, double* value) {
  return guarded([&] {
    require(pl, "pl");
    if (index >= pl->value.knots().size()) throw reluspan::InvalidArgument("knot index out of range");
    if (x) *x = pl->value.knots()[index];
    if (value) *value = pl->value.values()[index];
  });
}

rs_status rs_pl_tails(const rs_pl* pl, double* m_left, double* m_right, double* c0) {
  return guarded([&] {
    require(pl, "pl");
    if (m_left) *m_left = pl->value.left_slope();
    if (m_right) *m_right = pl->value.right_slope();
    if (c0) *c0 = pl->value.intercept();
  });
}

rs_status rs_network_to_pl(const rs_network* net, rs_pl** out) {
  return guarded([&] {
    require(net, "net");
    require(out, "out");
    *out = new rs_pl{reluspan::network_to_pl(net->value)};
  });
}

rs_status rs_pl_to_network(const rs_pl* pl, rs_network** out) {
  return guarded([&] {
    require(pl, "pl");
    require(out, "out");
    *out = new rs_network{reluspan::pl_to_network(reluspan::canonicalize(pl->value))};
  });
}

void rs_pl_free(rs_pl* pl) { delete pl; }

rs_status rs_detect_document(const char* text, int* kind) {
  return guarded([&] {
    require(text, "text");
    require(kind, "kind");
    *kind = reluspan::detect_document(text) == reluspan::DocumentKind::network ? 0 : 1;
  });
}

rs_status rs_target_from_expr(const char* expr, const double* alpha_plus,
                              const double* alpha_minus, rs_target** out) {
  return guarded([&] {
    require(expr, "expr");
    require(out, "out");
    const auto ast = reluspan::parse_expression(expr);
    std::optional<double> plus;
    std::optional<double> minus;
    if (alpha_plus) plus = *alpha_plus;
    if (alpha_minus) minus = *alpha_minus;
    *out = new rs_target{reluspan::to_target(ast, plus, minus, expr)};
  });
}

rs_status rs_target_from_network(const rs_network* net, rs_target** out) {
  return guarded([&] {
    require(net, "net");
    require(out, "out");
    const reluspan::ReLUNetwork copy = net->value;
    *out = new rs_target{reluspan::YTarget(
        [copy](double x) { return copy(x); },
        reluspan::boundary_value(copy, reluspan::Side::plus),
        reluspan::boundary_value(copy, reluspan::Side::minus), "network")};
  });
}

rs_status rs_target_set_estimation(rs_target* target, int k_min, int k_max, double threshold) {
  return guarded([&] {
    require(target, "target");
    reluspan::AlphaEstimateOptions options = target->value.estimation();
    options.k_min = k_min;
    options.k_max = k_max;
    options.threshold = threshold;
    target->value = target->value.with_estimation(options);
  });
}

rs_status rs_target_eval(const rs_target* target, double x, double* out) {
  return guarded([&] {
    require(target, "target");
    require(out, "out");
    *out = target->value(x);
  });
}

rs_status rs_target_alpha(const rs_target* target, int side, double* out) {
  return guarded([&] {
    require(target, "target");
    require(out, "out");
    *out = reluspan::alpha(target->value, to_side(side));
  });
}

void rs_target_free(rs_target* target) { delete target; }

rs_status rs_apply_a_network(const rs_network* net, rs_point_kind kind, double x, double* out) {
  return guarded([&] {
    require(net, "net");
    require(out, "out");
    *out = reluspan::apply_A(net->value, to_point(kind, x));
  });
}

rs_status rs_norm_exact_network(const rs_network* net, rs_norm_report* out) {
  return guarded([&] {
    require(net, "net");
    require(out, "out");
    fill(reluspan::y_norm_exact(net->value), out);
  });
}

rs_status rs_norm_exact_pl(const rs_pl* pl, rs_norm_report* out) {
  return guarded([&] {
    require(pl, "pl");
    require(out, "out");
    fill(reluspan::y_norm_exact(pl->value), out);
  });
}

rs_status rs_norm_grid_network(const rs_network* net, int resolution, rs_norm_report* out) {
  return guarded([&] {
    require(net, "net");
    require(out, "out");
    fill(reluspan::y_norm_grid(net->value, reluspan::CompactGrid(resolution)), out);
  });
}

rs_status rs_norm_grid_target(const rs_target* target, int resolution, rs_norm_report* out) {
  return guarded([&] {
    require(target, "target");
    require(out, "out");
    fill(reluspan::y_norm_grid(target->value, reluspan::CompactGrid(resolution)), out);
  });
}

rs_status rs_norm_report_to_json(const rs_norm_report* report, char** out) {
  return guarded([&] {
    require(report, "report");
    require(out, "out");
    reluspan::NormReport r;
    r.value = report->value;
    r.witness = to_point(report->witness_kind, report->witness_x);
    r.method = report->method == RS_NORM_EXACT_PL ? reluspan::NormMethod::exact_pl
                                                  : reluspan::NormMethod::grid_oracle;
    *out = copy_string(reluspan::norm_report_to_json(r));
  });
}

rs_status rs_linf_bound_check(const rs_network* net, double radius, double* lhs, double* rhs) {
  return guarded([&] {
    require(net, "net");
    require(lhs, "lhs");
    require(rhs, "rhs");
    const auto bound = reluspan::linf_bound_check(net->value, radius);
    *lhs = bound.lhs;
    *rhs = bound.rhs;
  });
}

void rs_approx_options_default(rs_approx_options* options) {
  if (options == nullptr) return;
  const reluspan::ApproxConfig defaults;
  options->tolerance = defaults.tolerance;
  options->max_knots = defaults.max_knots;
  options->initial_radius = defaults.initial_radius;
  options->oracle_resolution = defaults.oracle_resolution;
}

rs_status rs_approximate(const rs_target* target, const rs_approx_options* options,
                         rs_certificate** out) {
  return guarded([&] {
    require(target, "target");
    require(options, "options");
    require(out, "out");
    reluspan::ApproxConfig cfg;
    cfg.tolerance = options->tolerance;
    cfg.max_knots = options->max_knots;
    cfg.initial_radius = options->initial_radius;
    cfg.oracle_resolution = options->oracle_resolution;
    *out = new rs_certificate{reluspan::approximate(target->value, cfg)};
  });
}

int rs_certificate_succeeded(const rs_certificate* cert) {
  return cert != nullptr && cert->value.succeeded ? 1 : 0;
}

double rs_certificate_measured_error(const rs_certificate* cert) {
  return cert ? cert->value.measured_error : 0.0;
}

rs_status rs_certificate_network(const rs_certificate* cert, rs_network** out) {
  return guarded([&] {
    require(cert, "cert");
    require(out, "out");
    *out = new rs_network{cert->value.network};
  });
}

rs_status rs_certificate_to_json(const rs_certificate* cert, char** out) {
  return guarded([&] {
    require(cert, "cert");
    require(out, "out");
    *out = copy_string(reluspan::certificate_to_json(cert->value));
  });
}

void rs_certificate_free(rs_certificate* cert) { delete cert; }

rs_status rs_measure_residual(const rs_target* target, const rs_network* net, int resolution,
                              double* out) {
  return guarded([&] {
    require(target, "target");
    require(net, "net");
    require(out, "out");
    *out = reluspan::measure_residual(target->value, net->value, resolution);
  });
}

rs_status rs_samples_csv(const rs_target* target, const rs_network* net, int resolution,
                         char** out) {
  return guarded([&] {
    require(target, "target");
    require(net, "net");
    require(out, "out");
    *out = copy_string(reluspan::samples_csv(target->value, net->value, resolution));
  });
}

rs_status rs_verify_identity(double lo, double hi, size_t points, int inject_fault, int* passed,
                             double* max_deviation, char** report_json) {
  return guarded([&] {
    const auto report = reluspan::verify_identities(lo, hi, points, inject_fault != 0);
    if (passed) *passed = report.passed ? 1 : 0;
    if (max_deviation) *max_deviation = report.max_deviation;
    if (report_json) {
      nlohmann::json doc;
      doc["passed"] = report.passed;
      doc["max_deviation"] = report.max_deviation;
      doc["tolerance"] = reluspan::kIdentityTolerance;
      doc["grid"] = {{"lo", lo}, {"hi", hi}, {"points", points}};
      for (const auto& check : report.checks) {
        doc["checks"].push_back({{"name", check.name}, {"max_deviation", check.max_deviation}});
      }
      *report_json = copy_string(doc.dump());
    }
  });
}

rs_status rs_measure_from_json(const char* text, rs_measure** out) {
  return guarded([&] {
    require(text, "text");
    require(out, "out");
    *out = new rs_measure{reluspan::measure_from_json(text)};
  });
}

rs_status rs_measure_pair_network(const rs_measure* mu, const rs_network* net, double* out) {
  return guarded([&] {
    require(mu, "mu");
    require(net, "net");
    require(out, "out");
    *out = reluspan::pair(mu->value, net->value);
  });
}

rs_status rs_dual_demo(const rs_measure* mu, double tol, double halfwidth, int* annihilates,
                       char** transcript) {
  return guarded([&] {
    require(mu, "mu");
    const auto demo = reluspan::dual_demo(mu->value, tol, halfwidth);
    if (annihilates) *annihilates = demo.verdict.annihilates ? 1 : 0;
    if (transcript) *transcript = copy_string(demo.transcript);
  });
}

rs_status rs_separation_demo(int grid_resolution, int budget, int corrected, double* residual) {
  return guarded([&] {
    require(residual, "residual");
    *residual = reluspan::separation_demo(grid_resolution, budget,
                                          corrected ? reluspan::SpanningSet::corrected
                                                    : reluspan::SpanningSet::literal)
                    .residual;
  });
}

void rs_measure_free(rs_measure* mu) { delete mu; }

}  // extern "C"
