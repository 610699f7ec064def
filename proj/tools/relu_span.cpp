// relu-span: command-line driver over the reluspan C API.
//
// Exit codes:
//   0  success
//   1  invalid input: bad flags, parse errors, malformed files, targets not
//      in Y, identity violations, I/O failures
//   2  approximation budget exhausted (best-effort outputs are still written)

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "reluspan/reluspan.h"

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitBudget = 2;

struct CliError {
  int code;
  std::string message;
};

[[noreturn]] void fail(const std::string& message) { throw CliError{kExitInvalid, message}; }

void check(rs_status status) {
  if (status == RS_OK) return;
  std::string prefix;
  switch (status) {
    case RS_ERR_PARSE: prefix = "parse error: "; break;
    case RS_ERR_NOT_IN_Y: prefix = "not in Y: "; break;
    case RS_ERR_FORMAT: prefix = "malformed input: "; break;
    case RS_ERR_DOMAIN: prefix = "domain error: "; break;
    case RS_ERR_INVALID_ARGUMENT: prefix = "invalid argument: "; break;
    default: prefix = "internal error: "; break;
  }
  fail(prefix + rs_last_error());
}

template <class T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const noexcept { Free(p); }
};
using Network = std::unique_ptr<rs_network, Deleter<rs_network, rs_network_free>>;
using Pl = std::unique_ptr<rs_pl, Deleter<rs_pl, rs_pl_free>>;
using Target = std::unique_ptr<rs_target, Deleter<rs_target, rs_target_free>>;
using Certificate = std::unique_ptr<rs_certificate, Deleter<rs_certificate, rs_certificate_free>>;
using Measure = std::unique_ptr<rs_measure, Deleter<rs_measure, rs_measure_free>>;

std::string take(char* s) {
  std::string out(s);
  rs_string_free(s);
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Writes next to the destination, then renames, so readers never see a
// partially written file.
void write_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail("cannot write '" + path + "'");
    out << content;
    out.flush();
    if (!out) {
      std::error_code ignored;
      fs::remove(tmp, ignored);
      fail("cannot write '" + path + "'");
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    fail("cannot write '" + path + "'");
  }
}

json parse_json(const std::string& text) { return json::parse(text); }

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

struct Clock {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
};

json run_report(const std::string& subcommand, json inputs, json outputs, const Clock& clock) {
  json doc;
  doc["format"] = 1;
  doc["subcommand"] = subcommand;
  doc["tool_version"] = rs_version();
  doc["inputs"] = std::move(inputs);
  doc["outputs"] = std::move(outputs);
  doc["wall_time"] = clock.seconds();
  return doc;
}

std::string dump(const json& doc) { return doc.dump(2) + "\n"; }

// ---------------------------------------------------------------- approximate

struct ApproximateArgs {
  std::string expr;
  std::string target_file;
  double eps = 0.0;
  std::optional<double> alpha_plus;
  std::optional<double> alpha_minus;
  std::string out;
  std::string report;
  std::string samples;
  int samples_resolution = 1000;
  std::size_t max_knots = 0;
  double radius = 0.0;
  int oracle_resolution = 0;
  std::optional<int> alpha_k_min;
  std::optional<int> alpha_k_max;
  std::optional<double> alpha_threshold;
};

int cmd_approximate(const ApproximateArgs& a) {
  const Clock clock;
  rs_approx_options options;
  rs_approx_options_default(&options);
  if (!(a.eps > 0.0) || !std::isfinite(a.eps)) fail("--eps must be positive");
  options.tolerance = a.eps;
  if (a.max_knots != 0) options.max_knots = a.max_knots;
  if (a.radius != 0.0) options.initial_radius = a.radius;
  if (a.oracle_resolution != 0) options.oracle_resolution = a.oracle_resolution;
  if (a.samples_resolution < 1) fail("--samples-resolution must be positive");

  rs_target* raw = nullptr;
  if (!a.expr.empty()) {
    const double ap = a.alpha_plus.value_or(0.0);
    const double am = a.alpha_minus.value_or(0.0);
    check(rs_target_from_expr(a.expr.c_str(), a.alpha_plus ? &ap : nullptr,
                              a.alpha_minus ? &am : nullptr, &raw));
  } else {
    if (a.alpha_plus || a.alpha_minus) {
      fail("--alpha-plus/--alpha-minus apply to --expr only; network targets carry exact limits");
    }
    rs_network* net = nullptr;
    check(rs_network_from_json(read_file(a.target_file).c_str(), &net));
    const Network owned(net);
    check(rs_target_from_network(owned.get(), &raw));
  }
  const Target target(raw);
  if (a.alpha_k_min || a.alpha_k_max || a.alpha_threshold) {
    check(rs_target_set_estimation(target.get(), a.alpha_k_min.value_or(10),
                                   a.alpha_k_max.value_or(40), a.alpha_threshold.value_or(1e-8)));
  }

  rs_certificate* cert_raw = nullptr;
  check(rs_approximate(target.get(), &options, &cert_raw));
  const Certificate cert(cert_raw);
  const bool succeeded = rs_certificate_succeeded(cert.get()) != 0;

  char* text = nullptr;
  check(rs_certificate_to_json(cert.get(), &text));
  const json certificate = parse_json(take(text));

  rs_network* net_raw = nullptr;
  check(rs_certificate_network(cert.get(), &net_raw));
  const Network net(net_raw);
  check(rs_network_to_json(net.get(), &text));
  const std::string network_doc = take(text) + "\n";

  std::string samples_doc;
  if (!a.samples.empty()) {
    check(rs_samples_csv(target.get(), net.get(), a.samples_resolution, &text));
    samples_doc = take(text);
  }

  json inputs;
  inputs["expr"] = a.expr.empty() ? json(nullptr) : json(a.expr);
  inputs["target_file"] = a.target_file.empty() ? json(nullptr) : json(a.target_file);
  inputs["eps"] = a.eps;
  inputs["alpha_plus"] = optional_json(a.alpha_plus);
  inputs["alpha_minus"] = optional_json(a.alpha_minus);
  inputs["max_knots"] = options.max_knots;
  inputs["initial_radius"] = options.initial_radius;
  inputs["oracle_resolution"] = options.oracle_resolution;
  json outputs;
  outputs["certificate"] = certificate;
  outputs["network_file"] = a.out.empty() ? json(nullptr) : json(a.out);
  outputs["samples_file"] = a.samples.empty() ? json(nullptr) : json(a.samples);

  if (!a.out.empty()) write_atomic(a.out, network_doc);
  if (!a.samples.empty()) write_atomic(a.samples, samples_doc);
  const json report = run_report("approximate", inputs, outputs, clock);
  if (!a.report.empty()) write_atomic(a.report, dump(report));

  std::cout << "succeeded: " << (succeeded ? "true" : "false") << "\n"
            << "measured_error: " << certificate["measured_error"].dump() << "\n"
            << "tolerance: " << certificate["tolerance"].dump() << "\n"
            << "knot_count: " << certificate["knot_count"].dump() << "\n"
            << "unit_count: " << certificate["unit_count"].dump() << "\n"
            << "radius: " << certificate["radius"].dump() << "\n";
  if (!succeeded) {
    std::cerr << "error: approximation failed: "
              << certificate.value("failure_reason", std::string("unknown")) << "\n";
    return kExitBudget;
  }
  return kExitOk;
}

// ----------------------------------------------------------------------- norm

struct NormArgs {
  std::string net;
  std::string pl;
  std::string expr;
  std::optional<double> alpha_plus;
  std::optional<double> alpha_minus;
  bool exact = false;
  int grid = 0;
  std::string report;
};

int cmd_norm(const NormArgs& a) {
  const Clock clock;
  if (a.exact == (a.grid != 0)) fail("choose exactly one of --exact and --grid n");
  if (a.grid < 0) fail("--grid must be positive");
  rs_norm_report result{};
  if (!a.net.empty()) {
    rs_network* raw = nullptr;
    check(rs_network_from_json(read_file(a.net).c_str(), &raw));
    const Network net(raw);
    check(a.exact ? rs_norm_exact_network(net.get(), &result)
                  : rs_norm_grid_network(net.get(), a.grid, &result));
  } else if (!a.pl.empty()) {
    rs_pl* raw = nullptr;
    check(rs_pl_from_json(read_file(a.pl).c_str(), &raw));
    const Pl pl(raw);
    if (a.exact) {
      check(rs_norm_exact_pl(pl.get(), &result));
    } else {
      rs_network* net_raw = nullptr;
      check(rs_pl_to_network(pl.get(), &net_raw));
      const Network net(net_raw);
      check(rs_norm_grid_network(net.get(), a.grid, &result));
    }
  } else {
    if (a.exact) fail("--exact needs a network or PL file; use --grid n for expressions");
    const double ap = a.alpha_plus.value_or(0.0);
    const double am = a.alpha_minus.value_or(0.0);
    rs_target* raw = nullptr;
    check(rs_target_from_expr(a.expr.c_str(), a.alpha_plus ? &ap : nullptr,
                              a.alpha_minus ? &am : nullptr, &raw));
    const Target target(raw);
    check(rs_norm_grid_target(target.get(), a.grid, &result));
  }
  char* text = nullptr;
  check(rs_norm_report_to_json(&result, &text));
  const json norm = parse_json(take(text));
  std::cout << norm.dump() << "\n";
  if (!a.report.empty()) {
    json inputs;
    inputs["net"] = a.net.empty() ? json(nullptr) : json(a.net);
    inputs["pl"] = a.pl.empty() ? json(nullptr) : json(a.pl);
    inputs["expr"] = a.expr.empty() ? json(nullptr) : json(a.expr);
    inputs["method"] = a.exact ? "exact" : "grid";
    inputs["grid"] = a.grid;
    write_atomic(a.report, dump(run_report("norm", inputs, {{"norm", norm}}, clock)));
  }
  return kExitOk;
}

// -------------------------------------------------------------------- convert

struct ConvertArgs {
  std::string in;
  std::string out;
  bool check = false;
  std::string report;
};

// Sample points: every knot, its neighbours, and a uniform sweep past both ends.
std::vector<double> probe_points(const rs_pl* pl) {
  std::vector<double> knots(rs_pl_knot_count(pl));
  for (std::size_t i = 0; i < knots.size(); ++i) check(rs_pl_knot(pl, i, &knots[i], nullptr));
  const double lo = knots.empty() ? -10.0 : knots.front() - 1.0 - std::abs(knots.front());
  const double hi = knots.empty() ? 10.0 : knots.back() + 1.0 + std::abs(knots.back());
  std::vector<double> xs;
  constexpr int kSweep = 10'000;
  for (int i = 0; i <= kSweep; ++i) xs.push_back(lo + (hi - lo) * i / kSweep);
  for (double k : knots) {
    xs.push_back(k);
    xs.push_back(k - 0.5);
    xs.push_back(k + 0.5);
  }
  return xs;
}

// max |p - q| / max(1, max |p|) over the probe points.
double relative_deviation(const rs_pl* pl, const rs_network* net) {
  double scale = 1.0;
  double worst = 0.0;
  for (double x : probe_points(pl)) {
    double p = 0.0;
    double q = 0.0;
    check(rs_pl_eval(pl, x, &p));
    check(rs_network_eval(net, x, &q));
    scale = std::max(scale, std::abs(p));
    worst = std::max(worst, std::abs(p - q));
  }
  return worst / scale;
}

int cmd_convert(const ConvertArgs& a) {
  const Clock clock;
  constexpr double kTolerance = 1e-9;
  const std::string text = read_file(a.in);
  int kind = 0;
  check(rs_detect_document(text.c_str(), &kind));

  std::string converted;
  std::string from;
  double deviation = 0.0;
  std::optional<double> round_trip;
  char* out = nullptr;
  if (kind == 0) {
    from = "network";
    rs_network* raw = nullptr;
    check(rs_network_from_json(text.c_str(), &raw));
    const Network net(raw);
    rs_pl* pl_raw = nullptr;
    check(rs_network_to_pl(net.get(), &pl_raw));
    const Pl pl(pl_raw);
    deviation = relative_deviation(pl.get(), net.get());
    if (a.check) {
      rs_network* back_raw = nullptr;
      check(rs_pl_to_network(pl.get(), &back_raw));
      const Network back(back_raw);
      round_trip = std::max(relative_deviation(pl.get(), back.get()), deviation);
    }
    check(rs_pl_to_json(pl.get(), &out));
  } else {
    from = "piecewise_linear";
    rs_pl* raw = nullptr;
    check(rs_pl_from_json(text.c_str(), &raw));
    const Pl pl(raw);
    rs_network* net_raw = nullptr;
    check(rs_pl_to_network(pl.get(), &net_raw));
    const Network net(net_raw);
    deviation = relative_deviation(pl.get(), net.get());
    if (a.check) {
      rs_pl* back_raw = nullptr;
      check(rs_network_to_pl(net.get(), &back_raw));
      const Pl back(back_raw);
      round_trip = std::max(relative_deviation(back.get(), net.get()), deviation);
    }
    check(rs_network_to_json(net.get(), &out));
  }
  converted = take(out) + "\n";

  if (!(deviation <= kTolerance)) {
    fail("conversion disagrees with the input by " + json(deviation).dump() + " (relative)");
  }
  if (round_trip && !(*round_trip <= kTolerance)) {
    fail("round trip deviates by " + json(*round_trip).dump() + " (relative)");
  }

  json outputs;
  outputs["from"] = from;
  outputs["to"] = kind == 0 ? "piecewise_linear" : "network";
  outputs["pointwise_deviation"] = deviation;
  outputs["round_trip_deviation"] = optional_json(round_trip);
  if (a.out.empty()) {
    std::cout << converted;
  } else {
    write_atomic(a.out, converted);
  }
  if (a.check) {
    (a.out.empty() ? std::cerr : std::cout)
        << json{{"round_trip_deviation", *round_trip}, {"tolerance", kTolerance}}.dump() << "\n";
  }
  if (!a.report.empty()) {
    json inputs{{"in", a.in}, {"check", a.check}};
    write_atomic(a.report, dump(run_report("convert", inputs, outputs, clock)));
  }
  return kExitOk;
}

// ------------------------------------------------------------- verify-identity

struct VerifyArgs {
  double lo = -10.0;
  double hi = 10.0;
  std::size_t points = 100'001;
  bool inject_fault = false;
  std::string report;
};

int cmd_verify_identity(const VerifyArgs& a) {
  const Clock clock;
  int passed = 0;
  double max_deviation = 0.0;
  char* text = nullptr;
  check(rs_verify_identity(a.lo, a.hi, a.points, a.inject_fault ? 1 : 0, &passed,
                           &max_deviation, &text));
  const json result = parse_json(take(text));
  std::cout << result.dump(2) << "\n";
  if (!a.report.empty()) {
    json inputs{{"lo", a.lo}, {"hi", a.hi}, {"points", a.points}};
    write_atomic(a.report, dump(run_report("verify-identity", inputs, result, clock)));
  }
  if (!passed) {
    std::cerr << "error: identity violated, max deviation " << json(max_deviation).dump()
              << " exceeds 1e-12\n";
    return kExitInvalid;
  }
  return kExitOk;
}

// ------------------------------------------------------------------- dual-demo

struct DualArgs {
  std::string measure;
  double tol = 1e-9;
  double halfwidth = 0.0;
  std::string report;
};

int cmd_dual_demo(const DualArgs& a) {
  const Clock clock;
  if (!(a.tol >= 0.0)) fail("--tol must be nonnegative");
  rs_measure* raw = nullptr;
  check(rs_measure_from_json(read_file(a.measure).c_str(), &raw));
  const Measure mu(raw);
  int annihilates = 0;
  char* text = nullptr;
  check(rs_dual_demo(mu.get(), a.tol, a.halfwidth, &annihilates, &text));
  const std::string transcript = take(text);
  std::cout << transcript;
  if (!a.report.empty()) {
    json inputs{{"measure", a.measure}, {"tol", a.tol}, {"halfwidth", a.halfwidth}};
    json outputs{{"annihilates", annihilates != 0}, {"transcript", transcript}};
    write_atomic(a.report, dump(run_report("dual-demo", inputs, outputs, clock)));
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-layer ReLU networks on the whole real line: exact algebra, weighted norms,\n"
               "certified global approximation and the dual-measure argument."};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(rs_version()));

  ApproximateArgs approx;
  auto* sub_approx = app.add_subcommand("approximate", "Build a certified network for a target");
  auto* expr_opt = sub_approx->add_option("--expr", approx.expr, "Target expression in x");
  auto* file_opt =
      sub_approx->add_option("--target-file", approx.target_file, "Network JSON used as target");
  expr_opt->excludes(file_opt);
  sub_approx->add_option("--eps", approx.eps, "Tolerance in the weighted norm")->required();
  sub_approx->add_option("--alpha-plus", approx.alpha_plus, "Declared lim f(x)/(1+|x|) at +inf");
  sub_approx->add_option("--alpha-minus", approx.alpha_minus, "Declared lim f(x)/(1+|x|) at -inf");
  sub_approx->add_option("--out", approx.out, "Network output file");
  sub_approx->add_option("--report", approx.report, "Run report with the full certificate");
  sub_approx->add_option("--samples", approx.samples, "CSV of x,target,network,weighted_residual");
  sub_approx->add_option("--samples-resolution", approx.samples_resolution,
                         "Compact-grid resolution of the samples CSV (default 1000)");
  sub_approx->add_option("--max-knots", approx.max_knots, "Knot budget (default 1000000)");
  sub_approx->add_option("--radius", approx.radius, "Initial radius (default 1)");
  sub_approx->add_option("--oracle-resolution", approx.oracle_resolution,
                         "Compact-grid resolution of the certifying oracle (default 100000)");
  sub_approx->add_option("--alpha-k-min", approx.alpha_k_min,
                         "Limit detector: first exponent k of the samples at +-2^k (default 10)");
  sub_approx->add_option("--alpha-k-max", approx.alpha_k_max,
                         "Limit detector: last exponent k (default 40)");
  sub_approx->add_option("--alpha-threshold", approx.alpha_threshold,
                         "Limit detector: largest accepted successive difference (default 1e-8)");

  NormArgs norm;
  auto* sub_norm = app.add_subcommand("norm", "Weighted norm sup |f(x)|/(1+|x|)");
  auto* net_opt = sub_norm->add_option("--net", norm.net, "Network JSON file");
  auto* pl_opt = sub_norm->add_option("--pl", norm.pl, "Piecewise-linear JSON file");
  auto* nexpr_opt = sub_norm->add_option("--expr", norm.expr, "Target expression (grid only)");
  net_opt->excludes(pl_opt)->excludes(nexpr_opt);
  pl_opt->excludes(nexpr_opt);
  sub_norm->add_option("--alpha-plus", norm.alpha_plus, "Declared limit at +inf (--expr)");
  sub_norm->add_option("--alpha-minus", norm.alpha_minus, "Declared limit at -inf (--expr)");
  sub_norm->add_flag("--exact", norm.exact, "Exact value for networks and PL functions");
  sub_norm->add_option("--grid", norm.grid, "Compact-grid oracle with resolution n");
  sub_norm->add_option("--report", norm.report, "Run report file");

  ConvertArgs convert;
  auto* sub_convert = app.add_subcommand("convert", "Convert between network and PL documents");
  sub_convert->add_option("--in", convert.in, "Input document")->required();
  sub_convert->add_option("--out", convert.out, "Output document (default: stdout)");
  sub_convert->add_flag("--check", convert.check, "Also verify the full round trip");
  sub_convert->add_option("--report", convert.report, "Run report file");

  VerifyArgs verify;
  auto* sub_verify =
      app.add_subcommand("verify-identity", "Check the hat, line, constant and step identities");
  sub_verify->add_option("--lo", verify.lo, "Left end of the sample grid (default -10)");
  sub_verify->add_option("--hi", verify.hi, "Right end of the sample grid (default 10)");
  sub_verify->add_option("--points", verify.points, "Number of samples (default 100001)");
  sub_verify->add_flag("--inject-fault", verify.inject_fault)->group("");
  sub_verify->add_option("--report", verify.report, "Run report file");

  DualArgs dual;
  auto* sub_dual = app.add_subcommand("dual-demo", "Pair a discrete measure with hats and ramps");
  sub_dual->add_option("--measure", dual.measure, "Measure JSON file")->required();
  sub_dual->add_option("--tol", dual.tol, "Annihilation tolerance (default 1e-9)");
  sub_dual->add_option("--halfwidth", dual.halfwidth, "Hat halfwidth (default: automatic)");
  sub_dual->add_option("--report", dual.report, "Run report file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInvalid;
  }

  try {
    if (sub_approx->parsed()) {
      if (approx.expr.empty() == approx.target_file.empty()) {
        fail("give exactly one of --expr and --target-file");
      }
      return cmd_approximate(approx);
    }
    if (sub_norm->parsed()) {
      if (static_cast<int>(!norm.net.empty()) + static_cast<int>(!norm.pl.empty()) +
              static_cast<int>(!norm.expr.empty()) != 1) {
        fail("give exactly one of --net, --pl and --expr");
      }
      return cmd_norm(norm);
    }
    if (sub_convert->parsed()) return cmd_convert(convert);
    if (sub_verify->parsed()) return cmd_verify_identity(verify);
    if (sub_dual->parsed()) return cmd_dual_demo(dual);
  } catch (const CliError& e) {
    std::cerr << "error: " << e.message << "\n";
    return e.code;
  } catch (const json::exception& e) {
    std::cerr << "error: internal error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  }
  return kExitInvalid;
}
