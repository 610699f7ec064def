#include "reluspan/io.hpp"

#include <charconv>
#include <cmath>

#include "json.hpp"
#include "reluspan/errors.hpp"

namespace reluspan {
namespace {

using nlohmann::json;

json parse_document(std::string_view text) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw FormatError("malformed JSON at byte " + std::to_string(e.byte) + ": " + e.what());
  } catch (const json::exception& e) {
    // Numbers such as 1e999 overflow during parsing.
    throw FormatError(std::string("malformed JSON: ") + e.what());
  }
}

void check_version(const json& doc) {
  if (!doc.is_object()) throw FormatError("document must be a JSON object");
  if (!doc.contains("format")) return;
  const auto& v = doc["format"];
  if (!v.is_number_integer() || v.get<long long>() != kFormatVersion) {
    throw FormatError("unsupported format version " + v.dump() + " (expected " +
                      std::to_string(kFormatVersion) + ")");
  }
}

double number_at(const json& value, const std::string& path) {
  if (!value.is_number()) throw FormatError(path + ": expected a number, found " + value.dump());
  const double x = value.get<double>();
  if (!std::isfinite(x)) throw FormatError(path + ": number out of range");
  return x;
}

const json& member(const json& doc, const char* key) {
  if (!doc.contains(key)) throw FormatError(std::string("missing field \"") + key + "\"");
  return doc[key];
}

std::vector<double> number_array(const json& doc, const char* key) {
  const json& arr = member(doc, key);
  if (!arr.is_array()) throw FormatError(std::string(key) + ": expected an array");
  std::vector<double> out;
  out.reserve(arr.size());
  for (std::size_t i = 0; i < arr.size(); ++i) {
    out.push_back(number_at(arr[i], std::string(key) + "[" + std::to_string(i) + "]"));
  }
  return out;
}

json point_json(const ExtendedPoint& p) {
  switch (p.kind()) {
    case ExtendedPoint::Kind::plus_infinity: return "+inf";
    case ExtendedPoint::Kind::minus_infinity: return "-inf";
    case ExtendedPoint::Kind::finite: break;
  }
  return p.x();
}

json network_json(const ReLUNetwork& net) {
  json units = json::array();
  for (const auto& u : net.units()) units.push_back({u.slope(), u.offset(), u.coefficient()});
  return units;
}

}  // namespace

std::string format_number(double x) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  std::string s(buf, ec == std::errc() ? end : buf);
  if (std::isfinite(x) && s.find_first_of(".e") == std::string::npos) s += ".0";
  return s;
}

std::string network_to_json(const ReLUNetwork& net) {
  json doc;
  doc["format"] = kFormatVersion;
  doc["units"] = network_json(net);
  return doc.dump();
}

ReLUNetwork network_from_json(std::string_view text) {
  const json doc = parse_document(text);
  check_version(doc);
  const json& units = member(doc, "units");
  if (!units.is_array()) throw FormatError("units: expected an array");
  std::vector<ReLUUnit> out;
  out.reserve(units.size());
  for (std::size_t i = 0; i < units.size(); ++i) {
    const std::string path = "units[" + std::to_string(i) + "]";
    const json& u = units[i];
    if (!u.is_array() || u.size() != 3) throw FormatError(path + ": expected [a, b, c]");
    const double a = number_at(u[0], path + "[0]");
    const double b = number_at(u[1], path + "[1]");
    const double c = number_at(u[2], path + "[2]");
    if (a == 0.0) throw FormatError(path + "[0]: slope must be nonzero");
    out.emplace_back(a, b, c);
  }
  return ReLUNetwork(std::move(out));
}

std::string pl_to_json(const PiecewiseLinear& pl) {
  json doc;
  doc["format"] = kFormatVersion;
  doc["knots"] = std::vector<double>(pl.knots().begin(), pl.knots().end());
  doc["values"] = std::vector<double>(pl.values().begin(), pl.values().end());
  doc["m_left"] = pl.left_slope();
  doc["m_right"] = pl.right_slope();
  doc["c0"] = pl.intercept();
  return doc.dump();
}

PiecewiseLinear pl_from_json(std::string_view text) {
  const json doc = parse_document(text);
  check_version(doc);
  auto knots = number_array(doc, "knots");
  auto values = number_array(doc, "values");
  const double m_left = number_at(member(doc, "m_left"), "m_left");
  const double m_right = number_at(member(doc, "m_right"), "m_right");
  const double c0 = number_at(member(doc, "c0"), "c0");
  if (knots.size() != values.size()) throw FormatError("knots and values differ in length");
  if (knots.empty()) {
    if (m_left != m_right) throw FormatError("a function without knots needs m_left == m_right");
    return PiecewiseLinear::line(m_left, c0);
  }
  for (std::size_t i = 1; i < knots.size(); ++i) {
    if (!(knots[i - 1] < knots[i])) {
      throw FormatError("knots[" + std::to_string(i) + "]: knots must be strictly increasing");
    }
  }
  return PiecewiseLinear(std::move(knots), std::move(values), m_left, m_right);
}

DocumentKind detect_document(std::string_view text) {
  const json doc = parse_document(text);
  if (doc.is_object() && doc.contains("units")) return DocumentKind::network;
  if (doc.is_object() && doc.contains("knots")) return DocumentKind::piecewise_linear;
  throw FormatError("document is neither a network (\"units\") nor a PL function (\"knots\")");
}

std::string measure_to_json(const DiscreteMeasure& mu) {
  json atoms = json::array();
  for (const auto& atom : mu.atoms()) {
    atoms.push_back({{"loc", point_json(atom.location)}, {"w", atom.weight}});
  }
  json doc;
  doc["format"] = kFormatVersion;
  doc["atoms"] = std::move(atoms);
  return doc.dump();
}

DiscreteMeasure measure_from_json(std::string_view text) {
  const json doc = parse_document(text);
  check_version(doc);
  const json& atoms = member(doc, "atoms");
  if (!atoms.is_array()) throw FormatError("atoms: expected an array");
  std::vector<Atom> out;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    const std::string path = "atoms[" + std::to_string(i) + "]";
    const json& a = atoms[i];
    if (!a.is_object() || !a.contains("loc") || !a.contains("w")) {
      throw FormatError(path + ": expected {\"loc\": ..., \"w\": ...}");
    }
    const json& loc = a["loc"];
    ExtendedPoint p = ExtendedPoint::minus_infinity();
    if (loc.is_string()) {
      const auto s = loc.get<std::string>();
      if (s == "+inf") {
        p = ExtendedPoint::plus_infinity();
      } else if (s != "-inf") {
        throw FormatError(path + ".loc: expected a number, \"+inf\" or \"-inf\"");
      }
    } else {
      p = ExtendedPoint::finite(number_at(loc, path + ".loc"));
    }
    out.push_back({p, number_at(a["w"], path + ".w")});
  }
  try {
    return DiscreteMeasure(std::move(out));
  } catch (const InvalidArgument& e) {
    throw FormatError(e.what());
  }
}

std::string norm_report_to_json(const NormReport& report) {
  json doc;
  doc["value"] = report.value;
  doc["witness"] = point_json(report.witness);
  doc["method"] = to_string(report.method);
  return doc.dump();
}

std::string certificate_to_json(const ApproximationCertificate& cert) {
  json doc;
  doc["format"] = kFormatVersion;
  doc["target_label"] = cert.target_label;
  doc["succeeded"] = cert.succeeded;
  doc["tolerance"] = cert.tolerance;
  doc["measured_error"] = cert.measured_error;
  doc["oracle_resolution"] = cert.oracle_resolution;
  doc["radius"] = cert.radius;
  doc["knot_count"] = cert.knot_count;
  doc["unit_count"] = cert.network.size();
  doc["alpha_plus"] = cert.alpha_plus;
  doc["alpha_minus"] = cert.alpha_minus;
  doc["refinement_steps"] = cert.refinement_history.empty() ? 0 : cert.refinement_history.size() - 1;
  if (!cert.succeeded) doc["failure_reason"] = cert.failure_reason;
  doc["network"] = {{"format", kFormatVersion}, {"units", network_json(cert.network)}};
  return doc.dump();
}

}  // namespace reluspan
