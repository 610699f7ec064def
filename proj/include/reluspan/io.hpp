#pragma once

// Text formats: networks, piecewise-linear functions, measures, norm reports
// and certificates as JSON documents. Doubles are written in shortest
// round-trip form, so read(write(x)) reproduces every bit.

#include <string>
#include <string_view>

#include "reluspan/approximator.hpp"
#include "reluspan/core.hpp"
#include "reluspan/dual_checker.hpp"
#include "reluspan/weighted_norm.hpp"

namespace reluspan {

/// Version written into every document; readers reject other versions.
inline constexpr int kFormatVersion = 1;

/// Shortest round-trip decimal; integral values keep a trailing ".0".
std::string format_number(double x);

/// {"format":1,"units":[[a,b,c],...]}
std::string network_to_json(const ReLUNetwork& net);
ReLUNetwork network_from_json(std::string_view text);

/// {"format":1,"knots":[...],"values":[...],"m_left":..,"m_right":..,"c0":..}
std::string pl_to_json(const PiecewiseLinear& pl);
PiecewiseLinear pl_from_json(std::string_view text);

enum class DocumentKind { network, piecewise_linear };
/// Tells a network document from a PL document; throws FormatError otherwise.
DocumentKind detect_document(std::string_view text);

/// {"atoms":[{"loc": number | "+inf" | "-inf", "w": number}, ...]}
std::string measure_to_json(const DiscreteMeasure& mu);
DiscreteMeasure measure_from_json(std::string_view text);

/// {"value":..,"witness": number | "+inf" | "-inf","method":"exact_pl" | "grid_oracle"}
std::string norm_report_to_json(const NormReport& report);

std::string certificate_to_json(const ApproximationCertificate& cert);

}  // namespace reluspan
