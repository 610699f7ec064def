#include "reluspan/dual_checker.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "reluspan/errors.hpp"
#include "reluspan/io.hpp"
#include "reluspan/pl_algebra.hpp"
#include "reluspan/weighted_norm.hpp"

namespace reluspan {
namespace {

std::vector<ReLUNetwork> hat_family(int budget) {
  std::vector<ReLUNetwork> hats;
  if (budget <= 0) return hats;
  if (budget == 1) {
    hats.push_back(hat(0.0, 1.0));
    return hats;
  }
  const double spacing = 20.0 / static_cast<double>(budget - 1);
  for (int j = 0; j < budget; ++j) {
    hats.push_back(hat(-10.0 + spacing * j, spacing));
  }
  return hats;
}

}  // namespace

DiscreteMeasure::DiscreteMeasure(std::vector<Atom> atoms) : atoms_(std::move(atoms)) {
  for (const auto& atom : atoms_) {
    if (!std::isfinite(atom.weight)) throw InvalidArgument("atom weights must be finite");
  }
  std::stable_sort(atoms_.begin(), atoms_.end(),
                   [](const Atom& a, const Atom& b) { return a.location < b.location; });
  for (std::size_t i = 1; i < atoms_.size(); ++i) {
    if (atoms_[i - 1].location == atoms_[i].location) {
      throw InvalidArgument("atom locations must be distinct (repeated " +
                            atoms_[i].location.to_string() + ")");
    }
  }
}

double DiscreteMeasure::mass_at(const ExtendedPoint& p) const noexcept {
  for (const auto& atom : atoms_) {
    if (atom.location == p) return atom.weight;
  }
  return 0.0;
}

double pair(const DiscreteMeasure& mu, const ReLUNetwork& f) {
  double sum = 0.0;
  for (const auto& atom : mu.atoms()) sum += atom.weight * apply_A(f, atom.location);
  return sum;
}

double pair(const DiscreteMeasure& mu, const YTarget& f) {
  double sum = 0.0;
  for (const auto& atom : mu.atoms()) sum += atom.weight * apply_A(f, atom.location);
  return sum;
}

std::optional<double> pair_bounded_extension(const DiscreteMeasure& mu, const ReLUNetwork& f) {
  const PiecewiseLinear pl = network_to_pl(f);
  double sum = 0.0;
  for (const auto& atom : mu.atoms()) {
    switch (atom.location.kind()) {
      case ExtendedPoint::Kind::finite:
        sum += atom.weight * f(atom.location.x());
        break;
      case ExtendedPoint::Kind::plus_infinity:
        if (pl.right_slope() != 0.0) return std::nullopt;
        sum += atom.weight * (pl.is_line() ? pl.intercept() : pl.values().back());
        break;
      case ExtendedPoint::Kind::minus_infinity:
        if (pl.left_slope() != 0.0) return std::nullopt;
        sum += atom.weight * (pl.is_line() ? pl.intercept() : pl.values().front());
        break;
    }
  }
  return sum;
}

AnnihilationVerdict annihilation_test(const DiscreteMeasure& mu, std::span<const double> centers,
                                      double halfwidth, double tol) {
  if (!(halfwidth > 0.0) || !std::isfinite(halfwidth)) {
    throw InvalidArgument("hat halfwidth must be positive and finite");
  }
  if (!(tol >= 0.0)) throw InvalidArgument("tolerance must be nonnegative");
  for (std::size_t i = 1; i < centers.size(); ++i) {
    if (!(centers[i] > centers[i - 1]) || centers[i] - centers[i - 1] > halfwidth * (1 + 1e-12)) {
      throw InvalidArgument("hat centers must be increasing and at most one halfwidth apart");
    }
  }
  std::vector<double> finite_x;
  for (const auto& atom : mu.atoms()) {
    if (!atom.location.is_finite()) continue;
    const double x = atom.location.x();
    const bool covered = std::any_of(centers.begin(), centers.end(),
                                     [&](double c) { return std::abs(x - c) < halfwidth; });
    if (!covered) {
      throw InvalidArgument("hat grid does not cover the atom at " + format_number(x));
    }
    finite_x.push_back(x);
  }

  AnnihilationVerdict v;
  v.halfwidth = halfwidth;
  v.hats_vanish = true;
  for (double c : centers) {
    const double p = pair(mu, hat(c, halfwidth));
    v.hat_pairings.push_back({c, p});
    v.max_abs_pairing = std::max(v.max_abs_pairing, std::abs(p));
    if (std::abs(p) > tol) v.hats_vanish = false;
  }
  v.ramp_plus_pairing = pair(mu, ramp_plus());
  v.ramp_minus_pairing = pair(mu, ramp_minus());
  v.ramps_vanish = std::abs(v.ramp_plus_pairing) <= tol && std::abs(v.ramp_minus_pairing) <= tol;
  v.max_abs_pairing = std::max(
      {v.max_abs_pairing, std::abs(v.ramp_plus_pairing), std::abs(v.ramp_minus_pairing)});
  v.annihilates = v.hats_vanish && v.ramps_vanish;

  // Hat pairings are linear in the finite weights: P_c = sum_j hat_c(x_j) / (1+|x_j|) w_j.
  std::vector<double> recovered(finite_x.size(), 0.0);
  if (!finite_x.empty() && !centers.empty()) {
    Eigen::MatrixXd design(static_cast<Eigen::Index>(centers.size()),
                           static_cast<Eigen::Index>(finite_x.size()));
    Eigen::VectorXd observed(static_cast<Eigen::Index>(centers.size()));
    for (std::size_t i = 0; i < centers.size(); ++i) {
      const ReLUNetwork h = hat(centers[i], halfwidth);
      observed(static_cast<Eigen::Index>(i)) = v.hat_pairings[i].value;
      for (std::size_t j = 0; j < finite_x.size(); ++j) {
        design(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
            h(finite_x[j]) / weight(finite_x[j]);
      }
    }
    const Eigen::VectorXd w = design.colPivHouseholderQr().solve(observed);
    for (std::size_t j = 0; j < finite_x.size(); ++j) {
      recovered[j] = w(static_cast<Eigen::Index>(j));
    }
  }
  v.recovered_plus = v.ramp_plus_pairing;
  v.recovered_minus = v.ramp_minus_pairing;
  for (std::size_t j = 0; j < finite_x.size(); ++j) {
    const double x = finite_x[j];
    v.recovered_finite.push_back({ExtendedPoint::finite(x), recovered[j]});
    v.recovered_plus -= recovered[j] * relu(x) / weight(x);
    v.recovered_minus -= recovered[j] * relu(-x) / weight(x);
  }
  return v;
}

double auto_halfwidth(const DiscreteMeasure& mu) {
  double gap = std::numeric_limits<double>::infinity();
  const ExtendedPoint* previous = nullptr;
  for (const auto& atom : mu.atoms()) {
    if (!atom.location.is_finite()) continue;
    if (previous) gap = std::min(gap, atom.location.x() - previous->x());
    previous = &atom.location;
  }
  double h = 1.0;
  while (h >= 0.4 * gap && h > 1e-300) h *= 0.5;
  return h;
}

std::vector<double> covering_centers(const DiscreteMeasure& mu, double halfwidth) {
  if (!(halfwidth > 0.0) || !std::isfinite(halfwidth)) {
    throw InvalidArgument("hat halfwidth must be positive and finite");
  }
  double lo = 0.0;
  double hi = 0.0;
  bool any = false;
  for (const auto& atom : mu.atoms()) {
    if (!atom.location.is_finite()) continue;
    lo = any ? std::min(lo, atom.location.x()) : atom.location.x();
    hi = any ? std::max(hi, atom.location.x()) : atom.location.x();
    any = true;
  }
  const double first = std::floor(lo / halfwidth) - 1.0;
  const double last = std::ceil(hi / halfwidth) + 1.0;
  if (last - first > 1e7) throw InvalidArgument("hat grid would need more than 10^7 centers");
  std::vector<double> centers;
  for (double k = first; k <= last; k += 1.0) centers.push_back(k * halfwidth);
  return centers;
}

SeparationResult separation_demo(int grid_resolution, int candidate_budget, SpanningSet set) {
  if (grid_resolution < 1) throw InvalidArgument("grid resolution must be positive");
  if (candidate_budget < 0) throw InvalidArgument("candidate budget must be nonnegative");

  std::vector<ReLUNetwork> features;
  if (set == SpanningSet::literal) {
    features.push_back(step_f());
    features.push_back(step_g());
  } else {
    features.push_back(ramp_plus());
    features.push_back(ramp_minus());
  }
  for (auto& h : hat_family(candidate_budget)) features.push_back(std::move(h));

  const CompactGrid grid(grid_resolution);
  const ReLUNetwork target = ramp_plus();
  const auto rows = static_cast<Eigen::Index>(grid.size());
  const auto cols = static_cast<Eigen::Index>(features.size());
  Eigen::MatrixXd design(rows, cols);
  Eigen::VectorXd y(rows);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const ExtendedPoint p = grid.point(static_cast<std::size_t>(i));
    y(i) = apply_A(target, p);
    for (Eigen::Index j = 0; j < cols; ++j) {
      design(i, j) = apply_A(features[static_cast<std::size_t>(j)], p);
    }
  }

  // Normal equations through a truncated eigendecomposition of the Gram matrix.
  const Eigen::MatrixXd gram = design.transpose() * design;
  const Eigen::VectorXd moments = design.transpose() * y;
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
  const Eigen::VectorXd& lambda = eig.eigenvalues();
  const double cutoff = kLeastSquaresCutoff * std::max(lambda.maxCoeff(), 0.0);
  Eigen::VectorXd projected = eig.eigenvectors().transpose() * moments;
  std::size_t rank = 0;
  for (Eigen::Index k = 0; k < projected.size(); ++k) {
    if (lambda(k) > cutoff && lambda(k) > 0.0) {
      projected(k) /= lambda(k);
      ++rank;
    } else {
      projected(k) = 0.0;
    }
  }
  const Eigen::VectorXd coefficients = eig.eigenvectors() * projected;
  const Eigen::VectorXd residual = y - design * coefficients;

  SeparationResult result;
  result.features = features.size();
  result.rank = rank;
  result.residual = -1.0;
  for (Eigen::Index i = 0; i < rows; ++i) {
    if (std::abs(residual(i)) > result.residual) {
      result.residual = std::abs(residual(i));
      result.witness = grid.point(static_cast<std::size_t>(i));
    }
  }
  return result;
}

DualDemo dual_demo(const DiscreteMeasure& mu, double tol, double halfwidth) {
  if (!(halfwidth > 0.0)) halfwidth = auto_halfwidth(mu);
  const auto centers = covering_centers(mu, halfwidth);
  DualDemo demo;
  demo.verdict = annihilation_test(mu, centers, halfwidth, tol);
  const auto& v = demo.verdict;

  std::size_t finite = 0;
  for (const auto& atom : mu.atoms()) finite += atom.location.is_finite() ? 1 : 0;

  std::ostringstream out;
  out << "measure: " << mu.atoms().size() << " atoms (" << finite << " finite, "
      << mu.atoms().size() - finite << " at infinity)\n";
  for (const auto& atom : mu.atoms()) {
    out << "  atom " << atom.location.to_string() << " weight " << format_number(atom.weight)
        << "\n";
  }
  out << "tolerance: " << format_number(tol) << "\n";

  out << "step 1: pair with hats of halfwidth " << format_number(halfwidth) << " at "
      << centers.size() << " centers from " << format_number(centers.front()) << " to "
      << format_number(centers.back()) << "\n";
  std::size_t shown = 0;
  std::size_t nonzero = 0;
  for (const auto& hp : v.hat_pairings) {
    if (hp.value == 0.0) continue;
    ++nonzero;
    if (shown < 20) {
      out << "  <mu, hat(" << format_number(hp.center) << ", " << format_number(halfwidth)
          << ")> = " << format_number(hp.value) << "\n";
      ++shown;
    }
  }
  if (nonzero > shown) out << "  ... " << nonzero - shown << " more nonzero hat pairings\n";
  if (nonzero == 0) out << "  all hat pairings are 0.0\n";
  out << "  hats " << (v.hats_vanish ? "vanish" : "do not vanish")
      << ": mu restricted to R is " << (v.hats_vanish ? "zero" : "nonzero") << "\n";
  for (const auto& atom : v.recovered_finite) {
    out << "  recovered finite mass: " << atom.location.to_string() << " → "
        << format_number(atom.weight) << "\n";
  }

  out << "step 2: pair with ramps (A-boundary values 1 at +inf and -inf)\n";
  out << "  <mu, ramp_plus> = " << format_number(v.ramp_plus_pairing) << "\n";
  out << "  <mu, ramp_minus> = " << format_number(v.ramp_minus_pairing) << "\n";

  out << "step 3: bounded test functions under both pairings\n";
  const auto describe = [&](const char* name, const ReLUNetwork& net) {
    const auto bounded = pair_bounded_extension(mu, net);
    out << "  " << name << ": weighted pairing " << format_number(pair(mu, net))
        << ", bounded-extension pairing "
        << (bounded ? format_number(*bounded) : std::string("undefined")) << "\n";
  };
  describe("step_f", step_f());
  describe("step_g", step_g());

  out << "verdict: mu " << (v.annihilates ? "annihilates" : "does not annihilate")
      << " the hats and ramps at tolerance " << format_number(tol) << "\n";
  out << "boundary mass: -inf → " << format_number(v.recovered_minus) << " via ramp_minus\n";
  out << "boundary mass: +inf → " << format_number(v.recovered_plus) << " via ramp_plus\n";
  demo.transcript = out.str();
  return demo;
}

}  // namespace reluspan
