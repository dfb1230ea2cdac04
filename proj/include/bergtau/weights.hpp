#pragma once

// Radial exponential weights omega = exp(-eta) with eta(r) = A (1-r)^(-alpha),
// the associated radius function tau(r) = (1-r)^((alpha+2)/2), and the
// admissibility checks (eta increasing, positive Laplacian, tau and tau'
// vanishing at the boundary, tau^2 * Laplacian(eta) pinched between positive
// constants). All omega values downstream are carried as log omega = -eta.

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>

namespace bergtau {

struct WeightSpec {
  double A = 1.0;
  double alpha = 1.0;

  WeightSpec() = default;
  WeightSpec(double A_, double alpha_) : A(A_), alpha(alpha_) {
    if (!(A > 0.0) || !std::isfinite(A) || !std::isfinite(alpha))
      throw std::invalid_argument("WeightSpec: A must be positive and finite");
  }

  double eta(double r) const { return A * std::pow(1.0 - r, -alpha); }
  double eta1(double r) const { return A * alpha * std::pow(1.0 - r, -alpha - 1.0); }
  double eta2(double r) const {
    return A * alpha * (alpha + 1.0) * std::pow(1.0 - r, -alpha - 2.0);
  }
  // Laplacian of the radial function eta at |z| = r, valid for 0 < r < 1.
  double laplacian_eta(double r) const { return eta2(r) + eta1(r) / r; }

  double log_omega(double r) const { return -eta(r); }
  double tau(double r) const { return std::pow(1.0 - r, 0.5 * (alpha + 2.0)); }
  double tau1(double r) const {
    return -0.5 * (alpha + 2.0) * std::pow(1.0 - r, 0.5 * alpha);
  }
};

struct TauConstants {
  double c1 = 0.0;     // tau(r) < c1 (1-r)
  double c2 = 0.0;     // Lipschitz constant of tau
  double m_tau = 0.0;  // min(1, 1/c1, 1/c2) / 4
  double delta = 0.0;  // working radius factor, in (0, m_tau]
};

namespace detail {
inline void check_radius(double r, const char* who) {
  if (!(r >= 0.0) || !(r < 1.0))
    throw std::domain_error(std::string(who) + ": radius must lie in [0,1)");
}
}  // namespace detail

inline double eta(const WeightSpec& spec, double r) {
  detail::check_radius(r, "eta");
  return spec.eta(r);
}

inline double tau(const WeightSpec& spec, double r) {
  detail::check_radius(r, "tau");
  return spec.tau(r);
}

// Error raised when a weight fails the admissibility requirements.
struct ClassViolationError : std::domain_error {
  using std::domain_error::domain_error;
};

// Measures c1, c2 on a grid (both have closed forms for this family; the grid
// confirms them), verifies the vanishing of tau and tau' at the boundary and
// the two-sided bounds on tau^2 * Laplacian(eta) on [1/2, 1).
inline TauConstants validate_class_w(const WeightSpec& spec, int grid_size = 1000) {
  if (grid_size < 100) throw std::invalid_argument("validate_class_w: grid_size >= 100");
  if (!(spec.alpha > 0.0))
    throw ClassViolationError("validate_class_w: alpha must be positive");

  double c1 = 0.0;
  double c2_grid = 0.0;
  for (int i = 0; i < grid_size; ++i) {
    const double r = static_cast<double>(i) / grid_size;
    c1 = std::max(c1, spec.tau(r) / (1.0 - r));
    c2_grid = std::max(c2_grid, std::abs(spec.tau1(r)));
  }
  // The paper's inequality is strict; nudge the measured supremum.
  c1 *= 1.0 + 1e-12;
  const double c2 = 0.5 * (spec.alpha + 2.0);  // sup |tau'| is attained at r=0
  if (c2_grid > c2 * (1.0 + 1e-12))
    throw ClassViolationError("validate_class_w: tau' exceeded its closed-form bound");

  // tau and tau' must vanish at the boundary.
  const double r_probe = 1.0 - 1e-9;
  if (!(spec.tau(r_probe) < 1e-6) || !(std::abs(spec.tau1(r_probe)) < 1e-3))
    throw ClassViolationError("validate_class_w: tau or tau' does not vanish at 1");

  // tau^2 * Laplacian(eta) pinched on [1/2, 1).
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (int i = 0; i <= grid_size; ++i) {
    const double r = 0.5 + 0.5 * (1.0 - 1e-8) * i / grid_size;
    const double q = spec.tau(r) * spec.tau(r) * spec.laplacian_eta(r);
    lo = std::min(lo, q);
    hi = std::max(hi, q);
  }
  if (!(lo > 0.0) || !std::isfinite(hi))
    throw ClassViolationError("validate_class_w: tau^2 * Laplacian(eta) not pinched");

  TauConstants out;
  out.c1 = c1;
  out.c2 = c2;
  out.m_tau = std::min(1.0, std::min(1.0 / c1, 1.0 / c2)) / 4.0;
  out.delta = 0.5 * out.m_tau;
  return out;
}

// Text grammar: "weight A=<float> alpha=<float>" (the leading word is
// optional).
inline WeightSpec parse_weight_spec(const std::string& text) {
  std::istringstream in(text);
  std::string tok;
  double A = std::nan(""), alpha = std::nan("");
  while (in >> tok) {
    if (tok == "weight") continue;
    const auto eq = tok.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("parse_weight_spec: expected key=value, got '" + tok + "'");
    const std::string key = tok.substr(0, eq);
    const std::string val = tok.substr(eq + 1);
    try {
      if (key == "A")
        A = std::stod(val);
      else if (key == "alpha")
        alpha = std::stod(val);
      else
        throw std::invalid_argument("parse_weight_spec: unknown key '" + key + "'");
    } catch (const std::logic_error&) {
      throw std::invalid_argument("parse_weight_spec: bad value in '" + tok + "'");
    }
  }
  if (std::isnan(A) || std::isnan(alpha))
    throw std::invalid_argument("parse_weight_spec: need both A= and alpha=");
  return WeightSpec(A, alpha);
}

inline std::string format_weight_spec(const WeightSpec& spec) {
  std::ostringstream out;
  out.precision(17);
  out << "weight A=" << spec.A << " alpha=" << spec.alpha;
  return out.str();
}

}  // namespace bergtau
