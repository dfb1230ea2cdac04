#pragma once

// Monomial moment tables and the reproducing kernel
//   K(z,w) = sum_n (z conj(w))^n / m_n,   m_n = ||z^n||^2 = 2 int r^(2n+1) w(r)^2 dr,
// evaluated entirely in log-domain arithmetic. The moment sequence is strictly
// decreasing and log-convex (Cauchy-Schwarz on the radial measure), so the
// term ratio of the kernel series is monotone decreasing and a rigorous
// geometric tail bound is available once the running term has passed its peak.

#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "bergtau/quad.hpp"
#include "bergtau/weights.hpp"

namespace bergtau {

struct QuadratureError : std::runtime_error {
  int failing_index;
  QuadratureError(const std::string& msg, int n)
      : std::runtime_error(msg + " (n=" + std::to_string(n) + ")"), failing_index(n) {}
};

struct KernelValue {
  double log_abs = kNegInf;
  double phase = 0.0;
  int terms_used = 0;
  double tail_bound = 0.0;  // relative to |value|
  bool converged = true;

  Complex value() const { return std::polar(std::exp(log_abs), phase); }
};

class MomentTable {
 public:
  MomentTable(const WeightSpec& spec, int initial_depth, double tol,
              double r_max = 0.999, int n_cap = 20000)
      : spec_(spec), tol_(tol), r_max_(r_max), n_cap_(n_cap) {
    if (initial_depth < 0 || tol <= 0.0)
      throw std::invalid_argument("MomentTable: depth >= 0 and tol > 0 required");
    ensure(initial_depth);
  }

  const WeightSpec& spec() const { return spec_; }
  double tol() const { return tol_; }
  double r_max() const { return r_max_; }
  int n_cap() const { return n_cap_; }
  int depth() const { return static_cast<int>(log_m_.size()) - 1; }

  double log_m(int n) const { return log_m_[static_cast<size_t>(n)]; }
  double err(int n) const { return err_[static_cast<size_t>(n)]; }

  // Extends the table so that log_m(0..n) exist. Not safe to call while other
  // threads read the table; extend before sharing.
  void ensure(int n) {
    n = std::min(n, n_cap_);
    for (int k = static_cast<int>(log_m_.size()); k <= n; ++k)
      log_m_.push_back(compute_log_moment(k));
  }

 private:
  double compute_log_moment(int n) {
    auto logf = [&](double r) {
      if (r <= 0.0) return kNegInf;
      return (2.0 * n + 1.0) * std::log(r) - 2.0 * spec_.eta(r);
    };
    std::vector<double> hints;
    if (n >= 8) {
      // Laplace point: u* = (2 A alpha / (2n+1))^(1/(alpha+1)), t* = -log u*.
      const double u = std::pow(2.0 * spec_.A * spec_.alpha / (2.0 * n + 1.0),
                                1.0 / (spec_.alpha + 1.0));
      if (u > 0.0 && u < 0.8) {
        const double t_star = -std::log(u);
        const double width = 1.0 / std::sqrt((spec_.alpha + 1.0) * (2.0 * n + 1.0) * u);
        for (double c : {-8.0, -4.0, -2.0, -1.0, 0.0, 1.0, 2.0, 4.0, 8.0}) {
          const double t = t_star + c * width;
          if (t > 0.0) hints.push_back(t);
        }
      }
    }
    LogQuadResult res = radial_integral_log(logf, tol_, hints);
    if (!res.converged) throw QuadratureError("moment quadrature did not converge", n);
    err_.push_back(res.rel_err);
    return std::log(2.0) + res.log_value;
  }

  WeightSpec spec_;
  double tol_;
  double r_max_;
  int n_cap_;
  std::vector<double> log_m_;
  std::vector<double> err_;
};

inline MomentTable compute_moments(const WeightSpec& spec, int N, double tol) {
  if (N < 0 || tol <= 0.0) throw std::invalid_argument("compute_moments: N >= 0, tol > 0");
  return MomentTable(spec, N, tol, 0.999, std::max(N, 20000));
}

namespace detail {

// Truncation plan for sum x^n / m_n at |x| = e^{log_xabs}.
struct SeriesPlan {
  int terms = 1;              // indices 0 .. terms-1 are summed
  double log_peak = 0.0;      // max_n (n log|x| - log m_n)
  double log_tail = kNegInf;  // log of the geometric tail bound
  bool capped = false;        // table cap hit before the tail condition
};

inline SeriesPlan plan_series(MomentTable& table, double log_xabs, double tol) {
  SeriesPlan plan;
  plan.log_peak = -table.log_m(0);
  if (log_xabs == kNegInf) return plan;
  int n = 1;
  while (true) {
    if (n > table.depth()) {
      if (table.depth() >= table.n_cap()) {
        const int d = table.depth();
        const double lq = log_xabs + table.log_m(d - 1) - table.log_m(d);
        const double lt = d * log_xabs - table.log_m(d);
        plan.terms = d + 1;
        plan.capped = true;
        plan.log_tail = (lq < 0.0) ? lt + lq - std::log(-std::expm1(lq))
                                   : std::numeric_limits<double>::infinity();
        return plan;
      }
      table.ensure(std::min(std::max(2 * table.depth(), 64), table.n_cap()));
    }
    const double lt = n * log_xabs - table.log_m(n);
    plan.log_peak = std::max(plan.log_peak, lt);
    const double lq = log_xabs + table.log_m(n - 1) - table.log_m(n);
    if (lq < 0.0) {
      const double log_tail = lt + lq - std::log(-std::expm1(lq));
      if (log_tail <= plan.log_peak + std::log(tol)) {
        plan.terms = n + 1;
        plan.log_tail = log_tail;
        return plan;
      }
    }
    ++n;
  }
}

// Series length needed at |x| = xabs; also pre-extends the table, which keeps
// later read-heavy loops from mutating it mid-quadrature.
inline int active_depth(MomentTable& table, double xabs, double tol = 1e-12) {
  const double lx = xabs > 0.0 ? std::log(xabs) : kNegInf;
  return plan_series(table, lx, tol).terms;
}

}  // namespace detail

// K(z,w) with a max-log shift; phases tracked separately from magnitudes.
// Extends the moment table on demand up to its cap; a hit cap is reported
// through converged = false and the achieved tail bound.
inline KernelValue kernel(MomentTable& table, Complex z, Complex w,
                          double tol = 1e-12) {
  if (std::abs(z) > table.r_max() || std::abs(w) > table.r_max())
    throw std::domain_error("kernel: |z|, |w| must be <= r_max");
  const Complex x = z * std::conj(w);
  const double xabs = std::abs(x);
  const double log_xabs = xabs > 0.0 ? std::log(xabs) : kNegInf;

  KernelValue out;
  double plan_tol = tol;
  for (int attempt = 0; attempt < 3; ++attempt) {
    detail::SeriesPlan plan = detail::plan_series(table, log_xabs, plan_tol);
    if (plan.terms == 1) {
      out.log_abs = -table.log_m(0);
      out.phase = 0.0;
      out.terms_used = 1;
      out.tail_bound = 0.0;
      out.converged = true;
      return out;
    }
    const double phi = std::arg(x);
    Complex acc(0.0, 0.0);
    for (int n = 0; n < plan.terms; ++n) {
      const double lt = n * log_xabs - table.log_m(n);
      acc += std::polar(std::exp(lt - plan.log_peak), n * phi);
    }
    const double mag = std::abs(acc);
    out.log_abs = plan.log_peak + std::log(mag);
    out.phase = std::arg(acc);
    out.terms_used = plan.terms;
    out.tail_bound = std::exp(plan.log_tail - out.log_abs);
    out.converged = !plan.capped && out.tail_bound <= tol;
    // The plan targets the peak term; under cancellation the result is
    // smaller and the relative tail needs another round with a tighter goal.
    if (out.converged || plan.capped) return out;
    plan_tol *= std::max(1e-4, std::exp(out.log_abs - plan.log_peak));
  }
  return out;
}

// log K(z,z): positive terms, streamed logsumexp.
inline double kernel_diag_log(MomentTable& table, Complex z, double tol = 1e-12) {
  const double r = std::abs(z);
  if (r == 0.0) return -table.log_m(0);
  const double log_xabs = 2.0 * std::log(r);
  detail::SeriesPlan plan = detail::plan_series(table, log_xabs, tol);
  double acc = 0.0;
  for (int n = 0; n < plan.terms; ++n)
    acc += std::exp(n * log_xabs - table.log_m(n) - plan.log_peak);
  return plan.log_peak + std::log(acc);
}

// log ||K_z|| = (1/2) log K(z,z).
inline double kernel_norm_log(MomentTable& table, Complex z, double tol = 1e-12) {
  return 0.5 * kernel_diag_log(table, z, tol);
}

namespace detail {

// Repeated kernel evaluations K(xi, z) with xi sweeping a ring |xi| = rho:
// the scaled coefficients b_n = |x|^n / m_n * e^{-log_scale} are built once
// per ring, after which each angle costs one Horner pass (no exp calls).
class RingKernelEvaluator {
 public:
  RingKernelEvaluator(MomentTable& table, Complex z, double tol = 1e-12)
      : table_(table), z_(z), arg_z_(std::arg(z)), tol_(tol) {}

  void set_ring(double rho) {
    rho_ = rho;
    const double xabs = rho * std::abs(z_);
    const double lx = xabs > 0.0 ? std::log(xabs) : kNegInf;
    SeriesPlan plan = plan_series(table_, lx, tol_);
    log_scale_ = plan.log_peak;
    b_.assign(static_cast<size_t>(plan.terms), 0.0);
    for (int n = 0; n < plan.terms; ++n)
      b_[static_cast<size_t>(n)] =
          std::exp((n == 0 ? 0.0 : n * lx) - table_.log_m(n) - log_scale_);
  }

  double log_scale() const { return log_scale_; }

  // K(rho e^{i theta}, z) * exp(-log_scale)
  Complex eval_scaled(double theta) const {
    const Complex u = std::polar(1.0, theta - arg_z_);
    Complex acc(b_.back(), 0.0);
    for (int n = static_cast<int>(b_.size()) - 2; n >= 0; --n)
      acc = acc * u + b_[static_cast<size_t>(n)];
    return acc;
  }

  double log_abs(double theta) const {
    const double m = std::abs(eval_scaled(theta));
    return m > 0.0 ? log_scale_ + std::log(m) : kNegInf;
  }

 private:
  MomentTable& table_;
  Complex z_;
  double arg_z_;
  double tol_;
  double rho_ = 0.0;
  double log_scale_ = kNegInf;
  std::vector<double> b_;
};

}  // namespace detail

// int_D |K(z,.)|^p w^p dA  *  w(z)^p * tau(z)^(2(p-1)).
//
// The integrand concentrates around xi ~ z, so the angular direction uses
// adaptive Gauss panels; a uniform angular rule would need O(series length)
// nodes to avoid aliasing the kernel's active frequencies near the boundary.
inline double kernel_lp_ratio(MomentTable& table, Complex z, double p,
                              double tol = 1e-6) {
  if (!(p > 0.0) || !std::isfinite(p))
    throw std::invalid_argument("kernel_lp_ratio: p must be positive");
  const double zr = std::abs(z);
  if (zr > table.r_max()) throw std::domain_error("kernel_lp_ratio: |z| <= r_max");
  const WeightSpec& spec = table.spec();
  const Complex zc(zr, 0.0);  // rotation invariance: reduce to z real
  detail::active_depth(table, zr * table.r_max());
  detail::RingKernelEvaluator ring(table, zc);

  auto logF = [&](double r) {
    if (r <= 0.0) return kNegInf;
    ring.set_ring(r);
    auto logf = [&](double th) { return p * ring.log_abs(th); };
    LogQuadResult a = adaptive_interval_log(logf, 0.0, M_PI, 1e-5, 800,
                                            {0.003, 0.01, 0.05, 0.2, 1.0});
    const double log_avg = a.log_value - std::log(M_PI);
    return std::log(2.0 * r) + log_avg - p * spec.eta(r);
  };
  LogQuadResult res = radial_integral_log(logF, tol);
  const double log_ratio =
      res.log_value - p * spec.eta(zr) + 2.0 * (p - 1.0) * std::log(spec.tau(zr));
  return std::exp(log_ratio);
}

// || f_{z,w} || for f_{z,w}(xi) = w(z) K(xi, z) (xi - w), by 2D quadrature.
struct TestFunctionNorm {
  double value = 0.0;
  bool locality_ok = true;  // whether the caller's d_tau(z,w) < R held
};

inline TestFunctionNorm test_function_norm(MomentTable& table, Complex z, Complex w,
                                           bool locality_ok = true, double tol = 1e-7) {
  const WeightSpec& spec = table.spec();
  detail::active_depth(table, std::abs(z) * table.r_max());
  detail::RingKernelEvaluator ring(table, z);
  const double az = std::arg(z);
  auto logF = [&](double r) {
    if (r <= 0.0) return kNegInf;
    ring.set_ring(r);
    auto logf = [&](double th) {
      const double d = std::abs(std::polar(r, th) - w);
      return 2.0 * ring.log_abs(th) + (d > 0.0 ? 2.0 * std::log(d) : kNegInf);
    };
    LogQuadResult a = adaptive_interval_log(
        logf, az - M_PI, az + M_PI, 1e-5, 800,
        {az - 0.2, az - 0.01, az, az + 0.01, az + 0.2});
    return std::log(2.0 * r) + a.log_value - std::log(2.0 * M_PI) - 2.0 * spec.eta(r);
  };
  LogQuadResult res = radial_integral_log(logF, tol);
  TestFunctionNorm out;
  out.locality_ok = locality_ok;
  out.value = std::exp(0.5 * res.log_value - spec.eta(std::abs(z)));
  return out;
}

}  // namespace bergtau
