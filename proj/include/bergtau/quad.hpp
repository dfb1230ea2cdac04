#pragma once

// Shared numerical infrastructure: adaptive radial quadrature on [0,1) with an
// optional boundary-layer substitution, tensor polar quadrature over the unit
// disk in the normalized area measure, and stratified Monte Carlo sampling.
//
// Two families of integrators are provided. The plain family works in linear
// arithmetic. The log family takes log-integrands and accumulates with
// logsumexp; it is the backbone for integrands that span thousands of e-folds
// (weights of the form exp(-A/(1-r)^alpha) do).

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

namespace bergtau {

using Complex = std::complex<double>;

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct QuadResult {
  double value = 0.0;
  double abs_err = 0.0;
  int panels = 0;
  bool converged = false;
};

// Log-domain counterpart: value and error bound are carried as logs.
struct LogQuadResult {
  double log_value = kNegInf;
  double rel_err = 0.0;
  int panels = 0;
  bool converged = false;
};

enum class BoundaryMap { none, log_layer };

namespace detail {

// Gauss-Legendre nodes/weights on [-1,1], Newton iteration on the Legendre
// recurrence.
inline void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  const int m = (n + 1) / 2;
  for (int i = 1; i <= m; ++i) {
    double z = std::cos(M_PI * (i - 0.25) / (n + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p1 = 1.0, p2 = 0.0;
      for (int j = 1; j <= n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
      }
      pp = n * (z * p1 - p2) / (z * z - 1.0);
      const double z1 = z;
      z = z1 - p1 / pp;
      if (std::abs(z - z1) < 1e-15) break;
    }
    double p1 = 1.0, p2 = 0.0;
    for (int j = 1; j <= n; ++j) {
      const double p3 = p2;
      p2 = p1;
      p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
    }
    pp = n * (z * p1 - p2) / (z * z - 1.0);
    x[i - 1] = -z;
    x[n - i] = z;
    w[i - 1] = 2.0 / ((1.0 - z * z) * pp * pp);
    w[n - i] = w[i - 1];
  }
}

struct GaussRule {
  std::vector<double> x, w;
  explicit GaussRule(int n) { gauss_legendre(n, x, w); }
};

inline const GaussRule& gl16() {
  static const GaussRule rule(16);
  return rule;
}

inline double logaddexp(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double m = std::max(a, b);
  return m + std::log1p(std::exp(std::min(a, b) - m));
}

// log|e^a - e^b|.
inline double logsubabsexp(double a, double b) {
  if (a == b) return kNegInf;
  const double hi = std::max(a, b), lo = std::min(a, b);
  return hi + std::log(-std::expm1(lo - hi));
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Plain adaptive integrator over [a,b]: GL-16 per panel, error from comparing
// a panel against its two halves, worst panel split first.
// ---------------------------------------------------------------------------

template <class F>
QuadResult adaptive_interval(F&& f, double a, double b, double tol,
                             int max_panels = 4000,
                             const std::vector<double>& hints = {},
                             double abs_goal = 0.0) {
  const auto& rule = detail::gl16();
  auto panel_raw = [&](double lo, double hi) {
    const double c = 0.5 * (lo + hi), h = 0.5 * (hi - lo);
    double s = 0.0;
    for (size_t i = 0; i < rule.x.size(); ++i) s += rule.w[i] * f(c + h * rule.x[i]);
    return s * h;
  };
  struct Panel {
    double lo, hi, value, err;
  };
  auto make_panel = [&](double lo, double hi) {
    const double whole = panel_raw(lo, hi);
    const double mid = 0.5 * (lo + hi);
    const double halves = panel_raw(lo, mid) + panel_raw(mid, hi);
    return Panel{lo, hi, halves, std::abs(whole - halves)};
  };
  std::vector<Panel> panels;
  std::vector<double> cuts{a};
  for (double h : hints)
    if (h > a && h < b) cuts.push_back(h);
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  for (size_t i = 0; i + 1 < cuts.size(); ++i) panels.push_back(make_panel(cuts[i], cuts[i + 1]));

  QuadResult out;
  while (true) {
    double total = 0.0, err = 0.0;
    size_t worst = 0;
    for (size_t i = 0; i < panels.size(); ++i) {
      total += panels[i].value;
      err += panels[i].err;
      if (panels[i].err > panels[worst].err) worst = i;
    }
    out.value = total;
    out.abs_err = err;
    out.panels = static_cast<int>(panels.size());
    const double goal = std::max(tol * std::max(std::abs(total), 1e-300), abs_goal);
    if (err <= goal) {
      out.converged = true;
      return out;
    }
    if (static_cast<int>(panels.size()) >= max_panels) return out;  // best effort
    const Panel p = panels[worst];
    const double mid = 0.5 * (p.lo + p.hi);
    panels[worst] = make_panel(p.lo, mid);
    panels.push_back(make_panel(mid, p.hi));
  }
}

// Integrate f over [0, r_cut]. With BoundaryMap::log_layer the substitution
// t = -log(1-r) resolves integrands concentrated in a boundary layer; blocks
// are appended in t until the tail stops contributing or r_cut is reached.
// r_cut defaults to the last radius whose distance to 1 is representable.
template <class F>
QuadResult radial_integral(F&& f, double tol, BoundaryMap map,
                           const std::vector<double>& hints = {},
                           double r_cut = 1.0 - 1e-15) {
  if (map == BoundaryMap::none) {
    return adaptive_interval(f, 0.0, r_cut, tol, 4000, hints);
  }
  auto g = [&](double t) {
    const double emt = std::exp(-t);
    return f(1.0 - emt) * emt;
  };
  const double t_cut = -std::log1p(-r_cut);
  double t_hi = std::min(4.0, t_cut);
  // Sub-integrals get a fraction of the budget so their combined error
  // estimate still fits under tol.
  QuadResult res = adaptive_interval(g, 0.0, t_hi, 0.25 * tol, 4000, hints);
  double prev_block = 0.0;
  for (int k = 0; k < 16 && t_hi < t_cut; ++k) {
    const double t_next = std::min(t_hi + 8.0, t_cut);
    // Tail blocks only need to be resolved relative to the running total.
    const double floor = 0.1 * tol * std::max(std::abs(res.value), 1e-300);
    QuadResult ext = adaptive_interval(g, t_hi, t_next, 0.25 * tol, 500, {}, floor);
    if (std::abs(ext.value) <= 0.5 * tol * std::max(std::abs(res.value), 1e-300)) {
      res.abs_err += std::abs(ext.value);  // dropped tail counts as error
      return res;
    }
    res.value += ext.value;
    res.abs_err += ext.abs_err;
    res.panels += ext.panels;
    res.converged = res.converged && ext.converged;
    prev_block = std::abs(ext.value);
    t_hi = t_next;
  }
  if (t_hi >= t_cut && prev_block > 0.0) {
    // Geometric estimate (with margin) of the part beyond r_cut.
    res.abs_err += 4.0 * prev_block * std::exp(-4.0);
  }
  res.converged =
      res.converged && res.abs_err <= tol * std::max(std::abs(res.value), 1e-300);
  return res;
}

// ---------------------------------------------------------------------------
// Log-domain adaptive integrator: the integrand is given as log f (f >= 0) and
// the result is log of the integral. Same panel strategy, logsumexp combine.
// ---------------------------------------------------------------------------

template <class LogF>
LogQuadResult adaptive_interval_log(LogF&& logf, double a, double b, double tol,
                                    int max_panels = 6000,
                                    const std::vector<double>& hints = {}) {
  const auto& rule = detail::gl16();
  auto panel_raw = [&](double lo, double hi) {
    const double c = 0.5 * (lo + hi), h = 0.5 * (hi - lo);
    double acc = kNegInf;
    for (size_t i = 0; i < rule.x.size(); ++i) {
      const double lv = logf(c + h * rule.x[i]) + std::log(rule.w[i] * h);
      acc = detail::logaddexp(acc, lv);
    }
    return acc;
  };
  struct Panel {
    double lo, hi, log_value, log_err;
  };
  auto make_panel = [&](double lo, double hi) {
    const double whole = panel_raw(lo, hi);
    const double mid = 0.5 * (lo + hi);
    const double halves = detail::logaddexp(panel_raw(lo, mid), panel_raw(mid, hi));
    double lerr;
    if (whole == kNegInf && halves == kNegInf)
      lerr = kNegInf;
    else if (whole == halves)
      lerr = halves + std::log(1e-16);
    else
      lerr = std::max(whole, halves) + std::log(-std::expm1(-std::abs(whole - halves)));
    return Panel{lo, hi, halves, lerr};
  };
  std::vector<Panel> panels;
  std::vector<double> cuts{a};
  for (double h : hints)
    if (h > a && h < b) cuts.push_back(h);
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  for (size_t i = 0; i + 1 < cuts.size(); ++i) panels.push_back(make_panel(cuts[i], cuts[i + 1]));

  LogQuadResult out;
  while (true) {
    double total = kNegInf, err = kNegInf;
    size_t worst = 0;
    for (size_t i = 0; i < panels.size(); ++i) {
      total = detail::logaddexp(total, panels[i].log_value);
      err = detail::logaddexp(err, panels[i].log_err);
      if (panels[i].log_err > panels[worst].log_err) worst = i;
    }
    out.log_value = total;
    out.rel_err = (total == kNegInf) ? 0.0 : std::exp(err - total);
    out.panels = static_cast<int>(panels.size());
    if (total == kNegInf || err <= std::log(tol) + total) {
      out.converged = true;
      return out;
    }
    if (static_cast<int>(panels.size()) >= max_panels) return out;
    const Panel p = panels[worst];
    const double mid = 0.5 * (p.lo + p.hi);
    panels[worst] = make_panel(p.lo, mid);
    panels.push_back(make_panel(mid, p.hi));
  }
}

// Log-domain integral of f over [0,1) with the boundary-layer map. logf takes
// r and returns log f(r).
template <class LogF>
LogQuadResult radial_integral_log(LogF&& logf, double tol,
                                  const std::vector<double>& t_hints = {},
                                  double t_max = 60.0) {
  auto g = [&](double t) {
    const double emt = std::exp(-t);
    return logf(1.0 - emt) - t;
  };
  double t_hi = 4.0;
  for (double h : t_hints) t_hi = std::max(t_hi, std::min(h + 2.0, t_max));
  LogQuadResult res = adaptive_interval_log(g, 0.0, t_hi, tol, 6000, t_hints);
  while (t_hi < t_max) {
    const double t_next = std::min(t_hi + 8.0, t_max);
    LogQuadResult ext = adaptive_interval_log(g, t_hi, t_next, tol, 800);
    if (ext.log_value <= res.log_value + std::log(0.5 * tol)) {
      res.rel_err += std::exp(ext.log_value - res.log_value);
      break;
    }
    res.log_value = detail::logaddexp(res.log_value, ext.log_value);
    res.rel_err += ext.rel_err;
    res.panels += ext.panels;
    res.converged = res.converged && ext.converged;
    t_hi = t_next;
  }
  return res;
}

// ---------------------------------------------------------------------------
// Disk integrals in the normalized area measure (the disk has total mass 1):
// uniform periodic rule in angle, adaptive radial integration.
// ---------------------------------------------------------------------------

template <class G>
QuadResult disk_integral(G&& g, double tol, int angular_n = 128,
                         double r_cut = 1.0 - 1e-14) {
  if (angular_n < 4) throw std::invalid_argument("disk_integral: angular_n too small");
  auto F = [&](double r) {
    if (r >= r_cut) return 0.0;
    double s = 0.0;
    for (int j = 0; j < angular_n; ++j) {
      const double th = 2.0 * M_PI * (j + 0.5) / angular_n;
      s += g(std::polar(r, th));
    }
    return 2.0 * r * s / angular_n;
  };
  return radial_integral(F, tol, BoundaryMap::log_layer);
}

template <class LogG>
LogQuadResult disk_integral_log(LogG&& logg, double tol, int angular_n = 128,
                                double r_cut = 1.0 - 1e-14,
                                const std::vector<double>& t_hints = {}) {
  if (angular_n < 4) throw std::invalid_argument("disk_integral_log: angular_n too small");
  auto F = [&](double r) {
    if (r >= r_cut) return kNegInf;
    double acc = kNegInf;
    for (int j = 0; j < angular_n; ++j) {
      const double th = 2.0 * M_PI * (j + 0.5) / angular_n;
      acc = detail::logaddexp(acc, logg(std::polar(r, th)));
    }
    return std::log(2.0 * r / angular_n) + acc;
  };
  return radial_integral_log(F, tol, t_hints);
}

// ---------------------------------------------------------------------------
// Monte Carlo over the disk, uniform in the normalized measure. Deterministic
// under a fixed seed.
// ---------------------------------------------------------------------------

struct McResult {
  double estimate = 0.0;
  double std_error = 0.0;
  std::int64_t samples = 0;
};

template <class H>
McResult mc_disk(std::uint64_t seed, std::int64_t n, H&& h) {
  if (n < 1000) throw std::invalid_argument("mc_disk: need at least 1e3 samples");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  double sum = 0.0, sum2 = 0.0;
  for (std::int64_t i = 0; i < n; ++i) {
    const double r = std::sqrt(unif(rng));
    const double th = 2.0 * M_PI * unif(rng);
    const double v = h(std::polar(r, th));
    sum += v;
    sum2 += v * v;
  }
  McResult out;
  out.samples = n;
  out.estimate = sum / n;
  const double var = std::max(0.0, sum2 / n - out.estimate * out.estimate);
  out.std_error = std::sqrt(var / n);
  return out;
}

}  // namespace bergtau
