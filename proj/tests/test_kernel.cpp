#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "bergtau/kernel.hpp"

using namespace bergtau;
using Catch::Approx;

namespace {
// Frozen reference moments for A = alpha = 1, from an independent
// high-precision quadrature run before this module was built.
constexpr double kM0 = 0.014801764045349119;
constexpr double kM1 = 0.0017604917314013133;
constexpr double kM5 = 1.2821585222230467e-05;
constexpr double kM20 = 1.0091766541477718e-09;
constexpr double kK55 = 820.78969527433068;  // K(0.5, 0.5)

MomentTable table_a1() {
  return compute_moments(WeightSpec(1.0, 1.0), 64, 1e-10);
}
}  // namespace

TEST_CASE("moments match frozen oracle values", "[kernel]") {
  MomentTable t = table_a1();
  CHECK(std::exp(t.log_m(0)) == Approx(kM0).epsilon(1e-9));
  CHECK(std::exp(t.log_m(1)) == Approx(kM1).epsilon(1e-9));
  CHECK(std::exp(t.log_m(5)) == Approx(kM5).epsilon(1e-9));
  CHECK(std::exp(t.log_m(20)) == Approx(kM20).epsilon(1e-9));
}

TEST_CASE("moment sequence is strictly decreasing and log-convex", "[kernel]") {
  for (double alpha : {0.5, 1.0, 2.0}) {
    MomentTable t = compute_moments(WeightSpec(1.0, alpha), 52, 1e-10);
    for (int n = 0; n + 1 <= t.depth(); ++n) {
      CHECK(t.log_m(n + 1) < t.log_m(n));
      if (n + 2 <= t.depth())
        CHECK(t.log_m(n + 1) <= 0.5 * (t.log_m(n) + t.log_m(n + 2)) + 1e-8);
    }
  }
}

TEST_CASE("kernel at the origin collapses to 1/m_0", "[kernel]") {
  MomentTable t = table_a1();
  for (Complex w : {Complex(0.0, 0.0), Complex(0.7, 0.2), Complex(-0.9, 0.0)}) {
    KernelValue kv = kernel(t, Complex(0.0, 0.0), w);
    CHECK(kv.terms_used == 1);
    CHECK(kv.log_abs == Approx(-t.log_m(0)));
    CHECK(kv.phase == 0.0);
    CHECK(kv.tail_bound == 0.0);
  }
}

TEST_CASE("kernel matches a direct 5000-term summation", "[kernel]") {
  MomentTable t = table_a1();
  KernelValue kv = kernel(t, Complex(0.5, 0.0), Complex(0.5, 0.0), 1e-13);
  // Plain-double direct summation; terms are representable for this argument.
  double direct = 0.0;
  t.ensure(5000);
  for (int n = 0; n <= 5000; ++n) {
    const double term = std::exp(n * std::log(0.25) - t.log_m(n));
    direct += term;
    if (term < 1e-18 * direct) break;
  }
  CHECK(std::exp(kv.log_abs) == Approx(direct).epsilon(1e-10));
  CHECK(std::exp(kv.log_abs) == Approx(kK55).epsilon(1e-9));
  CHECK(kv.converged);
  CHECK(kv.tail_bound <= 1e-12);
}

TEST_CASE("hermitian symmetry", "[kernel]") {
  MomentTable t = table_a1();
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 50; ++i) {
    const Complex z = std::polar(0.95 * std::sqrt(u(rng)), 2 * M_PI * u(rng));
    const Complex w = std::polar(0.95 * std::sqrt(u(rng)), 2 * M_PI * u(rng));
    KernelValue a = kernel(t, z, w);
    KernelValue b = kernel(t, w, z);
    CHECK(a.log_abs == Approx(b.log_abs).margin(1e-10));
    CHECK(std::abs(std::remainder(a.phase + b.phase, 2.0 * M_PI)) < 1e-10);
  }
}

TEST_CASE("kernel norm grows along a radius", "[kernel]") {
  MomentTable t = table_a1();
  double prev = kernel_norm_log(t, Complex(0.0, 0.0));
  for (int i = 1; i <= 24; ++i) {
    const double r = 0.99 * i / 24.0;
    const double cur = kernel_norm_log(t, Complex(r, 0.0));
    CHECK(cur >= prev - 1e-12);
    prev = cur;
  }
  CHECK(kernel_norm_log(t, Complex(0.0, 0.0)) == Approx(-0.5 * t.log_m(0)));
}

TEST_CASE("normalized kernel norm plateaus against the weight scales", "[kernel]") {
  // ||K_z||^2 w(z)^2 tau(z)^2 stays in a narrow band; the asymptotic constants
  // are not pinned by theory, the band below was measured once and frozen.
  MomentTable t = table_a1();
  const WeightSpec& spec = t.spec();
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (double r : {0.0, 0.1, 0.3, 0.5, 0.7, 0.8, 0.9, 0.95, 0.97, 0.99}) {
    const double q = std::exp(kernel_diag_log(t, Complex(r, 0.0)) - 2.0 * spec.eta(r) +
                              2.0 * std::log(spec.tau(r)));
    lo = std::min(lo, q);
    hi = std::max(hi, q);
  }
  CHECK(hi / lo < 20.0);
}

TEST_CASE("truncation is reported honestly when the cap bites", "[kernel]") {
  MomentTable t(WeightSpec(1.0, 1.0), 16, 1e-10, 0.999, 64);
  KernelValue kv = kernel(t, Complex(0.97, 0.0), Complex(0.97, 0.0));
  CHECK_FALSE(kv.converged);
  CHECK(kv.terms_used == 65);
  CHECK(kv.tail_bound > 1e-12);
  CHECK_THROWS_AS(kernel(t, Complex(0.9999, 0.0), Complex(0.0, 0.0)), std::domain_error);
}

TEST_CASE("gram matrices of kernel triples are positive semidefinite", "[kernel]") {
  MomentTable t = table_a1();
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    Complex pts[3];
    for (auto& p : pts) p = std::polar(0.9 * std::sqrt(u(rng)), 2 * M_PI * u(rng));
    // Normalized correlations rho_ij = K(zi,zj)/(||K_zi|| ||K_zj||).
    Complex rho[3][3];
    double norms[3];
    for (int i = 0; i < 3; ++i) norms[i] = kernel_norm_log(t, pts[i]);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        KernelValue kv = kernel(t, pts[i], pts[j]);
        rho[i][j] = std::polar(std::exp(kv.log_abs - norms[i] - norms[j]), kv.phase);
      }
    const Complex a = rho[0][1], b = rho[0][2], c = rho[1][2];
    const double det2a = 1.0 - std::norm(a);
    const double det2b = 1.0 - std::norm(b);
    const double det2c = 1.0 - std::norm(c);
    const double det3 = 1.0 - std::norm(a) - std::norm(b) - std::norm(c) +
                        2.0 * std::real(std::conj(a) * b * std::conj(c));
    CHECK(det2a >= -1e-9);
    CHECK(det2b >= -1e-9);
    CHECK(det2c >= -1e-9);
    CHECK(det3 >= -1e-9);
  }
}

TEST_CASE("lp ratio reduces to a closed form at the origin", "[kernel]") {
  MomentTable t = table_a1();
  const double ratio = kernel_lp_ratio(t, Complex(0.0, 0.0), 2.0, 1e-8);
  // int |K_0|^2 w^2 dA * w(0)^2 * tau(0)^2 = exp(-2A)/m_0
  CHECK(ratio == Approx(std::exp(-2.0) / kM0).epsilon(1e-5));
}

TEST_CASE("lp ratio is rotation invariant and plateaus", "[kernel][slow]") {
  MomentTable t = table_a1();
  const double at0 = kernel_lp_ratio(t, Complex(0.4, 0.3), 2.0, 1e-6);
  const double rot = kernel_lp_ratio(t, Complex(0.4, 0.3) * std::polar(1.0, 1.1), 2.0, 1e-6);
  CHECK(at0 == Approx(rot).epsilon(1e-9));

  // The two-sided comparison is asymptotic; the measured plateau regime
  // starts around r = 0.5 (at the origin the p=4 ratio is ~333, a genuine
  // feature of the small-radius regime, not a numerical artifact).
  for (double p : {1.0, 2.0, 4.0}) {
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (double r : {0.5, 0.7, 0.8, 0.9, 0.95}) {
      const double q = kernel_lp_ratio(t, Complex(r, 0.0), p, 1e-6);
      lo = std::min(lo, q);
      hi = std::max(hi, q);
    }
    INFO("p = " << p << " band [" << lo << ", " << hi << "]");
    CHECK(hi / lo < 20.0);
  }
}

TEST_CASE("test function norm: diagonal case and rotation invariance", "[kernel]") {
  MomentTable t = table_a1();
  const Complex z(0.5, 0.2);
  auto self = test_function_norm(t, z, z);
  CHECK(self.value > 0.0);

  const Complex w(0.52, 0.21);
  auto plain = test_function_norm(t, z, w);
  const Complex rot = std::polar(1.0, 0.8);
  auto rotated = test_function_norm(t, z * rot, w * rot);
  CHECK(plain.value == Approx(rotated.value).epsilon(1e-6));

  // Series route for the same quantity:
  //   ||f||^2 = w(z)^2 [ sum |z|^{2n} m_{n+1}/m_n^2 - 2 Re(conj(w) z) K(z,z)
  //                      + |w|^2 K(z,z) ].
  t.ensure(600);
  const double zr = std::abs(z);
  double s = 0.0;
  for (int n = 0; n + 1 <= t.depth(); ++n) {
    const double term =
        std::exp(2.0 * n * std::log(zr) + t.log_m(n + 1) - 2.0 * t.log_m(n));
    s += term;
    if (n > 8 && term < 1e-16 * s) break;
  }
  const double Kzz = std::exp(kernel_diag_log(t, z));
  const double inner = s - 2.0 * std::real(std::conj(w) * z) * Kzz + std::norm(w) * Kzz;
  const double series = std::exp(-t.spec().eta(zr)) * std::sqrt(inner);
  CHECK(plain.value == Approx(series).epsilon(1e-4));
}

TEST_CASE("test function norms stay in a band over admissible pairs", "[kernel][slow]") {
  MomentTable t = table_a1();
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  int used = 0;
  while (used < 100) {
    const double zr = 0.88 * std::sqrt(u(rng));
    const Complex z = std::polar(zr, 2 * M_PI * u(rng));
    // Pairs with separation about 0.05 * tau(z): comfortably inside the
    // locality radius used by the metric module.
    const Complex w =
        z + std::polar(0.05 * t.spec().tau(zr) * u(rng), 2 * M_PI * u(rng));
    if (std::abs(w) >= 0.95) continue;
    auto res = test_function_norm(t, z, w, true, 1e-6);
    lo = std::min(lo, res.value);
    hi = std::max(hi, res.value);
    ++used;
  }
  INFO("band [" << lo << ", " << hi << "]");
  CHECK(hi / lo < 50.0);
}
