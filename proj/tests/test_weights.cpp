#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <random>

#include "bergtau/weights.hpp"

using namespace bergtau;
using Catch::Approx;

TEST_CASE("eta closed form", "[weights]") {
  WeightSpec spec(1.0, 1.0);
  CHECK(eta(spec, 0.0) == Approx(1.0));
  CHECK(eta(spec, 0.5) == Approx(2.0));
  CHECK(eta(spec, 0.999) == Approx(1000.0).epsilon(1e-9));
  CHECK(eta(spec, 0.9) > eta(spec, 0.5));
  CHECK_THROWS_AS(eta(spec, 1.0), std::domain_error);
  CHECK_THROWS_AS(eta(spec, -0.1), std::domain_error);
}

TEST_CASE("tau closed form and tau^2 * laplacian limit", "[weights]") {
  WeightSpec spec(1.0, 1.0);
  CHECK(tau(spec, 0.0) == Approx(1.0));
  CHECK(tau(spec, 0.75) == Approx(0.125));
  CHECK_THROWS_AS(tau(spec, 1.0), std::domain_error);

  // tau(r)^2 * Laplacian(eta) -> A alpha (alpha+1) = 2 as r -> 1.
  for (double r : {0.99, 0.999, 0.9999}) {
    const double q = spec.tau(r) * spec.tau(r) * spec.laplacian_eta(r);
    CHECK(q == Approx(2.0).epsilon(20.0 * (1.0 - r)));
  }
}

TEST_CASE("class admission produces the expected constants", "[weights]") {
  WeightSpec spec(1.0, 1.0);
  TauConstants tc = validate_class_w(spec, 2000);
  CHECK(tc.c2 == Approx(1.5));
  CHECK(tc.c1 >= 1.0);
  CHECK(tc.c1 < 1.0 + 1e-6);
  CHECK(tc.m_tau == Approx(1.0 / 6.0));
  CHECK(tc.delta > 0.0);
  CHECK(tc.delta <= tc.m_tau);

  // alpha = 2 admitted, tau = (1-r)^2
  WeightSpec quad_spec(1.0, 2.0);
  CHECK_NOTHROW(validate_class_w(quad_spec, 500));
  CHECK(tau(quad_spec, 0.5) == Approx(0.25));

  CHECK_THROWS_AS(validate_class_w(WeightSpec(1.0, -0.5), 500), ClassViolationError);
  CHECK_THROWS_AS(validate_class_w(spec, 10), std::invalid_argument);
}

TEST_CASE("lipschitz bound for tau over complex pairs", "[weights]") {
  WeightSpec spec(0.7, 1.4);
  TauConstants tc = validate_class_w(spec, 500);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 10000; ++i) {
    const std::complex<double> z = std::polar(std::sqrt(u(rng)) * 0.9999, 2 * M_PI * u(rng));
    const std::complex<double> w = std::polar(std::sqrt(u(rng)) * 0.9999, 2 * M_PI * u(rng));
    const double lhs = std::abs(spec.tau(std::abs(z)) - spec.tau(std::abs(w)));
    CHECK(lhs <= tc.c2 * std::abs(z - w) + 1e-14);
  }
}

TEST_CASE("tau is locally flat on metric bubbles", "[weights]") {
  // For w in D(z, delta tau(|z|)) with delta <= m_tau: tau(z)/2 <= tau(w) <= 2 tau(z).
  WeightSpec spec(1.0, 1.0);
  TauConstants tc = validate_class_w(spec, 500);
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 5000; ++i) {
    const double zr = u(rng) * 0.999;
    const std::complex<double> z = std::polar(zr, 2 * M_PI * u(rng));
    const double rad = tc.m_tau * spec.tau(zr);
    const std::complex<double> w =
        z + std::polar(rad * std::sqrt(u(rng)), 2 * M_PI * u(rng));
    const double wr = std::abs(w);
    if (wr >= 1.0) continue;
    const double tz = spec.tau(zr), tw = spec.tau(wr);
    CHECK(tw >= 0.5 * tz - 1e-14);
    CHECK(tw <= 2.0 * tz + 1e-14);
  }
}

TEST_CASE("omega is strictly decreasing and log omega = -eta", "[weights]") {
  WeightSpec spec(2.0, 0.5);
  double prev = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= 200; ++i) {
    const double r = i / 201.0;
    const double lw = spec.log_omega(r);
    CHECK(lw == Approx(-spec.eta(r)));
    CHECK(lw < prev);
    prev = lw;
    if (r > 0.0) CHECK(spec.eta1(r) > 0.0);
    if (r > 0.0) CHECK(spec.laplacian_eta(r) > 0.0);
  }
}

TEST_CASE("weight grammar round trip", "[weights]") {
  WeightSpec spec = parse_weight_spec("weight A=1.5 alpha=0.75");
  CHECK(spec.A == Approx(1.5));
  CHECK(spec.alpha == Approx(0.75));
  WeightSpec bare = parse_weight_spec("A=2 alpha=1");
  CHECK(bare.A == Approx(2.0));
  WeightSpec round = parse_weight_spec(format_weight_spec(spec));
  CHECK(round.A == spec.A);
  CHECK(round.alpha == spec.alpha);
  CHECK_THROWS_AS(parse_weight_spec("A=1"), std::invalid_argument);
  CHECK_THROWS_AS(parse_weight_spec("A=x alpha=1"), std::invalid_argument);
  CHECK_THROWS_AS(parse_weight_spec("A=-1 alpha=1"), std::invalid_argument);
}
