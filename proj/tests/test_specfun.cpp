#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>
#include <stdexcept>

#include "dsl/specfun.hpp"
#include "oracles.hpp"

using namespace dsl::specfun;
using oracles::kPi;
using cplx = std::complex<double>;

namespace {
bool near_abs(double a, double b, double tol) { return std::fabs(a - b) < tol; }
bool near_rel(double a, double b, double tol) {
  return std::fabs(a - b) < tol * std::max(std::fabs(a), std::fabs(b));
}
bool near_cplx(cplx a, cplx b, double tol) { return std::abs(a - b) < tol; }
}  // namespace

TEST_SUITE("carlson") {
  TEST_CASE("degenerate closed forms") {
    // R_F(0,y,y) = pi/(2 sqrt(y)), R_F(x,x,x) = 1/sqrt(x)
    CHECK(near_rel(carlson_rf(0.0, 1.0, 1.0), 0.5 * kPi, 1e-15));
    CHECK(near_rel(carlson_rf(0.0, 4.0, 4.0), 0.25 * kPi, 1e-15));
    CHECK(near_rel(carlson_rf(2.0, 2.0, 2.0), 1.0 / std::sqrt(2.0), 1e-15));
    // R_C(x,x) = 1/sqrt(x); R_C(0,y) = pi/(2 sqrt(y))
    CHECK(near_rel(carlson_rc(3.0, 3.0), 1.0 / std::sqrt(3.0), 1e-15));
    CHECK(near_rel(carlson_rc(0.0, 2.0), 0.5 * kPi / std::sqrt(2.0), 1e-15));
    // R_D(x,x,x) = x^{-3/2}
    CHECK(near_rel(carlson_rd(4.0, 4.0, 4.0), 0.125, 1e-15));
  }

  TEST_CASE("homogeneity degree -1/2 and -3/2") {
    const double x = 0.3, y = 1.7, z = 2.9, lam = 5.0;
    CHECK(near_rel(carlson_rf(lam * x, lam * y, lam * z),
                   carlson_rf(x, y, z) / std::sqrt(lam), 1e-14));
    CHECK(near_rel(carlson_rd(lam * x, lam * y, lam * z),
                   carlson_rd(x, y, z) / (lam * std::sqrt(lam)), 1e-14));
    CHECK(near_rel(carlson_rj(lam * x, lam * y, lam * z, lam * 1.1),
                   carlson_rj(x, y, z, 1.1) / (lam * std::sqrt(lam)), 1e-14));
  }

  TEST_CASE("symmetry in the symmetric arguments") {
    CHECK(carlson_rf(0.2, 1.1, 3.4) == doctest::Approx(carlson_rf(3.4, 0.2, 1.1)).epsilon(1e-14));
    CHECK(carlson_rd(0.2, 1.1, 3.4) == doctest::Approx(carlson_rd(1.1, 0.2, 3.4)).epsilon(1e-14));
    CHECK(carlson_rj(0.2, 1.1, 3.4, 0.7) ==
          doctest::Approx(carlson_rj(1.1, 3.4, 0.2, 0.7)).epsilon(1e-14));
  }

  TEST_CASE("R_C and R_J reduce to R_F and R_D") {
    for (double x : {0.1, 0.9, 2.5}) {
      for (double y : {0.4, 1.3, 3.1}) {
        CHECK(near_rel(carlson_rc(x, y), carlson_rf(x, y, y), 1e-13));
        CHECK(near_rel(carlson_rj(x, y, 1.8, 1.8), carlson_rd(x, y, 1.8), 1e-13));
      }
    }
  }

  TEST_CASE("domain errors") {
    CHECK_THROWS_AS(carlson_rf(-1.0, 1.0, 1.0), std::domain_error);
    CHECK_THROWS_AS(carlson_rf(0.0, 0.0, 1.0), std::domain_error);
    CHECK_THROWS_AS(carlson_rc(1.0, 0.0), std::domain_error);
    CHECK_THROWS_AS(carlson_rd(1.0, 1.0, 0.0), std::domain_error);
    CHECK_THROWS_AS(carlson_rj(1.0, 1.0, 1.0, 0.0), std::domain_error);
  }
}

TEST_SUITE("elliptic") {
  TEST_CASE("K and E against the AGM") {
    for (double m = 0.01; m < 0.98; m += 0.07) {
      CHECK(near_rel(ellip_K(m), oracles::agm_K(m), 1e-13));
      CHECK(near_abs(ellip_E(m), oracles::agm_E(m), 1e-12));
    }
  }

  TEST_CASE("frozen values at m = 1/2 and m = 0.93") {
    CHECK(near_rel(ellip_K(0.5), 1.8540746773013717, 5e-15));
    CHECK(near_abs(ellip_E(0.5), 1.3506438810476686, 1e-13));
    CHECK(near_rel(ellip_K(0.93), 2.7470730040246676, 5e-15));
    CHECK(near_abs(ellip_E(0.93), 1.0791214066808268, 1e-13));
  }

  TEST_CASE("limits and monotonicity") {
    CHECK(near_rel(ellip_K(0.0), 0.5 * kPi, 1e-15));
    CHECK(near_rel(ellip_E(0.0), 0.5 * kPi, 1e-15));
    double kprev = ellip_K(0.0), eprev = ellip_E(0.0);
    for (double m = 0.1; m < 1.0; m += 0.1) {
      CHECK(ellip_K(m) > kprev);
      CHECK(ellip_E(m) < eprev);
      kprev = ellip_K(m);
      eprev = ellip_E(m);
    }
  }

  TEST_CASE("Legendre relation") {
    for (double m : {0.1, 0.3, 0.62, 0.9}) {
      const double lhs = ellip_E(m) * ellip_K(1.0 - m) + ellip_E(1.0 - m) * ellip_K(m) -
                         ellip_K(m) * ellip_K(1.0 - m);
      CHECK(near_rel(lhs, 0.5 * kPi, 1e-14));
    }
  }

  TEST_CASE("third kind against direct quadrature") {
    for (double s2 : {0.1, 0.5, 0.9}) {
      for (double rho : {-1.5, -0.3, 0.2, 0.8}) {
        CHECK(near_rel(ellip_Lambda(s2, rho), oracles::quad_Pi(rho, s2), 1e-12));
      }
    }
    CHECK(near_rel(ellip_Lambda(0.3, 0.5), 2.4612553522724223, 1e-13));
    CHECK(near_rel(ellip_Lambda(0.82, -1.5), 1.3309772700998737, 1e-13));
  }

  TEST_CASE("third kind degenerate cases") {
    for (double s2 : {0.15, 0.6, 0.95}) CHECK(near_rel(ellip_Lambda(s2, 0.0), ellip_K(s2), 1e-14));
    for (double rho : {-2.0, -0.5, 0.3, 0.9})
      CHECK(near_rel(ellip_Lambda(0.0, rho), 0.5 * kPi / std::sqrt(1.0 - rho), 1e-13));
  }

  TEST_CASE("domain errors") {
    CHECK_THROWS_AS(ellip_K(1.0), std::domain_error);
    CHECK_THROWS_AS(ellip_K(-0.1), std::domain_error);
    CHECK_THROWS_AS(ellip_E(1.2), std::domain_error);
    CHECK_THROWS_AS(ellip_Lambda(0.5, 1.0), std::domain_error);
    CHECK_THROWS_AS(ellip_Lambda(1.0, 0.5), std::domain_error);
  }
}

TEST_SUITE("theta") {
  TEST_CASE("direct branch against raw long double series") {
    for (double t : {0.5, 0.7, 1.3, 2.0}) {
      for (double x = -0.45; x < 0.5; x += 0.13) {
        CHECK(near_rel(theta3(x, t), oracles::theta3_series({x, 0.0}, t).real(), 1e-14));
      }
    }
  }

  TEST_CASE("modular branch against raw long double series") {
    for (double t : {0.49, 0.3, 0.18, 0.1}) {
      for (double x = -0.45; x < 0.5; x += 0.13) {
        CHECK(near_rel(theta3(x, t), oracles::theta3_series({x, 0.0}, t).real(), 1e-13));
      }
    }
  }

  TEST_CASE("frozen values") {
    CHECK(near_rel(theta3(0.2, 0.7), 1.068295999035713, 1e-14));
    CHECK(near_rel(theta3(0.37, 0.18), 0.21842402894379673, 1e-13));
    CHECK(near_cplx(theta3(cplx{0.13, 0.21}, 0.8),
                    cplx{1.2222453476091657, -0.20574161595667362}, 1e-13));
    // theta_3(0 | i) = pi^{1/4} / Gamma(3/4)
    CHECK(near_rel(theta3(0.0, 1.0), std::pow(kPi, 0.25) / std::tgamma(0.75), 1e-14));
  }

  TEST_CASE("periodicity and evenness") {
    for (double t : {0.2, 0.8}) {
      for (double x : {0.07, 0.31, 0.44}) {
        CHECK(near_rel(theta3(x + 1.0, t), theta3(x, t), 1e-14));
        CHECK(near_rel(theta3(x - 3.0, t), theta3(x, t), 1e-14));
        CHECK(near_rel(theta3(-x, t), theta3(x, t), 1e-14));
      }
    }
  }

  TEST_CASE("quasi-periodicity across the imaginary period") {
    // theta_3(z + it | e^{-pi t}) = e^{pi t - 2 pi i z} theta_3(z)
    const double t = 0.8;
    const cplx z{0.13, 0.21};
    const cplx lhs = theta3(z + cplx{0.0, t}, t);
    const cplx rhs = std::exp(cplx{kPi * t, 0.0} - cplx{0.0, 2.0 * kPi} * z) * theta3(z, t);
    CHECK(near_cplx(lhs, rhs, 1e-12 * std::abs(rhs)));
  }

  TEST_CASE("log derivative matches finite differences") {
    const double h = 1e-3;
    for (double t : {0.3, 0.7}) {
      for (double x : {-0.38, 0.11, 0.23}) {
        const double d = (-theta3(x + 2 * h, t) + 8 * theta3(x + h, t) - 8 * theta3(x - h, t) +
                          theta3(x - 2 * h, t)) /
                         (12 * h);
        CHECK(near_abs(theta3_logderiv(x, t), d / theta3(x, t), 1e-9));
      }
    }
  }

  TEST_CASE("log derivative equals its Fourier sine series") {
    // theta_3'/theta_3(w) = 4 pi sum (-1)^n q^n/(1-q^{2n}) sin(2 pi n w)
    const double t = 0.9, q = std::exp(-kPi * t);
    for (double w : {0.1, 0.27, 0.43}) {
      double s = 0.0, sgn = -1.0, qn = q;
      for (int n = 1; n < 60; ++n) {
        s += sgn * qn / (1.0 - qn * qn) * std::sin(2.0 * kPi * n * w);
        sgn = -sgn;
        qn *= q;
      }
      CHECK(near_abs(theta3_logderiv(w, t), 4.0 * kPi * s, 1e-13));
    }
  }

  TEST_CASE("log derivative frozen values and oddness") {
    CHECK(near_abs(theta3_logderiv(0.2, 0.7), -1.2427755948885282, 1e-12));
    CHECK(near_abs(theta3_logderiv(0.37, 0.18), -12.546016096544509, 1e-10));
    for (double t : {0.25, 1.1})
      for (double x : {0.09, 0.41})
        CHECK(near_abs(theta3_logderiv(-x, t), -theta3_logderiv(x, t), 1e-13));
    const cplx zc{0.31, -0.17};
    CHECK(near_cplx(theta3_logderiv(zc, 0.6),
                    oracles::theta3_series_logderiv(zc, 0.6), 1e-11));
  }

  TEST_CASE("throws at the theta zero") {
    // theta_3 vanishes at z = 1/2 + it/2
    const double t = 0.8;
    const cplx z0{0.5, 0.5 * t};
    CHECK(std::abs(theta3(z0, t)) < 1e-12);
    CHECK_THROWS_AS(theta3_logderiv(z0, t), std::runtime_error);
    CHECK_THROWS_AS(theta3(0.1, 0.0), std::domain_error);
    CHECK_THROWS_AS(theta3_logderiv(0.1, -1.0), std::domain_error);
  }
}

TEST_SUITE("airy") {
  TEST_CASE("matches the ODE march") {
    for (double z : {-9.3, -7.5, -5.0, -3.2, -1.0, 0.0, 0.5, 1.7, 3.0, 6.0}) {
      CHECK(near_abs(airy_ai(z), oracles::airy_ode_march(z), 1e-12));
    }
  }

  TEST_CASE("frozen values") {
    CHECK(near_abs(airy_ai(-3.2), -0.4174434205641514, 1e-13));
    CHECK(near_abs(airy_ai(1.7), 0.054324792732919472, 1e-13));
    CHECK(near_abs(airy_ai(6.0), 9.947694360320333e-06, 1e-12));
    CHECK(near_abs(airy_ai(-7.5), 0.32177571638064789, 1e-11));
    CHECK(near_abs(airy_ai(-9.3), 0.24047379685318643, 1e-11));
    // Ai(0) = 3^{-2/3} / Gamma(2/3)
    CHECK(near_rel(airy_ai(0.0), 1.0 / (std::pow(3.0, 2.0 / 3.0) * std::tgamma(2.0 / 3.0)),
                   1e-15));
  }

  TEST_CASE("series to asymptotic handoff is seamless") {
    CHECK(near_abs(airy_ai(7.05), oracles::airy_ode_march(7.05), 1e-11));
    CHECK(near_abs(airy_ai(-7.05), oracles::airy_ode_march(-7.05), 1e-11));
    CHECK(near_abs(airy_ai(6.999), oracles::airy_ode_march(6.999), 1e-11));
    CHECK(near_abs(airy_ai(-6.999), oracles::airy_ode_march(-6.999), 1e-11));
  }

  TEST_CASE("positive tail decays monotonically") {
    double prev = airy_ai(2.0);
    for (double z = 3.0; z <= 14.0; z += 1.0) {
      const double v = airy_ai(z);
      CHECK(v > 0.0);
      CHECK(v < prev);
      prev = v;
    }
  }

  TEST_CASE("satisfies y'' = z y under finite differences") {
    const double h = 1e-2;
    for (double z : {-8.0, -5.0, -1.0, 0.5, 2.0}) {
      const double d2 = (-airy_ai(z + 2 * h) + 16 * airy_ai(z + h) - 30 * airy_ai(z) +
                         16 * airy_ai(z - h) - airy_ai(z - 2 * h)) /
                        (12 * h * h);
      CHECK(near_abs(d2, z * airy_ai(z), 1e-5));
    }
  }
}
