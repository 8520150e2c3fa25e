#pragma once

#include <complex>

// Special functions backing the small-dispersion asymptotics: complete
// elliptic integrals (Carlson symmetric forms driven by duplication
// iterations), the Jacobi theta_3 function on a purely imaginary modular
// parameter, and the Airy function Ai.
//
// Conventions:
//   ellip_K / ellip_E take the parameter s2 = s^2 (modulus squared),
//     s2 in [0, 1).
//   ellip_Lambda(s2, rho) = int_0^1 dz / ((1 - rho z^2) sqrt((1-z^2)(1-s2 z^2))),
//     rho < 1.  ellip_Lambda(s2, 0) == ellip_K(s2).
//   theta3(z, t) = theta_3(z | i t) = 1 + 2 sum_{n>=1} q^{n^2} cos(2 pi n z),
//     nome q = exp(-pi t), t > 0.  Period 1 in z.  For t < 0.5 the modular
//     transform t -> 1/t is applied internally, so the functions stay
//     accurate as the nome approaches 1.
//   theta3_logderiv(z, t) = d/dz log theta_3(z | i t).
//   airy_ai(z) is Ai(z); absolute accuracy ~1e-11 on |z| <= 25, graceful
//     (asymptotic series) beyond.

namespace dsl::specfun {

// Carlson symmetric integrals.  Arguments must be nonnegative (p > 0 for
// carlson_rj) with at most one of x, y, z zero.
double carlson_rf(double x, double y, double z);
double carlson_rc(double x, double y);
double carlson_rd(double x, double y, double z);
double carlson_rj(double x, double y, double z, double p);

double ellip_K(double s2);
double ellip_E(double s2);
double ellip_Lambda(double s2, double rho);

// Complementary-parameter forms, taking s2c = 1 - s2 (and rhoc = 1 - rho)
// directly; use these when the modulus is so close to 1 that forming 1 - s2
// in the caller would lose all relative accuracy.
double ellip_K_comp(double s2c);
double ellip_E_comp(double s2c);
double ellip_Lambda_comp(double s2c, double rhoc);

double theta3(double z, double t);
std::complex<double> theta3(std::complex<double> z, double t);

// Throws std::runtime_error if theta_3 vanishes within 1e-12 of z (only
// possible for complex z; theta_3 has no zeros on the real axis).
double theta3_logderiv(double z, double t);
std::complex<double> theta3_logderiv(std::complex<double> z, double t);

double airy_ai(double z);

}  // namespace dsl::specfun
