// Independent reference implementations used only by the test suite.
// Each oracle computes the quantity under test by a different method than
// the library (AGM instead of Carlson, raw series in long double instead of
// transformed series, ODE marching instead of closed-form expansions), so
// agreement is evidence rather than tautology.
#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>
#include <vector>

namespace oracles {

constexpr double kPi = 3.141592653589793238462643383279502884;

// Complete elliptic integrals by the arithmetic-geometric mean, quadratic
// convergence, good to full double precision.
inline double agm_K(double m) {
  double a = 1.0, b = std::sqrt(1.0 - m);
  for (int i = 0; i < 60 && std::fabs(a - b) > 1e-17 * a; ++i) {
    const double an = 0.5 * (a + b);
    b = std::sqrt(a * b);
    a = an;
  }
  return kPi / (2.0 * a);
}

inline double agm_E(double m) {
  double a = 1.0, b = std::sqrt(1.0 - m), c = std::sqrt(m);
  double csum = 0.5 * c * c;  // 2^{-1} c_0^2
  double pow2 = 0.5;
  int n = 0;
  while (std::fabs(c) > 1e-17 && n < 60) {
    const double an = 0.5 * (a + b);
    c = 0.5 * (a - b);
    b = std::sqrt(a * b);
    a = an;
    pow2 *= 2.0;
    csum += pow2 * c * c;
    ++n;
  }
  return (kPi / (2.0 * a)) * (1.0 - csum);
}

// Adaptive Simpson quadrature for smooth integrands.
inline double quad_step(const std::function<double(double)>& f, double a, double b,
                        double fa, double fm, double fb, double whole, double tol,
                        int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0) return left + right;
  if (std::fabs(left + right - whole) < 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return quad_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         quad_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

inline double quad(const std::function<double(double)>& f, double a, double b,
                   double tol = 1e-13) {
  const double m = 0.5 * (a + b);
  const double fa = f(a), fm = f(m), fb = f(b);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return quad_step(f, a, b, fa, fm, fb, whole, tol, 48);
}

// Legendre complete integral of the third kind, direct quadrature.
inline double quad_Pi(double rho, double m) {
  return quad(
      [rho, m](double phi) {
        const double s = std::sin(phi);
        return 1.0 / ((1.0 - rho * s * s) * std::sqrt(1.0 - m * s * s));
      },
      0.0, 0.5 * kPi, 1e-14);
}

// Jacobi theta_3 with nome q = exp(-pi t), raw defining series in long
// double, no argument reduction and no modular transform.
inline std::complex<double> theta3_series(std::complex<double> z, double t) {
  const std::complex<long double> zl(z.real(), z.imag());
  std::complex<long double> sum(1.0L, 0.0L);
  for (int n = 1; n <= 400; ++n) {
    const long double e = std::exp(-kPi * static_cast<long double>(t) * n * n);
    const std::complex<long double> ip(0.0L, 2.0L * static_cast<long double>(kPi) * n);
    const std::complex<long double> term = e * (std::exp(ip * zl) + std::exp(-ip * zl));
    sum += term;
    if (std::abs(term) < 1e-21L * std::abs(sum)) break;
  }
  return {static_cast<double>(sum.real()), static_cast<double>(sum.imag())};
}

inline std::complex<double> theta3_series_logderiv(std::complex<double> z, double t) {
  const std::complex<long double> zl(z.real(), z.imag());
  std::complex<long double> den(1.0L, 0.0L), num(0.0L, 0.0L);
  for (int n = 1; n <= 400; ++n) {
    const long double e = std::exp(-kPi * static_cast<long double>(t) * n * n);
    const std::complex<long double> ip(0.0L, 2.0L * static_cast<long double>(kPi) * n);
    const std::complex<long double> ep = std::exp(ip * zl), em = std::exp(-ip * zl);
    den += e * (ep + em);
    num += ip * e * (ep - em);
    if (e * (std::abs(ep) + std::abs(em)) < 1e-21L * std::abs(den)) break;
  }
  const std::complex<long double> r = num / den;
  return {static_cast<double>(r.real()), static_cast<double>(r.imag())};
}

// March y'' = x y from the origin by local Taylor expansion in long double.
// Seeded with Ai(0), Ai'(0) expressed through the gamma function; everything
// past the seed depends only on the differential equation.
inline double airy_ode_march(double z) {
  long double y = 1.0L / (std::pow(3.0L, 2.0L / 3.0L) * std::tgammal(2.0L / 3.0L));
  long double yp = -1.0L / (std::pow(3.0L, 1.0L / 3.0L) * std::tgammal(1.0L / 3.0L));
  const int steps = std::max(1, static_cast<int>(std::ceil(std::fabs(z) / 0.125L)));
  const long double h = static_cast<long double>(z) / steps;
  long double x0 = 0.0L;
  for (int s = 0; s < steps; ++s) {
    long double c[28];
    c[0] = y;
    c[1] = yp;
    for (int k = 0; k + 2 < 28; ++k) {
      const long double prev = (k >= 1) ? c[k - 1] : 0.0L;
      c[k + 2] = (x0 * c[k] + prev) / ((k + 1.0L) * (k + 2.0L));
    }
    long double ynew = 0.0L, ypnew = 0.0L, hk = 1.0L;
    for (int k = 0; k < 28; ++k) {
      ynew += c[k] * hk;
      if (k + 1 < 28) ypnew += (k + 1.0L) * c[k + 1] * hk;
      hk *= h;
    }
    y = ynew;
    yp = ypnew;
    x0 += h;
  }
  return static_cast<double>(y);
}

}  // namespace oracles
