#include "dsl/hopf.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace dsl::hopf {

namespace {

double bisect(const std::function<double(double)>& g, double a, double b) {
  double ga = g(a);
  for (int i = 0; i < 200; ++i) {
    const double m = 0.5 * (a + b);
    if (m == a || m == b) break;
    const double gm = g(m);
    if ((ga < 0) == (gm < 0)) {
      a = m;
      ga = gm;
    } else {
      b = m;
    }
    if (b - a < 1e-15 * (1.0 + std::fabs(m))) break;
  }
  return 0.5 * (a + b);
}

}  // namespace

InitialDatum sech2_datum(double nu, double eps) {
  InitialDatum d;
  d.nu = nu;
  d.eps = eps;
  d.umin = -1.0;
  d.xmin = 0.0;
  auto sech2 = [](double x) {
    const double c = std::cosh(x);
    return 1.0 / (c * c);
  };
  d.u0 = [sech2](double x) { return -sech2(x); };
  d.du0 = [sech2](double x) { return 2.0 * sech2(x) * std::tanh(x); };
  d.d2u0 = [sech2](double x) {
    const double th = std::tanh(x);
    return 2.0 * sech2(x) * (sech2(x) - 2.0 * th * th);
  };
  d.fminus = [](double u) {
    if (u >= 0.0 || u < -1.0) throw std::domain_error("fminus: u outside (-1,0)");
    return -std::atanh(std::sqrt(1.0 + u));
  };
  d.fminus_p = [](double u) { return 1.0 / (2.0 * u * std::sqrt(1.0 + u)); };
  d.fminus_pp = [](double u) {
    return -(3.0 * u + 2.0) / (4.0 * u * u * std::pow(1.0 + u, 1.5));
  };
  d.fminus_ppp = [](double u) {
    return (7.5 * u * u + 10.0 * u + 4.0) / (4.0 * u * u * u * std::pow(1.0 + u, 2.5));
  };
  d.fplus = [](double u) {
    if (u >= 0.0 || u < -1.0) throw std::domain_error("fplus: u outside (-1,0)");
    return std::atanh(std::sqrt(1.0 + u));
  };
  d.fplus_p = [](double u) { return -1.0 / (2.0 * u * std::sqrt(1.0 + u)); };
  return d;
}

CriticalPoint critical_point(const InitialDatum& d) {
  // coarse argmax of -u0', then polish the root of u0'' it brackets
  const int n = 4000;
  const double lo = d.xmin - 10.0, hi = d.xmin + 10.0;
  double best = lo, bestv = -1e300;
  for (int i = 0; i <= n; ++i) {
    const double x = lo + (hi - lo) * i / n;
    const double v = -d.du0(x);
    if (v > bestv) {
      bestv = v;
      best = x;
    }
  }
  const double h = (hi - lo) / n;
  double a = best - h, b = best + h;
  if ((d.d2u0(a) < 0) == (d.d2u0(b) < 0))
    throw std::runtime_error("critical_point: no bracketed slope extremum");
  const double xi = bisect(d.d2u0, a, b);
  const double slope = -3.0 * d.du0(xi);
  if (slope <= 0) throw std::runtime_error("critical_point: slope not positive");
  CriticalPoint c;
  c.t = 1.0 / slope;
  c.xi = xi;
  c.u = d.u0(xi);
  c.x = (3.0 * c.u + 2.0 * d.nu) * c.t + xi;
  return c;
}

double solve_hopf(const InitialDatum& d, double x, double t, Branch b) {
  // foot points satisfy xi = x - (3 u0(xi) + 2 nu) t with u0 in [umin, 0]
  auto g = [&](double xi) { return (3.0 * d.u0(xi) + 2.0 * d.nu) * t + xi - x; };
  const double lo0 = x - 2.0 * d.nu * t - 0.5;
  const double hi0 = x - (2.0 * d.nu + 3.0 * d.umin) * t + 0.5;
  const double lo = (b == Branch::increasing) ? std::max(lo0, d.xmin) : lo0;
  const double hi = (b == Branch::decreasing) ? std::min(hi0, d.xmin) : hi0;
  if (hi <= lo) throw std::runtime_error("solve_hopf: empty foot point range");

  const int n = 4000;
  std::vector<double> roots;
  double prev = g(lo);
  for (int i = 1; i <= n; ++i) {
    const double xi = lo + (hi - lo) * i / n;
    const double cur = g(xi);
    if ((prev < 0) != (cur < 0))
      roots.push_back(bisect(g, lo + (hi - lo) * (i - 1) / n, xi));
    prev = cur;
  }
  if (roots.empty()) throw std::runtime_error("solve_hopf: no foot point found");
  if (b == Branch::automatic && roots.size() > 1)
    throw std::runtime_error("solve_hopf: characteristics folded, pick a branch");
  // decreasing face: smallest xi carries the largest u; increasing face is
  // single valued (speed grows with xi there, characteristics spread)
  return d.u0(roots.front());
}

}  // namespace dsl::hopf
