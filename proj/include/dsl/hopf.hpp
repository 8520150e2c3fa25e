#pragma once

#include <functional>

namespace dsl::hopf {

// Initial profile for the dispersionless characteristic solution together
// with the closed-form pieces the asymptotic construction needs: the
// inverses f_- and f_+ of the two faces and the f_- derivatives with
// respect to u.
//
// The profile is assumed to decay to 0 at both infinities and to have a
// single minimum umin attained at x = xmin; the decreasing face is x < xmin,
// so f_-(u) < xmin maps (umin, 0) back to it, and f_+(u) > xmin maps it to
// the increasing face.
struct InitialDatum {
  double nu = 0.0;
  double eps = 0.0;
  double umin = -1.0;  // minimum value of the profile
  double xmin = 0.0;   // where the minimum sits

  std::function<double(double)> u0, du0, d2u0;
  std::function<double(double)> fminus, fminus_p, fminus_pp, fminus_ppp;
  std::function<double(double)> fplus, fplus_p;

  // Continuation of f_- through the minimum, constant below umin; used by
  // the averaging integrals whose inner variable can dip below the profile
  // range.
  double fold(double w) const { return w > umin ? fminus(w) : xmin; }
  double fold_p(double w) const { return w > umin ? fminus_p(w) : 0.0; }
};

// The -sech^2 profile: umin = -1 at x = 0, f_-+(u) = -+artanh(sqrt(1+u)).
InitialDatum sech2_datum(double nu, double eps = 0.0);

// First shock of the characteristic solution: time, position, value, and
// the foot point xi on the initial profile.
struct CriticalPoint {
  double t, x, u, xi;
};

// Gradient catastrophe of u_t + (3u + 2 nu) u_x = 0: t = 1/max(-3 u0').
CriticalPoint critical_point(const InitialDatum& d);

enum class Branch {
  automatic,   // demand a single-valued point, throw when folded
  decreasing,  // decreasing face, branch with the largest u
  increasing,  // increasing face; single valued for t >= 0
};

// Solve u = u0(x - (3u + 2 nu) t). Branch::automatic throws
// std::runtime_error where characteristics have crossed; Branch::decreasing
// picks, among roots with foot point on the decreasing face, the one with
// the largest u (the continuation of the left exterior solution);
// Branch::increasing demands a foot point right of the minimum (the
// continuation of the right exterior solution).
double solve_hopf(const InitialDatum& d, double x, double t,
                  Branch b = Branch::automatic);

}  // namespace dsl::hopf
