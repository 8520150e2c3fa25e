#pragma once

#include <array>
#include <vector>

#include "dsl/hopf.hpp"

namespace dsl::whitham {

// Ordered modulation parameters b1 > b2 > b3 of the one-phase family,
// carried together with the linear drift coefficient nu.
struct RiemannTriple {
  double b1, b2, b3, nu;
};

struct Speeds {
  double C1, C2, C3;
};

// sum of the triple plus 2 nu; the mean drift velocity of the family
double sigma(const RiemannTriple& r);

// Characteristic speeds of the modulation system in Riemann form. Uses the
// closed elliptic expressions; the confluent limits b2 -> b3 (amplitude
// vanishes) and b1 -> b2 (wavelength diverges) switch to their analytic
// limits when the gap is below 1e-9.
Speeds speeds(const RiemannTriple& r);

// Same speeds with the gap b3 + nu passed exactly. Near the soliton wall the
// gap drops below the roundoff of b3 itself (b3 + nu evaluates to zero in the
// stored triple), so zone consumers should feed WhithamSolution::gap here.
Speeds speeds(double b1, double b2, double gap, double nu);

// Averages of the decreasing-face inverse over the inner variable
// w = v + m^2 (u - v):
//   Q    = int_0^1 f(w) dm           Q_du  = int_0^1 f'(w) m^2 dm
//   Phi  = int_0^1 f'(w) dm          Q_dv  = int_0^1 f'(w) (1-m^2) dm
//   Phi_dv  = int_0^1 f''(w) (1-m^2) dm
//   Phi_dvv = int_0^1 f'''(w) (1-m^2)^2 dm
// Q and its first derivatives use the folded continuation below the profile
// minimum; the second and third derivative averages require u, v > umin.
double Q_integral(const hopf::InitialDatum& d, double u, double v);
double Q_du(const hopf::InitialDatum& d, double u, double v);
double Q_dv(const hopf::InitialDatum& d, double u, double v);
double Phi_integral(const hopf::InitialDatum& d, double u, double v);
double Phi_dv(const hopf::InitialDatum& d, double u, double v);
double Phi_dvv(const hopf::InitialDatum& d, double u, double v);

// Symmetric solution of the Euler-Poisson-Darboux system matching the
// characteristic solution on the diagonal: q(b,b,b) = fminus(b). The
// function is mathematically symmetric in the triple but is evaluated for
// ordered arguments -nu <= b3 <= b2 <= b1 < 0 only (the quadrature splits
// panels by the ordering). Below the profile minimum the decreasing-face
// inverse is continued by the odd reflection through the fold, which keeps
// the averaged fluxes smooth in the signed root of b3 - umin.
double q_function(const hopf::InitialDatum& d, const RiemannTriple& r);

// dq/db_i, differentiated under the integral sign
std::array<double, 3> q_gradient(const hopf::InitialDatum& d, const RiemannTriple& r);

// hodograph shifts w_i = q + (C_i - sigma) dq/db_i, so that the modulation
// solution satisfies x = C_i t + w_i for all i
std::array<double, 3> w_transport(const hopf::InitialDatum& d, const RiemannTriple& r);

// State of the small-amplitude edge of the oscillation zone: b1 = u meets
// the exterior characteristic solution, b2 = b3 = v.
struct LeadingEdgeState {
  double t = 0;
  double u = 0, v = 0;  // edge parameters, umin < v < u < 0
  double xminus = 0;    // edge position, x = (3u + 2 nu) t + fminus(u)
  double D = 0;         // 3t + fminus'(u), negative on this branch
  double Phi = 0;       // Phi_integral(u, v)
  double Vden = 0;      // edge denominator, negative where the edge is regular
  double c = 0;         // gap coefficient: x - xminus ~ c (b2 - b3)^2 / 4ish
  double ut = 0, vt = 0, xminus_t = 0;  // motion of the edge
};

// Track the edge from the gradient catastrophe to time t by continuation.
// Requires t > critical time.
LeadingEdgeState leading_edge(const hopf::InitialDatum& d, double t);

// Solve the three hodograph equations at fixed (x, t) by damped Newton from
// the given seed triple. Throws std::runtime_error when Newton stalls.
RiemannTriple solve_at(const hopf::InitialDatum& d, double t, double x,
                       const RiemannTriple& seed);

// Modulation parameters across the whole zone at time t: continuation in x
// from the small-amplitude edge until b1 - b2 collapses, then the far edge
// position xplus is extrapolated.
struct WhithamSolution {
  double t = 0;
  double xminus = 0, xplus = 0;
  LeadingEdgeState edge;
  std::vector<double> x;
  std::vector<RiemannTriple> triples;
  // exact gap b3 + nu per node; toward the far edge b3 approaches -nu so
  // closely that the difference of the stored doubles loses all accuracy,
  // while the gap itself (tracked logarithmically by the solver) does not
  std::vector<double> gap;

  // Far-edge closure. For this datum the pair gap b1 - b2 shrinks only like
  // 1/sqrt(-log(b3 + nu)), so the merge is reached in the b3 -> -nu limit
  // rather than at representable b3. wall_edge marks that case; bstar is the
  // common value of b1 = b2 at xplus, where the limit system
  //   dq/db1(b, b, -nu) = -t,  xplus = (2b + nu) t + q(b, b, -nu)
  // replaces the last stretch of the march. When the march does reach
  // b1 - b2 < 1e-6 at representable b3 (other datum parameters), xplus is
  // secant-extrapolated from the merge instead and wall_edge stays false.
  bool wall_edge = false;
  double bstar = 0;

  // triple at arbitrary x inside the zone: nearest stored point as seed,
  // then polished by solve_at. Inside the terminal sliver where the log-gap
  // exceeds what double precision can carry, returns a blend between the
  // last solvable node and the wall-edge limit values instead
  RiemannTriple at(const hopf::InitialDatum& d, double x) const;
};

WhithamSolution solve_zone(const hopf::InitialDatum& d, double t, int npts = 161);

}  // namespace dsl::whitham
