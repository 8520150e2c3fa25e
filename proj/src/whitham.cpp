#include "dsl/whitham.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "dsl/specfun.hpp"

namespace dsl::whitham {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr int kGaussN = 64;  // nodes of the inner m quadrature
constexpr int kLamN = 48;    // Chebyshev nodes of the angular average

struct Nodes {
  std::vector<double> x, w;  // on [0,1]
};

Nodes make_gauss(int n) {
  Nodes r;
  r.x.resize(n);
  r.w.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
      }
      dp = n * (x * p0 - p1) / (x * x - 1.0);
      const double dx = p0 / dp;
      x -= dx;
      if (std::fabs(dx) < 1e-15) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    r.x[i] = 0.5 * (1.0 - x);  // map [-1,1] -> [0,1]
    r.w[i] = 0.5 * w;
    r.x[n - 1 - i] = 0.5 * (1.0 + x);
    r.w[n - 1 - i] = 0.5 * w;
  }
  return r;
}

const Nodes& gauss() {
  static const Nodes n = make_gauss(kGaussN);
  return n;
}

// integral over [0,1] of h(w(m)) wt(m) dm with w = v + m^2 (u - v); h is
// replaced by the constant hfold where w <= umin, and the quadrature variable
// is bent around the crossing so the square-root behaviour of h at the fold
// is lifted
template <class H, class WT>
double split_quad(double u, double v, double umin, const H& h, double hfold,
                  const WT& wt) {
  const Nodes& g = gauss();
  auto plain_wt = [&](double lo, double hi) {
    double s = 0.0;
    for (int i = 0; i < kGaussN; ++i) s += g.w[i] * wt(lo + (hi - lo) * g.x[i]);
    return (hi - lo) * s;
  };
  const bool ufold = u <= umin, vfold = v <= umin;
  if (std::fabs(u - v) < 1e-14) {
    return ufold ? hfold * plain_wt(0.0, 1.0) : h(u) * plain_wt(0.0, 1.0);
  }
  if (!ufold && !vfold) {
    double s = 0.0;
    for (int i = 0; i < kGaussN; ++i) {
      const double m = g.x[i];
      s += g.w[i] * h(v + m * m * (u - v)) * wt(m);
    }
    return s;
  }
  if (ufold && vfold) return hfold * plain_wt(0.0, 1.0);
  const double m0 = std::sqrt((umin - v) / (u - v));
  double live = 0.0;
  if (vfold) {
    // live part (m0, 1], substitute m = m0 + (1 - m0) s^2
    for (int i = 0; i < kGaussN; ++i) {
      const double s = g.x[i];
      const double m = m0 + (1.0 - m0) * s * s;
      live += g.w[i] * h(v + m * m * (u - v)) * wt(m) * 2.0 * (1.0 - m0) * s;
    }
    return live + hfold * plain_wt(0.0, m0);
  }
  // live part [0, m0), substitute m = m0 (1 - s^2)
  for (int i = 0; i < kGaussN; ++i) {
    const double s = g.x[i];
    const double m = m0 * (1.0 - s * s);
    live += g.w[i] * h(v + m * m * (u - v)) * wt(m) * 2.0 * m0 * s;
  }
  return live + hfold * plain_wt(m0, 1.0);
}

const auto wt_one = [](double) { return 1.0; };
const auto wt_m2 = [](double m) { return m * m; };
const auto wt_1m2 = [](double m) { return 1.0 - m * m; };

struct QGrad {
  double q, g1, g2, g3;
};

struct Inner {
  double If, Ig1, Igv;  // int f~ dm, int f~' m^2 dm, int f~' (1-m^2) dm
};

const Nodes& gauss_panel() {
  static const Nodes n = make_gauss(20);
  return n;
}

const Nodes& gauss_angle() {
  static const Nodes n = make_gauss(16);
  return n;
}

// inner integrals over m in [0,1] along w = c + m^2 (b1 - c). Below the hump
// minimum the decreasing-branch inverse is continued through the fold onto the
// increasing branch, f~(w) = f+(2 umin - w); for a symmetric hump this is the
// odd continuation of f-, which keeps f~ analytic in sqrt(|w - umin|) and the
// averaged system regular where beta3 crosses the minimum. The square-root
// behaviour at w = umin is resolved by substitutions on both sides
Inner inner_at(const hopf::InitialDatum& d, double b1, double c) {
  Inner out{0.0, 0.0, 0.0};
  const double B = b1 - c;
  auto need_fplus = [&]() {
    if (!d.fplus || !d.fplus_p)
      throw std::domain_error(
          "q: datum lacks the increasing-branch inverse needed below the hump minimum");
  };
  if (B < 1e-14) {  // collapsed: w == b1 for every m
    if (b1 <= d.umin) {
      if (d.umin - b1 < 1e-12) {
        out.If = d.xmin;
        return out;
      }
      need_fplus();
      const double wr = 2.0 * d.umin - b1;
      out.If = d.fplus(wr);
      const double fp = -d.fplus_p(wr);
      out.Ig1 = fp / 3.0;
      out.Igv = 2.0 * fp / 3.0;
      return out;
    }
    out.If = d.fminus(b1);
    const double fp = d.fminus_p(b1);
    out.Ig1 = fp / 3.0;
    out.Igv = 2.0 * fp / 3.0;
    return out;
  }
  const Nodes& g = gauss();
  const Nodes& gp = gauss_panel();
  // dw = w - umin is carried analytically from the substitutions; inside the
  // last decade above the fold the profile inverse is evaluated at a safe
  // reference point and rescaled by its square-root behaviour, which keeps
  // the node values finite when dw underflows the spacing of doubles near w
  auto add = [&](double dw, double m, double jac) {
    double f, fp;
    if (dw < 1e-9) {
      const double scale = std::sqrt(1e-9 / dw);
      f = d.fminus(d.umin + 1e-9) / scale;
      fp = d.fminus_p(d.umin + 1e-9) * scale;
    } else {
      const double w = d.umin + dw;
      f = d.fminus(w);
      fp = d.fminus_p(w);
    }
    out.If += jac * f;
    out.Ig1 += jac * fp * m * m;
    out.Igv += jac * fp * (1.0 - m * m);
  };
  // mirrored evaluation at depth dwn = umin - w > 0 below the fold
  auto addb = [&](double dwn, double m, double jac) {
    double f, fp;
    if (dwn < 1e-9) {
      const double scale = std::sqrt(1e-9 / dwn);
      f = d.fplus(d.umin + 1e-9) / scale;
      fp = -d.fplus_p(d.umin + 1e-9) * scale;
    } else {
      const double w = d.umin + dwn;
      f = d.fplus(w);
      fp = -d.fplus_p(w);
    }
    out.If += jac * f;
    out.Ig1 += jac * fp * m * m;
    out.Igv += jac * fp * (1.0 - m * m);
  };
  // panels on [0, thmax]: geometric refinement into the far end, where w
  // reaches b1 and the profile inverse turns sharply, uniform elsewhere
  auto theta_panels = [&](double thmax, auto&& node) {
    double dprev = 0.0, dnext = std::min(1e-4, thmax);
    for (;;) {
      const double lo = thmax - std::min(dnext, thmax), hi = thmax - dprev;
      for (int i = 0; i < 20; ++i) node(lo + (hi - lo) * gp.x[i], (hi - lo) * gp.w[i]);
      if (dnext >= thmax) break;
      dprev = dnext;
      dnext = std::min(dnext / 0.12, dnext + 2.0);
    }
  };
  if (c > d.umin) {
    // clamped away from zero: a node can land within rounding distance of
    // the fold, and the substitution must keep a finite panel count there
    const double a2 = std::max(c - d.umin, B * 1e-26);
    const double lay = std::sqrt(a2 / B);  // m scale of the fold layer
    if (lay >= 0.2) {
      for (int i = 0; i < kGaussN; ++i) {
        const double m = g.x[i];
        add(a2 + m * m * B, m, g.w[i]);
      }
      return out;
    }
    // m = lay sinh(th) puts w - umin = a2 cosh(th)^2: smooth in th
    theta_panels(std::asinh(1.0 / lay), [&](double th, double wq) {
      const double sh = std::sinh(th), ch = std::cosh(th);
      add(a2 * ch * ch, lay * sh, wq * lay * ch);
    });
    return out;
  }
  // c at or below the fold: w crosses umin at m0. The stretch [0, m0) lies
  // below and is evaluated through the continuation with m = m0 cos(psi),
  // depth = (umin - c) sin^2(psi); the stretch (m0, 1] above keeps the
  // m = m0 cosh(th) substitution, w - umin = B m0^2 sinh^2(th)
  need_fplus();
  // clamped like a2 above so the fp * jac product stays finite when c sits
  // within rounding distance of the fold
  const double depth0 = std::max(d.umin - c, B * 1e-26);
  const double m0sq = depth0 / B;
  const double m0 = std::sqrt(m0sq);
  if (m0 >= 1.0) {
    // the whole range is below; nodes crowd toward m = 1 where the depth
    // umin - b1 can be small
    for (int i = 0; i < kGaussN; ++i) {
      const double s = g.x[i];
      const double m = 1.0 - s * s;
      addb(B * (m0sq - m * m), m, g.w[i] * 2.0 * s);
    }
    return out;
  }
  for (int i = 0; i < kGaussN; ++i) {
    const double psi = 0.5 * kPi * g.x[i];
    const double sn = std::sin(psi), cs = std::cos(psi);
    addb(depth0 * sn * sn, m0 * cs, 0.5 * kPi * g.w[i] * m0 * sn);
  }
  const double bm02 = B * m0 * m0;
  theta_panels(std::acosh(1.0 / m0), [&](double th, double wq) {
    const double sh = std::sinh(th), ch = std::cosh(th);
    add(bm02 * sh * sh, m0 * ch, wq * m0 * sh);
  });
  return out;
}

// fused symmetric average and its gradient over the angular variable; when the
// pair straddles the fold the angular integrand is only x log x regular at the
// crossing, so the angle is integrated on panels geometrically refined there
QGrad q_with_gradient(const hopf::InitialDatum& d, const RiemannTriple& r) {
  const double mc = 0.5 * (r.b2 + r.b3), hd = 0.5 * (r.b3 - r.b2);
  const double gap = r.b2 - r.b3;
  QGrad out{0.0, 0.0, 0.0, 0.0};
  auto accum = [&](double lam, double wphi) {
    const Inner in = inner_at(d, r.b1, mc + hd * lam);
    out.q += wphi * in.If;
    out.g1 += wphi * in.Ig1;
    out.g2 += wphi * 0.5 * (1.0 - lam) * in.Igv;
    out.g3 += wphi * 0.5 * (1.0 + lam) * in.Igv;
  };
  if (gap < 1e-15 * std::max(1.0, std::fabs(r.b2))) {
    const Inner in = inner_at(d, r.b1, mc);
    return {in.If, in.Ig1, 0.5 * in.Igv, 0.5 * in.Igv};
  }
  const bool allfold = r.b2 <= d.umin;
  const bool clear = r.b3 > d.umin && r.b3 - d.umin >= 0.25 * gap;
  if (allfold || clear) {
    // smooth in the angle: Chebyshev-Gauss absorbs the endpoint weight
    for (int k = 0; k < kLamN; ++k) {
      const double lam = std::cos(kPi * (2.0 * k + 1.0) / (2.0 * kLamN));
      accum(lam, 1.0 / kLamN);
    }
    return out;
  }
  // fold crossing at lam* (clamped to the endpoint when b3 is just above):
  // composite Gauss panels in phi, geometrically refined toward phi*
  const double lamstar = (d.umin - mc) / hd;
  const double phistar =
      lamstar >= 1.0 ? 0.5 * kPi : (lamstar <= -1.0 ? -0.5 * kPi : std::asin(lamstar));
  const Nodes& gq = gauss_angle();
  auto side = [&](double lo, double hi, bool sing_hi) {
    if (hi - lo < 1e-14) return;
    // panel boundaries at geometric distances from the singular end; the
    // innermost sliver carries the residual log error, so it is kept well
    // below the Newton tolerance of the hodograph solves
    double dprev = 0.0, dnext = 1e-11;
    while (dprev < hi - lo) {
      const double a = sing_hi ? hi - std::min(dnext, hi - lo) : lo + dprev;
      const double b = sing_hi ? hi - dprev : lo + std::min(dnext, hi - lo);
      for (int i = 0; i < 16; ++i) {
        const double phi = a + (b - a) * gq.x[i];
        accum(std::sin(phi), (b - a) * gq.w[i] / kPi);
      }
      dprev = dnext;
      dnext = std::min(dnext / 0.15, dnext + 0.6);
    }
  };
  side(-0.5 * kPi, phistar, true);
  side(phistar, 0.5 * kPi, false);
  return out;
}

struct Ell {
  double s2c, rhoc, K, E, Lam;
};

// Elliptic data from the gap delta = b3 + nu supplied exactly. The
// complementary parameters are the products
//   1 - s2  = (b1 - b2) delta / ((b2 + nu)(b1 + nu - delta))
//   1 - rho = delta / (b2 + nu)
// so a gap far below the roundoff of b3 itself (the soliton wall, where the
// modulus is exponentially close to 1) still evaluates to full accuracy.
Ell ell_of_delta(double b1, double b2, double delta, double nu) {
  const double bb2 = b2 + nu;
  const double d13 = (b1 + nu) - delta;
  Ell e;
  e.s2c = (b1 - b2) * delta / (bb2 * d13);
  if (e.s2c > 1.0) e.s2c = 1.0;
  e.rhoc = delta / bb2;
  e.K = specfun::ellip_K_comp(e.s2c);
  e.E = specfun::ellip_E_comp(e.s2c);
  e.Lam = specfun::ellip_Lambda_comp(e.s2c, e.rhoc);
  return e;
}

struct SpeedsD {
  double sig, D1, D2, D3;  // C_i = sig + D_i
};

// The three detachments D_i = C_i - sigma in forms whose divergences cancel
// algebraically: delta * Lam stays finite on the wall (Lam grows like
// 1/delta) and E / s2c replaces the subtractive prefactor of E in C2.
SpeedsD speeds_delta(double b1, double b2, double delta, double nu, const Ell& e) {
  const double bb2 = b2 + nu;
  const double d12 = b1 - b2;
  const double d23 = bb2 - delta;  // b2 - b3
  SpeedsD s;
  s.sig = b1 + b2 + nu + delta;  // b1 + b2 + b3 + 2 nu without cancellation
  s.D1 = 2.0 * delta * d12 * e.Lam / (bb2 * e.E);
  s.D2 = 2.0 * d23 * e.Lam / (e.K - e.E / e.s2c);
  s.D3 = -2.0 * delta * d23 * e.Lam / (bb2 * (e.K - e.E));
  return s;
}

bool valid_triple(const RiemannTriple& r) {
  return r.b1 > r.b2 && r.b2 > r.b3 && r.b3 > -r.nu && r.b1 < 0.0;
}

struct Resid {
  double F1, F2, F3;
};

Resid hodograph_resid_delta(const hopf::InitialDatum& d, double b1, double b2,
                            double delta, double x, double t) {
  if (!(delta > 0.0)) throw std::domain_error("hodograph: gap b3 + nu must be positive");
  const double nu = d.nu;
  const Ell e = ell_of_delta(b1, b2, delta, nu);
  const SpeedsD s = speeds_delta(b1, b2, delta, nu, e);
  const RiemannTriple r{b1, b2, delta - nu, nu};
  const QGrad qg = q_with_gradient(d, r);
  const double base = s.sig * t + qg.q - x;
  const double alpha = (b2 + nu) * e.E * (b1 - 0.5 * (b2 + r.b3)) /
                       ((b1 - b2) * delta * e.Lam);
  Resid F;
  F.F1 = alpha * (base + s.D1 * (t + qg.g1));
  F.F2 = base + s.D2 * (t + qg.g2);
  F.F3 = ((s.D2 - s.D3) * t + (s.D2 * qg.g2 - s.D3 * qg.g3)) / (b2 + nu - delta);
  return F;
}

Resid hodograph_resid(const hopf::InitialDatum& d, const RiemannTriple& r, double x,
                      double t) {
  return hodograph_resid_delta(d, r.b1, r.b2, r.b3 + r.nu, x, t);
}

double resid_norm(const Resid& F) {
  return std::max({std::fabs(F.F1), std::fabs(F.F2), std::fabs(F.F3)});
}

// ---- leading edge ------------------------------------------------------

struct EdgeResid {
  double G1, G2;
};

EdgeResid edge_resid(const hopf::InitialDatum& d, double u, double v, double t) {
  const double phi = Phi_integral(d, u, v);
  const double qdu = Q_du(d, u, v);
  const double phv = Phi_dv(d, u, v);
  EdgeResid g;
  g.G1 = (u - v) * (t + qdu) + (v + d.nu) * (3.0 * t + phi);
  g.G2 = (u - 2.0 * v - d.nu) * (phi + 3.0 * t) + 2.0 * (v + d.nu) * (u - v) * phv;
  return g;
}

// one Newton solve of the edge system at fixed t from seed (u, v)
bool edge_newton(const hopf::InitialDatum& d, double t, double& u, double& v) {
  for (int it = 0; it < 60; ++it) {
    const EdgeResid G = edge_resid(d, u, v, t);
    const double n0 = std::max(std::fabs(G.G1), std::fabs(G.G2));
    if (n0 < 1e-13 * (1.0 + std::fabs(t))) return true;
    const double hu = 1e-8 * std::max(0.01, std::fabs(u));
    const double hv = 1e-8 * std::max(0.01, std::fabs(v));
    const EdgeResid Gu = edge_resid(d, u + hu, v, t);
    const EdgeResid Gv = edge_resid(d, u, v + hv, t);
    const double a11 = (Gu.G1 - G.G1) / hu, a12 = (Gv.G1 - G.G1) / hv;
    const double a21 = (Gu.G2 - G.G2) / hu, a22 = (Gv.G2 - G.G2) / hv;
    const double det = a11 * a22 - a12 * a21;
    if (det == 0.0) return false;
    const double du = (-G.G1 * a22 + G.G2 * a12) / det;
    const double dv = (-a11 * G.G2 + a21 * G.G1) / det;
    double lam = 1.0;
    bool ok = false;
    for (int bt = 0; bt < 25; ++bt) {
      const double un = u + lam * du, vn = v + lam * dv;
      if (vn > d.umin && un > vn && un < 0.0) {
        const EdgeResid Gn = edge_resid(d, un, vn, t);
        if (std::max(std::fabs(Gn.G1), std::fabs(Gn.G2)) < n0 * (1.0 - 0.25 * lam) ||
            std::max(std::fabs(Gn.G1), std::fabs(Gn.G2)) < 1e-13 * (1.0 + std::fabs(t))) {
          u = un;
          v = vn;
          ok = true;
          break;
        }
      }
      lam *= 0.5;
    }
    if (!ok) return false;
  }
  return false;
}

void edge_rates(const hopf::InitialDatum& d, double t, double u, double v, double& ut,
                double& vt) {
  // implicit differentiation of the edge system in t
  const double hu = 1e-7 * std::max(0.01, std::fabs(u));
  const double hv = 1e-7 * std::max(0.01, std::fabs(v));
  const EdgeResid G0 = edge_resid(d, u, v, t);
  const EdgeResid Gu = edge_resid(d, u + hu, v, t);
  const EdgeResid Gv = edge_resid(d, u, v + hv, t);
  const double a11 = (Gu.G1 - G0.G1) / hu, a12 = (Gv.G1 - G0.G1) / hv;
  const double a21 = (Gu.G2 - G0.G2) / hu, a22 = (Gv.G2 - G0.G2) / hv;
  // dG/dt holding (u, v): G1_t = (u - v) + 3 (v + nu); G2_t = 3 (u - 2v - nu)
  const double b1 = -((u - v) + 3.0 * (v + d.nu));
  const double b2 = -3.0 * (u - 2.0 * v - d.nu);
  const double det = a11 * a22 - a12 * a21;
  ut = (b1 * a22 - a12 * b2) / det;
  vt = (a11 * b2 - b1 * a21) / det;
}

}  // namespace

double sigma(const RiemannTriple& r) { return r.b1 + r.b2 + r.b3 + 2.0 * r.nu; }

Speeds speeds(const RiemannTriple& r) {
  if (!(r.b1 >= r.b2 && r.b2 >= r.b3 && r.b3 > -r.nu))
    throw std::domain_error("speeds: triple must satisfy b1 >= b2 >= b3 > -nu");
  const double scale = std::max({std::fabs(r.b1), std::fabs(r.b3), 0.1});
  const double sig = sigma(r);
  if (r.b2 - r.b3 < 1e-9 * scale) {
    // amplitude -> 0: C1 detaches, C2 and C3 collapse
    const double u = r.b1, v = 0.5 * (r.b2 + r.b3);
    Speeds s;
    s.C1 = 3.0 * u + 2.0 * r.nu;
    s.C2 = s.C3 = sig - 4.0 * (v + r.nu) * (u - v) / (u + r.nu);
    return s;
  }
  if (r.b1 - r.b2 < 1e-9 * scale) {
    // wavelength -> infinity: C1 and C2 collapse onto the mean drift
    Speeds s;
    s.C1 = s.C2 = sig;
    s.C3 = 3.0 * r.b3 + 2.0 * r.nu;
    return s;
  }
  const double delta = r.b3 + r.nu;
  const SpeedsD sd = speeds_delta(r.b1, r.b2, delta, r.nu, ell_of_delta(r.b1, r.b2, delta, r.nu));
  return {sd.sig + sd.D1, sd.sig + sd.D2, sd.sig + sd.D3};
}

Speeds speeds(double b1, double b2, double gap, double nu) {
  if (!(b1 >= b2 && gap > 0.0 && b2 + nu > gap))
    throw std::domain_error("speeds: need b1 >= b2 >= b3 > -nu with gap = b3 + nu");
  const double scale = std::max({std::fabs(b1), std::fabs(gap - nu), 0.1});
  const double sig = b1 + b2 + nu + gap;
  if (b2 + nu - gap < 1e-9 * scale) {
    const double u = b1, v = 0.5 * (b2 + (gap - nu));
    Speeds s;
    s.C1 = 3.0 * u + 2.0 * nu;
    s.C2 = s.C3 = sig - 4.0 * (v + nu) * (u - v) / (u + nu);
    return s;
  }
  if (b1 - b2 < 1e-9 * scale) {
    Speeds s;
    s.C1 = s.C2 = sig;
    s.C3 = 3.0 * (gap - nu) + 2.0 * nu;
    return s;
  }
  const SpeedsD sd = speeds_delta(b1, b2, gap, nu, ell_of_delta(b1, b2, gap, nu));
  return {sd.sig + sd.D1, sd.sig + sd.D2, sd.sig + sd.D3};
}

double Q_integral(const hopf::InitialDatum& d, double u, double v) {
  return split_quad(u, v, d.umin, d.fminus, d.xmin, wt_one);
}

double Q_du(const hopf::InitialDatum& d, double u, double v) {
  return split_quad(u, v, d.umin, d.fminus_p, 0.0, wt_m2);
}

double Q_dv(const hopf::InitialDatum& d, double u, double v) {
  return split_quad(u, v, d.umin, d.fminus_p, 0.0, wt_1m2);
}

double Phi_integral(const hopf::InitialDatum& d, double u, double v) {
  return split_quad(u, v, d.umin, d.fminus_p, 0.0, wt_one);
}

double Phi_dv(const hopf::InitialDatum& d, double u, double v) {
  if (u <= d.umin || v <= d.umin)
    throw std::domain_error("Phi_dv: requires u, v above the profile minimum");
  const auto h = [&](double w) { return d.fminus_pp(w); };
  return split_quad(u, v, d.umin, h, 0.0, wt_1m2);
}

double Phi_dvv(const hopf::InitialDatum& d, double u, double v) {
  if (u <= d.umin || v <= d.umin)
    throw std::domain_error("Phi_dvv: requires u, v above the profile minimum");
  const auto h = [&](double w) { return d.fminus_ppp(w); };
  const auto wt = [](double m) {
    const double a = 1.0 - m * m;
    return a * a;
  };
  return split_quad(u, v, d.umin, h, 0.0, wt);
}

namespace {
// the panel splits of the averaged integrals assume the arguments ordered;
// permuted input would quietly integrate over the wrong range
void require_ordered(const RiemannTriple& r) {
  if (!(r.b1 >= r.b2 && r.b2 >= r.b3 && r.b3 >= -r.nu && r.b1 < 0.0))
    throw std::domain_error("q: triple must satisfy -nu <= b3 <= b2 <= b1 < 0");
}
}  // namespace

double q_function(const hopf::InitialDatum& d, const RiemannTriple& r) {
  require_ordered(r);
  return q_with_gradient(d, r).q;
}

std::array<double, 3> q_gradient(const hopf::InitialDatum& d, const RiemannTriple& r) {
  require_ordered(r);
  const QGrad qg = q_with_gradient(d, r);
  return {qg.g1, qg.g2, qg.g3};
}

std::array<double, 3> w_transport(const hopf::InitialDatum& d, const RiemannTriple& r) {
  const QGrad qg = q_with_gradient(d, r);
  const double scale = std::max({std::fabs(r.b1), std::fabs(r.b3), 0.1});
  if (r.b2 - r.b3 < 1e-9 * scale || r.b1 - r.b2 < 1e-9 * scale) {
    const Speeds s = speeds(r);
    const double sig = sigma(r);
    return {qg.q + (s.C1 - sig) * qg.g1, qg.q + (s.C2 - sig) * qg.g2,
            qg.q + (s.C3 - sig) * qg.g3};
  }
  const double delta = r.b3 + r.nu;
  const SpeedsD s =
      speeds_delta(r.b1, r.b2, delta, r.nu, ell_of_delta(r.b1, r.b2, delta, r.nu));
  return {qg.q + s.D1 * qg.g1, qg.q + s.D2 * qg.g2, qg.q + s.D3 * qg.g3};
}

LeadingEdgeState leading_edge(const hopf::InitialDatum& d, double t) {
  const hopf::CriticalPoint cp = hopf::critical_point(d);
  if (!(t > cp.t)) throw std::domain_error("leading_edge: t must exceed the critical time");
  const double f3 = d.fminus_ppp(cp.u);

  // Seed just past the catastrophe. Both parameters leave the critical value
  // like sqrt(t - tc), u upward and v downward a quarter as fast; the edge
  // system also has a spurious root with u = v at the fold turning point,
  // which the asymmetric seed and the guard below avoid.
  double tau = std::min(1e-6, 0.5 * (t - cp.t));
  const double amp = 6.0 * std::sqrt(tau / (-f3));
  double u = cp.u + amp, v = cp.u - 0.25 * amp;
  double tcur = cp.t + tau;
  if (!edge_newton(d, tcur, u, v))
    throw std::runtime_error("leading_edge: seed solve failed");
  if (u - v < 1e-8 * std::max(0.1, std::fabs(u)))
    throw std::runtime_error("leading_edge: collapsed onto the degenerate root");

  // continuation in t: geometric ramp, then capped uniform steps
  while (tcur < t) {
    double step = std::min({2.0 * (tcur - cp.t), 2e-3, t - tcur});
    for (;;) {
      double ut, vt;
      edge_rates(d, tcur, u, v, ut, vt);
      double un = u + step * ut, vn = v + step * vt;
      if (vn <= d.umin) vn = 0.5 * (v + d.umin);
      if (edge_newton(d, tcur + step, un, vn)) {
        u = un;
        v = vn;
        tcur += step;
        break;
      }
      step *= 0.5;
      if (step < 1e-12) throw std::runtime_error("leading_edge: continuation stalled");
    }
  }

  LeadingEdgeState st;
  st.t = t;
  st.u = u;
  st.v = v;
  st.xminus = (3.0 * u + 2.0 * d.nu) * t + d.fminus(u);
  st.D = 3.0 * t + d.fminus_p(u);
  st.Phi = Phi_integral(d, u, v);
  const double nu = d.nu;
  st.Vden = 4.0 * (v + nu) * (v + nu) * (u - v) * (u - v) * Phi_dvv(d, u, v) -
            (3.0 * t + st.Phi) * (8.0 * v * nu + 3.0 * u * u - 8.0 * u * v -
                                  2.0 * u * nu + 3.0 * nu * nu + 8.0 * v * v);
  st.c = -st.Vden / (8.0 * (u + nu) * (v + nu) * (u - v));
  edge_rates(d, t, u, v, st.ut, st.vt);
  st.xminus_t = 3.0 * u + 2.0 * nu + st.D * st.ut;
  return st;
}

namespace {

// below this gap b3 + nu the solve switches to the wall parametrization
constexpr double kWallSwitch = 1e-6;

RiemannTriple solve_wall(const hopf::InitialDatum& d, double t, double x, double b1,
                         double b2, double g, double* gsol);

// Newton in (b1, b2, y) with b3 = umin + y|y|, used when b3 sits within the
// kink band around the fold: the averaged fluxes are square-root kinked in
// b3 there but analytic in the signed root y, so the substitution lets the
// solve pass through the fold where the branch crosses the hump minimum
RiemannTriple solve_kink(const hopf::InitialDatum& d, double t, double x,
                         const RiemannTriple& seed) {
  const double tol = 1e-10 * (1.0 + std::fabs(x) + std::fabs(t));
  double b1 = seed.b1, b2 = seed.b2;
  const double soff = seed.b3 - d.umin;
  double y = (soff >= 0.0 ? 1.0 : -1.0) * std::sqrt(std::fabs(soff));
  auto resid = [&](double a1, double a2, double yy) {
    return hodograph_resid(d, {a1, a2, d.umin + yy * std::fabs(yy), d.nu}, x, t);
  };
  for (int it = 0; it < 60; ++it) {
    const Resid F = resid(b1, b2, y);
    const double n0 = resid_norm(F);
    if (n0 < tol) return {b1, b2, d.umin + y * std::fabs(y), d.nu};
    const double h1 = 1e-7 * std::max(0.02, std::fabs(b1));
    const double h2 = 1e-7 * std::max(0.02, std::fabs(b2));
    const double hy = 1e-6;
    const Resid Fa = resid(b1 + h1, b2, y);
    const Resid Fb = resid(b1, b2 + h2, y);
    const Resid Fy = resid(b1, b2, y + hy);
    const double J[3][3] = {
        {(Fa.F1 - F.F1) / h1, (Fb.F1 - F.F1) / h2, (Fy.F1 - F.F1) / hy},
        {(Fa.F2 - F.F2) / h1, (Fb.F2 - F.F2) / h2, (Fy.F2 - F.F2) / hy},
        {(Fa.F3 - F.F3) / h1, (Fb.F3 - F.F3) / h2, (Fy.F3 - F.F3) / hy}};
    const double det = J[0][0] * (J[1][1] * J[2][2] - J[1][2] * J[2][1]) -
                       J[0][1] * (J[1][0] * J[2][2] - J[1][2] * J[2][0]) +
                       J[0][2] * (J[1][0] * J[2][1] - J[1][1] * J[2][0]);
    if (det == 0.0) break;
    auto det3 = [](double a0, double a1, double a2, double c0, double c1, double c2,
                   double e0, double e1, double e2) {
      return a0 * (c1 * e2 - c2 * e1) - a1 * (c0 * e2 - c2 * e0) + a2 * (c0 * e1 - c1 * e0);
    };
    const double r0 = -F.F1, r1 = -F.F2, r2 = -F.F3;
    const double d1 =
        det3(r0, J[0][1], J[0][2], r1, J[1][1], J[1][2], r2, J[2][1], J[2][2]) / det;
    const double d2 =
        det3(J[0][0], r0, J[0][2], J[1][0], r1, J[1][2], J[2][0], r2, J[2][2]) / det;
    const double dy =
        det3(J[0][0], J[0][1], r0, J[1][0], J[1][1], r1, J[2][0], J[2][1], r2) / det;
    double lam = 1.0;
    bool ok = false;
    for (int bt = 0; bt < 25; ++bt) {
      const double n1v = b1 + lam * d1, n2v = b2 + lam * d2;
      const double nyv = y + lam * dy;
      const RiemannTriple cand{n1v, n2v, d.umin + nyv * std::fabs(nyv), d.nu};
      if (valid_triple(cand)) {
        const double n1 = resid_norm(resid(n1v, n2v, nyv));
        if (n1 < n0 * (1.0 - 0.25 * lam) || n1 < tol) {
          b1 = n1v;
          b2 = n2v;
          y = nyv;
          ok = true;
          break;
        }
      }
      lam *= 0.5;
    }
    if (!ok) {
      // quadrature noise in the averaged fluxes grows near the fold (the
      // integrand kink sits at a panel endpoint), so accept a stalled point
      // at that level rather than fail the march
      if (n0 < 1e-6 * (1.0 + std::fabs(x) + std::fabs(t)))
        return {b1, b2, d.umin + y * std::fabs(y), d.nu};
      throw std::runtime_error("solve_at: Newton stalled at the fold");
    }
  }
  throw std::runtime_error("solve_at: no convergence at the fold");
}

// plain damped Newton on (b1, b2, b3). side > 0 keeps iterates on or above
// the fold (the branch left of the tangency), side < 0 keeps them strictly
// below (the continuation past it); the fold cusp is never straddled
RiemannTriple newton_plain(const hopf::InitialDatum& d, double t, double x,
                           const RiemannTriple& seed, int side) {
  const double kinkband = 1e-4;
  RiemannTriple cur = seed;
  const double tol = 1e-10 * (1.0 + std::fabs(x) + std::fabs(t));
  for (int it = 0; it < 60; ++it) {
    const Resid F = hodograph_resid(d, cur, x, t);
    const double n0 = resid_norm(F);
    if (n0 < tol) return cur;
    // an iterate drifting onto the fold: restart in the parametrization that
    // is smooth through it
    if (std::fabs(cur.b3 - d.umin) < 0.25 * kinkband) return solve_kink(d, t, x, cur);
    // an iterate drifting onto the wall: same, in the log of the gap
    if (cur.b3 + d.nu < kWallSwitch)
      return solve_wall(d, t, x, cur.b1, cur.b2, -std::log(cur.b3 + d.nu), nullptr);
    double J[3][3];
    double* b[3] = {&cur.b1, &cur.b2, &cur.b3};
    for (int j = 0; j < 3; ++j) {
      double h = 1e-7 * std::max(0.02, std::fabs(*b[j]));
      const double save = *b[j];
      // the profile inverse has a square-root kink at the fold; difference
      // on one side of it so the column is not polluted by the cusp
      if (save < d.umin && save + h > d.umin) h = -h;
      *b[j] = save + h;
      const Resid Fp = hodograph_resid(d, cur, x, t);
      *b[j] = save;
      J[0][j] = (Fp.F1 - F.F1) / h;
      J[1][j] = (Fp.F2 - F.F2) / h;
      J[2][j] = (Fp.F3 - F.F3) / h;
    }
    // Cramer solve J db = -F
    const double det = J[0][0] * (J[1][1] * J[2][2] - J[1][2] * J[2][1]) -
                       J[0][1] * (J[1][0] * J[2][2] - J[1][2] * J[2][0]) +
                       J[0][2] * (J[1][0] * J[2][1] - J[1][1] * J[2][0]);
    if (det == 0.0) break;
    const double r0 = -F.F1, r1 = -F.F2, r2 = -F.F3;
    auto det3 = [](double a0, double a1, double a2, double b0, double b1, double b2,
                   double c0, double c1, double c2) {
      return a0 * (b1 * c2 - b2 * c1) - a1 * (b0 * c2 - b2 * c0) + a2 * (b0 * c1 - b1 * c0);
    };
    const double db1 =
        det3(r0, J[0][1], J[0][2], r1, J[1][1], J[1][2], r2, J[2][1], J[2][2]) / det;
    const double db2 =
        det3(J[0][0], r0, J[0][2], J[1][0], r1, J[1][2], J[2][0], r2, J[2][2]) / det;
    const double db3 =
        det3(J[0][0], J[0][1], r0, J[1][0], J[1][1], r1, J[2][0], J[2][1], r2) / det;
    double lam = 1.0;
    bool ok = false;
    for (int bt = 0; bt < 25; ++bt) {
      RiemannTriple nxt{cur.b1 + lam * db1, cur.b2 + lam * db2, cur.b3 + lam * db3, cur.nu};
      const bool on_side = side > 0 ? nxt.b3 >= d.umin : nxt.b3 < d.umin;
      if (valid_triple(nxt) && on_side) {
        const double n1 = resid_norm(hodograph_resid(d, nxt, x, t));
        if (n1 < n0 * (1.0 - 0.25 * lam) || n1 < tol) {
          cur = nxt;
          ok = true;
          break;
        }
      }
      lam *= 0.5;
    }
    if (!ok) {
      // quadrature noise floor: the residual cannot be pushed further down.
      // Within the kink band the noise is larger (the integrand kink sits at
      // a panel endpoint), so accept more there
      const double scale = 1.0 + std::fabs(x) + std::fabs(t);
      if (n0 < 3e-8 * scale) return cur;
      if (n0 < 1e-6 * scale && std::fabs(cur.b3 - d.umin) < kinkband) return cur;
      // the step presses against the fold: switch to the parametrization
      // that is smooth through it
      if (std::fabs(cur.b3 - d.umin) < 10.0 * kinkband) return solve_kink(d, t, x, cur);
      throw std::runtime_error("solve_at: Newton stalled");
    }
  }
  if (resid_norm(hodograph_resid(d, cur, x, t)) < 10.0 * tol) return cur;
  throw std::runtime_error("solve_at: no convergence");
}

// Newton in (b1, b2, g) with b3 = -nu + exp(-g). Past the fold the gap
// b3 + nu collapses exponentially in x (the elliptic modulus reaches 1 on
// the wall b3 = -nu, the infinite-period limit), so the solve tracks the
// logarithm of the gap and feeds it to the residual exactly; the gap stays
// meaningful far below the roundoff granularity of b3 itself.
RiemannTriple solve_wall(const hopf::InitialDatum& d, double t, double x, double b1,
                         double b2, double g, double* gsol) {
  const double scale = 1.0 + std::fabs(x) + std::fabs(t);
  const double tol = 1e-10 * scale;
  auto resid = [&](double a1, double a2, double gg) {
    return hodograph_resid_delta(d, a1, a2, std::exp(-gg), x, t);
  };
  auto admissible = [&](double a1, double a2, double gg) {
    return a1 < 0.0 && a1 > a2 && gg > 0.0 && gg < 700.0 && a2 + d.nu > std::exp(-gg);
  };
  if (!admissible(b1, b2, g)) throw std::runtime_error("solve_at: wall seed invalid");
  auto finish = [&](double a1, double a2, double gg) {
    if (gsol) *gsol = gg;
    return RiemannTriple{a1, a2, std::exp(-gg) - d.nu, d.nu};
  };
  for (int it = 0; it < 80; ++it) {
    const Resid F = resid(b1, b2, g);
    const double n0 = resid_norm(F);
    if (n0 < tol) return finish(b1, b2, g);
    const double h1 = 1e-7 * std::max(0.02, std::fabs(b1));
    const double h2 = 1e-7 * std::max(0.02, std::fabs(b2));
    const double hg = 1e-2;
    const Resid Fa = resid(b1 + h1, b2, g);
    const Resid Fb = resid(b1, b2 + h2, g);
    const Resid Fg = resid(b1, b2, g + hg);
    const double J[3][3] = {
        {(Fa.F1 - F.F1) / h1, (Fb.F1 - F.F1) / h2, (Fg.F1 - F.F1) / hg},
        {(Fa.F2 - F.F2) / h1, (Fb.F2 - F.F2) / h2, (Fg.F2 - F.F2) / hg},
        {(Fa.F3 - F.F3) / h1, (Fb.F3 - F.F3) / h2, (Fg.F3 - F.F3) / hg}};
    const double det = J[0][0] * (J[1][1] * J[2][2] - J[1][2] * J[2][1]) -
                       J[0][1] * (J[1][0] * J[2][2] - J[1][2] * J[2][0]) +
                       J[0][2] * (J[1][0] * J[2][1] - J[1][1] * J[2][0]);
    if (det == 0.0) break;
    auto det3 = [](double a0, double a1, double a2, double c0, double c1, double c2,
                   double e0, double e1, double e2) {
      return a0 * (c1 * e2 - c2 * e1) - a1 * (c0 * e2 - c2 * e0) + a2 * (c0 * e1 - c1 * e0);
    };
    const double r0 = -F.F1, r1 = -F.F2, r2 = -F.F3;
    const double d1 =
        det3(r0, J[0][1], J[0][2], r1, J[1][1], J[1][2], r2, J[2][1], J[2][2]) / det;
    const double d2 =
        det3(J[0][0], r0, J[0][2], J[1][0], r1, J[1][2], J[2][0], r2, J[2][2]) / det;
    double dg =
        det3(J[0][0], J[0][1], r0, J[1][0], J[1][1], r1, J[2][0], J[2][1], r2) / det;
    // the system depends on g only through slowly varying logarithms, so raw
    // Newton steps in g can be huge; clip them
    if (dg > 3.0) dg = 3.0;
    if (dg < -3.0) dg = -3.0;
    double lam = 1.0;
    bool ok = false;
    for (int bt = 0; bt < 30; ++bt) {
      const double n1v = b1 + lam * d1, n2v = b2 + lam * d2, ngv = g + lam * dg;
      if (admissible(n1v, n2v, ngv)) {
        const double n1 = resid_norm(resid(n1v, n2v, ngv));
        if (n1 < n0 * (1.0 - 0.25 * lam) || n1 < tol) {
          b1 = n1v;
          b2 = n2v;
          g = ngv;
          ok = true;
          break;
        }
      }
      lam *= 0.5;
    }
    if (!ok) {
      if (n0 < 3e-8 * scale) return finish(b1, b2, g);
      throw std::runtime_error("solve_at: Newton stalled at the wall");
    }
  }
  if (resid_norm(resid(b1, b2, g)) < 10.0 * tol) return finish(b1, b2, g);
  throw std::runtime_error("solve_at: no convergence at the wall");
}

}  // namespace

namespace {

// Symmetric limit point of the hodograph solution on the b3 = -nu boundary:
// in the b3 -> -nu limit the third hodograph equation forces t + dq/db2 = 0,
// the second then pins x = sigma t + q, and the first forces t + dq/db1 = 0;
// with b1 = b2 = b the two gradient conditions coincide, leaving
//   dq/db1(b, b, -nu) + t = 0,  xplus = (2b + nu) t + q(b, b, -nu).
// This is where the marched branch's pair gap (which decays only like
// 1/sqrt(log gap)) finally closes.
struct WallTouch {
  double b, xplus;
};

WallTouch wall_touch(const hopf::InitialDatum& d, double t, double bseed) {
  double b = bseed;
  for (int it = 0; it < 60; ++it) {
    RiemannTriple r{b, b, -d.nu, d.nu};
    const double G = q_with_gradient(d, r).g1 + t;
    if (std::fabs(G) < 1e-12) break;
    const double hb = 1e-7 * std::max(0.02, std::fabs(b));
    // the pair moves together, so the Jacobian is the sum of both columns
    auto qa = q_with_gradient(d, {b + hb, b, -d.nu, d.nu});
    auto qb = q_with_gradient(d, {b, b + hb, -d.nu, d.nu});
    const double dG = (qa.g1 + qb.g1 - 2.0 * q_with_gradient(d, r).g1) / hb;
    if (dG == 0.0) throw std::runtime_error("wall_touch: flat gradient");
    double bn = b - G / dG;
    if (bn >= 0.0) bn = 0.5 * b;
    if (bn <= -d.nu) bn = 0.5 * (b - d.nu);
    if (std::fabs(bn - b) < 1e-15 * std::max(1.0, std::fabs(b))) {
      b = bn;
      break;
    }
    b = bn;
  }
  RiemannTriple r{b, b, -d.nu, d.nu};
  const double G = q_with_gradient(d, r).g1 + t;
  if (std::fabs(G) > 1e-8) throw std::runtime_error("wall_touch: no convergence");
  return {b, (2.0 * b + d.nu) * t + q_with_gradient(d, r).q};
}

}  // namespace

RiemannTriple solve_at(const hopf::InitialDatum& d, double t, double x,
                       const RiemannTriple& seed) {
  const double kinkband = 1e-4;
  const double dseed = seed.b3 + seed.nu;
  if (dseed < kWallSwitch)
    return solve_wall(d, t, x, seed.b1, seed.b2, -std::log(std::max(dseed, 1e-300)),
                      nullptr);
  const double soff = seed.b3 - d.umin;
  if (std::fabs(soff) < kinkband) return solve_kink(d, t, x, seed);
  return newton_plain(d, t, x, seed, soff >= 0.0 ? 1 : -1);
}

RiemannTriple WhithamSolution::at(const hopf::InitialDatum& d, double xq) const {
  if (x.empty()) throw std::runtime_error("WhithamSolution::at: empty zone");
  const auto it = std::lower_bound(x.begin(), x.end(), xq);
  size_t i = it - x.begin();
  if (i == x.size()) i = x.size() - 1;
  if (i > 0 && (i == x.size() || x[i] - xq > xq - x[i - 1])) --i;
  const double gi = i < gap.size() ? gap[i] : triples[i].b3 + triples[i].nu;
  try {
    if (gi < kWallSwitch)
      return solve_wall(d, t, xq, triples[i].b1, triples[i].b2,
                        -std::log(std::max(gi, 1e-300)), nullptr);
    return solve_at(d, t, xq, triples[i]);
  } catch (const std::exception&) {
    // Terminal sliver of a wall-closed zone: the log gap the solve would need
    // exceeds double range. Blend the nearest node into the limit values,
    // extrapolating the log gap along its measured 1/(xplus - x) growth.
    if (!wall_edge || xq <= x[i]) throw;
    const double w =
        std::min(1.0, (xq - x[i]) / std::max(xplus - x[i], 1e-300));
    RiemannTriple r = triples[i];
    r.b1 += w * (bstar - r.b1);
    r.b2 += w * (bstar - r.b2);
    const double g0 = -std::log(std::max(gi, 1e-300));
    const double dx0 = std::max(xplus - x[i], 1e-300);
    const double dxq = std::max(xplus - xq, 1e-300);
    r.b3 = -r.nu + std::exp(-std::min(250.0, g0 * dx0 / dxq));
    return r;
  }
}

WhithamSolution solve_zone(const hopf::InitialDatum& d, double t, int npts) {
  WhithamSolution sol;
  sol.t = t;
  sol.edge = leading_edge(d, t);
  sol.xminus = sol.edge.xminus;
  const double u = sol.edge.u, v = sol.edge.v, c = sol.edge.c, D = sol.edge.D;

  // adaptive march from the edge; each accepted point seeds the next
  std::vector<double> xs;
  std::vector<RiemannTriple> trs;
  std::vector<double> gaps;
  double h = 1e-4;
  double xcur = sol.xminus;
  {
    const double x1 = sol.xminus + h;
    const double g = std::sqrt(h / c);
    RiemannTriple seed{u + h / D, v + g, v - g, d.nu};
    trs.push_back(solve_at(d, t, x1, seed));
    xs.push_back(x1);
    gaps.push_back(trs.back().b3 + d.nu);
    xcur = x1;
  }
  while (true) {
    if (trs.back().b1 - trs.back().b2 < 1e-6) break;
    if (gaps.back() < kWallSwitch) break;  // continue in the wall phase below
    RiemannTriple seed = trs.back();
    if (trs.size() >= 2) {
      const double hprev = xs[xs.size() - 1] - xs[xs.size() - 2];
      const double f = h / hprev;
      const RiemannTriple& p = trs[trs.size() - 2];
      seed.b1 += f * (seed.b1 - p.b1);
      seed.b2 += f * (seed.b2 - p.b2);
      seed.b3 += f * (seed.b3 - p.b3);
      if (!valid_triple(seed)) seed = trs.back();
    }
    bool accepted = false;
    try {
      RiemannTriple nxt = solve_at(d, t, xcur + h, seed);
      // guard against jumping past the far edge
      if (nxt.b1 - nxt.b2 > 0.0 && nxt.b2 - nxt.b3 > 0.0) {
        trs.push_back(nxt);
        xs.push_back(xcur + h);
        gaps.push_back(nxt.b3 + d.nu);
        xcur += h;
        accepted = true;
      }
    } catch (const std::exception&) {
    }
    if (accepted) {
      h *= 1.4;
    } else {
      h *= 0.35;
      if (h < 1e-12) break;
    }
  }

  // wall phase: b3 pinned exponentially close to -nu; march (b1, b2, log gap).
  // Either the remaining pair merges at representable gap, or the log gap
  // blows up at finite x (the pair gap then closes only like 1/sqrt(log gap))
  // and the march stops at kLogGapCap, beyond which the elliptic kernels
  // underflow anyway.
  constexpr double kLogGapCap = 250.0;
  if (!trs.empty() && gaps.back() < kWallSwitch &&
      trs.back().b1 - trs.back().b2 >= 1e-6) {
    h = std::min(h, 2e-3);
    while (true) {
      const size_t n = trs.size();
      if (trs[n - 1].b1 - trs[n - 1].b2 < 1e-6) break;
      if (-std::log(gaps[n - 1]) > kLogGapCap) break;
      double sb1 = trs[n - 1].b1, sb2 = trs[n - 1].b2;
      double sg = -std::log(gaps[n - 1]);
      if (n >= 2) {
        const double f = h / (xs[n - 1] - xs[n - 2]);
        sb1 += f * (trs[n - 1].b1 - trs[n - 2].b1);
        sb2 += f * (trs[n - 1].b2 - trs[n - 2].b2);
        sg += f * (sg + std::log(gaps[n - 2]));
        if (!(sb1 < 0.0 && sb1 > sb2 && sg > 0.0)) {
          sb1 = trs[n - 1].b1;
          sb2 = trs[n - 1].b2;
          sg = -std::log(gaps[n - 1]);
        }
      }
      bool accepted = false;
      try {
        double gout = sg;
        RiemannTriple nxt = solve_wall(d, t, xcur + h, sb1, sb2, sg, &gout);
        if (nxt.b1 - nxt.b2 > 0.0) {
          trs.push_back(nxt);
          xs.push_back(xcur + h);
          gaps.push_back(std::exp(-gout));
          xcur += h;
          accepted = true;
        }
      } catch (const std::exception&) {
      }
      if (accepted) {
        h = std::min(h * 1.4, 0.05);
      } else {
        h *= 0.35;
        if (h < 1e-12) break;
      }
    }
  }
  if (xs.empty()) throw std::runtime_error("solve_zone: empty march");

  // far edge: merge reached on the march -> secant extrapolation of
  // b1 - b2 -> 0; otherwise the zone closes on the b3 = -nu boundary and the
  // touch system gives the edge directly
  double xplus = xs.back();
  if (trs.back().b1 - trs.back().b2 < 1e-6) {
    if (xs.size() >= 2) {
      const double g1 = trs[trs.size() - 2].b1 - trs[trs.size() - 2].b2;
      const double g2 = trs.back().b1 - trs.back().b2;
      if (g1 > g2)
        xplus = xs.back() + (xs.back() - xs[xs.size() - 2]) * g2 / (g1 - g2);
    }
  } else if (gaps.back() < kWallSwitch) {
    const WallTouch wt =
        wall_touch(d, t, 0.5 * (trs.back().b1 + trs.back().b2));
    xplus = wt.xplus;
    sol.wall_edge = true;
    sol.bstar = wt.b;
  }
  sol.xplus = xplus;

  // resample on a Chebyshev grid clustered at both edges, seeded from the march
  std::vector<double> xg;
  std::vector<RiemannTriple> tg;
  std::vector<double> gg;
  for (int j = 1; j < npts; ++j) {
    const double th = kPi * j / npts;
    const double xq = sol.xminus + (xplus - sol.xminus) * 0.5 * (1.0 - std::cos(th));
    if (xq <= xs.front()) continue;
    if (xq >= xs.back()) {
      // terminal sliver of a wall-closed zone: blend toward the limit values
      if (!sol.wall_edge || xq >= xplus) continue;
      const double w = (xq - xs.back()) / std::max(xplus - xs.back(), 1e-300);
      RiemannTriple r = trs.back();
      r.b1 += w * (sol.bstar - r.b1);
      r.b2 += w * (sol.bstar - r.b2);
      const double g0 = -std::log(gaps.back());
      const double glog = std::min(
          250.0, g0 * (xplus - xs.back()) / std::max(xplus - xq, 1e-300));
      r.b3 = -d.nu + std::exp(-glog);
      xg.push_back(xq);
      tg.push_back(r);
      gg.push_back(std::exp(-glog));
      continue;
    }
    const auto it = std::lower_bound(xs.begin(), xs.end(), xq);
    size_t i = it - xs.begin();
    if (i > 0 && (i == xs.size() || xs[i] - xq > xq - xs[i - 1])) --i;
    try {
      if (gaps[i] < kWallSwitch) {
        double gout = -std::log(gaps[i]);
        tg.push_back(solve_wall(d, t, xq, trs[i].b1, trs[i].b2, gout, &gout));
        gg.push_back(std::exp(-gout));
      } else {
        tg.push_back(solve_at(d, t, xq, trs[i]));
        gg.push_back(tg.back().b3 + d.nu);
      }
      xg.push_back(xq);
    } catch (const std::exception&) {
    }
  }
  sol.x = std::move(xg);
  sol.triples = std::move(tg);
  sol.gap = std::move(gg);
  if (sol.x.empty()) {
    sol.x = std::move(xs);
    sol.triples = std::move(trs);
    sol.gap = std::move(gaps);
  }
  return sol;
}

}  // namespace dsl::whitham
