#include "sqf/algebra.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "sqf/errors.hpp"

namespace sqf::algebra {

namespace {

constexpr double kCutTol = 1e-12;

double dist_to_real_segment(cd z, double a, double b) {
  // distance from z to the segment [a, b] on the real axis, a <= b
  const double x = z.real(), y = z.imag();
  const double t = std::clamp(x, a, b);
  return std::hypot(x - t, y);
}

cd B_coeff(cd s, const model::SymmetricParams& p) {
  return (p.mu * p.mu - p.lambda * p.mu / 2.0) + (p.mu - p.lambda) * s;
}

// Analytic continuation E of sqrt(D): principal sqrt with the sign flipped
// left of the vertical line Re(s) = (zeta- + zeta+)/2.
cd sqrtD_continued(cd s, const model::SymmetricParams& p) {
  const double mid = 0.5 * (p.zeta_minus + p.zeta_plus);
  const cd sq = std::sqrt(disc_D(s, p));
  return (s.real() >= mid) ? sq : -sq;
}

// ---- cubic solving -------------------------------------------------------

struct CubicCoeffs {
  // w^3 + c2 w^2 + c1 w + c0
  cd c2, c1, c0;
};

CubicCoeffs coeffs_at(cd z, const model::SymmetricParams& p) {
  const cd zm = z + p.mu;
  return {-(p.lambda - z), -zm * zm, -z * zm * (zm - p.lambda)};
}

cd eval_cubic(const CubicCoeffs& c, cd w) {
  return ((w + c.c2) * w + c.c1) * w + c.c0;
}

cd eval_cubic_d(const CubicCoeffs& c, cd w) {
  return (3.0 * w + 2.0 * c.c2) * w + c.c1;
}

void polish(const CubicCoeffs& c, cd& w) {
  for (int i = 0; i < 2; ++i) {
    const cd d = eval_cubic_d(c, w);
    if (std::abs(d) == 0.0) return;
    w -= eval_cubic(c, w) / d;
  }
}

double residual_scale(const CubicCoeffs& c, cd w) {
  const double aw = std::abs(w);
  return std::max({aw * aw * aw, std::abs(c.c2) * aw * aw,
                   std::abs(c.c1) * aw, std::abs(c.c0), 1e-300});
}

std::array<cd, 3> solve_cubic(const CubicCoeffs& c) {
  // depressed form t^3 + p t + q, w = t - c2/3
  const cd sh = c.c2 / 3.0;
  const cd pp = c.c1 - c.c2 * c.c2 / 3.0;
  const cd qq = 2.0 * c.c2 * c.c2 * c.c2 / 27.0 - c.c1 * c.c2 / 3.0 + c.c0;
  const cd core = std::sqrt(qq * qq / 4.0 + pp * pp * pp / 27.0);
  // pick the sign avoiding cancellation in -q/2 +- core
  cd rhs = -qq / 2.0 + core;
  if (std::abs(-qq / 2.0 - core) > std::abs(rhs)) rhs = -qq / 2.0 - core;
  std::array<cd, 3> t;
  if (std::abs(rhs) == 0.0) {
    // p ~ 0 as well; triple root of the depressed cubic
    t = {cd(0), cd(0), cd(0)};
  } else {
    const cd u = std::pow(rhs, 1.0 / 3.0);
    const cd v = -pp / (3.0 * u);
    const cd w1(-0.5, std::sqrt(3.0) / 2.0);   // exp(2 pi i/3)
    const cd w2(-0.5, -std::sqrt(3.0) / 2.0);  // exp(-2 pi i/3)
    t = {u + v, w1 * u + w2 * v, w2 * u + w1 * v};
  }
  std::array<cd, 3> w;
  for (int i = 0; i < 3; ++i) {
    w[i] = t[i] - sh;
    polish(c, w[i]);
  }
  return w;
}

// three real roots, ascending; valid when the discriminant is positive
std::array<double, 3> solve_cubic_real3(const CubicCoeffs& c) {
  const double c2 = c.c2.real(), c1 = c.c1.real(), c0 = c.c0.real();
  const double sh = c2 / 3.0;
  const double pp = c1 - c2 * c2 / 3.0;
  const double qq = 2.0 * c2 * c2 * c2 / 27.0 - c1 * c2 / 3.0 + c0;
  // three distinct real roots requires pp < 0
  const double m = 2.0 * std::sqrt(std::max(-pp / 3.0, 0.0));
  double arg = (pp == 0.0) ? 0.0 : 3.0 * qq / (pp * m);
  arg = std::clamp(arg, -1.0, 1.0);
  const double theta = std::acos(arg) / 3.0;
  constexpr double two_pi_3 = 2.0943951023931953;
  std::array<double, 3> w = {m * std::cos(theta) - sh,
                             m * std::cos(theta - two_pi_3) - sh,
                             m * std::cos(theta + two_pi_3) - sh};
  std::sort(w.begin(), w.end());
  for (double& x : w) {
    for (int i = 0; i < 2; ++i) {
      const double d = (3.0 * x + 2.0 * c2) * x + c1;
      if (d == 0.0) break;
      x -= (((x + c2) * x + c1) * x + c0) / d;
    }
  }
  return w;
}

double min_gap(const std::array<cd, 3>& r) {
  return std::min({std::abs(r[0] - r[1]), std::abs(r[0] - r[2]),
                   std::abs(r[1] - r[2])});
}

// match new roots to the previous triple, minimizing the total move
std::array<cd, 3> match_roots(const std::array<cd, 3>& prev,
                              const std::array<cd, 3>& fresh) {
  static constexpr int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2},
                                      {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
  double best = std::numeric_limits<double>::infinity();
  int pick = 0;
  for (int k = 0; k < 6; ++k) {
    double tot = 0;
    for (int i = 0; i < 3; ++i) tot += std::abs(fresh[perms[k][i]] - prev[i]);
    if (tot < best) {
      best = tot;
      pick = k;
    }
  }
  return {fresh[perms[pick][0]], fresh[perms[pick][1]], fresh[perms[pick][2]]};
}

CubicRoots labeled_real(double z, const model::SymmetricParams& p) {
  const auto c = coeffs_at(cd(z, 0), p);
  const auto w = solve_cubic_real3(c);
  CubicRoots out;
  out.alpha = w[0];
  out.beta = w[1];
  out.gamma = w[2];
  out.at = cd(z, 0);
  double res = 0;
  for (double wi : w)
    res = std::max(res, std::abs(eval_cubic(c, wi)) / residual_scale(c, wi));
  out.max_residual = res;
  return out;
}

}  // namespace

cd kernel_K(cd s1, cd s2, const model::GeneralParams& g) {
  if (std::abs(s1 + g.mu1) < 1e-14 * (1.0 + std::abs(s1)))
    throw PoleError("kernel_K: s1 at the LST pole -mu1");
  if (std::abs(s2 + g.mu2) < 1e-14 * (1.0 + std::abs(s2)))
    throw PoleError("kernel_K: s2 at the LST pole -mu2");
  const cd b1 = g.mu1 / (s1 + g.mu1);
  const cd b2 = g.mu2 / (s2 + g.mu2);
  return (g.lambda1 + g.lambda2) - g.lambda1 * b1 - g.lambda2 * b2;
}

cd kernel_K1(cd s1, cd s2, const model::GeneralParams& g) {
  return s1 - kernel_K(s1, s2, g);
}

cd kernel_K2(cd s1, cd s2, const model::GeneralParams& g) {
  return s2 - kernel_K(s1, s2, g);
}

cd disc_D(cd s, const model::SymmetricParams& p) {
  const cd b = B_coeff(s, p);
  return b * b + 2.0 * p.lambda * p.mu * s * (p.mu + s);
}

XiPair xi_pair(cd s, const model::SymmetricParams& p) {
  const double scale = std::max(1.0, std::abs(s));
  if (dist_to_real_segment(s, p.zeta_minus, p.zeta_plus) <= kCutTol * scale)
    throw CutError("xi_pair: s on the cut [zeta-, zeta+]");
  if (std::abs(s + p.mu) <= kCutTol * scale)
    throw PoleError("xi_pair: s = -mu is a pole of xi+");

  const cd b = B_coeff(s, p);
  const cd e = sqrtD_continued(s, p);
  const cd den = 2.0 * (s + p.mu);
  const cd num_p = -b + e;
  const cd num_m = -b - e;
  // product of the roots: -(lambda mu/2) s / (s+mu)
  const cd prod = -(p.lambda * p.mu / 2.0) * s / (s + p.mu);
  XiPair out;
  out.at = s;
  out.disc = disc_D(s, p);
  if (std::abs(num_p) >= std::abs(num_m)) {
    out.xi_plus = num_p / den;
    out.xi_minus = (std::abs(out.xi_plus) == 0.0) ? num_m / den
                                                  : prod / out.xi_plus;
  } else {
    out.xi_minus = num_m / den;
    out.xi_plus = (std::abs(out.xi_minus) == 0.0) ? num_p / den
                                                  : prod / out.xi_minus;
  }
  return out;
}

cd cubic_R(cd w, cd z, const model::SymmetricParams& p) {
  return eval_cubic(coeffs_at(z, p), w);
}

CubicRoots cubic_roots(cd z, const model::SymmetricParams& p) {
  const double e1 = eta1(p);
  const double scale = std::max(1.0, std::abs(z));
  if (dist_to_real_segment(z, -p.mu, e1) <= kCutTol * scale)
    throw CutError("cubic_roots: z on the cut [-mu, eta1]");

  if (z.imag() == 0.0 && z.real() > e1) return labeled_real(z.real(), p);
  if (z.imag() == 0.0)
    throw ContinuationError(
        "cubic_roots: real z left of eta1 is not reachable from the anchor");

  // track the triple from a real anchor along the straight segment
  const double za = std::max(1.0, std::abs(z));
  CubicRoots anchor = labeled_real(za, p);
  std::array<cd, 3> cur = {anchor.alpha, anchor.beta, anchor.gamma};
  const cd z0(za, 0.0);
  double t = 0.0, dt = 0.5;
  int halvings = 0;
  while (t < 1.0) {
    const double tn = std::min(1.0, t + dt);
    const cd zt = z0 + (z - z0) * tn;
    const auto c = coeffs_at(zt, p);
    const auto fresh = solve_cubic(c);
    const auto matched = match_roots(cur, fresh);
    const double gap = min_gap(cur);
    double move = 0;
    for (int i = 0; i < 3; ++i) move = std::max(move, std::abs(matched[i] - cur[i]));
    // uniqueness of the assignment: each root must be closer to its own
    // predictor than to any other
    bool unambiguous = true;
    for (int i = 0; i < 3 && unambiguous; ++i)
      for (int j = 0; j < 3; ++j)
        if (j != i && std::abs(matched[i] - cur[i]) >= std::abs(matched[i] - cur[j]))
          unambiguous = false;
    if (move < gap / 3.0 && unambiguous) {
      cur = matched;
      t = tn;
      dt = std::min(2.0 * dt, 1.0 - t + 1e-16);
      halvings = 0;
    } else {
      dt /= 2.0;
      if (++halvings > 48)
        throw ContinuationError("cubic_roots: step control collapsed near " +
                                std::to_string(zt.real()) + "+" +
                                std::to_string(zt.imag()) + "i");
    }
  }
  const auto c = coeffs_at(z, p);
  CubicRoots out;
  out.alpha = cur[0];
  out.beta = cur[1];
  out.gamma = cur[2];
  out.at = z;
  double res = 0;
  for (const cd& w : cur)
    res = std::max(res, std::abs(eval_cubic(c, w)) / residual_scale(c, w));
  out.max_residual = res;
  return out;
}

cd delta_poly(cd z, const model::SymmetricParams& p) {
  const double l = p.lambda, m = p.mu;
  const double c3 = 16 * (l * l + m * m);
  const double c2 = -(16 * l * l * l - 24 * l * l * m + 24 * l * m * m -
                      32 * m * m * m);
  const double c1 = 4 * l * l * l * l - 4 * l * l * l * m +
                    21 * l * l * m * m - 20 * l * m * m * m +
                    20 * m * m * m * m;
  const double c0 = l * l * m * m * m + 4 * m * m * m * m * m;
  return ((c3 * z + c2) * z + c1) * z + c0;
}

cd discriminant(cd z, const model::SymmetricParams& p) {
  return (z + p.mu) * delta_poly(z, p);
}

double eta1(const model::SymmetricParams& p) {
  // delta(0) > 0 and delta(-mu) < 0; bisect, then polish with Newton
  double a = -p.mu, b = 0.0;
  double fa = delta_poly(a, p).real();
  for (int i = 0; i < 200 && (b - a) > 1e-17 * p.mu; ++i) {
    const double m = 0.5 * (a + b);
    const double fm = delta_poly(m, p).real();
    if (fm == 0.0) return m;
    if ((fm < 0) == (fa < 0)) {
      a = m;
      fa = fm;
    } else {
      b = m;
    }
  }
  double x = 0.5 * (a + b);
  for (int i = 0; i < 3; ++i) {
    const double h = 1e-7 * p.mu;
    const double d = (delta_poly(x + h, p).real() -
                      delta_poly(x - h, p).real()) / (2 * h);
    if (d == 0.0) break;
    x -= delta_poly(x, p).real() / d;
  }
  return x;
}

Ramification ramification_points(const model::SymmetricParams& p) {
  Ramification out;
  out.eta2 = -p.mu;
  out.eta1 = eta1(p);
  // deflate delta by (z - eta1): remaining quadratic c3 z^2 + b z + c
  const double l = p.lambda, m = p.mu;
  const double c3 = 16 * (l * l + m * m);
  const double c2 = -(16 * l * l * l - 24 * l * l * m + 24 * l * m * m -
                      32 * m * m * m);
  const double c1 = 4 * l * l * l * l - 4 * l * l * l * m +
                    21 * l * l * m * m - 20 * l * m * m * m +
                    20 * m * m * m * m;
  const double b = c2 + c3 * out.eta1;
  const double c = c1 + b * out.eta1;
  const double disc = b * b - 4 * c3 * c;
  if (disc >= 0)
    throw ContinuationError(
        "ramification_points: deflated quadratic has real roots");
  const double re = -b / (2 * c3);
  const double im = std::sqrt(-disc) / (2 * c3);
  out.eta3 = cd(re, im);
  out.eta4 = cd(re, -im);
  return out;
}

}  // namespace sqf::algebra
