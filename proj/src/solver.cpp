#include "sqf/solver.hpp"

#include <cmath>
#include <functional>
#include <sstream>

#include "sqf/errors.hpp"

namespace sqf::solver {

namespace {

constexpr double kTiny = 1e-300;

bool small(cd v, double scale) { return std::abs(v) <= 1e-14 * scale; }

std::string cstr(cd z) {
  std::ostringstream os;
  os << z.real() << (z.imag() < 0 ? "-" : "+") << std::fabs(z.imag()) << "i";
  return os.str();
}

}  // namespace

QLH qlh(cd z, const model::SymmetricParams& p) {
  const auto roots = algebra::cubic_roots(z, p);
  const cd a = roots.alpha;
  const cd s = z - a;
  const cd xim = z + a;
  const double scale = std::max(1.0, std::abs(z));
  if (small(a, scale)) throw PoleError("qlh: alpha(z) vanished at z=" + cstr(z));
  if (small(xim, scale))
    throw PoleError("qlh: xi-(s) vanished at z=" + cstr(z));
  const cd C = 2.0 * (s + p.mu) * xim;
  if (small(C, scale * scale))
    throw PoleError("qlh: degenerate kernel point at z=" + cstr(z));
  const cd lm = p.lambda * p.mu;
  QLH out;
  out.s = s;
  out.xi_minus = xim;
  out.xi_plus = -lm * s / C;
  const cd CmLs = C - p.lambda * s;  // mu (C - lambda s) = mu^2 C (mu+xi+)/...
  if (small(CmLs, scale * scale))
    throw PoleError("qlh: mu + xi+(s) vanished at z=" + cstr(z));
  out.q = (p.mu + xim) * C / (p.mu * CmLs);
  const cd CpLM = C + lm;
  if (small(CpLM, scale * scale))
    throw PoleError("qlh: s = xi+(s), L pole at z=" + cstr(z));
  out.L = (1.0 - p.rho) * (p.mu + xim) * (lm * s + C * xim) /
          (p.mu * 2.0 * a * CpLM);
  out.h = 0.5 * s * (C - lm) / C;
  return out;
}

std::vector<cd> iterate_h(cd z, int k_max, const model::SymmetricParams& p) {
  std::vector<cd> orbit;
  orbit.reserve(static_cast<size_t>(k_max) + 1);
  orbit.push_back(z);
  for (int k = 0; k < k_max; ++k) {
    try {
      z = qlh(z, p).h;
    } catch (const Error& e) {
      throw SeriesError("iterate_h: orbit left the labelable domain at step " +
                        std::to_string(k + 1) + ": " + e.what());
    }
    orbit.push_back(z);
  }
  return orbit;
}

SeriesEval M_series(cd z, const model::SymmetricParams& p, SeriesOptions opts) {
  SeriesEval out;
  cd sum = 0.0, qprod = 1.0, zk = z;
  std::vector<std::pair<cd, double>> trail;  // orbit diagnostics
  for (int k = 0; k < opts.max_terms; ++k) {
    QLH t;
    try {
      t = qlh(zk, p);
    } catch (const Error& e) {
      throw SeriesError("M_series: orbit escape at term " + std::to_string(k) +
                        " (z=" + cstr(zk) + "): " + e.what());
    }
    const cd term = qprod * t.L;
    sum += term;
    out.terms_used = k + 1;
    out.last_term = std::abs(term);
    const double qmag = std::abs(qprod);
    if (k >= 1 && out.last_term <= opts.tol * (std::abs(sum) + kTiny) &&
        qmag < p.r_ratio + 0.1) {
      out.converged = true;
      break;
    }
    qprod *= t.q;
    zk = t.h;
    trail.emplace_back(zk, std::abs(qprod));
  }
  out.value = sum;
  // geometric tail estimate with the asymptotic ratio as a floor
  const double g = std::min(0.95, std::max(p.r_ratio, std::abs(qprod)));
  out.remainder_bound = out.last_term * g / (1.0 - g);
  if (!out.converged) {
    std::ostringstream os;
    os << "M_series: no convergence in " << opts.max_terms
       << " terms at z=" << cstr(z) << "; orbit tail:";
    const size_t first = trail.size() > 5 ? trail.size() - 5 : 0;
    for (size_t i = first; i < trail.size(); ++i)
      os << " (z=" << cstr(trail[i].first) << ", |q|=" << trail[i].second
         << ")";
    throw SeriesError(os.str());
  }
  return out;
}

GEval G_of_s(cd s, const model::SymmetricParams& p, SeriesOptions opts) {
  const auto xi = algebra::xi_pair(s, p);
  GEval out;
  const cd pre = p.lambda / (2.0 * (s + p.mu));

  // route B: z* = (s + xi+)/2, valid down to the smallest singularity
  {
    const cd den1 = s - xi.xi_plus;
    const cd den2 = p.mu + xi.xi_plus;
    if (std::abs(den1) <= 1e-14 * std::max(1.0, std::abs(s)))
      throw PoleError("G_of_s: s = xi+(s) (pole of G)");
    const cd zb = 0.5 * (s + xi.xi_plus);
    const auto m = M_series(zb, p, opts);
    out.route_b = pre * (s * (1.0 - p.rho) / den1 + p.mu / den2 * m.value);
  }
  // route A: z = (s + xi-)/2; only meaningful where the alpha-branch
  // inversion returns this same s
  try {
    const cd za = 0.5 * (s + xi.xi_minus);
    const auto roots = algebra::cubic_roots(za, p);
    if (std::abs(za - roots.alpha - s) <= 1e-8 * (1.0 + std::abs(s))) {
      const cd den1 = s - xi.xi_minus;
      const cd den2 = p.mu + xi.xi_minus;
      const auto m = M_series(za, p, opts);
      out.route_a = pre * (s * (1.0 - p.rho) / den1 + p.mu / den2 * m.value);
    }
  } catch (const Error&) {
    // branch inversion or series out of range: route A unavailable
  }
  out.value = *out.route_b;
  if (out.route_a)
    out.discrepancy =
        std::abs(*out.route_a - *out.route_b) / (1.0 + std::abs(out.value));
  return out;
}

cd G0(const model::SymmetricParams& p) {
  return M_series(cd((p.lambda - 2.0 * p.mu) / 4.0, 0.0), p).value;
}

cd J_term(cd s, const model::SymmetricParams& p) {
  return 0.5 * p.lambda * (1.0 - p.rho) * s / (s + p.mu);
}

cd H_sym(cd s1, cd s2, const model::SymmetricParams& p) {
  const cd d1 = p.mu + s1, d2 = p.mu + s2;
  if (std::abs(d1) <= 1e-14 * (1.0 + std::abs(s1)) ||
      std::abs(d2) <= 1e-14 * (1.0 + std::abs(s2)))
    throw PoleError("H_sym: argument at -mu");
  const auto m = M_series(0.5 * (s1 + s2), p);
  return p.lambda * p.mu * (s2 - s1) / (2.0 * d1 * d2) * m.value;
}

namespace {

// route-B evaluation only; the assembled transforms do not need the
// dual-route diagnostic on every call
cd G_value(cd s, const model::SymmetricParams& p) {
  if (std::abs(s) == 0.0) return G0(p);
  const auto xi = algebra::xi_pair(s, p);
  const cd den1 = s - xi.xi_plus;
  if (std::abs(den1) <= 1e-14 * std::max(1.0, std::abs(s)))
    throw PoleError("G: s = xi+(s) (pole of G)");
  const auto m = M_series(0.5 * (s + xi.xi_plus), p);
  return p.lambda / (2.0 * (s + p.mu)) *
         (s * (1.0 - p.rho) / den1 + p.mu / (p.mu + xi.xi_plus) * m.value);
}

cd F0_impl(cd s1, cd s2, const model::SymmetricParams& p) {
  const auto g = model::as_general(p);
  const cd k1 = algebra::kernel_K1(s1, s2, g);
  if (std::abs(k1) <= 1e-13 * (1.0 + std::abs(s1) + std::abs(s2)))
    throw PoleError("F0: on the zero set of K1");
  const cd k2 = algebra::kernel_K2(s1, s2, g);
  return (J_term(s2, p) + H_sym(s1, s2, p) - k2 * G_value(s2, p)) / k1;
}

}  // namespace

cd F0(cd s1, cd s2, const model::SymmetricParams& p) {
  // K1(., 0) has a removable zero at lambda/2 - mu (the numerator vanishes
  // there as well, by G(0) = M((lambda-2mu)/4)); patch by extrapolation
  const cd bad(p.lambda / 2.0 - p.mu, 0.0);
  constexpr double r = 1e-4;
  if (std::abs(s2) < 1e-14 && std::abs(s1 - bad) < r) {
    const auto f = [&](cd x) { return F0_impl(x, cd(0), p); };
    return extrapolate_removable(f, bad, r, s1);
  }
  return F0_impl(s1, s2, p);
}

cd extrapolate_removable(const std::function<cd(cd)>& f, cd s0, double d,
                         cd at) {
  // nodes s0 + d i^k; with w = (at-s0)/d the Lagrange basis reduces to
  // (w^4-1) / (4 w_k^3 (w - w_k))
  const cd nodes[4] = {s0 + cd(d, 0), s0 + cd(0, d), s0 - cd(d, 0),
                       s0 - cd(0, d)};
  const cd omega[4] = {cd(1, 0), cd(0, 1), cd(-1, 0), cd(0, -1)};
  const cd w = (at - s0) / d;
  cd acc = 0.0;
  for (int k = 0; k < 4; ++k) {
    if (std::abs(w - omega[k]) < 1e-12) return f(nodes[k]);
    const cd w3 = omega[k] * omega[k] * omega[k];
    acc += f(nodes[k]) * (w * w * w * w - 1.0) / (4.0 * w3 * (w - omega[k]));
  }
  return acc;
}

cd extrapolate_removable(const std::function<cd(cd)>& f, cd s0, double d) {
  return extrapolate_removable(f, s0, d, s0);
}

cd F_marginal(cd s, const model::SymmetricParams& p) {
  const auto eval = [&p](cd x) -> cd {
    return 1.0 - p.rho + F0(x, cd(0), p) + G_value(x, p) +
           F0(cd(0), x, p) + G0(p);
  };
  // both kernel factors K1(s,0) and K2(s,0) vanish at s = 0; the zero is
  // removable in the assembled transform
  const double r = std::min(1e-4, 0.25 * std::fabs(p.sigma0));
  if (std::abs(s) < r) return extrapolate_removable(eval, cd(0, 0), r, s);
  return eval(s);
}

double residual_functional_eq(cd z, const model::SymmetricParams& p) {
  const auto t = qlh(z, p);
  const auto mz = M_series(z, p);
  const auto mh = M_series(t.h, p);
  return std::abs(mz.value - t.q * mh.value - t.L) / (1.0 + std::abs(mz.value));
}

double kernel_system_residuals(cd s1, cd s2, const model::SymmetricParams& p) {
  const auto g = model::as_general(p);
  const cd K = algebra::kernel_K(s1, s2, g);
  const cd k1 = s1 - K, k2 = s2 - K;
  const cd g1 = G_value(s1, p), g2 = G_value(s2, p);
  const cd f12 = F0_impl(s1, s2, p), f21 = F0_impl(s2, s1, p);
  const cd h = H_sym(s1, s2, p);
  const double scale =
      1.0 + std::abs(k1) * (std::abs(f12) + std::abs(g1)) +
      std::abs(k2) * (std::abs(f21) + std::abs(g2)) + std::abs(K);
  // balance identity: K1 H1 + K2 H2 = (1-rho) K, H1 = F0(s1,s2)+G(s1), H2 mirrored
  const double r_fonct =
      std::abs(k1 * (f12 + g1) + k2 * (f21 + g2) - (1.0 - p.rho) * K) / scale;
  // coupled system, both lines
  const double r_line1 =
      std::abs(k1 * f12 + k2 * g2 - J_term(s2, p) - h) / scale;
  const double r_line2 =
      std::abs(k2 * f21 + k1 * g1 - J_term(s1, p) + h) / scale;
  return std::max({r_fonct, r_line1, r_line2});
}

}  // namespace sqf::solver
