#pragma once

#include <complex>
#include <functional>
#include <optional>
#include <vector>

#include "sqf/algebra.hpp"
#include "sqf/model.hpp"

namespace sqf::solver {

using cd = std::complex<double>;

// The triple (q, L, h) of the functional equation M = q (M o h) + L,
// evaluated through the alpha branch at z; s = z - alpha(z) is the
// companion kernel abscissa.
struct QLH {
  cd q, L, h, s;
  cd xi_minus, xi_plus;  // the pair at s reconstructed from alpha
};

struct SeriesOptions {
  double tol = 1e-13;  // relative term threshold
  int max_terms = 200;
};

struct SeriesEval {
  cd value{};
  int terms_used = 0;
  double last_term = 0;        // magnitude of the final term
  double remainder_bound = 0;  // geometric tail estimate
  bool converged = false;      // always true for real z; advisory for complex
};

QLH qlh(cd z, const model::SymmetricParams& p);

// z, h(z), ..., h^(k_max)(z). Throws SeriesError on domain escape.
std::vector<cd> iterate_h(cd z, int k_max, const model::SymmetricParams& p);

// M(z) = sum_k prod_{l<k} q(h^(l)(z)) * L(h^(k)(z)).
SeriesEval M_series(cd z, const model::SymmetricParams& p,
                    SeriesOptions opts = {});

// G evaluated through both branch routes. `value` is the route-B result,
// which remains valid down to the smallest singularity of G; route A is
// reported when its branch inversion is consistent and its series converged.
struct GEval {
  cd value{};
  std::optional<cd> route_a;
  std::optional<cd> route_b;
  double discrepancy = 0;  // |A-B| / (1+|value|) when both present
};

GEval G_of_s(cd s, const model::SymmetricParams& p, SeriesOptions opts = {});

// G(0) = M((lambda-2mu)/4).
cd G0(const model::SymmetricParams& p);

// J(s) = (lambda/2)(1-rho) s/(s+mu).
cd J_term(cd s, const model::SymmetricParams& p);

// H(s1,s2) = lambda mu (s2-s1) / (2(mu+s1)(mu+s2)) * M((s1+s2)/2).
// Antisymmetric under argument swap.
cd H_sym(cd s1, cd s2, const model::SymmetricParams& p);

// F0(s1,s2) = (J(s2) + H(s1,s2) - K2 G(s2)) / K1, the transform of the
// density on {0 < u1 < u2}. Throws PoleError at a non-removable K1 zero.
cd F0(cd s1, cd s2, const model::SymmetricParams& p);

// E[e^{-s U1}] = 1 - rho + F0(s,0) + G(s) + F0(0,s) + G(0).
// The removable points s = 0 and s = lambda/2 - mu are filled by local
// polynomial extrapolation.
cd F_marginal(cd s, const model::SymmetricParams& p);

// |M(z) - q(z) M(h(z)) - L(z)| / (1 + |M(z)|).
double residual_functional_eq(cd z, const model::SymmetricParams& p);

// Max residual of the kernel system (the balance identity and both coupled
// lines) rebuilt from computed F0, G, H, J, normalized by magnitude.
double kernel_system_residuals(cd s1, cd s2, const model::SymmetricParams& p);

// Cubic Lagrange interpolation through 4 points on the circle of radius d
// around s0, evaluated at `at` (default: the center). Fills removable
// singularities; exact for polynomials of degree <= 3.
cd extrapolate_removable(const std::function<cd(cd)>& f, cd s0, double d,
                         cd at);
cd extrapolate_removable(const std::function<cd(cd)>& f, cd s0, double d);

}  // namespace sqf::solver
