#pragma once

#include <complex>

#include "sqf/model.hpp"

namespace sqf::algebra {

using cd = std::complex<double>;

// Roots xi-+(s) of the kernel fixed-point quadratic
//   (s+mu) xi^2 + (mu^2 - lambda mu/2 + (mu-lambda) s) xi - (lambda mu/2) s = 0
// with the branch assignment that makes xi_minus analytic and xi_plus
// meromorphic (pole at -mu) on the plane cut along [zeta-, zeta+].
struct XiPair {
  cd xi_minus;
  cd xi_plus;
  cd at;    // the argument s
  cd disc;  // D(s)
};

// Branch triple of R(w,z) = 0. For real z > eta1 the labels follow the
// ordering alpha < -z <= beta <= 0 < gamma; for complex z they are assigned
// by root tracking from a real anchor, so alpha is the analytic branch on
// the plane cut along [-mu, eta1].
struct CubicRoots {
  cd alpha;
  cd beta;
  cd gamma;
  cd at;  // the argument z
  double max_residual = 0;
};

// Roots of the cubic discriminant Delta(z) = (z+mu) delta(z).
struct Ramification {
  double eta1 = 0;  // real root of delta, in (-mu, 0)
  double eta2 = 0;  // -mu, exact
  cd eta3, eta4;    // complex conjugate pair, Im(eta3) > 0
};

// Kernel K(s1,s2) = lambda - lambda1 b1(s1) - lambda2 b2(s2) with
// exponential service LSTs b_i(s) = mu_i/(s+mu_i). Throws PoleError at
// s_i = -mu_i.
cd kernel_K(cd s1, cd s2, const model::GeneralParams& g);
cd kernel_K1(cd s1, cd s2, const model::GeneralParams& g);  // s1 - K
cd kernel_K2(cd s1, cd s2, const model::GeneralParams& g);  // s2 - K

// Quadratic discriminant D(s) = (mu^2-lambda mu/2+(mu-lambda)s)^2
//                               + 2 lambda mu s (mu+s).
cd disc_D(cd s, const model::SymmetricParams& p);

// Throws CutError within 1e-12 relative of the segment [zeta-, zeta+]
// and PoleError at s = -mu.
XiPair xi_pair(cd s, const model::SymmetricParams& p);

// R(w,z) = w^3 - (lambda-z) w^2 - (z+mu)^2 w - z (z+mu)(z+mu-lambda).
cd cubic_R(cd w, cd z, const model::SymmetricParams& p);

// Throws CutError near [-mu, eta1]; ContinuationError when tracking from
// the real anchor cannot certify the labels.
CubicRoots cubic_roots(cd z, const model::SymmetricParams& p);

// Delta(z) = (z+mu) delta(z), the discriminant of R(.,z).
cd discriminant(cd z, const model::SymmetricParams& p);
cd delta_poly(cd z, const model::SymmetricParams& p);

Ramification ramification_points(const model::SymmetricParams& p);

// Largest real ramification point of delta; cached nowhere, cheap to call.
double eta1(const model::SymmetricParams& p);

}  // namespace sqf::algebra
