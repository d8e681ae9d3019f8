#pragma once

#include <complex>

#include "sqf/model.hpp"

namespace sqf::metrics {

using cd = std::complex<double>;

// P(U1 > u) ~ prefactor * u^power * exp(rate * u).
struct TailLaw {
  model::Regime regime = model::Regime::Subcritical;
  double rate = 0;       // < 0
  double power = 0;      // exponent of u in the prefactor
  double prefactor = 0;  // > 0
};

enum class SingularityKind {
  SimplePole,
  AlgebraicOrderHalf,       // G - G(zeta+) ~ r+ sqrt(s - zeta+)
  AlgebraicOrderMinusHalf,  // ~ c (s - s0)^{-1/2}
};

struct SingularityReport {
  double location = 0;
  SingularityKind kind = SingularityKind::SimplePole;
  double leading_coeff = 0;
};

struct EmptyProb {
  double g0 = 0;       // G(0) = P(U1 > 0, U2 = 0)
  double p_empty = 0;  // P(U1 = 0) = 1 - rho + G(0)
};

EmptyProb empty_queue_probability(const model::SymmetricParams& p);

TailLaw sqf_tail_law(const model::SymmetricParams& p);

// Smallest-module singularity of G. Throws ParamError in the critical
// regime (handled by sqf_tail_law only).
SingularityReport g_singularity(const model::SymmetricParams& p);

// E[e^{-s Ubar1}], the workload transform of the low-priority queue under
// HoL. Throws near the cut or at s = xi+(s).
cd hol_transform(cd s, const model::SymmetricParams& p);

TailLaw hol_tail_law(const model::SymmetricParams& p);

// Empty probability of the high-priority queue: 1 - rho/2.
double hol_empty_prob(const model::SymmetricParams& p);

// Exact M/M/1 total-workload CCDF: P(U > u) = rho e^{sigma0 u}.
double mm1_total_ccdf(double u, const model::SymmetricParams& p);

// CCDF of the priority queue's own M/M/1 system (the HoL lower bound):
// P(Uund1 > u) = (rho/2) e^{-mu(1-rho/2) u}.
double hol_priority_ccdf(double u, const model::SymmetricParams& p);

// Evaluate the asymptotic law at u.
double tail_law_ccdf(const TailLaw& law, double u);

// Numeric leading-coefficient recovery by Richardson extrapolation along
// s_k = location + 10^{-k}, k = 2..6; used to cross-check closed forms.
double extrapolate_pole_residue(const model::SymmetricParams& p);
double extrapolate_sqrt_coefficient(const model::SymmetricParams& p);

// G evaluated exactly at the branch point zeta+ (where xi+ = xi- = a+).
double G_at_zeta_plus(const model::SymmetricParams& p);

}  // namespace sqf::metrics
