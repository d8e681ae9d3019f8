#include "sqf/metrics.hpp"

#include <cmath>

#include "sqf/algebra.hpp"
#include "sqf/errors.hpp"
#include "sqf/solver.hpp"

namespace sqf::metrics {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

struct SubcriticalConstants {
  double a_plus;   // -mu + sqrt(lambda mu / 2)
  double z_plus;   // (zeta+ + a+)/2
  double E0;       // sqrt((lambda^2+mu^2)(zeta+ - zeta-)) / (2(mu+zeta+))
  double M_zplus;  // M(z+)
  double dM_zplus; // M'(z+)
};

SubcriticalConstants subcritical_constants(const model::SymmetricParams& p) {
  SubcriticalConstants c;
  c.a_plus = -p.mu + std::sqrt(p.lambda * p.mu / 2.0);
  c.z_plus = 0.5 * (p.zeta_plus + c.a_plus);
  const double D0 = p.lambda * p.lambda + p.mu * p.mu;
  c.E0 = std::sqrt(D0 * (p.zeta_plus - p.zeta_minus)) /
         (2.0 * (p.mu + p.zeta_plus));
  c.M_zplus = solver::M_series(cd(c.z_plus, 0), p).value.real();
  // central difference; M is analytic at z+ with eta1 strictly below
  const double h = 1e-6 * std::max(1.0, std::fabs(c.z_plus));
  const double mp = solver::M_series(cd(c.z_plus + h, 0), p).value.real();
  const double mm = solver::M_series(cd(c.z_plus - h, 0), p).value.real();
  c.dM_zplus = (mp - mm) / (2.0 * h);
  return c;
}

// Coefficient of sqrt(s - zeta+) in G near the branch point. The expansion
// of G through the xi+ representation carries three first-order pieces:
// the two explicit xi+ variations and the variation of the M argument
// (s + xi+(s))/2, whose derivative contributes mu M'(z+)/(2(mu+a+)).
double r_plus(const model::SymmetricParams& p) {
  const auto c = subcritical_constants(p);
  const double za = p.zeta_plus;
  const double bracket = za * (1.0 - p.rho) / ((za - c.a_plus) * (za - c.a_plus)) -
                         p.mu * c.M_zplus / ((p.mu + c.a_plus) * (p.mu + c.a_plus)) +
                         p.mu * c.dM_zplus / (2.0 * (p.mu + c.a_plus));
  return p.lambda * c.E0 / (2.0 * (za + p.mu)) * bracket;
}

}  // namespace

EmptyProb empty_queue_probability(const model::SymmetricParams& p) {
  EmptyProb out;
  out.g0 = solver::G0(p).real();
  out.p_empty = 1.0 - p.rho + out.g0;
  return out;
}

TailLaw sqf_tail_law(const model::SymmetricParams& p) {
  TailLaw law;
  law.regime = p.regime;
  switch (p.regime) {
    case model::Regime::Supercritical:
      law.rate = p.sigma0;
      law.power = 0.0;
      law.prefactor = p.rho - 0.5;
      break;
    case model::Regime::Critical:
      law.rate = -p.mu / 2.0;
      law.power = -0.5;
      law.prefactor = 1.0 / std::sqrt(2.0 * kPi * p.mu);
      break;
    case model::Regime::Subcritical: {
      const double rp = r_plus(p);
      law.rate = p.zeta_plus;
      law.power = -1.5;
      law.prefactor =
          (p.zeta_plus + p.mu) * rp / (p.zeta_plus * p.lambda * std::sqrt(kPi));
      break;
    }
  }
  return law;
}

SingularityReport g_singularity(const model::SymmetricParams& p) {
  if (p.regime == model::Regime::Critical)
    throw ParamError("g_singularity: critical regime has no isolated "
                     "pole/sqrt split; use sqf_tail_law");
  SingularityReport rep;
  if (p.regime == model::Regime::Supercritical) {
    rep.location = p.sigma0;
    rep.kind = SingularityKind::SimplePole;
    rep.leading_coeff = p.mu * (1.0 - p.rho) * (2.0 * p.rho - 1.0) / 4.0;
  } else {
    rep.location = p.zeta_plus;
    rep.kind = SingularityKind::AlgebraicOrderHalf;
    rep.leading_coeff = r_plus(p);
  }
  return rep;
}

cd hol_transform(cd s, const model::SymmetricParams& p) {
  const auto xi = algebra::xi_pair(s, p);
  const cd den = s - xi.xi_plus;
  if (std::abs(den) <= 1e-13 * (1.0 + std::abs(s)))
    throw PoleError("hol_transform: s = xi+(s)");
  // 1 - b(s) = s/(s+mu); the explicit s cancels
  return 2.0 * (1.0 - p.rho) * (s + p.mu) * xi.xi_plus / (p.lambda * den);
}

TailLaw hol_tail_law(const model::SymmetricParams& p) {
  TailLaw law;
  law.regime = p.regime;
  switch (p.regime) {
    case model::Regime::Supercritical:
      // simple pole of the transform at sigma0 with residue -(2 rho - 1) sigma0
      law.rate = p.sigma0;
      law.power = 0.0;
      law.prefactor = 2.0 * p.rho - 1.0;
      break;
    case model::Regime::Critical:
      law.rate = -p.mu / 2.0;
      law.power = -0.5;
      law.prefactor = std::sqrt(2.0 / (kPi * p.mu));
      break;
    case model::Regime::Subcritical: {
      // xi+ = a+ + E0 sqrt(s-zeta+): transfer through (1-E[e^{-sU}])/s
      const double ap = -p.mu + std::sqrt(p.lambda * p.mu / 2.0);
      const double D0 = p.lambda * p.lambda + p.mu * p.mu;
      const double E0 = std::sqrt(D0 * (p.zeta_plus - p.zeta_minus)) /
                        (2.0 * (p.mu + p.zeta_plus));
      const double c = 2.0 * (1.0 - p.rho) * (p.zeta_plus + p.mu) * E0 *
                       p.zeta_plus /
                       (p.lambda * (p.zeta_plus - ap) * (p.zeta_plus - ap));
      law.rate = p.zeta_plus;
      law.power = -1.5;
      law.prefactor = c / (2.0 * std::sqrt(kPi) * p.zeta_plus);
      break;
    }
  }
  return law;
}

double hol_empty_prob(const model::SymmetricParams& p) {
  return 1.0 - p.rho / 2.0;
}

double mm1_total_ccdf(double u, const model::SymmetricParams& p) {
  if (u < 0) throw ParamError("mm1_total_ccdf: u must be >= 0");
  return p.rho * std::exp(p.sigma0 * u);
}

double hol_priority_ccdf(double u, const model::SymmetricParams& p) {
  if (u < 0) throw ParamError("hol_priority_ccdf: u must be >= 0");
  return (p.rho / 2.0) * std::exp(-p.mu * (1.0 - p.rho / 2.0) * u);
}

double tail_law_ccdf(const TailLaw& law, double u) {
  if (!(u > 0)) throw ParamError("tail_law_ccdf: u must be > 0");
  return law.prefactor * std::pow(u, law.power) * std::exp(law.rate * u);
}

double G_at_zeta_plus(const model::SymmetricParams& p) {
  // at the branch point xi+ = xi- = a+, so route B applies directly
  const double ap = -p.mu + std::sqrt(p.lambda * p.mu / 2.0);
  const double zb = 0.5 * (p.zeta_plus + ap);
  const double m = solver::M_series(cd(zb, 0), p).value.real();
  return p.lambda / (2.0 * (p.zeta_plus + p.mu)) *
         (p.zeta_plus * (1.0 - p.rho) / (p.zeta_plus - ap) +
          p.mu / (p.mu + ap) * m);
}

double extrapolate_pole_residue(const model::SymmetricParams& p) {
  if (p.regime != model::Regime::Supercritical)
    throw ParamError("extrapolate_pole_residue: needs rho > 1/2");
  // f(s) = (s - sigma0) G(s) is analytic at sigma0; Richardson in 10^{-k}
  double f[5];
  for (int k = 2; k <= 6; ++k) {
    const double s = p.sigma0 + std::pow(10.0, -k);
    f[k - 2] = ((s - p.sigma0) * solver::G_of_s(cd(s, 0), p).value).real();
  }
  // eliminate successive powers of 10^{-k}
  for (int lvl = 1; lvl < 5; ++lvl) {
    const double w = std::pow(10.0, lvl);
    for (int i = 4; i >= lvl; --i) f[i] = (w * f[i] - f[i - 1]) / (w - 1.0);
  }
  return f[4];
}

double extrapolate_sqrt_coefficient(const model::SymmetricParams& p) {
  if (p.regime != model::Regime::Subcritical)
    throw ParamError("extrapolate_sqrt_coefficient: needs rho < 1/2");
  const double gz = G_at_zeta_plus(p);
  // g(s) = (G - G(zeta+))/sqrt(s - zeta+) = r+ + c 10^{-k/2} + d 10^{-k} + ...
  double f[5];
  for (int k = 2; k <= 6; ++k) {
    const double s = p.zeta_plus + std::pow(10.0, -k);
    const double g = solver::G_of_s(cd(s, 0), p).value.real();
    f[k - 2] = (g - gz) / std::sqrt(s - p.zeta_plus);
  }
  for (int lvl = 1; lvl < 5; ++lvl) {
    const double w = std::pow(10.0, 0.5 * lvl);
    for (int i = 4; i >= lvl; --i) f[i] = (w * f[i] - f[i - 1]) / (w - 1.0);
  }
  return f[4];
}

}  // namespace sqf::metrics
