#include "sqf/model.hpp"

#include <cmath>

#include "sqf/errors.hpp"

namespace sqf::model {

std::string_view regime_name(Regime r) {
  switch (r) {
    case Regime::Supercritical: return "Supercritical";
    case Regime::Critical: return "Critical";
    case Regime::Subcritical: return "Subcritical";
  }
  return "?";
}

SymmetricParams validate_symmetric(double lambda, double mu) {
  if (!(lambda > 0) || !std::isfinite(lambda))
    throw ParamError("lambda must be positive and finite");
  if (!(mu > 0) || !std::isfinite(mu))
    throw ParamError("mu must be positive and finite");
  if (lambda >= mu)
    throw ParamError("unstable: rho = lambda/mu >= 1");

  SymmetricParams p;
  p.lambda = lambda;
  p.mu = mu;
  p.rho = lambda / mu;
  p.sigma0 = -mu * (1.0 - p.rho);

  const double sl2 = std::sqrt(lambda / 2.0);
  const double sm = std::sqrt(mu);
  const double dp = (sm - sl2) * (sm - sl2);
  const double dm = (sm + sl2) * (sm + sl2);
  p.zeta_plus = -mu * dp / (lambda / 2.0 + dp);
  p.zeta_minus = -mu * dm / (lambda / 2.0 + dm);

  const double hyp = std::sqrt(lambda * lambda + mu * mu);
  p.r_ratio = (lambda + mu - hyp) / (lambda + mu + hyp);

  if (std::fabs(p.rho - 0.5) <= kCriticalTol * 0.5)
    p.regime = Regime::Critical;
  else if (p.rho > 0.5)
    p.regime = Regime::Supercritical;
  else
    p.regime = Regime::Subcritical;

  p.s_tilde = (p.rho >= 0.5) ? p.sigma0 : p.zeta_plus;
  return p;
}

GeneralParams validate_general(double lambda1, double lambda2, double mu1,
                               double mu2) {
  if (lambda1 < 0 || lambda2 < 0 || !std::isfinite(lambda1) ||
      !std::isfinite(lambda2))
    throw ParamError("arrival rates must be non-negative and finite");
  if (lambda1 + lambda2 <= 0)
    throw ParamError("at least one arrival rate must be positive");
  if (!(mu1 > 0) || !(mu2 > 0) || !std::isfinite(mu1) || !std::isfinite(mu2))
    throw ParamError("service rates must be positive and finite");

  GeneralParams g;
  g.lambda1 = lambda1;
  g.lambda2 = lambda2;
  g.mu1 = mu1;
  g.mu2 = mu2;
  g.rho1 = lambda1 / mu1;
  g.rho2 = lambda2 / mu2;
  g.rho = g.rho1 + g.rho2;
  if (g.rho >= 1.0)
    throw ParamError("unstable: rho1 + rho2 >= 1");
  return g;
}

GeneralParams as_general(const SymmetricParams& p) {
  return validate_general(p.lambda / 2.0, p.lambda / 2.0, p.mu, p.mu);
}

}  // namespace sqf::model
