#pragma once

#include <string_view>

namespace sqf::model {

enum class Regime { Supercritical, Critical, Subcritical };

std::string_view regime_name(Regime r);

// Symmetric two-queue system: per-queue Poisson rate lambda/2, exponential
// service with rate mu at both queues. All derived constants are computed
// once at validation; instances are immutable value objects.
struct SymmetricParams {
  double lambda = 0;      // total arrival rate
  double mu = 0;          // service rate (mean service time 1/mu)
  double rho = 0;         // load lambda/mu
  double sigma0 = 0;      // -mu(1-rho), total-workload decay rate
  double zeta_minus = 0;  // branch points of D(s), zeta- < zeta+ < 0
  double zeta_plus = 0;
  double s_tilde = 0;     // abscissa of the smallest singularity of G
  double r_ratio = 0;     // lim q(z) as z -> +inf, in (0,1)
  Regime regime = Regime::Subcritical;
};

struct GeneralParams {
  double lambda1 = 0, lambda2 = 0;
  double mu1 = 0, mu2 = 0;
  double rho1 = 0, rho2 = 0, rho = 0;
};

// Relative tolerance for classifying rho == 1/2 as the critical regime.
inline constexpr double kCriticalTol = 1e-12;

// Throws ParamError on non-positive rates or rho >= 1.
SymmetricParams validate_symmetric(double lambda, double mu);

// Simulator-side parameters; asymmetric inputs are accepted here but have
// no analytic counterpart. Throws ParamError on invalid rates or rho >= 1.
GeneralParams validate_general(double lambda1, double lambda2, double mu1,
                               double mu2);

// The symmetric system seen as a GeneralParams (lambda split over two queues).
GeneralParams as_general(const SymmetricParams& p);

}  // namespace sqf::model
