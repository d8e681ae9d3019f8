#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "sqf/algebra.hpp"
#include "sqf/errors.hpp"
#include "sqf/model.hpp"

using namespace sqf;
using algebra::cd;

namespace {

const auto P12 = model::validate_symmetric(1.2, 2.0);
const auto P18 = model::validate_symmetric(1.8, 2.0);
const auto P06 = model::validate_symmetric(0.6, 2.0);

// deterministic uniform sampler for property-style checks
struct Lcg {
  std::uint64_t s = 0x853c49e6748fea9bULL;
  double next() {
    s = s * 6364136223846793005ULL + 1442695040888963407ULL;
    return static_cast<double>(s >> 11) * 0x1.0p-53;
  }
  double in(double a, double b) { return a + (b - a) * next(); }
};

// independent oracle: bracket the three real roots of R(., z) on a dense
// w-grid and bisect each bracket
std::vector<double> bracket_roots(double z, const model::SymmetricParams& p) {
  const auto f = [&](double w) { return algebra::cubic_R(w, z, p).real(); };
  const double lo = -(std::fabs(z) + p.mu + p.lambda + 10.0);
  const double hi = -lo;
  const int n = 20000;
  std::vector<double> roots;
  double prev = f(lo);
  for (int i = 1; i <= n && roots.size() < 3; ++i) {
    const double w = lo + (hi - lo) * i / n;
    const double cur = f(w);
    if ((prev < 0) != (cur < 0)) {
      double a = lo + (hi - lo) * (i - 1) / n, b = w;
      double fa = prev;
      for (int k = 0; k < 200; ++k) {
        const double m = 0.5 * (a + b);
        const double fm = f(m);
        if ((fm < 0) == (fa < 0)) {
          a = m;
          fa = fm;
        } else {
          b = m;
        }
      }
      roots.push_back(0.5 * (a + b));
    }
    prev = cur;
  }
  return roots;
}

}  // namespace

TEST_CASE("kernel K: basic identities") {
  auto g = model::validate_general(0.6, 0.6, 2, 2);
  CHECK(std::abs(algebra::kernel_K(0, 0, g)) < 1e-15);
  // fixed point s = K(s,s) at sigma0 = -0.8 for lambda=1.2
  CHECK(algebra::kernel_K(-0.8, -0.8, g).real() == doctest::Approx(-0.8).epsilon(1e-13));
  // b1 vanishes at infinity
  auto far = algebra::kernel_K(1e9, 0.7, g);
  const cd want = (g.lambda1 + g.lambda2) - g.lambda2 * (g.mu2 / (0.7 + g.mu2));
  CHECK(std::abs(far - want) < 1e-7);
  CHECK_THROWS_AS(algebra::kernel_K(-2.0, 0.0, g), PoleError);

  auto ga = model::validate_general(0.5, 0.4, 2, 1);
  // K1 + K2 = s1 + s2 - 2K
  const cd k = algebra::kernel_K(1.0, 2.0, ga);
  CHECK(std::abs(algebra::kernel_K1(1.0, 2.0, ga) +
                 algebra::kernel_K2(1.0, 2.0, ga) - (3.0 - 2.0 * k)) < 1e-15);
}

TEST_CASE("xi_pair: anchor values and limits") {
  auto xi = algebra::xi_pair(1e-30, P12);
  CHECK(std::abs(xi.xi_plus) < 1e-15);
  CHECK(xi.xi_minus.real() == doctest::Approx(1.2 / 2 - 2.0).epsilon(1e-14));

  // s -> +inf limits (lambda - mu +- sqrt(lambda^2+mu^2))/2
  xi = algebra::xi_pair(1e6, P12);
  CHECK(xi.xi_plus.real() == doctest::Approx(0.766190378969060061).epsilon(1e-5));
  CHECK(xi.xi_minus.real() == doctest::Approx(-1.5661903789690601).epsilon(1e-5));

  // rho > 1/2: the non-zero fixed point sits on the xi+ branch
  xi = algebra::xi_pair(P18.sigma0, P18);
  CHECK(xi.xi_plus.real() == doctest::Approx(P18.sigma0).epsilon(1e-13));

  // positive branch for s > 0
  for (double s : {0.1, 1.0, 7.0}) CHECK(algebra::xi_pair(s, P12).xi_plus.real() > 0);
}

TEST_CASE("xi_pair: quadratic residual and Vieta, random complex points") {
  Lcg rng;
  for (int i = 0; i < 300; ++i) {
    const cd s(rng.in(-4, 6), rng.in(-5, 5));
    if (std::abs(s.imag()) < 0.05) continue;  // keep clear of both cuts
    const auto xi = algebra::xi_pair(s, P12);
    const cd B = (4.0 - 1.2) + (2.0 - 1.2) * s;
    for (cd root : {xi.xi_minus, xi.xi_plus}) {
      const cd res = (s + 2.0) * root * root + B * root - 1.2 * s;
      const double scale = std::abs((s + 2.0) * root * root) +
                           std::abs(B * root) + std::abs(1.2 * s) + 1.0;
      CHECK(std::abs(res) / scale < 1e-12);
    }
    // sum and product against the coefficient ratios
    CHECK(std::abs(xi.xi_plus + xi.xi_minus + B / (s + 2.0)) / (1.0 + std::abs(B)) < 1e-12);
    CHECK(std::abs(xi.xi_plus * xi.xi_minus + 1.2 * s / (s + 2.0)) < 1e-10);
    // xi+ xi- (s+mu) = -lambda mu s / 2
    CHECK(std::abs(xi.xi_plus * xi.xi_minus * (s + 2.0) + 1.2 * s) < 1e-9);
  }
}

TEST_CASE("xi_pair: branch rule is continuous across the midline") {
  const double mid = 0.5 * (P12.zeta_minus + P12.zeta_plus);
  for (double y : {0.3, 1.0, -2.0}) {
    const auto l = algebra::xi_pair(cd(mid - 1e-9, y), P12);
    const auto r = algebra::xi_pair(cd(mid + 1e-9, y), P12);
    CHECK(std::abs(l.xi_minus - r.xi_minus) < 1e-7);
    CHECK(std::abs(l.xi_plus - r.xi_plus) < 1e-7);
  }
}

TEST_CASE("xi_pair: cut and pole rejection") {
  const double inside = 0.5 * (P12.zeta_minus + P12.zeta_plus);
  CHECK_THROWS_AS(algebra::xi_pair(cd(inside, 0.0), P12), CutError);
  CHECK_THROWS_AS(algebra::xi_pair(cd(P12.zeta_plus, 0.0), P12), CutError);
  CHECK_THROWS_AS(algebra::xi_pair(cd(-2.0, 0.0), P12), PoleError);
}

TEST_CASE("cubic_roots: closed forms at z = 0 and z = sigma0") {
  auto r = algebra::cubic_roots(cd(0, 0), P12);
  CHECK(r.alpha.real() == doctest::Approx(-1.48806130178211005).epsilon(1e-13));
  CHECK(std::abs(r.beta) < 1e-12);
  CHECK(r.gamma.real() == doctest::Approx(2.68806130178211001).epsilon(1e-13));

  // at z = sigma0 the cubic factors as w (w^2 - mu w - lambda^2); the
  // middle root is 0 and the outer pair is (mu -+ sqrt(mu^2+4 lambda^2))/2
  r = algebra::cubic_roots(cd(P12.sigma0, 0), P12);
  const double want_a = (2.0 - std::sqrt(4.0 + 4 * 1.2 * 1.2)) / 2;
  const double want_g = (2.0 + std::sqrt(4.0 + 4 * 1.2 * 1.2)) / 2;
  CHECK(r.alpha.real() == doctest::Approx(want_a).epsilon(1e-12));
  CHECK(std::abs(r.beta) < 1e-10);
  CHECK(r.gamma.real() == doctest::Approx(want_g).epsilon(1e-12));
}

TEST_CASE("cubic_roots: ordering, Vieta and the bracketing oracle on real z") {
  Lcg rng;
  for (int i = 0; i < 60; ++i) {
    const double z = rng.in(0.0, 50.0);
    for (const auto& p : {P12, P18, P06}) {
      const auto r = algebra::cubic_roots(cd(z, 0), p);
      const double a = r.alpha.real(), b = r.beta.real(), g = r.gamma.real();
      CHECK(a < -z);
      CHECK(-z <= b + 1e-12);
      CHECK(b <= 1e-12);
      CHECK(g > 0);
      CHECK(r.max_residual < 1e-10);
      // Vieta
      const double zm = z + p.mu;
      CHECK(std::abs(a + b + g - (p.lambda - z)) / (1 + std::fabs(p.lambda - z)) < 1e-10);
      CHECK(std::abs(a * b + b * g + g * a + zm * zm) / (1 + zm * zm) < 1e-10);
      const double prod = z * zm * (zm - p.lambda);
      CHECK(std::abs(a * b * g - prod) / (1 + std::fabs(prod)) < 1e-10);
      // independent bracketing oracle
      const auto oracle = bracket_roots(z, p);
      REQUIRE(oracle.size() == 3);
      CHECK(a == doctest::Approx(oracle[0]).epsilon(1e-8));
      CHECK(b == doctest::Approx(oracle[1]).epsilon(1e-8));
      CHECK(g == doctest::Approx(oracle[2]).epsilon(1e-8));
    }
  }
}

TEST_CASE("cubic_roots: complex continuation keeps Vieta and analyticity") {
  Lcg rng;
  const double e1 = algebra::eta1(P12);
  for (int i = 0; i < 120; ++i) {
    const cd z(rng.in(e1 + 0.1, 20.0), rng.in(-10.0, 10.0));
    const auto r = algebra::cubic_roots(z, P12);
    CHECK(r.max_residual < 1e-10);
    const cd zm = z + 2.0;
    CHECK(std::abs(r.alpha + r.beta + r.gamma - (1.2 - z)) < 1e-9 * (1.0 + std::abs(z)));
    CHECK(std::abs(r.alpha * r.beta * r.gamma - z * zm * (zm - 1.2)) <
          1e-8 * (1.0 + std::abs(z * zm * zm)));
  }
  // Cauchy-Riemann residual of the alpha branch at a few complex points
  const double h = 1e-7;
  for (const cd z : {cd(0.5, 0.8), cd(-0.3, 1.5), cd(3.0, -2.0)}) {
    const cd dx = (algebra::cubic_roots(z + h, P12).alpha -
                   algebra::cubic_roots(z - h, P12).alpha) / (2 * h);
    const cd dy = (algebra::cubic_roots(z + cd(0, h), P12).alpha -
                   algebra::cubic_roots(z - cd(0, h), P12).alpha) / (2 * h * cd(0, 1));
    CHECK(std::abs(dx - dy) < 1e-6 * (1.0 + std::abs(dx)));
  }
}

TEST_CASE("cubic_roots: cut rejection") {
  const double e1 = algebra::eta1(P12);
  CHECK_THROWS_AS(algebra::cubic_roots(cd(0.5 * (e1 - 2.0), 0.0), P12), CutError);
  CHECK_THROWS_AS(algebra::cubic_roots(cd(-2.0, 0.0), P12), CutError);
}

TEST_CASE("discriminant: anchor identities") {
  for (const auto& p : {P12, P18, P06}) {
    const double l = p.lambda, m = p.mu;
    CHECK(algebra::delta_poly(-m, p).real() ==
          doctest::Approx(-4 * l * m * (l + m) * (l + m) * (l + m)).epsilon(1e-12));
    CHECK(std::abs(algebra::discriminant(-m, p)) < 1e-10);
  }
  // critical case: delta(-mu/2) = mu^5/4
  const auto pc = model::validate_symmetric(1.0, 2.0);
  CHECK(algebra::delta_poly(-1.0, pc).real() == doctest::Approx(8.0).epsilon(1e-13));
}

TEST_CASE("discriminant matches -4P^3 - 27Q^2 from the cubic coefficients") {
  Lcg rng;
  for (int i = 0; i < 50; ++i) {
    const cd z(rng.in(-3, 5), rng.in(-3, 3));
    const cd R1 = -(1.2 - z), R2 = -(z + 2.0) * (z + 2.0);
    const cd R3 = -z * (z + 2.0) * (z + 2.0 - 1.2);
    const cd P = R2 - R1 * R1 / 3.0;
    const cd Q = R3 - R1 * R2 / 3.0 + 2.0 * R1 * R1 * R1 / 27.0;
    const cd want = -4.0 * P * P * P - 27.0 * Q * Q;
    CHECK(std::abs(algebra::discriminant(z, P12) - want) < 1e-8 * (1.0 + std::abs(want)));
  }
}

TEST_CASE("ramification_points: structure and oracle values") {
  auto r = algebra::ramification_points(P12);
  CHECK(r.eta2 == -2.0);
  CHECK(r.eta1 == doctest::Approx(-0.935861539822980071).epsilon(1e-13));
  CHECK(r.eta1 > -2.0);
  CHECK(r.eta1 < 0.0);
  CHECK(r.eta3.imag() > 0);
  CHECK(r.eta3.real() == doctest::Approx(r.eta4.real()));
  CHECK(r.eta3.imag() == doctest::Approx(-r.eta4.imag()));
  for (cd e : {cd(r.eta1, 0), cd(r.eta2, 0), r.eta3, r.eta4})
    CHECK(std::abs(algebra::discriminant(e, P12)) < 1e-8);

  CHECK(algebra::ramification_points(P18).eta1 ==
        doctest::Approx(-0.606182671943904606).epsilon(1e-13));
  CHECK(algebra::ramification_points(P06).eta1 ==
        doctest::Approx(-1.41670032485709162).epsilon(1e-13));
  // rho = 1/2: eta1 < -mu/2
  const auto pc = model::validate_symmetric(1.0, 2.0);
  CHECK(algebra::ramification_points(pc).eta1 < -1.0);
  CHECK(algebra::ramification_points(pc).eta1 ==
        doctest::Approx(-1.07973231434646406).epsilon(1e-13));
}

TEST_CASE("branch consistency between the cubic and the xi pair") {
  // s := z - alpha(z): xi-(s) = z + alpha(z); s* := z - beta(z): xi+(s*) = z + beta(z)
  for (double z : {0.2, 0.7, 1.5, 4.0, 12.0}) {
    for (const auto& p : {P12, P18, P06}) {
      const auto r = algebra::cubic_roots(cd(z, 0), p);
      const double s = z - r.alpha.real();
      const auto xi = algebra::xi_pair(s, p);
      CHECK(std::abs(xi.xi_minus - (z + r.alpha)) < 1e-10 * (1 + std::abs(s)));
      CHECK(std::abs(s + xi.xi_minus - 2.0 * z) < 1e-10 * (1 + std::abs(s)));
      const double ss = z - r.beta.real();
      const auto xis = algebra::xi_pair(ss, p);
      CHECK(std::abs(xis.xi_plus - (z + r.beta)) < 1e-10 * (1 + std::abs(ss)));
    }
  }
}
