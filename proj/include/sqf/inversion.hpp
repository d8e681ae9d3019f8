#pragma once

#include <complex>
#include <functional>
#include <span>
#include <vector>

namespace sqf::inversion {

using cd = std::complex<double>;

// Laplace transform of the random variable itself, E[e^{-sU}]; the CCDF
// transform (1 - F(s))/s is formed internally.
using Transform = std::function<cd(cd)>;

enum class Method { EulerSummation, FixedTalbot };

struct InversionOptions {
  Method method = Method::EulerSummation;
  int node_count = 64;            // >= 16
  double precision_target = 1e-8;
};

// P(U > u) by numerical Bromwich inversion. Euler summation keeps every
// node in Re(s) > 0; Talbot bends into Re(s) < 0 and is advisory only.
// Node evaluation failures (SeriesError etc.) propagate to the caller.
double invert_ccdf(double u, const Transform& transform,
                   const InversionOptions& opts = {});

struct CurvePoint {
  double u = 0;
  double value = 0;
  bool valid = false;
  std::string note;  // failure diagnostics when invalid
};

std::vector<CurvePoint> ccdf_curve(std::span<const double> u_grid,
                                   const Transform& transform,
                                   const InversionOptions& opts = {});

}  // namespace sqf::inversion
