#include "sqf/inversion.hpp"

#include <algorithm>
#include <cmath>

#include "sqf/errors.hpp"

namespace sqf::inversion {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

cd ccdf_hat(const Transform& f, cd s) { return (1.0 - f(s)) / s; }

double euler_invert(double u, const Transform& f,
                    const InversionOptions& opts) {
  const int m = 11;
  const int n0 = std::max(4, opts.node_count - m - 1);
  // discretization error ~ e^{-A}; keep one digit of headroom
  const double A = std::clamp(-std::log(0.1 * opts.precision_target), 16.0, 28.0);
  const double a = A / (2.0 * u);
  const double h = kPi / u;

  std::vector<double> partial;
  partial.reserve(static_cast<size_t>(n0) + m + 1);
  double sum = 0.5 * ccdf_hat(f, cd(a, 0.0)).real();
  double sign = -1.0;
  for (int k = 1; k <= n0 + m; ++k) {
    sum += sign * ccdf_hat(f, cd(a, k * h)).real();
    sign = -sign;
    partial.push_back(sum);
  }
  // Euler smoothing over the last m+1 partial sums
  double acc = 0.0;
  double binom = 1.0;  // C(m, j) built incrementally
  for (int j = 0; j <= m; ++j) {
    acc += binom * partial[static_cast<size_t>(n0) - 1 + j];
    binom = binom * (m - j) / (j + 1.0);
  }
  return std::exp(A / 2.0) / u * acc / std::pow(2.0, m);
}

double talbot_invert(double u, const Transform& f,
                     const InversionOptions& opts) {
  // the rightmost contour point r = 2M/(5u) makes e^{ru} amplify roundoff,
  // so more than ~32 nodes loses accuracy in double precision
  const int M = std::clamp(opts.node_count, 16, 32);
  const double r = 2.0 * M / (5.0 * u);
  double sum = 0.5 * std::exp(r * u) * ccdf_hat(f, cd(r, 0.0)).real();
  for (int k = 1; k < M; ++k) {
    const double th = k * kPi / M;
    const double cot = std::cos(th) / std::sin(th);
    const cd s(r * th * cot, r * th);
    const double sig = th + (th * cot - 1.0) * cot;
    const cd val = std::exp(s * u) * ccdf_hat(f, s) * cd(1.0, sig);
    sum += val.real();
  }
  return r / M * sum;
}

}  // namespace

double invert_ccdf(double u, const Transform& transform,
                   const InversionOptions& opts) {
  if (!(u > 0)) throw ParamError("invert_ccdf: u must be > 0");
  if (opts.node_count < 16)
    throw ParamError("invert_ccdf: node_count must be >= 16");
  switch (opts.method) {
    case Method::EulerSummation: return euler_invert(u, transform, opts);
    case Method::FixedTalbot: return talbot_invert(u, transform, opts);
  }
  throw ParamError("invert_ccdf: unknown method");
}

std::vector<CurvePoint> ccdf_curve(std::span<const double> u_grid,
                                   const Transform& transform,
                                   const InversionOptions& opts) {
  std::vector<CurvePoint> out;
  out.reserve(u_grid.size());
  for (double u : u_grid) {
    CurvePoint pt;
    pt.u = u;
    try {
      pt.value = invert_ccdf(u, transform, opts);
      pt.valid = true;
    } catch (const Error& e) {
      pt.note = e.what();
    }
    out.push_back(std::move(pt));
  }
  return out;
}

}  // namespace sqf::inversion
