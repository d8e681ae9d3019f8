#include "sqf/sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sqf/errors.hpp"

namespace sqf::sim {

namespace {

constexpr double kZ99 = 2.5758293035489004;  // normal 99.5% quantile
constexpr double kInf = std::numeric_limits<double>::infinity();

// splittable counter scheme: one splitmix64 step per word
std::uint64_t splitmix64(std::uint64_t& x) {
  x += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// xoshiro256++, seeded from (master seed, stream id)
struct Stream {
  std::uint64_t s[4];

  Stream(std::uint64_t seed, std::uint64_t stream_id) {
    std::uint64_t x = seed ^ (0xa0761d6478bd642fULL * (stream_id + 1));
    for (auto& w : s) w = splitmix64(x);
  }

  static std::uint64_t rotl(std::uint64_t v, int k) {
    return (v << k) | (v >> (64 - k));
  }

  std::uint64_t next() {
    const std::uint64_t result = rotl(s[0] + s[3], 23) + s[0];
    const std::uint64_t t = s[1] << 17;
    s[2] ^= s[0];
    s[3] ^= s[1];
    s[1] ^= s[2];
    s[0] ^= s[3];
    s[2] ^= t;
    s[3] = rotl(s[3], 45);
    return result;
  }

  // uniform on [0,1) with 53 bits; bit-identical across platforms
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double exponential(double rate) {
    return -std::log1p(-uniform()) / rate;
  }
};

double draw_service(const ServiceLaw& law, double mu, Stream& rng) {
  switch (law.kind) {
    case ServiceLaw::Kind::Exponential: return rng.exponential(mu);
    case ServiceLaw::Kind::Deterministic: return 1.0 / mu;
    case ServiceLaw::Kind::HyperExp2: {
      const double v = rng.uniform();
      const double mean = (v < law.p) ? law.m1 : law.m2;
      return rng.exponential(1.0 / mean);
    }
  }
  return 0;
}

int pick_served(double u1, double u2, Policy policy) {
  switch (policy) {
    case Policy::SQF:
      if (u1 > 0 && u2 > 0) return (u1 <= u2) ? 1 : 2;  // tie serves queue 1
      if (u1 > 0) return 1;
      if (u2 > 0) return 2;
      return 0;
    case Policy::HOL_PRIORITY_1:
      if (u1 > 0) return 1;
      return u2 > 0 ? 2 : 0;
    case Policy::HOL_PRIORITY_2:
      if (u2 > 0) return 2;
      return u1 > 0 ? 1 : 0;
  }
  return 0;
}

// per-metric regenerative sums; all metrics share the cycle lengths
struct RatioAcc {
  double sum_r = 0, sum_r2 = 0, sum_rt = 0;

  void add(double r, double t) {
    sum_r += r;
    sum_r2 += r * r;
    sum_rt += r * t;
  }

  Estimate finish(long n, double sum_t, double sum_t2) const {
    Estimate e;
    e.cycles = n;
    if (sum_t <= 0 || n < 2) return e;
    const double p = sum_r / sum_t;
    e.point = p;
    const double tbar = sum_t / n;
    const double ss = sum_r2 - 2.0 * p * sum_rt + p * p * sum_t2;
    const double var = std::max(0.0, ss / (n - 1));
    e.half_width_99 = kZ99 * std::sqrt(var / n) / tbar;
    return e;
  }
};

struct CycleRewards {
  double empty1 = 0, empty2 = 0, empty_both = 0;
  double srv1 = 0, srv2 = 0, le = 0;
  double int_u1 = 0, int_u2 = 0;
  std::vector<double> ccdf1, ccdft, lap1;
  double length = 0;

  CycleRewards(size_t grid, size_t laps)
      : ccdf1(grid, 0.0), ccdft(grid, 0.0), lap1(laps, 0.0) {}

  void reset() {
    *this = CycleRewards(ccdf1.size(), lap1.size());
  }
};

struct Accumulators {
  long n = 0;
  double sum_t = 0, sum_t2 = 0;
  RatioAcc empty1, empty2, empty_both, srv1, srv2, le, u1, u2;
  std::vector<RatioAcc> ccdf1, ccdft, lap1;

  Accumulators(size_t grid, size_t laps)
      : ccdf1(grid), ccdft(grid), lap1(laps) {}

  void close_cycle(const CycleRewards& c) {
    ++n;
    sum_t += c.length;
    sum_t2 += c.length * c.length;
    empty1.add(c.empty1, c.length);
    empty2.add(c.empty2, c.length);
    empty_both.add(c.empty_both, c.length);
    srv1.add(c.srv1, c.length);
    srv2.add(c.srv2, c.length);
    le.add(c.le, c.length);
    u1.add(c.int_u1, c.length);
    u2.add(c.int_u2, c.length);
    for (size_t j = 0; j < ccdf1.size(); ++j) {
      ccdf1[j].add(c.ccdf1[j], c.length);
      ccdft[j].add(c.ccdft[j], c.length);
    }
    for (size_t j = 0; j < lap1.size(); ++j) lap1[j].add(c.lap1[j], c.length);
  }
};

// time in [0, dt] a level starting at x and draining at unit rate spends
// above g
double time_above_draining(double x, double g, double dt) {
  return std::clamp(x - g, 0.0, dt);
}

void run_replication(const SimConfig& cfg, std::uint64_t rep,
                     long cycles_target, Accumulators& acc, long& ties,
                     double& total_time, std::vector<TraceEntry>* trace) {
  Stream arr1(cfg.seed, rep * 4 + 0);
  Stream arr2(cfg.seed, rep * 4 + 1);
  Stream svc1(cfg.seed, rep * 4 + 2);
  Stream svc2(cfg.seed, rep * 4 + 3);

  const auto& g = cfg.params;
  double u1 = 0, u2 = 0, t = 0;
  double na1 = (g.lambda1 > 0) ? arr1.exponential(g.lambda1) : kInf;
  double na2 = (g.lambda2 > 0) ? arr2.exponential(g.lambda2) : kInf;

  CycleRewards cyc(cfg.ccdf_grid.size(), cfg.transform_s.size());
  double cycle_start = 0;
  long done = 0;

  while (done < cycles_target) {
    const int serving = pick_served(u1, u2, cfg.policy);
    const double t_dep =
        serving == 1 ? t + u1 : (serving == 2 ? t + u2 : kInf);
    const double t_next = std::min({na1, na2, t_dep});
    const double dt = t_next - t;

    if (dt > 0) {
      if (u1 == 0) cyc.empty1 += dt;
      if (u2 == 0) cyc.empty2 += dt;
      if (u1 == 0 && u2 == 0) cyc.empty_both += dt;
      if (serving == 1) cyc.srv1 += dt;
      if (serving == 2) cyc.srv2 += dt;
      if (u1 <= u2) cyc.le += dt;
      const double u1_end = (serving == 1) ? u1 - dt : u1;
      const double u2_end = (serving == 2) ? u2 - dt : u2;
      cyc.int_u1 += dt * 0.5 * (u1 + u1_end);
      cyc.int_u2 += dt * 0.5 * (u2 + u2_end);
      for (size_t j = 0; j < cfg.transform_s.size(); ++j) {
        const double sv = cfg.transform_s[j];
        // exact integral of e^{-s U1(tau)} over the interval
        if (serving == 1)
          cyc.lap1[j] += (std::exp(-sv * u1_end) - std::exp(-sv * u1)) / sv;
        else
          cyc.lap1[j] += dt * std::exp(-sv * u1);
      }
      const double tot = u1 + u2;
      for (size_t j = 0; j < cfg.ccdf_grid.size(); ++j) {
        const double gu = cfg.ccdf_grid[j];
        double add1;
        if (serving == 1) add1 = time_above_draining(u1, gu, dt);
        else add1 = (u1 > gu) ? dt : 0.0;
        double addt;
        if (serving != 0) addt = time_above_draining(tot, gu, dt);
        else addt = (tot > gu) ? dt : 0.0;
        cyc.ccdf1[j] += add1;
        cyc.ccdft[j] += addt;
        if (add1 == 0.0 && addt == 0.0 && gu >= tot) break;  // grid ascending
      }
      if (trace && trace->size() < static_cast<size_t>(cfg.trace_limit))
        trace->push_back({t, dt, u1, u2, serving});
    }

    // advance state to t_next
    if (serving == 1) u1 = std::max(0.0, u1 - dt);
    if (serving == 2) u2 = std::max(0.0, u2 - dt);
    t = t_next;

    if (t_next == t_dep && serving != 0) {
      if (serving == 1) u1 = 0;
      else u2 = 0;
      if (u1 == 0 && u2 == 0) {
        cyc.length = t - cycle_start;
        acc.close_cycle(cyc);
        cyc.reset();
        cycle_start = t;
        ++done;
      }
    } else if (t_next == na1) {
      u1 += draw_service(cfg.service_law_1, g.mu1, svc1);
      if (u1 == u2 && u1 > 0) ++ties;
      na1 = t + arr1.exponential(g.lambda1);
    } else {
      u2 += draw_service(cfg.service_law_2, g.mu2, svc2);
      if (u1 == u2 && u1 > 0) ++ties;
      na2 = t + arr2.exponential(g.lambda2);
    }
  }
  total_time += t;
}

}  // namespace

std::string_view policy_name(Policy p) {
  switch (p) {
    case Policy::SQF: return "SQF";
    case Policy::HOL_PRIORITY_1: return "HOL_PRIORITY_1";
    case Policy::HOL_PRIORITY_2: return "HOL_PRIORITY_2";
  }
  return "?";
}

double ServiceLaw::mean(double mu) const {
  switch (kind) {
    case Kind::Exponential:
    case Kind::Deterministic: return 1.0 / mu;
    case Kind::HyperExp2: return p * m1 + (1 - p) * m2;
  }
  return 0;
}

SimOutput simulate(const SimConfig& config) {
  if (config.cycles < 100)
    throw ParamError("simulate: cycles must be >= 100");
  if (config.replications < 1)
    throw ParamError("simulate: replications must be >= 1");
  if (!std::is_sorted(config.ccdf_grid.begin(), config.ccdf_grid.end()))
    throw ParamError("simulate: ccdf_grid must be ascending");
  const auto& g = config.params;
  const double load = g.lambda1 * config.service_law_1.mean(g.mu1) +
                      g.lambda2 * config.service_law_2.mean(g.mu2);
  if (load >= 1.0)
    throw ParamError("simulate: offered load >= 1 under the service laws");

  Accumulators acc(config.ccdf_grid.size(), config.transform_s.size());
  long ties = 0;
  double total_time = 0;
  std::vector<TraceEntry> trace;
  std::vector<TraceEntry>* trace_ptr =
      config.trace_limit > 0 ? &trace : nullptr;

  const int reps = config.replications;
  const long base = config.cycles / reps;
  for (int r = 0; r < reps; ++r) {
    const long want = base + (r == reps - 1 ? config.cycles % reps : 0);
    if (want > 0)
      run_replication(config, static_cast<std::uint64_t>(r), want, acc, ties,
                      total_time, r == 0 ? trace_ptr : nullptr);
  }

  SimOutput out;
  out.p_empty_1 = acc.empty1.finish(acc.n, acc.sum_t, acc.sum_t2);
  out.p_empty_2 = acc.empty2.finish(acc.n, acc.sum_t, acc.sum_t2);
  out.p_empty_both = acc.empty_both.finish(acc.n, acc.sum_t, acc.sum_t2);
  out.frac_serving_1 = acc.srv1.finish(acc.n, acc.sum_t, acc.sum_t2);
  out.frac_serving_2 = acc.srv2.finish(acc.n, acc.sum_t, acc.sum_t2);
  out.p_le = acc.le.finish(acc.n, acc.sum_t, acc.sum_t2);
  out.mean_u1 = acc.u1.finish(acc.n, acc.sum_t, acc.sum_t2);
  out.mean_u2 = acc.u2.finish(acc.n, acc.sum_t, acc.sum_t2);
  out.ccdf_grid = config.ccdf_grid;
  for (size_t j = 0; j < config.ccdf_grid.size(); ++j) {
    out.ccdf_1.push_back(acc.ccdf1[j].finish(acc.n, acc.sum_t, acc.sum_t2));
    out.ccdf_total.push_back(acc.ccdft[j].finish(acc.n, acc.sum_t, acc.sum_t2));
  }
  for (size_t j = 0; j < config.transform_s.size(); ++j)
    out.transform_u1.push_back(acc.lap1[j].finish(acc.n, acc.sum_t, acc.sum_t2));
  out.tie_events = ties;
  out.total_time = total_time;
  out.trace = std::move(trace);
  if (acc.n < config.cycles)
    out.diagnostics.push_back("completed fewer cycles than requested");
  return out;
}

SlopeFit tail_slope(std::span<const double> grid,
                    std::span<const Estimate> ccdf, double window_lo,
                    double window_hi) {
  // design: [1, u, log u]
  double a[3][3] = {};
  double b[3] = {};
  int n = 0;
  for (size_t i = 0; i < grid.size(); ++i) {
    const double pv = ccdf[i].point;
    if (!(pv >= window_lo && pv <= window_hi) || grid[i] <= 0) continue;
    const double x[3] = {1.0, grid[i], std::log(grid[i])};
    const double y = std::log(pv);
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) a[r][c] += x[r] * x[c];
      b[r] += x[r] * y;
    }
    ++n;
  }
  if (n < 8)
    throw ParamError("tail_slope: fewer than 8 grid points inside the window");
  // Gaussian elimination, 3x3
  for (int i = 0; i < 3; ++i) {
    int piv = i;
    for (int r = i + 1; r < 3; ++r)
      if (std::fabs(a[r][i]) > std::fabs(a[piv][i])) piv = r;
    std::swap(a[i], a[piv]);
    std::swap(b[i], b[piv]);
    for (int r = i + 1; r < 3; ++r) {
      const double f = a[r][i] / a[i][i];
      for (int c = i; c < 3; ++c) a[r][c] -= f * a[i][c];
      b[r] -= f * b[i];
    }
  }
  double x[3];
  for (int i = 2; i >= 0; --i) {
    double s = b[i];
    for (int c = i + 1; c < 3; ++c) s -= a[i][c] * x[c];
    x[i] = s / a[i][i];
  }
  return {x[1], x[2], x[0], n};
}

SlopeFit tail_slope_exponential(std::span<const double> grid,
                                std::span<const Estimate> ccdf,
                                double window_lo, double window_hi) {
  double s1 = 0, su = 0, suu = 0, sy = 0, suy = 0;
  int n = 0;
  for (size_t i = 0; i < grid.size(); ++i) {
    const double pv = ccdf[i].point;
    if (!(pv >= window_lo && pv <= window_hi) || grid[i] <= 0) continue;
    const double y = std::log(pv);
    s1 += 1;
    su += grid[i];
    suu += grid[i] * grid[i];
    sy += y;
    suy += grid[i] * y;
    ++n;
  }
  if (n < 8)
    throw ParamError("tail_slope: fewer than 8 grid points inside the window");
  const double det = s1 * suu - su * su;
  const double c = (suu * sy - su * suy) / det;
  const double rate = (s1 * suy - su * sy) / det;
  return {rate, 0.0, c, n};
}

SandwichReport sandwich_check(const SimConfig& base) {
  SandwichReport rep;
  SimConfig cfg = base;
  cfg.policy = Policy::HOL_PRIORITY_1;
  rep.lower = simulate(cfg);
  cfg.policy = Policy::SQF;
  rep.sqf = simulate(cfg);
  cfg.policy = Policy::HOL_PRIORITY_2;
  rep.upper = simulate(cfg);
  rep.hol_priority_empty = rep.lower.p_empty_1.point;
  for (size_t j = 0; j < base.ccdf_grid.size(); ++j) {
    const auto& lo = rep.lower.ccdf_1[j];
    const auto& mid = rep.sqf.ccdf_1[j];
    const auto& hi = rep.upper.ccdf_1[j];
    const bool ok_lo =
        lo.point - lo.half_width_99 <= mid.point + mid.half_width_99;
    const bool ok_hi =
        mid.point - mid.half_width_99 <= hi.point + hi.half_width_99;
    if (!ok_lo || !ok_hi) {
      rep.ordered_within_ci = false;
      rep.violating_points.push_back(static_cast<int>(j));
    }
  }
  return rep;
}

}  // namespace sqf::sim
