#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sqf/model.hpp"

namespace sqf::sim {

enum class Policy { SQF, HOL_PRIORITY_1, HOL_PRIORITY_2 };

std::string_view policy_name(Policy p);

struct ServiceLaw {
  enum class Kind { Exponential, Deterministic, HyperExp2 };
  Kind kind = Kind::Exponential;
  // HyperExp2(p, m1, m2): exponential of mean m1 w.p. p, else mean m2
  double p = 0, m1 = 0, m2 = 0;

  static ServiceLaw exponential() { return {}; }
  static ServiceLaw deterministic() { return {Kind::Deterministic, 0, 0, 0}; }
  static ServiceLaw hyperexp2(double p, double m1, double m2) {
    return {Kind::HyperExp2, p, m1, m2};
  }
  // mean service time; mu is the queue's rate parameter, used by the
  // exponential and deterministic laws
  double mean(double mu) const;
};

struct SimConfig {
  model::GeneralParams params;
  Policy policy = Policy::SQF;
  ServiceLaw service_law_1, service_law_2;
  long cycles = 10000;        // regeneration cycles, >= 100
  std::uint64_t seed = 1;
  std::vector<double> ccdf_grid;
  std::vector<double> transform_s;  // estimate E[e^{-s U1}] at these abscissas
  int replications = 8;       // independent RNG stream blocks
  long trace_limit = 0;       // record the first N inter-event intervals
};

struct Estimate {
  double point = 0;
  double half_width_99 = 0;
  long cycles = 0;
};

struct TraceEntry {
  double t = 0, dt = 0;  // interval start and length
  double u1 = 0, u2 = 0; // workloads at interval start
  int serving = 0;       // 0 idle, 1, 2
};

struct SimOutput {
  Estimate p_empty_1, p_empty_2, p_empty_both;
  Estimate frac_serving_1, frac_serving_2;
  Estimate p_le;  // time fraction of {0 <= U1 <= U2}
  Estimate mean_u1, mean_u2;
  std::vector<Estimate> ccdf_1, ccdf_total;  // aligned with ccdf_grid
  std::vector<Estimate> transform_u1;        // aligned with transform_s
  std::vector<double> ccdf_grid;
  long tie_events = 0;   // exact U1 == U2 > 0 after an arrival
  double total_time = 0;
  std::vector<std::string> diagnostics;
  std::vector<TraceEntry> trace;
};

// Regenerative estimation over empty-system cycles. Deterministic for a
// fixed (seed, cycles, replications) triple.
SimOutput simulate(const SimConfig& config);

struct SlopeFit {
  double rate = 0;       // coefficient of u
  double power = 0;      // coefficient of log u
  double intercept = 0;  // log prefactor
  int points_used = 0;
};

// Least squares of log ccdf ~ c + rate*u + power*log(u) over grid points
// whose estimate lies inside [window_lo, window_hi]. Needs >= 8 points.
SlopeFit tail_slope(std::span<const double> grid,
                    std::span<const Estimate> ccdf, double window_lo = 1e-5,
                    double window_hi = 1e-2);

// Two-parameter variant without the log-u regressor.
SlopeFit tail_slope_exponential(std::span<const double> grid,
                                std::span<const Estimate> ccdf,
                                double window_lo = 1e-5,
                                double window_hi = 1e-2);

struct SandwichReport {
  SimOutput lower;  // queue 1 has priority: lower bound for U1
  SimOutput sqf;
  SimOutput upper;  // queue 2 has priority: upper bound for U1
  bool ordered_within_ci = true;
  std::vector<int> violating_points;  // grid indices
  double hol_priority_empty = 0;      // p_empty_1 of the lower run
};

// Runs SQF / HOL_PRIORITY_1 / HOL_PRIORITY_2 with identical seeds (common
// random numbers) and checks the strong-order sandwich on the CCDF grid.
SandwichReport sandwich_check(const SimConfig& base);

}  // namespace sqf::sim
