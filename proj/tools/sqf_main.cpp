// sqf: analytic solution, numerical inversion and event simulation of the
// symmetric two-queue shortest-queue-first system.

#include <CLI11.hpp>

#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "sqf/algebra.hpp"
#include "sqf/errors.hpp"
#include "sqf/inversion.hpp"
#include "sqf/metrics.hpp"
#include "sqf/model.hpp"
#include "sqf/sim.hpp"
#include "sqf/solver.hpp"

namespace {

using json = nlohmann::json;
using cd = std::complex<double>;

constexpr int kExitOk = 0;
constexpr int kExitParams = 2;
constexpr int kExitAnalytics = 3;
constexpr int kExitSimPrecision = 4;
constexpr int kExitValidation = 5;

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct CliError {
  int code;
  std::string message;
};

// ---- configuration files ---------------------------------------------------

sqf::sim::ServiceLaw parse_service_law(const std::string& text) {
  if (text == "Exponential") return sqf::sim::ServiceLaw::exponential();
  if (text == "Deterministic") return sqf::sim::ServiceLaw::deterministic();
  if (text.rfind("HyperExp2(", 0) == 0 && text.back() == ')') {
    const std::string inner = text.substr(10, text.size() - 11);
    double p, m1, m2;
    if (std::sscanf(inner.c_str(), "%lf,%lf,%lf", &p, &m1, &m2) == 3)
      return sqf::sim::ServiceLaw::hyperexp2(p, m1, m2);
  }
  throw CliError{kExitParams, "unknown service law: " + text};
}

sqf::sim::Policy parse_policy(const std::string& text) {
  if (text == "SQF") return sqf::sim::Policy::SQF;
  if (text == "HOL_PRIORITY_1") return sqf::sim::Policy::HOL_PRIORITY_1;
  if (text == "HOL_PRIORITY_2") return sqf::sim::Policy::HOL_PRIORITY_2;
  throw CliError{kExitParams, "unknown policy: " + text};
}

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(std::stod(item));
  return out;
}

struct RawConfig {
  double lambda1 = -1, lambda2 = -1, mu1 = -1, mu2 = -1;
  std::string policy = "SQF";
  std::string law1 = "Exponential", law2 = "Exponential";
  long cycles = -1;
  std::uint64_t seed = 0;
  bool has_seed = false;
  std::vector<double> grid;
  int replications = 8;

  void set(const std::string& key, const std::string& value) {
    if (key == "lambda1") lambda1 = std::stod(value);
    else if (key == "lambda2") lambda2 = std::stod(value);
    else if (key == "mu1") mu1 = std::stod(value);
    else if (key == "mu2") mu2 = std::stod(value);
    else if (key == "policy") policy = value;
    else if (key == "service_law_1") law1 = value;
    else if (key == "service_law_2") law2 = value;
    else if (key == "cycles") cycles = std::stol(value);
    else if (key == "seed") { seed = std::stoull(value); has_seed = true; }
    else if (key == "ccdf_grid") grid = parse_grid(value);
    else if (key == "replications") replications = std::stoi(value);
    else throw CliError{kExitParams, "unknown config key: " + key};
  }
};

RawConfig read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CliError{kExitParams, "cannot open config file: " + path};
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  RawConfig raw;
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    json j = json::parse(text);
    if (j.contains("command")) {
      // an `analyze --json` result used as a symmetric input fragment
      const auto& in_j = j.at("inputs");
      const double lambda = in_j.at("lambda").get<double>();
      const double mu = in_j.at("mu").get<double>();
      raw.lambda1 = raw.lambda2 = lambda / 2;
      raw.mu1 = raw.mu2 = mu;
      return raw;
    }
    for (const auto& [key, value] : j.items()) {
      if (key == "ccdf_grid" && value.is_array()) {
        raw.grid = value.get<std::vector<double>>();
      } else if (value.is_string()) {
        raw.set(key, value.get<std::string>());
      } else {
        raw.set(key, value.dump());
      }
    }
    return raw;
  }
  std::stringstream lines(text);
  std::string line;
  while (std::getline(lines, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      if (line.find_first_not_of(" \t") != std::string::npos)
        throw CliError{kExitParams, "config line is not key=value: " + line};
      continue;
    }
    auto trim = [](std::string s) {
      const auto a = s.find_first_not_of(" \t");
      const auto b = s.find_last_not_of(" \t");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    raw.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return raw;
}

// ---- commands ---------------------------------------------------------------

struct AnalyzeFlags {
  double lambda = 0, mu = 0;
  bool as_json = false;
};

int cmd_analyze(const AnalyzeFlags& f) {
  json out;
  out["command"] = "analyze";
  out["inputs"] = {{"lambda", f.lambda}, {"mu", f.mu}};
  std::vector<std::string> diags;
  sqf::model::SymmetricParams p;
  try {
    p = sqf::model::validate_symmetric(f.lambda, f.mu);
  } catch (const sqf::ParamError& e) {
    if (f.as_json) {
      out["diagnostics"] = {e.what()};
      out["exit_code"] = kExitParams;
      std::printf("%s\n", out.dump(2).c_str());
    } else {
      std::fprintf(stderr, "parameter error: %s\n", e.what());
    }
    return kExitParams;
  }
  try {
    const auto ram = sqf::algebra::ramification_points(p);
    const auto empty = sqf::metrics::empty_queue_probability(p);
    const auto law = sqf::metrics::sqf_tail_law(p);
    json o;
    o["rho"] = p.rho;
    o["sigma0"] = p.sigma0;
    o["zeta_minus"] = p.zeta_minus;
    o["zeta_plus"] = p.zeta_plus;
    o["s_tilde"] = p.s_tilde;
    o["r_ratio"] = p.r_ratio;
    o["eta1"] = ram.eta1;
    o["regime"] = std::string(sqf::model::regime_name(p.regime));
    o["G0"] = empty.g0;
    o["p_empty"] = empty.p_empty;
    o["tail"] = {{"rate", law.rate},
                 {"power", law.power},
                 {"prefactor", law.prefactor}};
    if (p.regime != sqf::model::Regime::Critical) {
      const auto sing = sqf::metrics::g_singularity(p);
      o["singularity"] = {
          {"location", sing.location},
          {"kind", sing.kind == sqf::metrics::SingularityKind::SimplePole
                       ? "SimplePole"
                       : "AlgebraicOrderHalf"},
          {"leading_coeff", sing.leading_coeff}};
    } else {
      diags.push_back("critical regime: G singularity folded into the tail law");
    }
    out["outputs"] = o;
    out["diagnostics"] = diags;
    out["exit_code"] = kExitOk;
    if (f.as_json) {
      std::printf("%s\n", out.dump(2).c_str());
    } else {
      std::printf("rho          %s\n", num(p.rho).c_str());
      std::printf("regime       %s\n",
                  std::string(sqf::model::regime_name(p.regime)).c_str());
      std::printf("sigma0       %s\n", num(p.sigma0).c_str());
      std::printf("zeta-        %s\n", num(p.zeta_minus).c_str());
      std::printf("zeta+        %s\n", num(p.zeta_plus).c_str());
      std::printf("eta1         %s\n", num(ram.eta1).c_str());
      std::printf("r_ratio      %s\n", num(p.r_ratio).c_str());
      std::printf("G(0)         %s\n", num(empty.g0).c_str());
      std::printf("P(U1=0)      %s\n", num(empty.p_empty).c_str());
      std::printf("tail         P(U1>u) ~ %s * u^%s * exp(%s u)\n",
                  num(law.prefactor).c_str(), num(law.power).c_str(),
                  num(law.rate).c_str());
      if (p.regime != sqf::model::Regime::Critical) {
        const auto sing = sqf::metrics::g_singularity(p);
        std::printf("singularity  %s at %s, coeff %s\n",
                    sing.kind == sqf::metrics::SingularityKind::SimplePole
                        ? "simple pole"
                        : "sqrt branch point",
                    num(sing.location).c_str(),
                    num(sing.leading_coeff).c_str());
      }
    }
    return kExitOk;
  } catch (const sqf::Error& e) {
    std::fprintf(stderr, "analytics failure: %s\n", e.what());
    return kExitAnalytics;
  }
}

struct TailFlags {
  double lambda = 0, mu = 0, u_max = 15.0;
  int points = 30;
  bool invert = false;
  int nodes = 64;
};

int cmd_tail(const TailFlags& f) {
  sqf::model::SymmetricParams p;
  try {
    p = sqf::model::validate_symmetric(f.lambda, f.mu);
  } catch (const sqf::ParamError& e) {
    std::fprintf(stderr, "parameter error: %s\n", e.what());
    return kExitParams;
  }
  const auto law = sqf::metrics::sqf_tail_law(p);
  if (f.invert)
    std::printf("u,asymptotic_ccdf,inverted_ccdf,rel_gap\n");
  else
    std::printf("u,asymptotic_ccdf\n");
  sqf::inversion::InversionOptions opts;
  opts.node_count = f.nodes;
  const sqf::inversion::Transform transform = [&p](cd s) {
    return sqf::solver::F_marginal(s, p);
  };
  int invalid = 0;
  for (int i = 1; i <= f.points; ++i) {
    const double u = f.u_max * i / f.points;
    const double asym = sqf::metrics::tail_law_ccdf(law, u);
    if (!f.invert) {
      std::printf("%s,%s\n", num(u).c_str(), num(asym).c_str());
      continue;
    }
    try {
      const double inv = sqf::inversion::invert_ccdf(u, transform, opts);
      const double gap = std::fabs(inv - asym) / std::max(std::fabs(inv), 1e-300);
      std::printf("%s,%s,%s,%s\n", num(u).c_str(), num(asym).c_str(),
                  num(inv).c_str(), num(gap).c_str());
    } catch (const sqf::Error&) {
      ++invalid;
      std::printf("%s,%s,nan,nan\n", num(u).c_str(), num(asym).c_str());
    }
  }
  if (f.invert && invalid * 10 > f.points) return kExitAnalytics;
  return kExitOk;
}

struct SimulateFlags {
  std::string config_path;
  double lambda = 0, mu = 0;          // symmetric shortcut
  double lambda1 = -1, lambda2 = -1, mu1 = -1, mu2 = -1;
  std::string policy = "SQF";
  std::string law1 = "Exponential", law2 = "Exponential";
  long cycles = 10000;
  std::uint64_t seed = 1;
  std::string grid;
  double precision = 0;  // 0: no requirement
  int replications = 8;
};

int cmd_simulate(const SimulateFlags& f, bool seed_from_cli) {
  sqf::sim::SimConfig cfg;
  try {
    if (!f.config_path.empty()) {
      const RawConfig raw = read_config_file(f.config_path);
      if (raw.lambda1 < 0 || raw.mu1 <= 0)
        throw CliError{kExitParams, "config must define lambda1/2 and mu1/2"};
      cfg.params = sqf::model::validate_general(raw.lambda1, raw.lambda2,
                                                raw.mu1, raw.mu2);
      cfg.policy = parse_policy(raw.policy);
      cfg.service_law_1 = parse_service_law(raw.law1);
      cfg.service_law_2 = parse_service_law(raw.law2);
      if (raw.cycles > 0) cfg.cycles = raw.cycles;
      cfg.seed = raw.has_seed ? raw.seed : 1;
      cfg.ccdf_grid = raw.grid;
      cfg.replications = raw.replications;
      if (f.cycles != 10000) cfg.cycles = f.cycles;   // flag overrides
      if (seed_from_cli) cfg.seed = f.seed;
    } else {
      if (f.lambda > 0) {
        cfg.params = sqf::model::validate_general(f.lambda / 2, f.lambda / 2,
                                                  f.mu, f.mu);
      } else {
        cfg.params =
            sqf::model::validate_general(f.lambda1, f.lambda2, f.mu1, f.mu2);
      }
      cfg.policy = parse_policy(f.policy);
      cfg.service_law_1 = parse_service_law(f.law1);
      cfg.service_law_2 = parse_service_law(f.law2);
      cfg.cycles = f.cycles;
      cfg.seed = f.seed;
      cfg.ccdf_grid = parse_grid(f.grid);
      cfg.replications = f.replications;
    }
  } catch (const CliError& e) {
    std::fprintf(stderr, "%s\n", e.message.c_str());
    return e.code;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "parameter error: %s\n", e.what());
    return kExitParams;
  }

  sqf::sim::SimOutput out;
  try {
    out = sqf::sim::simulate(cfg);
  } catch (const sqf::ParamError& e) {
    std::fprintf(stderr, "parameter error: %s\n", e.what());
    return kExitParams;
  }

  std::printf("metric,u,point,half_width_99,cycles\n");
  const auto row = [](const char* name, const char* u,
                      const sqf::sim::Estimate& e) {
    std::printf("%s,%s,%s,%s,%ld\n", name, u, num(e.point).c_str(),
                num(e.half_width_99).c_str(), e.cycles);
  };
  row("p_empty_1", "", out.p_empty_1);
  row("p_empty_2", "", out.p_empty_2);
  row("p_empty_both", "", out.p_empty_both);
  row("frac_serving_1", "", out.frac_serving_1);
  row("frac_serving_2", "", out.frac_serving_2);
  row("p_le", "", out.p_le);
  row("mean_u1", "", out.mean_u1);
  row("mean_u2", "", out.mean_u2);
  for (size_t j = 0; j < out.ccdf_grid.size(); ++j) {
    row("ccdf_1", num(out.ccdf_grid[j]).c_str(), out.ccdf_1[j]);
    row("ccdf_total", num(out.ccdf_grid[j]).c_str(), out.ccdf_total[j]);
  }

  if (f.precision > 0) {
    for (const auto* e :
         {&out.p_empty_1, &out.p_empty_2, &out.p_empty_both,
          &out.frac_serving_1, &out.frac_serving_2, &out.p_le}) {
      if (e->half_width_99 > f.precision) {
        std::fprintf(stderr,
                     "precision not reached: half-width %s > %s "
                     "(increase --cycles)\n",
                     num(e->half_width_99).c_str(), num(f.precision).c_str());
        return kExitSimPrecision;
      }
    }
  }
  return kExitOk;
}

struct SweepFlags {
  double mu = 2.0;
  double rho_min = 0.05, rho_max = 0.999;
  int steps = 20;
  bool with_sim = false;
  long cycles = 20000;
  std::uint64_t seed = 1;
};

int cmd_sweep(const SweepFlags& f) {
  if (!(f.rho_min > 0) || !(f.rho_max < 1) || f.rho_min > f.rho_max ||
      f.steps < 1) {
    std::fprintf(stderr, "sweep requires 0 < rho-min <= rho-max < 1\n");
    return kExitParams;
  }
  if (f.with_sim)
    std::printf(
        "rho,p_empty_analytic,p_empty_mm1,p_empty_hol,p_empty_sim,"
        "p_empty_sim_hw99\n");
  else
    std::printf("rho,p_empty_analytic,p_empty_mm1,p_empty_hol\n");
  int failures = 0;
  for (int i = 0; i < f.steps; ++i) {
    const double rho =
        f.steps == 1 ? f.rho_min
                     : f.rho_min + (f.rho_max - f.rho_min) * i / (f.steps - 1);
    std::string analytic = "nan";
    try {
      const auto p = sqf::model::validate_symmetric(rho * f.mu, f.mu);
      analytic = num(sqf::metrics::empty_queue_probability(p).p_empty);
    } catch (const sqf::Error&) {
      ++failures;
    }
    std::string line = num(rho) + "," + analytic + "," + num(1 - rho) + "," +
                       num(1 - rho / 2);
    if (f.with_sim) {
      if (rho <= 0.97) {
        sqf::sim::SimConfig cfg;
        cfg.params = sqf::model::validate_general(rho * f.mu / 2,
                                                  rho * f.mu / 2, f.mu, f.mu);
        cfg.cycles = f.cycles;
        cfg.seed = f.seed;
        const auto out = sqf::sim::simulate(cfg);
        line += "," + num(out.p_empty_1.point) + "," +
                num(out.p_empty_1.half_width_99);
      } else {
        line += ",nan,nan";  // cycle budget would not reach useful precision
      }
    }
    std::printf("%s\n", line.c_str());
  }
  return failures ? kExitAnalytics : kExitOk;
}

// ---- validation battery ------------------------------------------------------

struct CheckRow {
  std::string name;
  double value;
  double threshold;
  bool pass;
};

void run_analytic_checks(const sqf::model::SymmetricParams& p,
                         std::vector<CheckRow>& rows) {
  using sqf::algebra::cubic_roots;
  char tagbuf[32];
  std::snprintf(tagbuf, sizeof tagbuf, "(lambda=%g) ", p.lambda);
  const std::string tag = tagbuf;

  double vieta = 0;
  bool order = true;
  for (int i = 0; i <= 40; ++i) {
    const double z = 50.0 * i / 40.0;
    const auto r = cubic_roots(cd(z, 0), p);
    vieta = std::max(vieta, r.max_residual);
    const double zm = z + p.mu;
    vieta = std::max(vieta, std::abs(r.alpha + r.beta + r.gamma -
                                     (p.lambda - z)) / (1 + std::abs(p.lambda - z)));
    vieta = std::max(vieta,
                     std::abs(r.alpha * r.beta * r.gamma - z * zm * (zm - p.lambda)) /
                         (1 + std::abs(z * zm * zm)));
    if (!(r.alpha.real() < -z && -z <= r.beta.real() + 1e-12 &&
          r.beta.real() <= 1e-12 && r.gamma.real() > 0))
      order = false;
  }
  rows.push_back({tag + "cubic Vieta residual", vieta, 1e-10, vieta < 1e-10});
  rows.push_back({tag + "cubic branch ordering", order ? 0.0 : 1.0, 0.5, order});

  double xires = 0;
  for (double s : {0.05, 0.7, 3.0, 25.0}) {
    const auto xi = sqf::algebra::xi_pair(cd(s, 0), p);
    const cd prod = xi.xi_plus * xi.xi_minus * (s + p.mu) +
                    p.lambda * p.mu * s / 2.0;
    xires = std::max(xires, std::abs(prod) / (1 + std::abs(s)));
  }
  rows.push_back({tag + "xi Vieta residual", xires, 1e-10, xires < 1e-10});

  double fonct = 0;
  for (double z : {0.05, 0.5, 2.0, 5.0})
    fonct = std::max(fonct, sqf::solver::residual_functional_eq(cd(z, 0), p));
  rows.push_back({tag + "functional equation residual", fonct, 1e-9,
                  fonct < 1e-9});

  const auto g = sqf::model::as_general(p);
  double pk = 0;
  for (double s : {0.01, 0.1, 1.0, 10.0, 50.0}) {
    const cd lhs = 1.0 - p.rho + 2.0 * sqf::solver::F0(cd(s, 0), cd(s, 0), p) +
                   2.0 * sqf::solver::G_of_s(cd(s, 0), p).value;
    const cd rhs = s * (1.0 - p.rho) /
                   (s - sqf::algebra::kernel_K(cd(s, 0), cd(s, 0), g));
    pk = std::max(pk, std::abs(lhs - rhs) / std::abs(rhs));
  }
  rows.push_back({tag + "Pollaczek-Khinchin residual", pk, 1e-9, pk < 1e-9});

  double dual = 0;
  for (double s : {0.01, 0.5, 5.0, 20.0})
    dual = std::max(dual, sqf::solver::G_of_s(cd(s, 0), p).discrepancy);
  rows.push_back({tag + "G dual-route agreement", dual, 1e-9, dual < 1e-9});

  const double norm =
      std::abs(sqf::solver::F_marginal(cd(0, 0), p) - 1.0);
  rows.push_back({tag + "F(0,0) = 1", norm, 1e-8, norm < 1e-8});
  const auto f0fn = [&p](cd s) { return sqf::solver::F0(s, cd(0, 0), p); };
  const double bal =
      std::abs(sqf::solver::extrapolate_removable(f0fn, cd(0, 0), 1e-4) +
               sqf::solver::G0(p) - p.rho / 2.0);
  rows.push_back({tag + "F0(0,0)+G(0) = rho/2", bal, 1e-8, bal < 1e-8});

  const cd a(0.4, 0.2), b(1.1, -0.3);
  const double anti = std::abs(sqf::solver::H_sym(a, b, p) +
                               sqf::solver::H_sym(b, a, p));
  rows.push_back({tag + "H antisymmetry", anti, 1e-12, anti < 1e-12});
  const double appA =
      sqf::solver::kernel_system_residuals(cd(0.5, 0.3), cd(1.2, -0.4), p);
  rows.push_back({tag + "kernel system residual", appA, 1e-8, appA < 1e-8});
}

void run_sandwich_checks(std::vector<CheckRow>& rows) {
  bool ok = true;
  double worst = 0;
  for (int i = 1; i <= 19; ++i) {
    const double rho = 0.05 * i;
    const auto p = sqf::model::validate_symmetric(2 * rho, 2.0);
    const double pe = sqf::metrics::empty_queue_probability(p).p_empty;
    if (pe < 1 - rho - 1e-10 || pe > 1 - rho / 2 + 1e-10) ok = false;
    worst = std::max(worst, std::max(1 - rho - pe, pe - (1 - rho / 2)));
  }
  rows.push_back({"empty-prob sandwich 1-rho <= P <= 1-rho/2", worst, 1e-10,
                  ok});
}

void run_sim_checks(std::vector<CheckRow>& rows, std::uint64_t seed) {
  sqf::sim::SimConfig cfg;
  cfg.params = sqf::model::validate_general(0.9, 0.9, 2, 2);
  cfg.cycles = 20000;
  cfg.seed = seed;
  cfg.ccdf_grid = {1.0, 5.0, 10.0};
  const auto out = sqf::sim::simulate(cfg);
  const auto p = sqf::model::validate_symmetric(1.8, 2.0);
  const auto dev = [](const sqf::sim::Estimate& e, double want) {
    return std::fabs(e.point - want) / std::max(e.half_width_99, 1e-300);
  };
  rows.push_back({"sim P(U=0) vs 1-rho (CI units)", dev(out.p_empty_both, 0.1),
                  1.0, dev(out.p_empty_both, 0.1) <= 1.0});
  rows.push_back({"sim P(I1=1) vs rho/2 (CI units)",
                  dev(out.frac_serving_1, 0.45), 1.0,
                  dev(out.frac_serving_1, 0.45) <= 1.0});
  rows.push_back({"sim P(U1<=U2) vs 1-rho/2 (CI units)", dev(out.p_le, 0.55),
                  1.0, dev(out.p_le, 0.55) <= 1.0});
  double worst = 0;
  for (size_t j = 0; j < cfg.ccdf_grid.size(); ++j)
    worst = std::max(worst, dev(out.ccdf_total[j],
                                sqf::metrics::mm1_total_ccdf(cfg.ccdf_grid[j], p)));
  rows.push_back({"sim total CCDF vs M/M/1 law (CI units)", worst, 1.0,
                  worst <= 1.0});

  auto cfg1 = cfg;
  cfg1.policy = sqf::sim::Policy::HOL_PRIORITY_1;
  const auto hol = sqf::sim::simulate(cfg1);
  const double d = dev(hol.p_empty_1, 0.55);
  rows.push_back({"sim HoL priority empty prob vs 1-rho/2 (CI units)", d, 1.0,
                  d <= 1.0});
}

int cmd_validate(const std::string& level, bool as_json, std::uint64_t seed,
                 double tol) {
  std::vector<CheckRow> rows;
  try {
    for (double lam : {1.2, 1.8, 0.6})
      run_analytic_checks(sqf::model::validate_symmetric(lam, 2.0), rows);
    run_sandwich_checks(rows);
    if (level == "full") run_sim_checks(rows, seed);
  } catch (const sqf::Error& e) {
    std::fprintf(stderr, "validation aborted: %s\n", e.what());
    return kExitValidation;
  }
  if (tol > 0) {
    // --tol relaxes (never tightens) the residual thresholds
    for (auto& r : rows) {
      if (r.threshold < tol) {
        r.threshold = tol;
        r.pass = r.value < tol || r.pass;
      }
    }
  }
  bool all = true;
  if (as_json) {
    json out;
    out["command"] = "validate";
    out["inputs"] = {{"level", level}};
    json checks = json::array();
    for (const auto& r : rows) {
      checks.push_back({{"name", r.name},
                        {"value", r.value},
                        {"threshold", r.threshold},
                        {"pass", r.pass}});
      all = all && r.pass;
    }
    out["outputs"] = {{"checks", checks}, {"all_pass", all}};
    out["diagnostics"] = json::array();
    out["exit_code"] = all ? kExitOk : kExitValidation;
    std::printf("%s\n", out.dump(2).c_str());
  } else {
    std::printf("%-55s %13s %10s  %s\n", "check", "value", "threshold",
                "status");
    for (const auto& r : rows) {
      std::printf("%-55s %13.4e %10.1e  %s\n", r.name.c_str(), r.value,
                  r.threshold, r.pass ? "PASS" : "FAIL");
      all = all && r.pass;
    }
    std::printf("%s\n", all ? "all checks passed" : "FAILURES present");
  }
  return all ? kExitOk : kExitValidation;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Shortest-queue-first two-queue workload analytics: exact transforms, "
      "tail asymptotics, Laplace inversion and regenerative simulation"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand

  bool as_json = false;
  std::uint64_t seed = 1;
  double tol = 0;
  app.add_flag("--json", as_json, "machine-readable JSON output where supported");
  auto* seed_opt =
      app.add_option("--seed", seed, "master RNG seed for simulation commands");
  app.add_option("--tol", tol,
                 "relax the validation residual thresholds to this value");

  AnalyzeFlags af;
  auto* analyze = app.add_subcommand("analyze", "derived constants, empty-queue "
                                                "probability and tail law");
  analyze->add_option("--lambda", af.lambda, "total arrival rate")->required();
  analyze->add_option("--mu", af.mu, "service rate")->required();

  TailFlags tf;
  auto* tail = app.add_subcommand("tail", "CCDF of U1: asymptotic law and "
                                          "optional numerical inversion (CSV)");
  tail->add_option("--lambda", tf.lambda)->required();
  tail->add_option("--mu", tf.mu)->required();
  tail->add_option("--u-max", tf.u_max, "largest u on the grid");
  tail->add_option("--points", tf.points, "grid size");
  tail->add_flag("--invert", tf.invert, "add a numerically inverted column");
  tail->add_option("--nodes", tf.nodes, "inversion node count");

  SimulateFlags sf;
  auto* simulate = app.add_subcommand("simulate", "regenerative event "
                                                  "simulation (CSV)");
  simulate->add_option("--config", sf.config_path,
                       "key=value or JSON config file");
  simulate->add_option("--lambda", sf.lambda, "symmetric total arrival rate");
  simulate->add_option("--mu", sf.mu, "symmetric service rate");
  simulate->add_option("--lambda1", sf.lambda1);
  simulate->add_option("--lambda2", sf.lambda2);
  simulate->add_option("--mu1", sf.mu1);
  simulate->add_option("--mu2", sf.mu2);
  simulate->add_option("--policy", sf.policy,
                       "SQF | HOL_PRIORITY_1 | HOL_PRIORITY_2");
  simulate->add_option("--service-law-1", sf.law1,
                       "Exponential | Deterministic | HyperExp2(p,m1,m2)");
  simulate->add_option("--service-law-2", sf.law2);
  simulate->add_option("--cycles", sf.cycles, "regeneration cycles");
  simulate->add_option("--grid", sf.grid, "comma-separated CCDF levels");
  simulate->add_option("--precision", sf.precision,
                       "required half-width on probability estimates");
  simulate->add_option("--replications", sf.replications);

  SweepFlags wf;
  auto* sweep = app.add_subcommand("sweep", "empty-queue probability over a "
                                            "load range (CSV)");
  sweep->add_option("--mu", wf.mu)->required();
  sweep->add_option("--rho-min", wf.rho_min)->required();
  sweep->add_option("--rho-max", wf.rho_max)->required();
  sweep->add_option("--steps", wf.steps)->required();
  sweep->add_flag("--simulate", wf.with_sim, "add simulated column");
  sweep->add_option("--cycles", wf.cycles, "cycles per simulated row");

  std::string level = "quick";
  auto* validate = app.add_subcommand("validate", "run the invariant battery");
  validate->add_option("--level", level, "quick | full")
      ->check(CLI::IsMember({"quick", "full"}));

  CLI11_PARSE(app, argc, argv);

  try {
    if (*analyze) {
      af.as_json = as_json;
      return cmd_analyze(af);
    }
    if (*tail) return cmd_tail(tf);
    if (*simulate) {
      sf.seed = seed;
      return cmd_simulate(sf, seed_opt->count() > 0);
    }
    if (*sweep) {
      wf.seed = seed;
      return cmd_sweep(wf);
    }
    if (*validate) return cmd_validate(level, as_json, seed, tol);
  } catch (const CliError& e) {
    std::fprintf(stderr, "%s\n", e.message.c_str());
    return e.code;
  } catch (const sqf::ParamError& e) {
    std::fprintf(stderr, "parameter error: %s\n", e.what());
    return kExitParams;
  } catch (const sqf::Error& e) {
    std::fprintf(stderr, "analytics failure: %s\n", e.what());
    return kExitAnalytics;
  }
  return kExitOk;
}
