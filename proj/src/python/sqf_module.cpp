#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "sqf/algebra.hpp"
#include "sqf/errors.hpp"
#include "sqf/inversion.hpp"
#include "sqf/metrics.hpp"
#include "sqf/model.hpp"
#include "sqf/sim.hpp"
#include "sqf/solver.hpp"

namespace py = pybind11;
using namespace sqf;
using cd = std::complex<double>;

namespace {

sim::ServiceLaw law_from_string(const std::string& text, double p, double m1,
                                double m2) {
  if (text == "Exponential") return sim::ServiceLaw::exponential();
  if (text == "Deterministic") return sim::ServiceLaw::deterministic();
  if (text == "HyperExp2") return sim::ServiceLaw::hyperexp2(p, m1, m2);
  throw ParamError("unknown service law: " + text);
}

}  // namespace

PYBIND11_MODULE(_sqf, m) {
  m.doc() =
      "Symmetric two-queue shortest-queue-first workloads: exact transforms, "
      "tail asymptotics, Laplace inversion and regenerative simulation.";

  py::register_exception<ParamError>(m, "ParamError", PyExc_ValueError);
  py::register_exception<CutError>(m, "CutError", PyExc_ValueError);
  py::register_exception<PoleError>(m, "PoleError", PyExc_ValueError);
  py::register_exception<ContinuationError>(m, "ContinuationError",
                                            PyExc_RuntimeError);
  py::register_exception<SeriesError>(m, "SeriesError", PyExc_RuntimeError);

  py::enum_<model::Regime>(m, "Regime")
      .value("Supercritical", model::Regime::Supercritical)
      .value("Critical", model::Regime::Critical)
      .value("Subcritical", model::Regime::Subcritical);

  py::class_<model::SymmetricParams>(m, "SymmetricParams")
      .def_readonly("lambda_", &model::SymmetricParams::lambda)
      .def_readonly("mu", &model::SymmetricParams::mu)
      .def_readonly("rho", &model::SymmetricParams::rho)
      .def_readonly("sigma0", &model::SymmetricParams::sigma0)
      .def_readonly("zeta_minus", &model::SymmetricParams::zeta_minus)
      .def_readonly("zeta_plus", &model::SymmetricParams::zeta_plus)
      .def_readonly("s_tilde", &model::SymmetricParams::s_tilde)
      .def_readonly("r_ratio", &model::SymmetricParams::r_ratio)
      .def_readonly("regime", &model::SymmetricParams::regime)
      .def("__repr__", [](const model::SymmetricParams& p) {
        return "SymmetricParams(lambda=" + std::to_string(p.lambda) +
               ", mu=" + std::to_string(p.mu) + ")";
      });

  m.def("validate_symmetric", &model::validate_symmetric, py::arg("lambda_"),
        py::arg("mu"));

  py::class_<algebra::XiPair>(m, "XiPair")
      .def_readonly("xi_minus", &algebra::XiPair::xi_minus)
      .def_readonly("xi_plus", &algebra::XiPair::xi_plus)
      .def_readonly("at", &algebra::XiPair::at)
      .def_readonly("disc", &algebra::XiPair::disc);
  m.def("xi_pair", &algebra::xi_pair, py::arg("s"), py::arg("params"));

  py::class_<algebra::CubicRoots>(m, "CubicRoots")
      .def_readonly("alpha", &algebra::CubicRoots::alpha)
      .def_readonly("beta", &algebra::CubicRoots::beta)
      .def_readonly("gamma", &algebra::CubicRoots::gamma)
      .def_readonly("at", &algebra::CubicRoots::at)
      .def_readonly("max_residual", &algebra::CubicRoots::max_residual);
  m.def("cubic_roots", &algebra::cubic_roots, py::arg("z"), py::arg("params"));

  py::class_<algebra::Ramification>(m, "Ramification")
      .def_readonly("eta1", &algebra::Ramification::eta1)
      .def_readonly("eta2", &algebra::Ramification::eta2)
      .def_readonly("eta3", &algebra::Ramification::eta3)
      .def_readonly("eta4", &algebra::Ramification::eta4);
  m.def("ramification_points", &algebra::ramification_points,
        py::arg("params"));
  m.def("discriminant", &algebra::discriminant, py::arg("z"),
        py::arg("params"));

  py::class_<solver::SeriesEval>(m, "SeriesEval")
      .def_readonly("value", &solver::SeriesEval::value)
      .def_readonly("terms_used", &solver::SeriesEval::terms_used)
      .def_readonly("last_term", &solver::SeriesEval::last_term)
      .def_readonly("remainder_bound", &solver::SeriesEval::remainder_bound)
      .def_readonly("converged", &solver::SeriesEval::converged);
  m.def(
      "M_series",
      [](cd z, const model::SymmetricParams& p, double tol, int max_terms) {
        return solver::M_series(z, p, {tol, max_terms});
      },
      py::arg("z"), py::arg("params"), py::arg("tol") = 1e-13,
      py::arg("max_terms") = 200);

  py::class_<solver::GEval>(m, "GEval")
      .def_readonly("value", &solver::GEval::value)
      .def_readonly("route_a", &solver::GEval::route_a)
      .def_readonly("route_b", &solver::GEval::route_b)
      .def_readonly("discrepancy", &solver::GEval::discrepancy);
  m.def(
      "G_of_s",
      [](cd s, const model::SymmetricParams& p) { return solver::G_of_s(s, p); },
      py::arg("s"), py::arg("params"));
  m.def("G0", [](const model::SymmetricParams& p) { return solver::G0(p); },
        py::arg("params"));
  m.def("H_sym", &solver::H_sym, py::arg("s1"), py::arg("s2"),
        py::arg("params"));
  m.def("F0", &solver::F0, py::arg("s1"), py::arg("s2"), py::arg("params"));
  m.def("F_marginal", &solver::F_marginal, py::arg("s"), py::arg("params"));
  m.def("residual_functional_eq", &solver::residual_functional_eq,
        py::arg("z"), py::arg("params"));

  py::class_<metrics::TailLaw>(m, "TailLaw")
      .def_readonly("regime", &metrics::TailLaw::regime)
      .def_readonly("rate", &metrics::TailLaw::rate)
      .def_readonly("power", &metrics::TailLaw::power)
      .def_readonly("prefactor", &metrics::TailLaw::prefactor);
  py::enum_<metrics::SingularityKind>(m, "SingularityKind")
      .value("SimplePole", metrics::SingularityKind::SimplePole)
      .value("AlgebraicOrderHalf", metrics::SingularityKind::AlgebraicOrderHalf)
      .value("AlgebraicOrderMinusHalf",
             metrics::SingularityKind::AlgebraicOrderMinusHalf);
  py::class_<metrics::SingularityReport>(m, "SingularityReport")
      .def_readonly("location", &metrics::SingularityReport::location)
      .def_readonly("kind", &metrics::SingularityReport::kind)
      .def_readonly("leading_coeff",
                    &metrics::SingularityReport::leading_coeff);

  m.def(
      "empty_queue_probability",
      [](const model::SymmetricParams& p) {
        const auto e = metrics::empty_queue_probability(p);
        return py::make_tuple(e.g0, e.p_empty);
      },
      py::arg("params"), "returns (G0, P(U1=0))");
  m.def("sqf_tail_law", &metrics::sqf_tail_law, py::arg("params"));
  m.def("g_singularity", &metrics::g_singularity, py::arg("params"));
  m.def("hol_transform", &metrics::hol_transform, py::arg("s"),
        py::arg("params"));
  m.def("hol_tail_law", &metrics::hol_tail_law, py::arg("params"));
  m.def("hol_empty_prob", &metrics::hol_empty_prob, py::arg("params"));
  m.def("mm1_total_ccdf", &metrics::mm1_total_ccdf, py::arg("u"),
        py::arg("params"));
  m.def("tail_law_ccdf", &metrics::tail_law_ccdf, py::arg("law"),
        py::arg("u"));

  m.def(
      "invert_ccdf",
      [](double u, const std::string& which, const model::SymmetricParams& p,
         int node_count, double precision_target, const std::string& method) {
        inversion::InversionOptions opts;
        opts.node_count = node_count;
        opts.precision_target = precision_target;
        opts.method = (method == "talbot") ? inversion::Method::FixedTalbot
                                           : inversion::Method::EulerSummation;
        inversion::Transform f;
        if (which == "sqf")
          f = [p](cd s) { return solver::F_marginal(s, p); };
        else if (which == "hol_upper")
          f = [p](cd s) { return metrics::hol_transform(s, p); };
        else
          throw ParamError("transform must be 'sqf' or 'hol_upper'");
        return inversion::invert_ccdf(u, f, opts);
      },
      py::arg("u"), py::arg("transform"), py::arg("params"),
      py::arg("node_count") = 64, py::arg("precision_target") = 1e-8,
      py::arg("method") = "euler",
      "P(U1 > u) by numerical inversion of the named transform");

  py::class_<sim::Estimate>(m, "Estimate")
      .def_readonly("point", &sim::Estimate::point)
      .def_readonly("half_width_99", &sim::Estimate::half_width_99)
      .def_readonly("cycles", &sim::Estimate::cycles)
      .def("__repr__", [](const sim::Estimate& e) {
        return "Estimate(" + std::to_string(e.point) + " +- " +
               std::to_string(e.half_width_99) + ")";
      });

  py::class_<sim::SimOutput>(m, "SimOutput")
      .def_readonly("p_empty_1", &sim::SimOutput::p_empty_1)
      .def_readonly("p_empty_2", &sim::SimOutput::p_empty_2)
      .def_readonly("p_empty_both", &sim::SimOutput::p_empty_both)
      .def_readonly("frac_serving_1", &sim::SimOutput::frac_serving_1)
      .def_readonly("frac_serving_2", &sim::SimOutput::frac_serving_2)
      .def_readonly("p_le", &sim::SimOutput::p_le)
      .def_readonly("mean_u1", &sim::SimOutput::mean_u1)
      .def_readonly("mean_u2", &sim::SimOutput::mean_u2)
      .def_readonly("ccdf_1", &sim::SimOutput::ccdf_1)
      .def_readonly("ccdf_total", &sim::SimOutput::ccdf_total)
      .def_readonly("transform_u1", &sim::SimOutput::transform_u1)
      .def_readonly("ccdf_grid", &sim::SimOutput::ccdf_grid)
      .def_readonly("tie_events", &sim::SimOutput::tie_events)
      .def_readonly("total_time", &sim::SimOutput::total_time)
      .def_readonly("diagnostics", &sim::SimOutput::diagnostics);

  m.def(
      "simulate",
      [](double lambda1, double lambda2, double mu1, double mu2,
         const std::string& policy, long cycles, std::uint64_t seed,
         const std::vector<double>& ccdf_grid,
         const std::vector<double>& transform_s, const std::string& law1,
         const std::string& law2, const std::vector<double>& hyper1,
         const std::vector<double>& hyper2, int replications) {
        sim::SimConfig cfg;
        cfg.params = model::validate_general(lambda1, lambda2, mu1, mu2);
        if (policy == "SQF") cfg.policy = sim::Policy::SQF;
        else if (policy == "HOL_PRIORITY_1")
          cfg.policy = sim::Policy::HOL_PRIORITY_1;
        else if (policy == "HOL_PRIORITY_2")
          cfg.policy = sim::Policy::HOL_PRIORITY_2;
        else throw ParamError("unknown policy: " + policy);
        auto get3 = [](const std::vector<double>& v) {
          if (v.size() != 3)
            throw ParamError("HyperExp2 parameters must be (p, m1, m2)");
          return v;
        };
        cfg.service_law_1 =
            law1 == "HyperExp2"
                ? law_from_string(law1, get3(hyper1)[0], get3(hyper1)[1],
                                  get3(hyper1)[2])
                : law_from_string(law1, 0, 0, 0);
        cfg.service_law_2 =
            law2 == "HyperExp2"
                ? law_from_string(law2, get3(hyper2)[0], get3(hyper2)[1],
                                  get3(hyper2)[2])
                : law_from_string(law2, 0, 0, 0);
        cfg.cycles = cycles;
        cfg.seed = seed;
        cfg.ccdf_grid = ccdf_grid;
        cfg.transform_s = transform_s;
        cfg.replications = replications;
        return sim::simulate(cfg);
      },
      py::arg("lambda1"), py::arg("lambda2"), py::arg("mu1"), py::arg("mu2"),
      py::arg("policy") = "SQF", py::arg("cycles") = 10000,
      py::arg("seed") = 1, py::arg("ccdf_grid") = std::vector<double>{},
      py::arg("transform_s") = std::vector<double>{},
      py::arg("service_law_1") = "Exponential",
      py::arg("service_law_2") = "Exponential",
      py::arg("hyper1") = std::vector<double>{},
      py::arg("hyper2") = std::vector<double>{}, py::arg("replications") = 8);

  py::class_<sim::SlopeFit>(m, "SlopeFit")
      .def_readonly("rate", &sim::SlopeFit::rate)
      .def_readonly("power", &sim::SlopeFit::power)
      .def_readonly("intercept", &sim::SlopeFit::intercept)
      .def_readonly("points_used", &sim::SlopeFit::points_used);
  m.def(
      "tail_slope",
      [](const std::vector<double>& grid, const std::vector<double>& ccdf,
         double lo, double hi) {
        std::vector<sim::Estimate> est;
        est.reserve(ccdf.size());
        for (double v : ccdf) est.push_back({v, 0.0, 1});
        return sim::tail_slope(grid, est, lo, hi);
      },
      py::arg("grid"), py::arg("ccdf"), py::arg("window_lo") = 1e-5,
      py::arg("window_hi") = 1e-2);
}
