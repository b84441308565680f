#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "slrgap/harness.hpp"

namespace py = pybind11;
using namespace slrgap;

PYBIND11_MODULE(_core, m) {
  m.doc() = "reduction laboratory core: samplers, solvers, reductions, bound audits";

  py::class_<ModelParams>(m, "ModelParams")
      .def(py::init([](int d, int k, int n, double theta, double sigma2) {
             ModelParams p{d, k, n, theta > 0 ? theta : ModelParams::default_theta(k),
                           sigma2};
             p.validate();
             return p;
           }),
           py::arg("d"), py::arg("k"), py::arg("n"), py::arg("theta") = 0.0,
           py::arg("sigma2") = 1.0)
      .def_readonly("d", &ModelParams::d)
      .def_readonly("k", &ModelParams::k)
      .def_readonly("n", &ModelParams::n)
      .def_readonly("theta", &ModelParams::theta)
      .def_readonly("sigma2", &ModelParams::sigma2)
      .def_static("default_theta", &ModelParams::default_theta);

  m.def(
      "sample_spike",
      [](int d, int k, bool pin_first, std::uint64_t seed) {
        RngStream rng(seed);
        SpikeVector s = sample_spike(d, k, pin_first, rng);
        return py::make_tuple(s.entries, s.support);
      },
      py::arg("d"), py::arg("k"), py::arg("pin_first") = true, py::arg("seed") = 0,
      "Draw a sparse spike; returns (entries, support).");

  m.def(
      "sample_pair",
      [](const std::string& label, const ModelParams& params, std::uint64_t seed) {
        RngStream rng(seed);
        SampleMatrix mtx = sample_pair(hypothesis_from_string(label), params, rng);
        return mtx.data;
      },
      py::arg("label"), py::arg("params"), py::arg("seed") = 0,
      "Draw a paired sample matrix (n x 2(d+1)).");

  m.def(
      "derive_planted_slr",
      [](int k, double theta) {
        PlantedSlrParams p = derive_planted_slr(k, theta);
        return py::make_tuple(p.gamma, p.x_star_scale, p.sigma2_resid);
      },
      py::arg("k"), py::arg("theta"),
      "Returns (gamma, x_star_scale, sigma2_resid) of the planted decomposition.");

  m.def(
      "solve_lasso",
      [](const Matrix& A, const Vector& y, double lam, double sigma2_known,
         int max_sweeps, double tol_kkt) {
        SolverOptions opt;
        opt.lambda = lam;
        opt.max_sweeps = max_sweeps;
        opt.tol_kkt = tol_kkt;
        SolveRequest req{&A, &y, 0, sigma2_known, opt};
        SolveReport rep = solve_lasso(req);
        py::dict out;
        out["x_hat"] = rep.x_hat;
        out["sweeps"] = rep.sweeps_used;
        out["kkt_residual"] = rep.kkt_residual;
        out["converged"] = rep.converged;
        out["lambda"] = rep.lambda_used;
        return out;
      },
      py::arg("A"), py::arg("y"), py::arg("lam") = -1.0, py::arg("sigma2_known") = 1.0,
      py::arg("max_sweeps") = 10000, py::arg("tol_kkt") = 1e-8);

  m.def("prediction_error", &prediction_error, py::arg("A"), py::arg("x_hat"),
        py::arg("x_star"));

  m.def(
      "distinguish_pair",
      [](const std::string& truth, const ModelParams& params, const std::string& oracle,
         std::uint64_t seed) {
        RngStream rng(seed);
        SampleMatrix paired = sample_pair(hypothesis_from_string(truth), params, rng);
        SlrOracle o;
        if (oracle == "lasso") o = make_lasso_oracle({}, 1.5);
        else if (oracle == "exact") o = make_exact_oracle();
        else if (oracle == "zero") o = make_zero_oracle();
        else throw std::invalid_argument("oracle must be lasso, exact or zero");
        PairVerdict v = distinguish_pair(paired, o);
        py::dict out;
        out["verdict"] = to_string(v.label);
        out["stat_left"] = v.stat_left;
        out["stat_right"] = v.stat_right;
        out["pred_error"] = v.pred_error;
        return out;
      },
      py::arg("truth"), py::arg("params"), py::arg("oracle") = "exact",
      py::arg("seed") = 0,
      "Sample a pair under the given truth and run the threshold test.");

  m.def(
      "overlap_moment",
      [](int d, int k, int ell, bool include_first) {
        return overlap_moment_exact(d, k, ell, include_first).value;
      },
      py::arg("d"), py::arg("k"), py::arg("ell"), py::arg("include_first") = false);

  m.def(
      "ldlr_norm_bound",
      [](std::int64_t d, std::int64_t k, std::int64_t n, int D, double c_const) {
        LdlrParams p;
        p.d = d;
        p.k = k;
        p.n = n;
        p.D = D;
        p.c_const = c_const;
        LdlrNormBound b = ldlr_norm_bound(p, MomentMethod::LemmaBound);
        py::dict out;
        out["total"] = b.total;
        out["total_log"] = b.total_log;
        out["excess_log"] = b.excess_log;
        out["dominant_ell"] = b.dominant_ell;
        return out;
      },
      py::arg("d"), py::arg("k"), py::arg("n"), py::arg("D"),
      py::arg("c_const") = kMomentBoundC);

  m.def(
      "run_experiment_json",
      [](const std::string& config_json) {
        ExperimentReport rep = run_experiment(parse_config_json(config_json));
        return to_json(rep);
      },
      py::arg("config_json"),
      "Run an experiment from a JSON config string; returns the JSON report.");
}
