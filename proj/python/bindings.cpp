#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "robreg/demos.hpp"
#include "robreg/errors.hpp"
#include "robreg/evaluation.hpp"
#include "robreg/huber.hpp"
#include "robreg/optimizers.hpp"
#include "robreg/scenarios.hpp"

namespace py = pybind11;
using namespace robreg;

namespace {

std::string derivation_name(const RadiusDerivation& d) {
    if (std::holds_alternative<BoundedRule>(d)) return "bounded";
    if (std::holds_alternative<SubGaussianRule>(d)) return "subgaussian";
    return "explicit";
}

py::tuple draw_samples(const ProblemSpec& spec, std::uint64_t seed, std::size_t n) {
    const auto samples = sample_stream(spec, seed, n);
    Eigen::MatrixXd X(static_cast<Eigen::Index>(n), spec.d);
    Eigen::VectorXd y(static_cast<Eigen::Index>(n));
    std::vector<bool> corrupted(n);
    for (std::size_t i = 0; i < n; ++i) {
        X.row(static_cast<Eigen::Index>(i)) = samples[i].x.transpose();
        y[static_cast<Eigen::Index>(i)] = samples[i].y;
        corrupted[i] = samples[i].corrupted;
    }
    return py::make_tuple(X, y, corrupted);
}

// One run on a fresh stream; radius defaults to 6D + sigma, lambda to (1 - alpha) rho.
py::dict run(const ProblemSpec& spec, Algorithm algorithm, std::size_t T, std::uint64_t seed,
             std::optional<double> radius, std::optional<double> lambda, std::optional<double> eta0) {
    OptimizerConfig cfg;
    cfg.algorithm = algorithm;
    cfg.T = T;
    cfg.huber = radius ? HuberParams::explicit_radius(*radius) : radius_bounded(spec.D, spec.sigma());
    cfg.ball = BallConstraint(spec.D);
    cfg.lambda = lambda.value_or((1.0 - spec.alpha()) * spec.rho);
    cfg.eta0 = eta0;
    SampleStream stream(spec, seed);
    RunResult r;
    {
        py::gil_scoped_release release;
        r = run_optimizer(stream, cfg, spec.mean());
    }
    py::dict out;
    out["estimate"] = r.estimate;
    out["samples_consumed"] = r.samples_consumed;
    out["wall_ms"] = std::chrono::duration<double, std::milli>(r.wall_time).count();
    out["center"] = r.center;
    out["est_error"] = estimation_error(r.estimate, spec.w_star);
    return out;
}

} // namespace

PYBIND11_MODULE(_robreg, m) {
    m.doc() = "Huber SGD for linear regression under oblivious contamination";

    py::register_exception<ContractError>(m, "ContractError", PyExc_ValueError);
    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<StreamExhausted>(m, "StreamExhausted", PyExc_RuntimeError);

    m.def("huber_loss", &huber_loss, py::arg("s"), py::arg("R"));
    m.def("huber_clip", &huber_clip, py::arg("s"), py::arg("R"));
    m.def("huber_gradient", &huber_gradient, py::arg("w"), py::arg("x"), py::arg("y"), py::arg("center"),
          py::arg("R"));
    m.def("project_ball", &project_ball, py::arg("u"), py::arg("D"));

    py::class_<HuberParams>(m, "HuberParams")
        .def_readonly("radius", &HuberParams::radius)
        .def_property_readonly("derivation", [](const HuberParams& h) { return derivation_name(h.derivation); })
        .def("__repr__", [](const HuberParams& h) {
            return "HuberParams(radius=" + std::to_string(h.radius) + ", derivation=" + derivation_name(h.derivation) +
                   ")";
        });
    m.def("radius_bounded", &radius_bounded, py::arg("D"), py::arg("sigma"));
    m.def("radius_subgaussian", &radius_subgaussian, py::arg("D"), py::arg("sigma"), py::arg("kappa"),
          py::arg("rho"), py::arg("T"));

    py::enum_<Algorithm>(m, "Algorithm")
        .value("huber_uniform", Algorithm::huber_uniform)
        .value("huber_known_mean", Algorithm::huber_known_mean)
        .value("huber_unknown_mean", Algorithm::huber_unknown_mean)
        .value("huber_streaming_mean", Algorithm::huber_streaming_mean)
        .value("huber_noncentered", Algorithm::huber_noncentered)
        .value("l2_sgd", Algorithm::l2_sgd);

    py::class_<ProblemSpec>(m, "ProblemSpec")
        .def_readonly("d", &ProblemSpec::d)
        .def_readonly("D", &ProblemSpec::D)
        .def_readonly("w_star", &ProblemSpec::w_star)
        .def_readonly("rho", &ProblemSpec::rho)
        .def_property_readonly("alpha", &ProblemSpec::alpha)
        .def_property_readonly("sigma", &ProblemSpec::sigma)
        .def("mean", &ProblemSpec::mean);

    auto sc = m.def_submodule("scenarios", "Ready-made problem specs");
    sc.def("two_point_shift", &scenarios::two_point_shift, py::arg("C"), py::arg("alpha"), py::arg("w_star") = 1.0,
           py::arg("D") = 10.0);
    sc.def("indistinguishable", &scenarios::indistinguishable, py::arg("w_star"), py::arg("alpha") = 0.5);
    sc.def("uniform_box_experiment", &scenarios::uniform_box_experiment, py::arg("alpha"), py::arg("b") = 1e5,
           py::arg("d") = 5, py::arg("w_star_seed") = scenarios::kDefaultWStarSeed);
    sc.def("signed_basis", &scenarios::signed_basis, py::arg("d"), py::arg("alpha"), py::arg("M"),
           py::arg("sigma") = 0.1, py::arg("w_star_seed") = scenarios::kDefaultWStarSeed);
    sc.def("rank_deficient", &scenarios::rank_deficient, py::arg("d"), py::arg("rank"), py::arg("alpha"),
           py::arg("M"), py::arg("sigma") = 0.1, py::arg("w_star_seed") = scenarios::kDefaultWStarSeed);

    m.def("sample_stream", &draw_samples, py::arg("spec"), py::arg("seed"), py::arg("n"),
          "Returns (X, y, corrupted).");
    m.def("run", &run, py::arg("spec"), py::arg("algorithm"), py::arg("T"), py::arg("seed"),
          py::arg("radius") = py::none(), py::arg("lambda_") = py::none(), py::arg("eta0") = py::none());

    m.def("estimation_error", &estimation_error, py::arg("w"), py::arg("w_star"));
    m.def(
        "excess_risk_mc",
        [](const Vector& w, const ProblemSpec& spec, std::size_t n_mc, std::uint64_t seed) {
            const auto e = excess_risk_mc(w, spec, n_mc, seed);
            return py::make_tuple(e.estimate, e.std_error);
        },
        py::arg("w"), py::arg("spec"), py::arg("n_mc") = 100000, py::arg("seed") = 0);
    m.def("theoretical_bound", &theoretical_bound, py::arg("algorithm"), py::arg("D"), py::arg("R"),
          py::arg("alpha"), py::arg("rho"), py::arg("T"));
    m.def(
        "rate_fit",
        [](const std::vector<std::pair<double, double>>& pts) {
            const auto f = rate_fit(pts);
            py::dict out;
            out["slope"] = f.slope;
            out["intercept"] = f.intercept;
            out["r_squared"] = f.r_squared;
            return out;
        },
        py::arg("points"));

    m.def(
        "demo_example_2_1",
        [](double C, double alpha, std::size_t T, std::size_t seeds) {
            const auto r = demo_example_2_1(C, alpha, T, seeds);
            py::dict out;
            out["l2_estimate_mean"] = r.l2_estimate_mean;
            out["huber_estimate_mean"] = r.huber_estimate_mean;
            out["predicted_biased_optimum"] = r.predicted_biased_optimum;
            out["passed"] = r.passed();
            return out;
        },
        py::arg("C"), py::arg("alpha"), py::arg("T"), py::arg("seeds"));
    m.def(
        "demo_indistinguishable",
        [](std::size_t T, std::uint64_t seed) { return demo_indistinguishable(T, seed).tv_distance; },
        py::arg("T"), py::arg("seed"), "Empirical total-variation distance between the two response laws.");
}
