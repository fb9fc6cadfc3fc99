#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "csoc/cli.hpp"
#include "csoc/control.hpp"
#include "csoc/dirac.hpp"
#include "csoc/errors.hpp"
#include "csoc/hjb.hpp"
#include "csoc/sde.hpp"
#include "csoc/wiener.hpp"

namespace py = pybind11;
using namespace csoc;

namespace {

Metric metric_of(const std::string& name) {
    if (name == "minus-plus") return Metric::minus_plus();
    if (name == "plus-minus") return Metric::plus_minus();
    throw DomainError("metric must be 'minus-plus' or 'plus-minus', got '" + name + "'");
}

EMFieldConfig em_of(double q, const Complex4& A, double m, double c, double hbar, const std::string& metric) {
    EMFieldConfig cfg;
    cfg.q = q;
    cfg.m = m;
    cfg.c = c;
    cfg.hbar = hbar;
    cfg.A = constant_potential(A);
    cfg.metric = metric_of(metric);
    return cfg;
}

// Python callables are only ever invoked from the calling thread here.
ScalarField py_field(py::function f) {
    ScalarField s;
    s.f = [f](double tau, const ComplexFourVector& z) { return f(tau, z.c).cast<Complex>(); };
    s.name = "python";
    return s;
}

py::array_t<double> rows_to_array(const std::vector<Real4>& rows) {
    py::array_t<double> out({static_cast<py::ssize_t>(rows.size()), py::ssize_t{4}});
    auto v = out.mutable_unchecked<2>();
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t mu = 0; mu < 4; ++mu) v(i, mu) = rows[i][mu];
    return out;
}

py::dict moment_dict(const MomentReport& rep) {
    py::list moments;
    for (const auto& m : rep.moments) {
        py::dict d;
        d["kind"] = to_string(m.kind);
        d["mu"] = m.mu;
        d["nu"] = m.nu;
        d["estimate"] = m.estimate;
        d["standard_error"] = m.standard_error;
        d["target"] = m.target;
        d["expected"] = m.expected;
        d["z_score"] = m.z_score;
        moments.append(d);
    }
    py::dict out;
    out["passed"] = rep.passed();
    out["max_abs_z"] = rep.max_abs_z();
    out["n"] = rep.n;
    out["moments"] = moments;
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Complex stochastic optimal control: diffusion, control, HJB and Dirac checks";
    m.attr("__version__") = cli::library_version();

    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<PreconditionError>(m, "PreconditionError", PyExc_ValueError);
    py::register_exception<SingularityError>(m, "SingularityError", PyExc_ArithmeticError);
    py::register_exception<ConvergenceError>(m, "ConvergenceError", PyExc_RuntimeError);
    py::register_exception<BranchError>(m, "BranchError", PyExc_ArithmeticError);
    py::register_exception<cli::ConfigError>(m, "ConfigError", PyExc_ValueError);

    m.def(
        "complex_sigma_squared",
        [](const Real4& sx, const Real4& sy, int eps, const std::string& metric) {
            const DiffusionSpec spec{sx, sy, eps, metric_of(metric)};
            spec.validate();
            return complex_sigma_squared(spec);
        },
        py::arg("sigma_x"), py::arg("sigma_y"), py::arg("epsilon") = 1, py::arg("metric") = "minus-plus");

    m.def(
        "sample_increments",
        [](double d_tau, std::size_t n, std::uint64_t seed, double hbar, double mass, int eps,
           const std::string& metric) {
            const auto b = sample_increments(DiffusionSpec::postulated(hbar, mass, eps, metric_of(metric)), d_tau, n, seed);
            return py::make_tuple(rows_to_array(b.dWx), rows_to_array(b.dWy));
        },
        "Paired increments (dWx, dWy) as two (n, 4) arrays.", py::arg("d_tau"), py::arg("n"), py::arg("seed") = 0,
        py::arg("hbar") = 1.0, py::arg("m") = 1.0, py::arg("epsilon") = 1, py::arg("metric") = "minus-plus");

    m.def(
        "moment_check",
        [](double d_tau, std::size_t n, std::uint64_t seed, double hbar, double mass, int eps, const std::string& metric,
           const Real4& v, const Real4& u) {
            py::gil_scoped_release release;
            const auto rep = moment_check(DiffusionSpec::postulated(hbar, mass, eps, metric_of(metric)), v, u, d_tau, n, seed);
            py::gil_scoped_acquire acquire;
            return moment_dict(rep);
        },
        py::arg("d_tau"), py::arg("n"), py::arg("seed") = 0, py::arg("hbar") = 1.0, py::arg("m") = 1.0,
        py::arg("epsilon") = 1, py::arg("metric") = "minus-plus", py::arg("v") = Real4{}, py::arg("u") = Real4{});

    m.def(
        "integrate",
        [](const Complex4& w, const Complex4& z0, double d_tau, std::size_t n_steps, std::size_t n_paths,
           std::uint64_t seed, std::size_t jobs, double hbar, double mass, int eps, const std::string& metric) {
            IntegrationSettings s;
            s.d_tau = d_tau;
            s.n_steps = n_steps;
            s.n_paths = n_paths;
            s.seed = seed;
            s.jobs = jobs;
            TrajectoryEnsemble e;
            {
                py::gil_scoped_release release;
                e = integrate(constant_policy(ComplexFourVector(w)),
                              DiffusionSpec::postulated(hbar, mass, eps, metric_of(metric)), ComplexFourVector(z0), s);
            }
            const auto steps = static_cast<py::ssize_t>(e.recorded_steps());
            py::array_t<double> out({static_cast<py::ssize_t>(n_paths), steps, py::ssize_t{8}});
            auto v = out.mutable_unchecked<3>();
            for (std::size_t p = 0; p < n_paths; ++p)
                for (py::ssize_t k = 0; k < steps; ++k)
                    for (py::ssize_t c = 0; c < 8; ++c) v(p, k, c) = e.at(p, k)[c];
            return out;
        },
        "Euler-Maruyama paths under a constant control: array (n_paths, n_steps + 1, 8) of x0..x3, y0..y3.",
        py::arg("w"), py::arg("z0") = Complex4{}, py::arg("d_tau") = 0.01, py::arg("n_steps") = 100,
        py::arg("n_paths") = 1, py::arg("seed") = 0, py::arg("jobs") = 1, py::arg("hbar") = 1.0, py::arg("m") = 1.0,
        py::arg("epsilon") = 1, py::arg("metric") = "minus-plus");

    m.def(
        "optimal_control",
        [](const Complex4& dJ, double q, const Complex4& A, double mass, double c, const std::string& metric) {
            const auto cfg = em_of(q, A, mass, c, 1.0, metric);
            const auto r = solve_optimal_control(em_lagrangian(cfg), 0.0, {}, ComplexFourVector(dJ, IndexPosition::Lower),
                                                 ComplexFourVector({1.0, 0.0, 0.0, 0.0}));
            py::dict out;
            out["w_star"] = r.w_star.c;
            out["iterations"] = r.iterations;
            out["max_residual"] = r.max_residual();
            return out;
        },
        "Newton solve of the stationarity condition for the EM Lagrangian; w_star is lower-index.", py::arg("dJ"),
        py::arg("q") = 0.0, py::arg("A") = Complex4{}, py::arg("m") = 1.0, py::arg("c") = 1.0,
        py::arg("metric") = "minus-plus");

    m.def(
        "closed_form_control",
        [](const Complex4& dJ, double q, const Complex4& A, double mass) {
            return em_closed_form_control(em_of(q, A, mass, 1.0, 1.0, "minus-plus"), 0.0, {},
                                          ComplexFourVector(dJ, IndexPosition::Lower))
                .c;
        },
        py::arg("dJ"), py::arg("q") = 0.0, py::arg("A") = Complex4{}, py::arg("m") = 1.0);

    m.def(
        "complex_derivative",
        [](py::function f, double tau, const Complex4& z, double h) {
            const auto r = complex_derivative(py_field(std::move(f)), tau, ComplexFourVector(z), h);
            py::dict out;
            out["d_z"] = r.d_z;
            out["max_cr"] = r.max_cr();
            out["max_consistency"] = r.max_consistency();
            return out;
        },
        "Central-difference derivative of f(tau, z) along x and y with Cauchy-Riemann residuals.", py::arg("f"),
        py::arg("tau"), py::arg("z"), py::arg("h") = 0.0);

    m.def(
        "analyticity_scan",
        [](py::function f, std::size_t n_probes, double half_width, double tol) {
            const auto probes = halton_probes(DomainBox::cube(0.0, 1.0, half_width), n_probes);
            const auto r = analyticity_scan(py_field(std::move(f)), probes, 0.0, tol);
            py::dict out;
            out["passed"] = r.passed;
            out["worst"] = r.worst();
            out["worst_cr"] = r.worst_cr;
            return out;
        },
        py::arg("f"), py::arg("n_probes") = 64, py::arg("half_width") = 1.0, py::arg("tol") = 1e-6);

    m.def(
        "hjb_residual",
        [](py::function J, double tau, const Complex4& z, double q, const Complex4& A, double hbar, double mass,
           int eps, const std::string& metric, double h) {
            const auto cfg = em_of(q, A, mass, 1.0, hbar, metric);
            HJBProblem P;
            P.L = em_lagrangian(cfg);
            P.spec = DiffusionSpec::postulated(hbar, mass, eps, cfg.metric);
            P.closed_form = [cfg](double t, const ComplexFourVector& x, const ComplexFourVector& dJ) {
                return em_closed_form_control(cfg, t, x, dJ);
            };
            return hjb_residual_complex(P, py_field(std::move(J)), tau, ComplexFourVector(z), h).residual;
        },
        "Complex HJB residual of J(tau, z) for the EM Lagrangian in a constant potential.", py::arg("J"),
        py::arg("tau"), py::arg("z"), py::arg("q") = 0.0, py::arg("A") = Complex4{}, py::arg("hbar") = 1.0,
        py::arg("m") = 1.0, py::arg("epsilon") = 1, py::arg("metric") = "minus-plus", py::arg("h") = 1e-3);

    m.def(
        "free_particle_kappa",
        [](double q, const Complex4& A, double mass, double c, const std::string& metric) {
            const auto J = free_particle_cost_to_go(em_of(q, A, mass, c, 1.0, metric), 1.0);
            return J(0.0, {});
        },
        "Slope kappa of the free-particle cost-to-go J = kappa (tau_f - tau).", py::arg("q"), py::arg("A"),
        py::arg("m") = 1.0, py::arg("c") = 1.0, py::arg("metric") = "minus-plus");

    m.def(
        "gammas", [](const std::string& metric) { return build_gammas(metric_of(metric)).gamma; },
        py::arg("metric") = "minus-plus");
    m.def(
        "clifford_error", [](const std::string& metric) { return clifford_error(build_gammas(metric_of(metric))); },
        py::arg("metric") = "minus-plus");

    m.def(
        "hopf_cole_check",
        [](py::function J, double tau, const Complex4& z, const std::string& metric, double h) {
            return hopf_cole_check(py_field(std::move(J)), tau, ComplexFourVector(z), metric_of(metric), h).discrepancy;
        },
        py::arg("J"), py::arg("tau"), py::arg("z"), py::arg("metric") = "minus-plus", py::arg("h") = 1e-3);

    m.def(
        "plane_wave_modes",
        [](const Complex4& p, double q, const Complex4& A, double mass, double c, double hbar, const std::string& metric) {
            const auto cfg = em_of(q, A, mass, c, hbar, metric);
            py::list out;
            for (const auto& mode : plane_wave_modes(cfg, build_gammas(cfg.metric), p))
                out.append(py::make_tuple(mode.lambda, mode.chi));
            return out;
        },
        "Eigenpairs (lambda, chi) of the plane-wave reduction, sorted by lambda.", py::arg("p"), py::arg("q") = 0.0,
        py::arg("A") = Complex4{}, py::arg("m") = 1.0, py::arg("c") = 1.0, py::arg("hbar") = 1.0,
        py::arg("metric") = "minus-plus");

    m.def("scenario_names", &cli::scenario_names);
    m.def(
        "run_scenario_json",
        [](const std::string& name, const std::string& ini) {
            cli::ScenarioResult r;
            {
                py::gil_scoped_release release;
                r = cli::run_scenario(name, ini.empty() ? cli::ScenarioConfig{} : cli::ScenarioConfig::from_ini(ini));
            }
            return py::make_tuple(r.passed, r.report.dump());
        },
        py::arg("name"), py::arg("ini") = "");
    m.def("default_config", [] { return cli::ScenarioConfig{}.to_ini(); });
}
