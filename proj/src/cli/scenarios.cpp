#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <exception>
#include <functional>
#include <sstream>
#include <thread>

#include "csoc/cli.hpp"
#include "csoc/control.hpp"
#include "csoc/dirac.hpp"
#include "csoc/errors.hpp"
#include "csoc/hjb.hpp"
#include "csoc/philox.hpp"
#include "csoc/sde.hpp"
#include "csoc/wiener.hpp"

namespace csoc::cli {

using json = nlohmann::ordered_json;

std::string format_double(double v) {
    std::array<char, 40> buf{};
    auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::general, 17);
    return std::string(buf.data(), end);
}

namespace {

/// Normals from the instance stream of the run seed; `stream` separates scenarios.
class InstanceRng {
public:
    InstanceRng(std::uint64_t seed, std::uint32_t stream) : seed_(seed), stream_(stream) {}

    double normal() {
        if (pos_ == 4) {
            buf_ = standard_normals(seed_, StreamPurpose::Instances, stream_, index_++);
            pos_ = 0;
        }
        return buf_[pos_++];
    }
    Complex complex(double scale = 1.0) {
        const double re = normal();
        return scale * Complex(re, normal());
    }
    Complex4 complex4(double scale = 1.0) { return {complex(scale), complex(scale), complex(scale), complex(scale)}; }

private:
    std::uint64_t seed_;
    std::uint32_t stream_;
    std::uint64_t index_ = 0;
    std::array<double, 4> buf_{};
    std::size_t pos_ = 4;
};

/// Collects named checks; the scenario passes iff all of them do.
class Checks {
public:
    bool add(const std::string& name, double value, double tolerance, bool below = true) {
        const bool ok = std::isfinite(value) && (below ? value < tolerance : value > tolerance);
        list_.push_back({{"name", name},
                         {"value", value},
                         {below ? "below" : "above", tolerance},
                         {"passed", ok}});
        all_ = all_ && ok;
        return ok;
    }
    void flag(const std::string& name, bool ok) {
        list_.push_back({{"name", name}, {"passed", ok}});
        all_ = all_ && ok;
    }
    bool passed() const { return all_; }
    const json& list() const { return list_; }

private:
    json list_ = json::array();
    bool all_ = true;
};

/// fn(i) for i in [0, n), spread over `jobs` threads; results land at their index.
template <class T>
std::vector<T> parallel_map(std::size_t n, std::size_t jobs, const std::function<T(std::size_t)>& fn) {
    std::vector<T> out(n);
    jobs = std::max<std::size_t>(1, std::min(jobs, n));
    if (jobs == 1) {
        for (std::size_t i = 0; i < n; ++i) out[i] = fn(i);
        return out;
    }
    std::vector<std::exception_ptr> errors(jobs);
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < jobs; ++t) {
        pool.emplace_back([&, t] {
            try {
                for (std::size_t i = t; i < n; i += jobs) out[i] = fn(i);
            } catch (...) {
                errors[t] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return out;
}

class Csv {
public:
    explicit Csv(std::initializer_list<std::string> header) {
        bool first = true;
        for (const auto& h : header) {
            os_ << (first ? "" : ",") << h;
            first = false;
        }
        os_ << "\n";
    }
    template <class... Ts>
    void row(const Ts&... cells) {
        bool first = true;
        ((os_ << (first ? "" : ",") << cell(cells), first = false), ...);
        os_ << "\n";
    }
    std::string str() const { return os_.str(); }

private:
    static std::string cell(double v) { return format_double(v); }
    static std::string cell(const std::string& s) { return s; }
    static std::string cell(const char* s) { return s; }
    template <class I, class = std::enable_if_t<std::is_integral_v<I>>>
    static std::string cell(I v) { return std::to_string(v); }

    std::ostringstream os_;
};

json complex_json(Complex c) { return json::array({c.real(), c.imag()}); }

json vector_json(const ComplexFourVector& v) {
    json a = json::array();
    for (std::size_t mu = 0; mu < 4; ++mu) a.push_back(complex_json(v[mu]));
    return a;
}

DiffusionSpec spec_of(const ScenarioConfig& cfg) {
    const Metric g = cfg.metric_value();
    if (cfg.diffusion == "postulated") return DiffusionSpec::postulated(cfg.hbar, cfg.m, cfg.epsilon, g);
    return DiffusionSpec{cfg.sigma_x, cfg.sigma_y, cfg.epsilon, g};
}

EMFieldConfig em_of(const ScenarioConfig& cfg) {
    EMFieldConfig em;
    em.q = cfg.q;
    em.m = cfg.m;
    em.c = cfg.c;
    em.hbar = cfg.hbar;
    em.metric = cfg.metric_value();
    em.A = potential_from_name(cfg.potential);
    em.potential_name = cfg.potential;
    return em;
}

DomainBox box_of(const ScenarioConfig& cfg) { return DomainBox::cube(0.0, cfg.tau_f, cfg.half_width); }

/// Probes strictly inside the box in tau as well, so tau stencils stay inside.
std::vector<Probe> interior_probes(const ScenarioConfig& cfg, std::size_t n, double margin) {
    const DomainBox inner = DomainBox::cube(0.05 * cfg.tau_f, 0.95 * cfg.tau_f, cfg.half_width);
    return halton_probes(inner, n, margin);
}

ScalarField named_field(std::string name, ScalarFn f, const DomainBox& box) {
    ScalarField s;
    s.f = std::move(f);
    s.box = box;
    s.name = std::move(name);
    return s;
}

bool potential_is_constant(const EMFieldConfig& em) {
    const ComplexFourVector a = em.potential(0.0, {});
    const ComplexFourVector b = em.potential(0.37, ComplexFourVector({Complex(0.3, -0.2), 0.7, -0.4, Complex(0.1, 0.5)}));
    for (std::size_t mu = 0; mu < 4; ++mu)
        if (a[mu] != b[mu]) return false;
    return true;
}

json base_report(const std::string& name, const ScenarioConfig& cfg, std::initializer_list<const char*> verifies) {
    json r;
    r["scenario"] = name;
    r["verifies"] = json::array();
    for (const char* v : verifies) r["verifies"].push_back(v);
    r["passed"] = false;
    r["seed"] = cfg.seed;
    return r;
}

void finish(ScenarioResult& res, const Checks& checks) {
    res.passed = checks.passed();
    res.report["passed"] = res.passed;
    res.report["checks"] = checks.list();
}

// ---------------------------------------------------------------------------

ScenarioResult scenario_moments(const ScenarioConfig& cfg) {
    ScenarioResult res;
    res.name = "moments";
    res.report = base_report(res.name, cfg, {"increment-moments", "complex-diffusion-coefficient"});
    const DiffusionSpec spec = spec_of(cfg);
    const auto rep = moment_check(spec, cfg.drift_v, cfg.drift_u, cfg.d_tau, cfg.n_samples, cfg.seed);

    Checks checks;
    checks.add("max |z| over all moments", rep.max_abs_z(), rep.z_threshold);

    const Complex4 ss = complex_sigma_squared(spec);
    json sigma = json::array();
    double worst = 0.0;
    for (std::size_t mu = 0; mu < 4; ++mu) {
        const double sx = spec.sigma_x[mu], sy = spec.sigma_y[mu];
        const Complex expected(sx * sx - sy * sy, 2.0 * spec.correlation_sign(mu) * sx * sy);
        worst = std::max(worst, std::abs(ss[mu] - expected));
        sigma.push_back(complex_json(ss[mu]));
    }
    checks.add("complex sigma squared against the per-axis formula", worst, 1e-15 * (1.0 + cfg.hbar / cfg.m));

    json moments = json::array();
    Csv csv({"kind", "mu", "nu", "estimate", "standard_error", "target", "expected", "z_score", "flagged"});
    for (const auto& m : rep.moments) {
        moments.push_back({{"kind", to_string(m.kind)},
                           {"mu", m.mu},
                           {"nu", m.nu},
                           {"estimate", m.estimate},
                           {"standard_error", m.standard_error},
                           {"target", m.target},
                           {"expected", m.expected},
                           {"z_score", m.z_score},
                           {"flagged", m.flagged}});
        csv.row(to_string(m.kind), m.mu, m.nu, m.estimate, m.standard_error, m.target, m.expected, m.z_score,
                m.flagged ? 1 : 0);
    }
    res.report["n"] = rep.n;
    res.report["d_tau"] = rep.d_tau;
    res.report["max_abs_z"] = rep.max_abs_z();
    res.report["sigma_sigma"] = sigma;
    res.report["moments"] = moments;
    res.tables.push_back({"moments.csv", csv.str()});
    finish(res, checks);
    return res;
}

ScenarioResult scenario_sde_demo(const ScenarioConfig& cfg) {
    ScenarioResult res;
    res.name = "sde-demo";
    res.report = base_report(res.name, cfg, {"paired-sde", "shared-increments"});
    const DiffusionSpec spec = spec_of(cfg);
    const EMFieldConfig em = em_of(cfg);
    const Metric g = em.metric;
    const ComplexFourVector zero_grad(Complex4{}, IndexPosition::Lower);
    const ControlPolicy policy = [em, g, zero_grad](double tau, const ComplexFourVector& z) {
        return em_closed_form_control(em, tau, z, zero_grad).raised(g);
    };

    IntegrationSettings s;
    s.d_tau = cfg.d_tau;
    s.n_steps = cfg.n_steps;
    s.n_paths = cfg.n_paths;
    s.seed = cfg.seed;
    s.jobs = cfg.jobs;
    s.recording = Recording::Endpoints;
    const ComplexFourVector z0{};
    const auto ens = integrate(policy, spec, z0, s);
    const double T = s.tau_final() - s.tau0;

    Checks checks;
    checks.add("failed paths", static_cast<double>(ens.failed_paths.size()), 0.5);

    // spatial drifts are constant for every preset potential
    const ComplexFourVector w = policy(0.0, z0);
    json axes = json::array();
    const double n = static_cast<double>(ens.n_paths);
    for (std::size_t mu = 1; mu < 4; ++mu) {
        double mean = 0.0, m2 = 0.0, identity = 0.0;
        for (std::size_t p = 0; p < ens.n_paths; ++p) {
            const auto& st = ens.final_state(p);
            const double dx = st[mu] - w[mu].real() * T;
            const double dy = st[4 + mu] - w[mu].imag() * T;
            mean += dx;
            m2 += dx * dx;
            if (spec.sigma_x[mu] > 0.0)
                identity = std::max(identity, std::abs(dy - spec.correlation_sign(mu) * spec.sigma_y[mu] /
                                                                spec.sigma_x[mu] * dx));
        }
        mean /= n;
        const double var = (m2 - n * mean * mean) / (n - 1.0);
        const double target = spec.sigma_x[mu] * spec.sigma_x[mu] * T;
        const double se = target * std::sqrt(2.0 / (n - 1.0));
        axes.push_back({{"axis", mu}, {"variance", var}, {"target", target}, {"standard_error", se},
                        {"shared_increment_residual", identity}});
        if (se > 0.0) checks.add("variance z-score axis " + std::to_string(mu), std::abs(var - target) / se, 5.0);
        checks.add("shared-increment identity axis " + std::to_string(mu), identity, 1e-9 * (1.0 + target));
    }

    const Lagrangian L = em_lagrangian(em);
    const auto action = estimate_action(L, policy, spec, z0, s);
    res.report["action"] = {{"mean", complex_json(action.mean)},
                            {"stderr_re", action.stderr_re},
                            {"stderr_im", action.stderr_im},
                            {"n_valid", action.n_valid},
                            {"n_excluded", action.n_excluded}};
    checks.flag("action estimate valid", action.valid);
    if (potential_is_constant(em)) {
        const Complex exact = L.value(0.0, z0, w) * T;
        res.report["action"]["deterministic_value"] = complex_json(exact);
        checks.add("action equals L(w*) T for a constant control", std::abs(action.mean - exact),
                   1e-9 * std::max(1.0, std::abs(exact)));
    }

    IntegrationSettings few = s;
    few.n_paths = std::min<std::size_t>(8, s.n_paths);
    few.recording = Recording::Full;
    std::ostringstream traj;
    write_trajectory_csv(traj, integrate(policy, spec, z0, few));

    res.report["n_paths"] = ens.n_paths;
    res.report["n_steps"] = ens.n_steps;
    res.report["d_tau"] = ens.d_tau;
    res.report["control"] = vector_json(w);
    res.report["axes"] = axes;
    res.tables.push_back({"trajectories.csv", traj.str()});
    finish(res, checks);
    return res;
}

/// Five analytic fields and two non-analytic ones; used by cr-scan.
std::vector<std::pair<ScalarField, bool>> cr_fields(const DomainBox& box) {
    std::vector<std::pair<ScalarField, bool>> f;
    f.push_back({named_field("polynomial",
                             [](double tau, const ComplexFourVector& z) {
                                 return z[0] * z[0] - 0.5 * z[1] * z[2] + Complex(0.3, 0.2) * z[3] * z[3] * z[3] +
                                        tau * z[1];
                             },
                             box),
                 true});
    f.push_back({named_field("exponential",
                             [](double, const ComplexFourVector& z) {
                                 return std::exp(0.3 * z[0] - Complex(0.0, 0.2) * z[1] + 0.1 * z[2] * z[3]);
                             },
                             box),
                 true});
    f.push_back({named_field("trigonometric",
                             [](double, const ComplexFourVector& z) {
                                 return std::sin(z[0] + 0.5 * z[1]) * std::cos(0.3 * z[2]) + z[3];
                             },
                             box),
                 true});
    f.push_back({named_field("rational",
                             [](double, const ComplexFourVector& z) {
                                 return 1.0 / (3.0 + z[0] + Complex(0.0, 0.5) * z[1] + 0.2 * z[2]);
                             },
                             box),
                 true});
    f.push_back({named_field("logarithm",
                             [](double, const ComplexFourVector& z) {
                                 return std::log(6.0 + 0.5 * (z[0] + z[1] * z[2] + z[3]));
                             },
                             box),
                 true});
    f.push_back({named_field("modulus-squared",
                             [](double, const ComplexFourVector& z) { return std::norm(z[0]) + z[1]; }, box),
                 false});
    f.push_back({named_field("conjugate",
                             [](double, const ComplexFourVector& z) { return std::conj(z[1]) * z[2]; }, box),
                 false});
    return f;
}

ScenarioResult scenario_cr_scan(const ScenarioConfig& cfg) {
    ScenarioResult res;
    res.name = "cr-scan";
    res.report = base_report(res.name, cfg, {"cauchy-riemann", "complex-derivative-routes"});
    const double tol = 1e-6;
    const DomainBox box = box_of(cfg);
    const auto probes = halton_probes(box, cfg.probes, 0.01 * cfg.half_width);

    struct Row {
        double cr = 0.0, consistency = 0.0, second = 0.0;
    };
    Checks checks;
    json fields = json::array();
    Csv csv({"field", "analytic", "probe", "tau", "worst_cr", "worst_consistency", "worst_second_route"});
    for (const auto& [field, analytic] : cr_fields(box)) {
        const auto rows = parallel_map<Row>(probes.size(), cfg.jobs, [&, &field = field](std::size_t i) {
            const auto d1 = complex_derivative(field, probes[i].tau, probes[i].z);
            const auto d2 = second_complex_derivative(field, probes[i].tau, probes[i].z);
            return Row{d1.max_cr(), d1.max_consistency(), d2.max_discrepancy()};
        });
        double worst = 0.0;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            worst = std::max({worst, rows[i].cr, rows[i].consistency, rows[i].second});
            csv.row(field.name, analytic ? 1 : 0, i, probes[i].tau, rows[i].cr, rows[i].consistency, rows[i].second);
        }
        fields.push_back({{"field", field.name}, {"analytic", analytic}, {"worst_residual", worst}});
        if (analytic) checks.add(field.name + " residual", worst, tol);
        else checks.add(field.name + " detected as non-analytic", worst, 0.1, false);
    }
    res.report["probes"] = probes.size();
    res.report["tolerance"] = tol;
    res.report["fields"] = fields;
    res.tables.push_back({"cr-scan.csv", csv.str()});
    finish(res, checks);
    return res;
}

ScenarioResult scenario_optimal_control(const ScenarioConfig& cfg) {
    ScenarioResult res;
    res.name = "optimal-control";
    res.report = base_report(res.name, cfg, {"optimal-control-closed-form"});
    const ComplexFourVector guess({1.0, 0.0, 0.0, 0.0});
    Checks checks;

    struct Example {
        const char* label;
        double q;
        Complex4 A;
        Complex dJ0;
        Complex expected;
    };
    const Example examples[] = {
        {"free, unit gradient", 0.0, {}, 1.0, -1.0},
        {"charged, constant potential", 2.0, {0.1, 0.0, 0.0, 0.0}, 0.3, -0.5},
        {"free, complex gradient", 0.0, {}, Complex(0.1, 0.2), Complex(-0.1, -0.2)},
    };
    json ex = json::array();
    for (const auto& e : examples) {
        EMFieldConfig em;
        em.q = e.q;
        em.A = constant_potential(e.A);
        const auto r = solve_optimal_control(em_lagrangian(em), 0.0, {}, ComplexFourVector({e.dJ0, 0, 0, 0},
                                                                                           IndexPosition::Lower),
                                             guess);
        const double err = std::abs(r.w_star[0] - e.expected);
        ex.push_back({{"case", e.label}, {"w_star_0", complex_json(r.w_star[0])}, {"expected", complex_json(e.expected)},
                      {"error", err}, {"iterations", r.iterations}});
        checks.add(std::string("example: ") + e.label, err, 1e-10);
    }

    const EMFieldConfig em = em_of(cfg);
    const Lagrangian L = em_lagrangian(em);
    InstanceRng rng(cfg.seed, 4);
    Csv csv({"instance", "mu", "newton_re", "newton_im", "closed_re", "closed_im"});
    double worst = 0.0, worst_residual = 0.0;
    const std::size_t n = 20;
    for (std::size_t k = 0; k < n; ++k) {
        const ComplexFourVector z(rng.complex4(0.5 * cfg.half_width));
        const ComplexFourVector dJ(rng.complex4(0.5), IndexPosition::Lower);
        const auto r = solve_optimal_control(L, 0.5 * cfg.tau_f, z, dJ, guess);
        const auto w = em_closed_form_control(em, 0.5 * cfg.tau_f, z, dJ);
        for (std::size_t mu = 0; mu < 4; ++mu) {
            worst = std::max(worst, std::abs(r.w_star[mu] - w[mu]));
            csv.row(k, mu, r.w_star[mu].real(), r.w_star[mu].imag(), w[mu].real(), w[mu].imag());
        }
        worst_residual = std::max(worst_residual, r.max_residual());
    }
    checks.add("random instances: Newton against closed form", worst, 1e-10);
    checks.add("random instances: stationarity residual", worst_residual, 1e-10);
    res.report["examples"] = ex;
    res.report["instances"] = n;
    res.report["max_difference"] = worst;
    res.report["max_residual"] = worst_residual;
    res.tables.push_back({"optimal-control.csv", csv.str()});
    finish(res, checks);
    return res;
}

ScenarioResult scenario_equivalence_audit(const ScenarioConfig& cfg) {
    ScenarioResult res;
    res.name = "equivalence-audit";
    res.report = base_report(res.name, cfg, {"real-imaginary-stationarity-equivalence"});
    const double tol = 1e-8;
    const DomainBox box = box_of(cfg);
    const auto all_probes = halton_probes(box, std::max<std::size_t>(cfg.probes, 20), 0.01 * cfg.half_width);
    InstanceRng rng(cfg.seed, 5);
    Checks checks;

    json instances = json::array();
    Csv csv({"instance", "probe", "tau", "disagreement", "closed_form_difference", "singular"});
    double worst = 0.0, worst_closed = 0.0;
    std::size_t singular = 0;
    const std::size_t n = 20;
    for (std::size_t k = 0; k < n; ++k) {
        EMFieldConfig em = em_of(cfg);
        em.A = constant_potential(rng.complex4(0.3));
        em.potential_name = "random constant";
        const Complex4 a = rng.complex4(0.3), b = rng.complex4(0.3);
        const Complex c0 = rng.complex(0.3);
        const double tau_f = cfg.tau_f;
        const auto J = named_field(
            "random quadratic",
            [a, b, c0, tau_f](double tau, const ComplexFourVector& z) {
                Complex s = c0 * (tau_f - tau);
                for (std::size_t mu = 0; mu < 4; ++mu) s += a[mu] * z[mu] * z[(mu + 1) % 4] + b[mu] * z[mu];
                return s;
            },
            box);
        const std::vector<Probe> probes{all_probes[k % all_probes.size()]};
        const auto closed = [em](double tau, const ComplexFourVector& z, const ComplexFourVector& dJ) {
            return em_closed_form_control(em, tau, z, dJ);
        };
        const auto rep = equivalence_audit(em_lagrangian(em), J, probes, tol, closed);
        for (std::size_t i = 0; i < rep.entries.size(); ++i) {
            const auto& e = rep.entries[i];
            csv.row(k, i, e.probe.tau, e.disagreement, e.closed_form_difference, e.singular ? 1 : 0);
        }
        worst = std::max(worst, rep.max_disagreement);
        worst_closed = std::max(worst_closed, rep.max_closed_form_difference);
        singular += rep.n_singular;
        instances.push_back({{"instance", k},
                             {"max_disagreement", rep.max_disagreement},
                             {"max_closed_form_difference", rep.max_closed_form_difference},
                             {"passed", rep.passed()}});
    }
    checks.add("real-part and imaginary-part roots", worst, tol);
    checks.add("complex root against closed form", worst_closed, 1e-10);
    checks.add("singular probes on random instances", static_cast<double>(singular), 0.5);

    // the branch point must be flagged and a non-analytic J refused
    {
        EMFieldConfig em = em_of(cfg);
        em.q = 0.0;
        const auto zero = named_field("zero", [](double, const ComplexFourVector&) { return Complex(0.0, 0.0); }, box);
        const auto rep = equivalence_audit(em_lagrangian(em), zero, {all_probes[0]}, tol);
        checks.flag("branch point flagged as singular", rep.n_singular == 1 && !rep.passed());
        const auto conj = named_field("conjugate", [](double, const ComplexFourVector& z) { return std::conj(z[0]); },
                                      box);
        bool refused = false;
        try {
            (void)equivalence_audit(em_lagrangian(em), conj, {all_probes[0]}, tol);
        } catch (const PreconditionError&) {
            refused = true;
        }
        checks.flag("non-analytic cost-to-go refused", refused);
    }
    res.report["instances"] = instances;
    res.report["max_disagreement"] = worst;
    res.report["max_closed_form_difference"] = worst_closed;
    res.tables.push_back({"equivalence-audit.csv", csv.str()});
    finish(res, checks);
    return res;
}

std::vector<ScalarField> hjb_families(const ScenarioConfig& cfg) {
    const DomainBox box = box_of(cfg);
    const double tau_f = cfg.tau_f;
    return {
        named_field("quadratic",
                    [tau_f](double tau, const ComplexFourVector& z) {
                        return Complex(0.3, -0.1) * z[0] * z[0] + 0.2 * z[1] * z[2] + Complex(0.1, 0.2) * z[3] +
                               0.4 * (tau_f - tau);
                    },
                    box),
        named_field("exponential",
                    [tau_f](double tau, const ComplexFourVector& z) {
                        return 0.5 * std::exp(0.2 * z[0] - Complex(0.0, 0.3) * z[1] + 0.1 * z[3]) * (1.0 + tau_f - tau);
                    },
                    box),
        named_field("trigonometric",
                    [](double tau, const ComplexFourVector& z) {
                        return 0.3 * std::sin(z[1] + 0.5 * z[2]) + 0.2 * std::cos(z[0] - 0.4 * tau) + 0.1 * z[3] * z[0];
                    },
                    box),
    };
}

ScenarioResult scenario_hjb_residual(const ScenarioConfig& cfg) {
    ScenarioResult res;
    res.name = "hjb-residual";
    res.report = base_report(res.name, cfg,
                             {"complex-hjb", "real-imaginary-hjb-pair", "free-particle-cost-to-go", "terminal-condition"});
    const EMFieldConfig em = em_of(cfg);
    HJBProblem P;
    P.L = em_lagrangian(em);
    P.spec = spec_of(cfg);
    P.tau_f = cfg.tau_f;
    P.box = box_of(cfg);
    P.closed_form = [em](double tau, const ComplexFourVector& z, const ComplexFourVector& dJ) {
        return em_closed_form_control(em, tau, z, dJ);
    };
    const double h = 1e-3;
    const auto probes = interior_probes(cfg, cfg.probes, 4.0 * h);
    Checks checks;

    const ScalarField J = free_particle_cost_to_go(em, cfg.tau_f, P.box);
    const auto residuals = parallel_map<HJBResidual>(
        probes.size(), cfg.jobs, [&](std::size_t i) { return hjb_residual_complex(P, J, probes[i].tau, probes[i].z, h); });
    json records = json::array();
    Csv csv({"probe", "tau", "residual_re", "residual_im", "abs_residual"});
    double worst = 0.0;
    for (std::size_t i = 0; i < probes.size(); ++i) {
        const auto& r = residuals[i];
        worst = std::max(worst, std::abs(r.residual));
        records.push_back(residual_record(probes[i].tau, probes[i].z, r));
        csv.row(i, probes[i].tau, r.residual.real(), r.residual.imag(), std::abs(r.residual));
    }
    const double boundary = boundary_violation(J, cfg.tau_f, probes);
    checks.add("free-particle residual", worst, 1e-6);
    checks.add("terminal condition", boundary, 1e-12);
    res.report["free_particle"] = {{"cost_to_go", J.name},
                                   {"max_abs_residual", worst},
                                   {"boundary_violation", boundary},
                                   {"probes", records}};

    const bool equal_sigma = P.spec.sigma_x == P.spec.sigma_y;
    json families = json::array();
    Csv pcsv({"family", "probe", "tau", "difference", "tolerance", "non_mixed_R", "non_mixed_I"});
    for (const auto& F : hjb_families(cfg)) {
        const auto cons = parallel_map<PairConsistency>(probes.size(), cfg.jobs, [&](std::size_t i) {
            return pair_complex_consistency(P, F, probes[i].tau, probes[i].z, h);
        });
        double worst_ratio = 0.0, worst_diff = 0.0, worst_nm = 0.0;
        std::size_t failed = 0;
        for (std::size_t i = 0; i < cons.size(); ++i) {
            const auto& c = cons[i];
            if (!c.passed) ++failed;
            worst_diff = std::max(worst_diff, c.difference);
            if (c.tolerance > 0.0) worst_ratio = std::max(worst_ratio, c.difference / c.tolerance);
            worst_nm = std::max({worst_nm, std::abs(c.pair.non_mixed_R), std::abs(c.pair.non_mixed_I)});
            pcsv.row(F.name, i, probes[i].tau, c.difference, c.tolerance, c.pair.non_mixed_R, c.pair.non_mixed_I);
        }
        families.push_back({{"family", F.name},
                            {"max_difference", worst_diff},
                            {"max_difference_over_tolerance", worst_ratio},
                            {"failed_probes", failed},
                            {"max_non_mixed", worst_nm}});
        checks.add(F.name + ": probes outside 5x stencil error", static_cast<double>(failed), 0.5);
        if (equal_sigma) checks.add(F.name + ": non-mixed cancellation", worst_nm, 1e-6);
    }
    res.report["pair_consistency"] = families;
    res.report["non_mixed_cancellation_expected"] = equal_sigma;
    res.tables.push_back({"hjb-residual.csv", csv.str()});
    res.tables.push_back({"hjb-pair.csv", pcsv.str()});
    finish(res, checks);
    return res;
}

ScenarioResult scenario_covariance(const ScenarioConfig& cfg) {
    ScenarioResult res;
    res.name = "covariance";
    res.report = base_report(res.name, cfg, {"dalembertian-lorentz-invariance"});
    const Metric g = cfg.metric_value();
    const double h = 1e-3;
    InstanceRng rng(cfg.seed, 6);
    std::array<Complex4, 4> S{};
    for (std::size_t a = 0; a < 4; ++a)
        for (std::size_t b = a; b < 4; ++b) S[a][b] = S[b][a] = rng.complex(0.5);

    const std::vector<ScalarField> fields{
        named_field("interval", [g](double, const ComplexFourVector& z) { return contract(z, z, g); }, {}),
        named_field("partial-sum", [](double, const ComplexFourVector& z) { return z[0] * z[0] + z[1] * z[1]; }, {}),
        named_field("random-quadratic",
                    [S](double, const ComplexFourVector& z) {
                        Complex s = 0.0;
                        for (std::size_t a = 0; a < 4; ++a)
                            for (std::size_t b = 0; b < 4; ++b) s += S[a][b] * z[a] * z[b];
                        return s;
                    },
                    {}),
    };
    const auto probes = halton_probes(box_of(cfg), cfg.probes);
    const double rapidities[] = {0.1, 0.25, 0.5};
    Checks checks;
    json rows = json::array();
    Csv csv({"field", "axis", "rapidity", "probe", "at_z_re", "at_z_im", "discrepancy"});
    for (const auto& F : fields) {
        double worst = 0.0;
        for (std::size_t axis = 1; axis <= 3; ++axis) {
            for (double eta : rapidities) {
                const auto out = parallel_map<CovarianceResult>(probes.size(), cfg.jobs, [&](std::size_t i) {
                    return covariance_check(F, Boost{axis, eta}, probes[i].tau, probes[i].z, g, h);
                });
                for (std::size_t i = 0; i < out.size(); ++i) {
                    worst = std::max(worst, out[i].discrepancy);
                    csv.row(F.name, axis, eta, i, out[i].at_z.real(), out[i].at_z.imag(), out[i].discrepancy);
                }
            }
        }
        rows.push_back({{"field", F.name}, {"max_discrepancy", worst}});
        checks.add(F.name + " invariance", worst, 1e-6);
    }
    res.report["max_rapidity"] = 0.5;
    res.report["fields"] = rows;
    res.tables.push_back({"covariance.csv", csv.str()});
    finish(res, checks);
    return res;
}

ScenarioResult scenario_hopf_cole(const ScenarioConfig& cfg) {
    ScenarioResult res;
    res.name = "hopf-cole";
    res.report = base_report(res.name, cfg, {"hopf-cole-transform"});
    const Metric g = cfg.metric_value();
    const std::vector<ScalarField> exps{
        named_field("linear",
                    [](double, const ComplexFourVector& z) {
                        return 0.3 * z[0] - 0.2 * z[1] + 0.1 * z[2] + Complex(0.0, 0.25) * z[3];
                    },
                    {}),
        named_field("quadratic",
                    [](double, const ComplexFourVector& z) {
                        return 0.2 * z[0] * z[0] - Complex(0.1, 0.05) * z[1] * z[2] + 0.15 * z[3] * z[3] + 0.3 * z[1];
                    },
                    {}),
    };
    const auto probes = halton_probes(box_of(cfg), std::min<std::size_t>(cfg.probes, 16));
    const std::vector<double> hs{0.08, 0.04, 0.02};
    Checks checks;
    json rows = json::array();
    for (const auto& F : exps) {
        double worst = 0.0;
        for (const auto& p : probes) worst = std::max(worst, hopf_cole_check(F, p.tau, p.z, g, 1e-3).discrepancy);
        rows.push_back({{"exponent", F.name}, {"max_discrepancy", worst}});
        checks.add(F.name + " exponent discrepancy", worst, 1e-6);
    }

    Csv csv({"probe", "h", "discrepancy"});
    json orders = json::array();
    double lo = 1e300, hi = -1e300;
    const std::size_t n_order = std::min<std::size_t>(probes.size(), 4);
    for (std::size_t i = 0; i < n_order; ++i) {
        const auto& p = probes[i];
        for (double h : hs) csv.row(i, h, hopf_cole_check(exps[1], p.tau, p.z, g, h).discrepancy);
        const double order = hopf_cole_order(exps[1], p.tau, p.z, g, hs);
        orders.push_back(order);
        lo = std::min(lo, order);
        hi = std::max(hi, order);
    }
    checks.add("lowest convergence order", lo, 1.7, false);
    checks.add("highest convergence order", hi, 2.3);
    res.report["exponents"] = rows;
    res.report["steps"] = hs;
    res.report["orders"] = orders;
    res.tables.push_back({"hopf-cole.csv", csv.str()});
    finish(res, checks);
    return res;
}

ScenarioResult scenario_clifford(const ScenarioConfig& cfg) {
    ScenarioResult res;
    res.name = "clifford";
    res.report = base_report(res.name, cfg, {"clifford-algebra", "gamma-linearization"});
    Checks checks;
    InstanceRng rng(cfg.seed, 7);
    json sigs = json::array();
    for (const Metric g : {Metric::minus_plus(), Metric::plus_minus()}) {
        const auto G = build_gammas(g);
        const auto errs = clifford_errors(G);
        const std::string tag = g.signature() == Signature::MinusPlus ? "minus-plus" : "plus-minus";
        std::size_t passed = 0;
        for (double e : errs) passed += e < 1e-14 ? 1 : 0;
        checks.add(tag + ": largest anticommutator error", *std::max_element(errs.begin(), errs.end()), 1e-14);
        double worst_lin = 0.0;
        for (int k = 0; k < 100; ++k) worst_lin = std::max(worst_lin, linearization_error(G, rng.complex4()));
        checks.add(tag + ": squared slash against the contraction", worst_lin, 1e-12);
        sigs.push_back({{"metric", tag},
                        {"representation", G.representation},
                        {"anticommutators_passed", passed},
                        {"anticommutator_errors", errs},
                        {"max_linearization_error", worst_lin}});
    }
    res.report["signatures"] = sigs;
    res.report["gammas"] = gamma_json(build_gammas(cfg.metric_value()));
    finish(res, checks);
    return res;
}

SpinorField exp_linear_spinor(const std::array<Complex4, 4>& a, const Complex4& b, const Complex4& c) {
    SpinorField f;
    f.f = [=](double tau, const ComplexFourVector& z) {
        Spinor s{};
        for (std::size_t r = 0; r < 4; ++r) {
            Complex e = b[r] * tau + c[r];
            for (std::size_t mu = 0; mu < 4; ++mu) e += a[r][mu] * z[mu];
            s[r] = std::exp(e);
        }
        return s;
    };
    f.name = "exp-linear";
    return f;
}

ScenarioResult scenario_dirac_planewave(const ScenarioConfig& cfg) {
    ScenarioResult res;
    res.name = "dirac-planewave";
    res.report = base_report(res.name, cfg, {"dirac-linearization", "plane-wave-dispersion"});
    const double h = 2e-4;
    const EMFieldConfig base = em_of(cfg);
    const auto G = build_gammas(base.metric);
    const auto probes = halton_probes(box_of(cfg), std::min<std::size_t>(cfg.probes, 8));
    InstanceRng rng(cfg.seed, 8);
    Checks checks;

    EMFieldConfig free = base;
    free.A = zero_potential();
    free.potential_name = "zero";
    EMFieldConfig charged = base;
    if (!potential_is_constant(base)) {
        charged.A = constant_potential({0.2, -0.1, 0.05, 0.3});
        charged.potential_name = "constant(0.2,-0.1,0.05,0.3)";
    }
    const std::vector<Complex4> momenta{{0.9, 0.2, -0.3, 0.15}, rng.complex4(0.3), rng.complex4(0.3)};

    json cases = json::array();
    Csv csv({"potential", "momentum", "mode", "lambda_re", "lambda_im", "max_residual"});
    for (const auto* em : {&free, &charged}) {
        double worst = 0.0;
        for (std::size_t k = 0; k < momenta.size(); ++k) {
            const auto modes = plane_wave_modes(*em, G, momenta[k]);
            for (std::size_t j = 0; j < modes.size(); ++j) {
                const auto phi = plane_wave_field(momenta[k], modes[j], em->hbar);
                double w = 0.0;
                // the equation is linear, so the residual is measured relative to the field's size
                for (const auto& p : probes) {
                    const Spinor at = phi(p.tau, p.z);
                    double size = 0.0;
                    for (const auto& v : at) size = std::max(size, std::abs(v));
                    for (const auto& v : linearized_residual(*em, G, phi, p.tau, p.z, h))
                        w = std::max(w, std::abs(v) / size);
                }
                worst = std::max(worst, w);
                csv.row(em->potential_name, k, j, modes[j].lambda.real(), modes[j].lambda.imag(), w);
            }
        }
        cases.push_back({{"potential", em->potential_name}, {"max_plane_wave_residual", worst}});
        checks.add("plane-wave residual, potential " + em->potential_name, worst, 1e-6);
    }

    std::array<Complex4, 4> a{};
    for (auto& row : a) row = rng.complex4(0.2);
    const auto phi = exp_linear_spinor(a, rng.complex4(0.2), rng.complex4(0.2));
    json routes = json::array();
    for (const auto* em : {&free, &charged}) {
        for (int r = 1; r <= 4; ++r) {
            double worst = 0.0, literal = 0.0;
            for (const auto& p : probes) {
                worst = std::max(worst, nonlinear_linear_consistency(*em, G, phi, r, p.tau, p.z, h).discrepancy);
                literal = std::max(
                    literal, nonlinear_linear_consistency(*em, G, phi, r, p.tau, p.z, h, DiracSigns::Literal).discrepancy);
            }
            routes.push_back({{"potential", em->potential_name},
                              {"component", r},
                              {"discrepancy", worst},
                              {"literal_sign_discrepancy", literal}});
            if (r == 1 || r == 3)
                checks.add("route consistency r=" + std::to_string(r) + ", potential " + em->potential_name, worst, 1e-6);
        }
    }
    res.report["signs"] = to_string(DiracSigns::EpsilonWeighted);
    res.report["plane_waves"] = cases;
    res.report["routes"] = routes;
    res.tables.push_back({"dirac-modes.csv", csv.str()});
    finish(res, checks);
    return res;
}

using Runner = ScenarioResult (*)(const ScenarioConfig&);

const std::vector<std::pair<std::string, Runner>>& registry() {
    static const std::vector<std::pair<std::string, Runner>> r{
        {"moments", scenario_moments},
        {"sde-demo", scenario_sde_demo},
        {"cr-scan", scenario_cr_scan},
        {"optimal-control", scenario_optimal_control},
        {"equivalence-audit", scenario_equivalence_audit},
        {"hjb-residual", scenario_hjb_residual},
        {"covariance", scenario_covariance},
        {"hopf-cole", scenario_hopf_cole},
        {"clifford", scenario_clifford},
        {"dirac-planewave", scenario_dirac_planewave},
    };
    return r;
}

}  // namespace

const std::vector<std::string>& scenario_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> n;
        for (const auto& [k, v] : registry()) n.push_back(k);
        return n;
    }();
    return names;
}

bool is_scenario(const std::string& name) {
    const auto& n = scenario_names();
    return std::find(n.begin(), n.end(), name) != n.end();
}

ScenarioResult run_scenario(const std::string& name, const ScenarioConfig& cfg) {
    cfg.validate();
    for (const auto& [k, fn] : registry())
        if (k == name) return fn(cfg);
    throw ConfigError("unknown scenario '" + name + "'");
}

}  // namespace csoc::cli
