#include "csoc/lagrangian.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <vector>

#include "csoc/errors.hpp"

namespace csoc {

Lagrangian::Lagrangian(std::string name, Metric metric, LagrangianValueFn value, LagrangianGradientFn gradient)
    : name_(std::move(name)), metric_(metric), value_(std::move(value)), gradient_(std::move(gradient)) {
    if (!value_) throw PreconditionError("Lagrangian needs a value callable");
}

Lagrangian& Lagrangian::with_parameter(const std::string& key, double v) {
    params_[key] = v;
    return *this;
}

Complex Lagrangian::value(double tau, const ComplexFourVector& z, const ComplexFourVector& w) const {
    if (!value_) throw PreconditionError("empty Lagrangian");
    return value_(tau, z, w);
}

ComplexFourVector Lagrangian::gradient_w(double tau, const ComplexFourVector& z, const ComplexFourVector& w) const {
    if (gradient_) return gradient_(tau, z, w);
    return fd_gradient_w(tau, z, w);
}

ComplexFourVector Lagrangian::fd_gradient_w(double tau, const ComplexFourVector& z, const ComplexFourVector& w,
                                            double h) const {
    ComplexFourVector g;
    g.position = IndexPosition::Lower;
    for (std::size_t mu = 0; mu < 4; ++mu) {
        const double step =
            h > 0.0 ? h : std::cbrt(std::numeric_limits<double>::epsilon()) * std::max(1.0, std::abs(w[mu]));
        ComplexFourVector wp = w, wm = w;
        wp[mu] += step;
        wm[mu] -= step;
        g[mu] = (value(tau, z, wp) - value(tau, z, wm)) / (2.0 * step);
    }
    return g;
}

Lagrangian& Lagrangian::with_stationarity_form(Lagrangian form) {
    stationarity_ = std::make_shared<const Lagrangian>(std::move(form));
    return *this;
}

void EMFieldConfig::validate() const {
    if (!(m > 0.0) || !(c > 0.0) || !(hbar > 0.0)) throw DomainError("m, c and hbar must be positive");
    if (!std::isfinite(q)) throw DomainError("charge must be finite");
    if (!A) throw DomainError("vector potential is not set");
}

ComplexFourVector EMFieldConfig::potential(double tau, const ComplexFourVector& z) const {
    ComplexFourVector a = A(tau, z);
    a.position = IndexPosition::Lower;
    return a;
}

PotentialFn zero_potential() {
    return [](double, const ComplexFourVector&) { return ComplexFourVector({}, IndexPosition::Lower); };
}

PotentialFn constant_potential(const Complex4& a) {
    return [a](double, const ComplexFourVector&) { return ComplexFourVector(a, IndexPosition::Lower); };
}

PotentialFn linear_electric_potential(double E) {
    return [E](double, const ComplexFourVector& z) {
        ComplexFourVector a({}, IndexPosition::Lower);
        a[0] = -E * z[1];
        return a;
    };
}

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

double parse_number(const std::string& text) {
    const std::string t = trim(text);
    double v = 0.0;
    const auto* end = t.data() + t.size();
    auto [ptr, ec] = std::from_chars(t.data(), end, v);
    if (t.empty() || ec != std::errc() || ptr != end) throw DomainError("bad number in potential: '" + text + "'");
    return v;
}

std::vector<double> parse_args(const std::string& spec, const std::string& head) {
    const std::string inner = spec.substr(head.size() + 1, spec.size() - head.size() - 2);
    std::vector<double> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = inner.find(',', start);
        out.push_back(parse_number(inner.substr(start, comma - start)));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

}  // namespace

PotentialFn potential_from_name(const std::string& raw) {
    const std::string spec = trim(raw);
    if (spec == "zero") return zero_potential();
    auto call_of = [&](const std::string& head) {
        return spec.size() > head.size() + 1 && spec.compare(0, head.size() + 1, head + "(") == 0 && spec.back() == ')';
    };
    if (call_of("constant")) {
        const auto a = parse_args(spec, "constant");
        if (a.size() != 4) throw DomainError("constant(...) needs four components");
        return constant_potential({a[0], a[1], a[2], a[3]});
    }
    if (call_of("linear-electric")) {
        const auto a = parse_args(spec, "linear-electric");
        if (a.size() != 1) throw DomainError("linear-electric(...) needs one field strength");
        return linear_electric_potential(a[0]);
    }
    throw DomainError("unknown vector potential '" + spec + "'");
}

Lagrangian em_lagrangian(const EMFieldConfig& cfg) {
    cfg.validate();
    const Metric g = cfg.metric;
    const double st = g.sigma_tilde();
    const double m = cfg.m, c = cfg.c, q = cfg.q;
    const PotentialFn A = cfg.A;

    auto coupling = [g, q, A](double tau, const ComplexFourVector& z, const ComplexFourVector& w) {
        ComplexFourVector a = A(tau, z);
        a.position = IndexPosition::Lower;
        return q * contract(a, w, g);
    };

    auto value = [=](double tau, const ComplexFourVector& z, const ComplexFourVector& w) {
        return st * m * c * std::sqrt(st * contract(w, w, g)) + coupling(tau, z, w);
    };
    auto gradient = [=](double tau, const ComplexFourVector& z, const ComplexFourVector& w) {
        const Complex root = std::sqrt(st * contract(w, w, g));
        if (std::abs(root) < 1e-12) throw SingularityError("EM Lagrangian gradient at the branch point sum w w = 0");
        ComplexFourVector grad = w.lowered(g);
        grad *= st * st * m * c / root;
        ComplexFourVector a = A(tau, z);
        a.position = IndexPosition::Lower;
        for (std::size_t mu = 0; mu < 4; ++mu) grad[mu] += q * a[mu];
        grad.position = IndexPosition::Lower;
        return grad;
    };

    auto shell_value = [=](double tau, const ComplexFourVector& z, const ComplexFourVector& w) {
        return 0.5 * m * contract(w, w, g) + 0.5 * st * m * c * c + coupling(tau, z, w);
    };
    auto shell_gradient = [=](double tau, const ComplexFourVector& z, const ComplexFourVector& w) {
        ComplexFourVector grad = w.lowered(g);
        grad *= m;
        ComplexFourVector a = A(tau, z);
        for (std::size_t mu = 0; mu < 4; ++mu) grad[mu] += q * a[mu];
        grad.position = IndexPosition::Lower;
        return grad;
    };

    Lagrangian shell("em-shell", g, shell_value, shell_gradient);
    shell.with_parameter("q", q).with_parameter("m", m).with_parameter("c", c);
    Lagrangian L("em", g, value, gradient);
    L.with_parameter("q", q).with_parameter("m", m).with_parameter("c", c).with_parameter("hbar", cfg.hbar);
    L.with_stationarity_form(std::move(shell));
    return L;
}

Lagrangian quadratic_lagrangian(double m, const Metric& g) {
    if (!(m > 0.0)) throw DomainError("mass must be positive");
    auto value = [m, g](double, const ComplexFourVector&, const ComplexFourVector& w) {
        return 0.5 * m * contract(w, w, g);
    };
    auto gradient = [m, g](double, const ComplexFourVector&, const ComplexFourVector& w) {
        ComplexFourVector grad = w.lowered(g);
        grad *= m;
        return grad;
    };
    Lagrangian L("quadratic", g, value, gradient);
    L.with_parameter("m", m);
    return L;
}

Lagrangian constant_lagrangian(Complex value, const Metric& g) {
    return Lagrangian(
        "constant", g, [value](double, const ComplexFourVector&, const ComplexFourVector&) { return value; },
        [](double, const ComplexFourVector&, const ComplexFourVector&) {
            return ComplexFourVector({}, IndexPosition::Lower);
        });
}

WeakGradientCheck check_weak_gradient(const Lagrangian& L, const ComplexFourVector& w, double tol, double tau,
                                      const ComplexFourVector& z) {
    const auto it = L.parameters().find("c");
    const double c = it != L.parameters().end() ? it->second : 1.0;
    WeakGradientCheck out;
    out.shell_residual = std::abs(weak_equation_residual(w, L.metric(), c));
    if (!(out.shell_residual <= tol)) throw PreconditionError("velocity is off the weak-equation shell");
    out.fd_gradient = L.fd_gradient_w(tau, z, w);
    out.shell_gradient = L.stationarity_form().gradient_w(tau, z, w);
    for (std::size_t mu = 0; mu < 4; ++mu)
        out.max_difference = std::max(out.max_difference, std::abs(out.fd_gradient[mu] - out.shell_gradient[mu]));
    out.passed = out.max_difference < tol;
    return out;
}

}  // namespace csoc
