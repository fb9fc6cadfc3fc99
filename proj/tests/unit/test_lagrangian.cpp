#include <catch_amalgamated.hpp>

#include <cmath>

#include "csoc/ccalc.hpp"
#include "csoc/errors.hpp"
#include "csoc/lagrangian.hpp"

using namespace csoc;

namespace {

ComplexFourVector up(Complex a, Complex b = 0.0, Complex c = 0.0, Complex d = 0.0) {
    return ComplexFourVector({a, b, c, d}, IndexPosition::Upper);
}

EMFieldConfig config(double q, PotentialFn A, Metric g = {}) {
    EMFieldConfig cfg;
    cfg.q = q;
    cfg.A = std::move(A);
    cfg.metric = g;
    return cfg;
}

}  // namespace

TEST_CASE("EM Lagrangian examples") {
    const auto L = em_lagrangian(config(0.0, zero_potential()));
    CHECK(std::abs(L.value(0.0, {}, up(1.0)) - Complex(-1.0, 0.0)) < 1e-15);
    const auto grad = L.gradient_w(0.0, {}, up(1.0));
    CHECK(grad.position == IndexPosition::Lower);
    CHECK(std::abs(grad[0] - Complex(-1.0, 0.0)) < 1e-15);
    for (std::size_t mu = 1; mu < 4; ++mu) CHECK(std::abs(grad[mu]) == 0.0);

    const auto Lq = em_lagrangian(config(2.0, constant_potential({0.2, 0.0, 0.0, 0.0})));
    CHECK(std::abs(Lq.value(0.0, {}, up(1.0)) - Complex(-0.6, 0.0)) < 1e-15);
}

TEST_CASE("EM gradient is singular at the branch point") {
    const auto L = em_lagrangian(config(0.0, zero_potential()));
    CHECK_THROWS_AS(L.gradient_w(0.0, {}, up(1.0, 1.0)), SingularityError);
}

TEST_CASE("analytic gradient matches finite differences at interior probes") {
    const auto cfg = config(0.7, linear_electric_potential(0.3));
    const auto L = em_lagrangian(cfg);
    const auto probes = halton_probes(DomainBox::cube(0.0, 1.0, 0.5), 20);
    for (const auto& p : probes) {
        // keep sigma_tilde w.w near +1, away from the cut
        const auto w = up(Complex(1.2, 0.1) + p.z[0] * 0.2, p.z[1] * 0.3, p.z[2] * 0.3, p.z[3] * 0.3);
        const auto a = L.gradient_w(p.tau, p.z, w);
        const auto f = L.fd_gradient_w(p.tau, p.z, w);
        for (std::size_t mu = 0; mu < 4; ++mu)
            CHECK(std::abs(a[mu] - f[mu]) <= 1e-6 * std::max(1.0, std::abs(a[mu])));
    }
}

TEST_CASE("stationarity form agrees with L on the shell") {
    const auto cfg = config(1.3, constant_potential({0.1, Complex(0.0, 0.2), 0.0, -0.3}));
    const auto L = em_lagrangian(cfg);
    const Complex chi(0.2, 0.1);
    const auto w = up(std::cosh(chi), std::sinh(chi));
    CHECK(std::abs(L.value(0.0, {}, w) - L.stationarity_form().value(0.0, {}, w)) < 1e-14);
}

TEST_CASE("weak-gradient check on shell points") {
    const auto L = em_lagrangian(config(0.0, zero_potential()));
    CHECK(check_weak_gradient(L, up(1.0), 1e-6).passed);
    CHECK(check_weak_gradient(L, up(std::cosh(0.5), std::sinh(0.5)), 1e-6).passed);
    const Complex chi(0.2, 0.1);
    CHECK(check_weak_gradient(L, up(std::cosh(chi), std::sinh(chi)), 1e-6).passed);
    CHECK_THROWS_AS(check_weak_gradient(L, up(2.0), 1e-6), PreconditionError);
}

TEST_CASE("weak-gradient check with a potential and the other signature") {
    const Metric pm = Metric::plus_minus();
    const auto L = em_lagrangian(config(0.5, constant_potential({0.3, 0.1, 0.0, 0.2}), pm));
    CHECK(check_weak_gradient(L, up(std::cosh(0.4), 0.0, std::sinh(0.4)), 1e-6).passed);
}

TEST_CASE("L is analytic in each w^mu away from the branch point") {
    const auto L = em_lagrangian(config(0.8, constant_potential({0.1, 0.2, 0.0, 0.0})));
    ScalarField f;
    // treat w as the complex coordinate of a field
    f.f = [L](double, const ComplexFourVector& w) {
        ComplexFourVector shifted = w;
        shifted[0] += 1.5;
        return L.value(0.0, {}, shifted);
    };
    f.name = "L(w)";
    const auto probes = halton_probes(DomainBox::cube(0.0, 1.0, 0.3), 16);
    CHECK(analyticity_scan(f, probes, 0.0, 1e-6).passed);
}

TEST_CASE("free Lagrangian is boost invariant") {
    const auto L = em_lagrangian(config(0.0, zero_potential()));
    const auto w = up({1.4, 0.1}, {0.3, -0.2}, {0.1, 0.0}, {-0.2, 0.05});
    const Complex before = L.value(0.0, {}, w);
    for (std::size_t axis = 1; axis <= 3; ++axis)
        CHECK(std::abs(L.value(0.0, {}, apply(Boost{axis, 0.7}, w)) - before) < 1e-10);
}

TEST_CASE("potential presets") {
    const auto z = ComplexFourVector({0.0, Complex(2.0, 1.0), 0.0, 0.0});
    CHECK(potential_from_name("zero")(0.0, z)[0] == Complex(0.0, 0.0));
    const auto c = potential_from_name("constant(0.5, -1, 2e-1, 3)")(0.0, z);
    CHECK(c[0] == Complex(0.5, 0.0));
    CHECK(c[2] == Complex(0.2, 0.0));
    CHECK(c.position == IndexPosition::Lower);
    const auto e = potential_from_name("linear-electric(1.5)")(0.0, z);
    CHECK(e[0] == Complex(-3.0, -1.5));
    CHECK_THROWS_AS(potential_from_name("constant(1,2)"), DomainError);
    CHECK_THROWS_AS(potential_from_name("dipole(1)"), DomainError);
    CHECK_THROWS_AS(potential_from_name("linear-electric(x)"), DomainError);
}

TEST_CASE("config validation") {
    auto cfg = config(0.0, zero_potential());
    cfg.m = 0.0;
    CHECK_THROWS_AS(em_lagrangian(cfg), DomainError);
    cfg.m = 1.0;
    cfg.A = nullptr;
    CHECK_THROWS_AS(em_lagrangian(cfg), DomainError);
}
