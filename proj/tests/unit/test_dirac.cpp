#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "csoc/dirac.hpp"
#include "csoc/errors.hpp"

using namespace csoc;

namespace {

ScalarField field(ScalarFn f) {
    ScalarField s;
    s.f = std::move(f);
    s.name = "Jt";
    return s;
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

EMFieldConfig cfg_with(PotentialFn A, double q = 0.0, Metric g = {}) {
    EMFieldConfig cfg;
    cfg.q = q;
    cfg.A = std::move(A);
    cfg.metric = g;
    return cfg;
}

}  // namespace

TEST_CASE("gamma matrices satisfy the Clifford relation in both signatures") {
    for (auto g : {Metric::minus_plus(), Metric::plus_minus()}) {
        const auto G = build_gammas(g);
        CHECK(clifford_error(G) < 1e-14);
        const Matrix4c g00 = G.gamma[0] * G.gamma[0];
        CHECK((g00 - g.eta(0) * Matrix4c::Identity()).cwiseAbs().maxCoeff() < 1e-14);
        CHECK((G.gamma[0] * G.gamma[1] + G.gamma[1] * G.gamma[0]).cwiseAbs().maxCoeff() < 1e-14);
    }
    const auto G = build_gammas(Metric{});
    CHECK((G.gamma[0] * G.gamma[0] + Matrix4c::Identity()).cwiseAbs().maxCoeff() < 1e-14);
    CHECK(linearization_error(G, {1.0, 0.0, 0.0, 0.0}) < 1e-14);
}

TEST_CASE("squared linearization for random complex vectors") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> U(-2.0, 2.0);
    for (auto g : {Metric::minus_plus(), Metric::plus_minus()}) {
        const auto G = build_gammas(g);
        for (int k = 0; k < 100; ++k) {
            const Complex4 a{Complex(U(rng), U(rng)), Complex(U(rng), U(rng)), Complex(U(rng), U(rng)),
                             Complex(U(rng), U(rng))};
            CHECK(linearization_error(G, a) < 1e-12);
        }
    }
}

TEST_CASE("the squared square-root term matches only for the (+,-,-,-) signature") {
    // (sigma_tilde m c sqrt(sigma_tilde w.w))^2 = sigma_tilde m^2 c^2 w.w against (m c gamma.w)^2 = m^2 c^2 w.w
    for (auto g : {Metric::minus_plus(), Metric::plus_minus()}) {
        const Complex4 w{1.3, 0.2, Complex(0.0, 0.4), -0.1};
        Complex ww = 0.0;
        for (std::size_t mu = 0; mu < 4; ++mu) ww += g.eta(mu) * w[mu] * w[mu];
        const Complex sqrt_form = g.sigma_tilde() * std::sqrt(g.sigma_tilde() * ww);
        const bool match = std::abs(sqrt_form * sqrt_form - ww) < 1e-12;
        CHECK(match == (g.signature() == Signature::PlusMinus));
    }
}

TEST_CASE("gamma json dump") {
    const auto j = gamma_json(build_gammas(Metric::plus_minus()));
    REQUIRE(j.size() == 4);
    CHECK(j[0][0][0] == nlohmann::ordered_json::array({1.0, 0.0}));
    CHECK(j[0][2][2] == nlohmann::ordered_json::array({-1.0, 0.0}));
    CHECK(j[2][0][3] == nlohmann::ordered_json::array({0.0, -1.0}));
}

TEST_CASE("Hopf-Cole identity") {
    const Metric g;
    const ComplexFourVector z({Complex(0.2, 0.1), -0.3, Complex(0.1, 0.2), 0.4});
    const Complex4 a{0.3, -0.2, 0.1, 0.25};
    const auto lin = field([a](double, const ComplexFourVector& p) {
        Complex s = 0.0;
        for (std::size_t mu = 0; mu < 4; ++mu) s += a[mu] * p[mu];
        return s;
    });
    const auto r = hopf_cole_check(lin, 0.0, z, g, 1e-3);
    Complex aa = 0.0;
    for (std::size_t mu = 0; mu < 4; ++mu) aa += g.eta(mu) * a[mu] * a[mu];
    CHECK(std::abs(r.lhs - aa) < 1e-8);
    CHECK(r.discrepancy < 1e-8);

    const auto quad = field([](double, const ComplexFourVector& p) {
        return 0.2 * p[0] * p[0] - Complex(0.1, 0.05) * p[1] * p[2] + 0.15 * p[3] * p[3] + 0.3 * p[1];
    });
    CHECK(hopf_cole_check(quad, 0.0, z, g, 1e-3).discrepancy < 1e-6);
    const double order = hopf_cole_order(quad, 0.0, z, g, {0.08, 0.04, 0.02});
    CHECK(order >= 1.7);
    CHECK(order <= 2.3);

    const auto zero = field([](double, const ComplexFourVector&) { return Complex(0.0, 0.0); });
    CHECK(hopf_cole_check(zero, 0.0, z, g, 1e-3).discrepancy == 0.0);

    const auto tiny = field([](double, const ComplexFourVector&) { return Complex(-40.0, 0.0); });
    CHECK_THROWS_AS(hopf_cole_check(tiny, 0.0, z, g, 1e-3), BranchError);
}

TEST_CASE("linearized residual of the zero spinor") {
    const auto G = build_gammas(Metric{});
    SpinorField zero;
    zero.f = [](double, const ComplexFourVector&) { return Spinor{}; };
    const auto r = linearized_residual(cfg_with(constant_potential({0.3, 0.1, 0, 0}), 1.0), G, zero, 0.0, {}, 1e-3);
    for (const auto& v : r) CHECK(v == Complex(0.0, 0.0));
}

TEST_CASE("plane-wave dispersion agrees with the analytic spectrum for the literal signs") {
    // for the literal equation (gamma.p)^2 = p.p gives lambda = -(m c kappa + p.p)/(hbar m), kappa = +-sqrt(p.p)
    const Metric g;
    const auto G = build_gammas(g);
    const auto cfg = cfg_with(zero_potential());
    const Complex4 p{1.2, 0.3, -0.4, 0.1};
    Complex pp = 0.0;
    for (std::size_t mu = 0; mu < 4; ++mu) pp += g.eta(mu) * p[mu] * p[mu];
    const auto modes = plane_wave_modes(cfg, G, p, DiracSigns::Literal);
    const Complex k = std::sqrt(pp);
    for (const auto& m : modes) {
        const Complex l1 = -(k + pp), l2 = -(-k + pp);
        CHECK(std::min(std::abs(m.lambda - l1), std::abs(m.lambda - l2)) < 1e-10);
    }
}

TEST_CASE("plane waves solve the linearized equation") {
    const Complex4 p{0.9, 0.2, -0.3, 0.15};
    for (auto g : {Metric::minus_plus(), Metric::plus_minus()}) {
        const auto G = build_gammas(g);
        for (auto signs : {DiracSigns::Literal, DiracSigns::EpsilonWeighted}) {
            for (const auto& cfg : {cfg_with(zero_potential(), 0.0, g),
                                    cfg_with(constant_potential({0.2, -0.1, 0.05, 0.3}), 0.7, g)}) {
                const auto modes = plane_wave_modes(cfg, G, p, signs);
                REQUIRE(modes.size() == 4);
                for (const auto& mode : modes) {
                    const auto phi = plane_wave_field(p, mode, cfg.hbar);
                    const auto r = linearized_residual(cfg, G, phi, 0.3, ComplexFourVector({0.1, 0.2, -0.1, 0.05}),
                                                       1e-3, signs);
                    for (const auto& v : r) CHECK(std::abs(v) < 1e-6);
                }
            }
        }
    }
}

TEST_CASE("minimal substitution shifts the literal dispersion") {
    const Metric g;
    const auto G = build_gammas(g);
    const double q = 0.7;
    const Complex4 A{0.2, -0.1, 0.05, 0.3};
    const Complex4 p{0.9, 0.2, -0.3, 0.15};
    Complex4 shifted{};
    for (std::size_t mu = 0; mu < 4; ++mu) shifted[mu] = p[mu] + q * A[mu];
    const auto with_A = plane_wave_modes(cfg_with(constant_potential(A), q), G, p, DiracSigns::Literal);
    const auto free = plane_wave_modes(cfg_with(zero_potential()), G, shifted, DiracSigns::Literal);
    for (std::size_t k = 0; k < 4; ++k) CHECK(std::abs(with_A[k].lambda - free[k].lambda) < 1e-10);
}

TEST_CASE("nonlinear and linear routes agree with the epsilon-weighted signs") {
    const auto G = build_gammas(Metric{});
    std::array<Complex4, 4> a{};
    a[0] = {0.3, -0.2, 0.1, 0.25};
    a[1] = {0.1, 0.2, Complex(0.0, 0.1), -0.15};
    a[2] = {-0.2, 0.05, 0.3, 0.1};
    a[3] = {0.15, Complex(0.1, 0.1), -0.1, 0.2};
    const auto phi = exp_linear_spinor(a, {0.2, Complex(0.0, -0.3), 0.1, -0.25}, {0.0, 0.1, Complex(0.0, 0.2), -0.1});
    const ComplexFourVector z({0.1, Complex(0.2, 0.1), -0.1, 0.05});
    for (const auto& cfg : {cfg_with(zero_potential()), cfg_with(constant_potential({0.2, 0.1, -0.3, 0.05}), 0.8)}) {
        for (int r = 1; r <= 4; ++r) {
            const auto c = nonlinear_linear_consistency(cfg, G, phi, r, 0.2, z, 1e-3);
            CHECK(c.discrepancy < 1e-6);
        }
    }
    // the literal signs only agree on the first two rows
    const auto cfg = cfg_with(constant_potential({0.2, 0.1, -0.3, 0.05}), 0.8);
    CHECK(nonlinear_linear_consistency(cfg, G, phi, 1, 0.2, z, 1e-3, DiracSigns::Literal).discrepancy < 1e-6);
    CHECK(nonlinear_linear_consistency(cfg, G, phi, 3, 0.2, z, 1e-3, DiracSigns::Literal).discrepancy > 1e-3);
}

TEST_CASE("constant spinor reduces both routes to the coupling terms") {
    const auto G = build_gammas(Metric{});
    SpinorField phi;
    phi.f = [](double, const ComplexFourVector&) { return Spinor{1.0, Complex(0.5, 0.2), -0.3, Complex(0.0, 0.7)}; };
    const auto cfg = cfg_with(constant_potential({0.2, 0.1, -0.3, 0.05}), 0.8);
    for (int r : {1, 3}) CHECK(nonlinear_linear_consistency(cfg, G, phi, r, 0.0, {}, 1e-3).discrepancy < 1e-10);
}

TEST_CASE("plane waves satisfy both routes individually") {
    const auto G = build_gammas(Metric{});
    const auto cfg = cfg_with(constant_potential({0.1, 0.2, 0.0, -0.1}), 0.5);
    const Complex4 p{0.6, 0.1, -0.2, 0.3};
    for (const auto& mode : plane_wave_modes(cfg, G, p)) {
        const auto phi = plane_wave_field(p, mode, cfg.hbar);
        for (int r = 1; r <= 4; ++r) {
            if (std::abs(mode.chi[r - 1]) < 1e-6) continue;
            const auto c = nonlinear_linear_consistency(cfg, G, phi, r, 0.1, ComplexFourVector({0.1, 0.0, 0.2, 0.0}),
                                                        1e-3);
            CHECK(std::abs(c.linear) < 1e-6 / std::abs(mode.chi[r - 1]));
            CHECK(std::abs(c.nonlinear) < 1e-6 / std::abs(mode.chi[r - 1]));
        }
    }
}

TEST_CASE("vanishing components are rejected") {
    const auto G = build_gammas(Metric{});
    SpinorField phi;
    phi.f = [](double, const ComplexFourVector&) { return Spinor{0.0, 1.0, 1.0, 1.0}; };
    CHECK_THROWS_AS(nonlinear_linear_consistency(cfg_with(zero_potential()), G, phi, 1, 0.0, {}, 1e-3), BranchError);
    CHECK_THROWS_AS(epsilon_r(5), DomainError);
    CHECK(epsilon_r(2) == 1);
    CHECK(epsilon_r(3) == -1);
}
