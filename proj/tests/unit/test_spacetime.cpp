#include <catch_amalgamated.hpp>

#include <cmath>

#include "csoc/errors.hpp"
#include "csoc/spacetime.hpp"

using namespace csoc;
using Catch::Approx;

namespace {

ComplexFourVector up(Complex a, Complex b = 0.0, Complex c = 0.0, Complex d = 0.0) {
    return ComplexFourVector({a, b, c, d}, IndexPosition::Upper);
}

}  // namespace

TEST_CASE("metric conventions") {
    constexpr Metric mp = Metric::minus_plus();
    constexpr Metric pm = Metric::plus_minus();
    STATIC_REQUIRE(mp.sigma_tilde() == -1.0);
    STATIC_REQUIRE(pm.sigma_tilde() == 1.0);
    STATIC_REQUIRE(Metric{} == mp);
    for (std::size_t mu = 0; mu < 4; ++mu) {
        CHECK(mp.eta(mu) * mp.eta(mu) == 1.0);
        CHECK(pm.eta(mu) == -mp.eta(mu));
    }
    CHECK(mp.eta(0) == -1.0);
}

TEST_CASE("contract examples") {
    const Metric g;
    CHECK(contract(up(1.0), up(1.0), g) == Complex(-1.0, 0.0));
    CHECK(contract(up(0.0, 1.0), up(0.0, 1.0), g) == Complex(1.0, 0.0));
    CHECK(contract(up(kI), up(kI), g) == Complex(1.0, 0.0));
}

TEST_CASE("contract with mixed positions skips the metric") {
    const Metric g;
    const auto a = up(2.0, 3.0);
    const auto b = a.lowered(g);
    CHECK(contract(a, b, g) == contract(a, a, g));
    CHECK(b[0] == Complex(-2.0, 0.0));
    CHECK(b.raised(g)[0] == a[0]);
}

TEST_CASE("contract is symmetric, bilinear and flips sign with the convention") {
    const Metric mp, pm = Metric::plus_minus();
    const auto a = up({0.3, -1.2}, {2.0, 0.5}, {-0.7, 0.0}, {0.1, 0.9});
    const auto b = up({1.1, 0.4}, {-0.2, 0.3}, {0.0, -1.5}, {2.2, 0.2});
    const Complex s{0.7, -0.4};
    CHECK(std::abs(contract(a, b, mp) - contract(b, a, mp)) < 1e-15);
    CHECK(std::abs(contract(s * a + b, b, mp) - (s * contract(a, b, mp) + contract(b, b, mp))) < 1e-13);
    CHECK(std::abs(contract(a, a, mp) + contract(a, a, pm)) < 1e-15);
}

TEST_CASE("weak equation residual") {
    const Metric g;
    CHECK(std::abs(weak_equation_residual(up(1.0), g, 1.0)) < 1e-15);
    CHECK(weak_equation_residual(up(0.0, 1.0), g, 1.0) == Complex(2.0, 0.0));
    const auto boosted = up(std::cosh(0.3), std::sinh(0.3));
    CHECK(std::abs(weak_equation_residual(boosted, g, 1.0)) < 1e-15);
}

TEST_CASE("weak equation residual is boost invariant along each axis") {
    const Metric g;
    const auto w = up({1.3, 0.2}, {0.4, -0.1}, {-0.3, 0.05}, {0.25, 0.3});
    const Complex before = weak_equation_residual(w, g, 1.0);
    for (std::size_t axis = 1; axis <= 3; ++axis) {
        for (double rapidity : {-0.8, 0.3, 1.1}) {
            const auto wb = apply(Boost{axis, rapidity}, w);
            CHECK(std::abs(weak_equation_residual(wb, g, 1.0) - before) < 1e-12);
        }
    }
}

TEST_CASE("boost round trip and lower-index transformation") {
    const Metric g;
    const auto v = up({1.0, 0.5}, {0.2, 0.0}, {0.0, 0.3}, {-0.4, 0.1});
    const Boost b{2, 0.45};
    const auto back = apply(b.inverse(), apply(b, v));
    for (std::size_t mu = 0; mu < 4; ++mu) CHECK(std::abs(back[mu] - v[mu]) < 1e-14);
    const auto lowered_then_boosted = apply(b, v.lowered(g));
    const auto boosted_then_lowered = apply(b, v).lowered(g);
    for (std::size_t mu = 0; mu < 4; ++mu)
        CHECK(std::abs(lowered_then_boosted[mu] - boosted_then_lowered[mu]) < 1e-14);
    CHECK_THROWS_AS(apply(Boost{0, 0.1}, v), DomainError);
}

TEST_CASE("re/im decomposition is lossless") {
    const auto v = up({1.25, -3.5}, {0.1, 0.2}, {1e-300, -7.0}, {4.0, 0.0});
    const auto w = ComplexFourVector::from_parts(v.re(), v.im());
    for (std::size_t mu = 0; mu < 4; ++mu) CHECK(w[mu] == v[mu]);
}

TEST_CASE("reconstruction identities hold exactly") {
    for (Complex Z : {Complex(0.3, -1.7), Complex(-2.5, 0.125), Complex(1e10, 1e-10)}) {
        CHECK(Z == Complex((Z).real(), 0.0) - kI * Complex((kI * Z).real(), 0.0));
        CHECK(Z == Complex((kI * Z).imag(), 0.0) + kI * Complex(Z.imag(), 0.0));
    }
}
