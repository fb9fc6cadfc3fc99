#pragma once

#include <array>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "csoc/spacetime.hpp"

namespace csoc {

/// Axis-aligned box in (tau, x^0..x^3, y^0..y^3). Unbounded by default.
struct DomainBox {
    static constexpr double kInf = std::numeric_limits<double>::infinity();

    double tau_lo = -kInf, tau_hi = kInf;
    Real4 x_lo{-kInf, -kInf, -kInf, -kInf}, x_hi{kInf, kInf, kInf, kInf};
    Real4 y_lo{-kInf, -kInf, -kInf, -kInf}, y_hi{kInf, kInf, kInf, kInf};

    /// Same half-width around the origin on every coordinate axis.
    static DomainBox cube(double tau_lo, double tau_hi, double half_width);

    bool bounded() const;
    bool contains(double tau, const ComplexFourVector& z) const;
    /// True when every coordinate is at least `margin` inside the box (tau only needs to be inside).
    bool contains_with_margin(double tau, const ComplexFourVector& z, double margin) const;
};

using ScalarFn = std::function<Complex(double tau, const ComplexFourVector& z)>;

/// Complex scalar field J(tau, z) with its domain and a suggested stencil step.
///
/// Fields are evaluated concurrently by the probe loops, so the callable must
/// be safe to call from several threads.
struct ScalarField {
    ScalarFn f;
    DomainBox box{};
    double h = 0.0;  ///< 0 selects the default step
    std::string name;

    Complex operator()(double tau, const ComplexFourVector& z) const { return f(tau, z); }
};

struct DerivativeReport {
    Complex4 d_x{};  ///< d/dx^mu of J_R + i J_I
    Complex4 d_y{};  ///< d/dy^mu of J_R + i J_I
    Complex4 d_z{};  ///< complex derivative, from the x-route
    Real4 cr_residuals{};
    Real4 consistency_residuals{};  ///< |d_x - (-i d_y)|

    double max_cr() const;
    double max_consistency() const;
};

struct SecondDerivativeReport {
    Complex4 d_zz{};      ///< d^2/dx^mu dx^mu route
    Complex4 via_yy{};    ///< -d^2/dy^mu dy^mu route
    Complex4 via_mixed{}; ///< d/dx^mu d/dy^mu of (J_I - i J_R)
    Real4 discrepancy{};  ///< largest pairwise difference of the three routes

    double max_discrepancy() const;
};

/// cbrt(eps) * max(1, |coordinate|): the usual optimum for central first differences.
double default_first_step(double coordinate);
/// eps^(1/4) * max(1, |coordinate|) for second differences.
double default_second_step(double coordinate);

/// Central differences along x^mu and y^mu at (tau, z).
/// h <= 0 picks the field's step, or the default per axis. Throws DomainError
/// unless z is at least 2h inside the field's box.
DerivativeReport complex_derivative(const ScalarField& f, double tau, const ComplexFourVector& z, double h = 0.0);

/// Three-route second derivative along each axis. Margin 3h.
SecondDerivativeReport second_complex_derivative(const ScalarField& f, double tau, const ComplexFourVector& z,
                                                 double h = 0.0);

/// Central difference in tau.
Complex tau_derivative(const ScalarField& f, double tau, const ComplexFourVector& z, double h = 0.0);

/// Four-point mixed difference d/dx^mu d/dy^mu of the complex field.
Complex mixed_xy_derivative(const ScalarField& f, double tau, const ComplexFourVector& z, std::size_t mu, double h);
/// Plain second differences d^2/dx^mu dx^mu and d^2/dy^mu dy^mu of the complex field.
Complex second_x_derivative(const ScalarField& f, double tau, const ComplexFourVector& z, std::size_t mu, double h);
Complex second_y_derivative(const ScalarField& f, double tau, const ComplexFourVector& z, std::size_t mu, double h);

struct Probe {
    double tau = 0.0;
    ComplexFourVector z;
};

/// Deterministic Halton points (bases 2,3,5,...,23) filling the box shrunk by `margin` on each
/// coordinate axis. Throws DomainError for an unbounded box or an empty shrunk box.
std::vector<Probe> halton_probes(const DomainBox& box, std::size_t n, double margin = 0.0);

struct AnalyticityResult {
    bool passed = false;
    double worst_cr = 0.0;
    double worst_consistency = 0.0;
    double worst_second_route = 0.0;
    std::size_t worst_probe = 0;

    double worst() const;
};

/// Passes iff every CR, first-derivative route and second-derivative route residual is below tol.
/// Throws DomainError on an empty probe list.
AnalyticityResult analyticity_scan(const ScalarField& f, const std::vector<Probe>& probes, double h, double tol);

}  // namespace csoc
