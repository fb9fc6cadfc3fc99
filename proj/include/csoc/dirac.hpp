#pragma once

#include <Eigen/Dense>
#include <array>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "csoc/ccalc.hpp"
#include "csoc/lagrangian.hpp"
#include "csoc/spacetime.hpp"

namespace csoc {

using Matrix4c = Eigen::Matrix4cd;
using Spinor = std::array<Complex, 4>;

/// gamma^0..gamma^3 with {gamma^mu, gamma^nu} = 2 eta^{mu nu} I.
struct GammaSet {
    std::array<Matrix4c, 4> gamma;
    Metric metric{};
    std::string representation;

    /// sum_mu gamma^mu a_mu for a lower-index a.
    Matrix4c slash(const Complex4& a_lower) const;
};

/// Dirac representation for (+,-,-,-); every matrix multiplied by i for (-,+,+,+).
GammaSet build_gammas(const Metric& g);

/// Largest entry of gamma^mu gamma^nu + gamma^nu gamma^mu - 2 eta^{mu nu} I over all 16 pairs.
double clifford_error(const GammaSet& G);
/// Per pair (mu, nu), mu-major.
std::array<double, 16> clifford_errors(const GammaSet& G);

/// Largest entry of (gamma.a)^2 - (sum eta a a) I.
double linearization_error(const GammaSet& G, const Complex4& a_lower);

/// Row-major 4x4 matrices as [re, im] pairs.
nlohmann::ordered_json gamma_json(const GammaSet& G);

using SpinorFn = std::function<Spinor(double tau, const ComplexFourVector& z)>;

struct SpinorField {
    SpinorFn f;
    DomainBox box{};
    std::string name;

    Spinor operator()(double tau, const ComplexFourVector& z) const { return f(tau, z); }
};

/// +1 for components r = 1, 2 and -1 for r = 3, 4 (1-based, as in the componentwise equations).
int epsilon_r(int r);

/// How the per-component sign enters the linear equation.
///
/// Literal: i hbar m d_tau phi - [mc(i hbar gamma.d phi - q gamma.A phi) + hbar^2 box phi
///          + 2 i q hbar A.d phi - q^2 A.A phi] for every row.
/// EpsilonWeighted: row r carries eps_r on the d_tau term and charge eps_r q. This is what
/// the substitution J_r = -i eps_r hbar log phi_r produces from the expanded HJB; for
/// r = 1, 2 the two conventions coincide.
enum class DiracSigns { Literal, EpsilonWeighted };

std::string to_string(DiracSigns s);

struct HopfColeResult {
    Complex lhs;  ///< sum eta (dJ)^2 + sum eta d^2 J
    Complex rhs;  ///< sum eta d^2 phi / phi, phi = exp(J)
    double discrepancy = 0.0;
};

/// Both sides by central differences with step h. Throws BranchError when |exp(J)| < 1e-12.
HopfColeResult hopf_cole_check(const ScalarField& Jt, double tau, const ComplexFourVector& z, const Metric& g,
                               double h);

/// Least-squares slope of log(discrepancy) against log(h).
double hopf_cole_order(const ScalarField& Jt, double tau, const ComplexFourVector& z, const Metric& g,
                       const std::vector<double>& hs);

/// Row-wise residual of the linearized equation at (tau, z). Derivatives by central differences.
Spinor linearized_residual(const EMFieldConfig& cfg, const GammaSet& G, const SpinorField& phi, double tau,
                           const ComplexFourVector& z, double h, DiracSigns signs = DiracSigns::EpsilonWeighted);

struct PlaneWaveMode {
    Complex lambda;
    Spinor chi{};
};

/// Modes exp(i p.z / hbar - i lambda tau) chi in a constant potential. Substituting the ansatz
/// reduces the equation to lambda chi = M chi with a 4x4 matrix M; lambda and chi are its
/// eigenpairs. Throws PreconditionError for a non-constant potential.
std::vector<PlaneWaveMode> plane_wave_modes(const EMFieldConfig& cfg, const GammaSet& G, const Complex4& p_lower,
                                            DiracSigns signs = DiracSigns::EpsilonWeighted);

/// The 4x4 matrix M of plane_wave_modes.
Eigen::Matrix4cd plane_wave_matrix(const EMFieldConfig& cfg, const GammaSet& G, const Complex4& p_lower,
                                   DiracSigns signs = DiracSigns::EpsilonWeighted);

SpinorField plane_wave_field(const Complex4& p_lower, const PlaneWaveMode& mode, double hbar);

struct RouteConsistency {
    Complex nonlinear;    ///< m times the expanded HJB residual of J_r = -i eps_r hbar Log phi_r
    Complex linear;       ///< linearized residual of row r divided by phi_r
    double discrepancy = 0.0;
};

/// Compares the expanded componentwise HJB residual for J_r = -i eps_r hbar Log phi_r
/// (derivatives taken on the J fields) with the linearized residual of row r divided by
/// phi_r (derivatives taken on phi). r is 1-based. Throws BranchError when |phi_r| < 1e-12
/// or the principal logarithm jumps across the stencil.
RouteConsistency nonlinear_linear_consistency(const EMFieldConfig& cfg, const GammaSet& G, const SpinorField& phi,
                                              int r, double tau, const ComplexFourVector& z, double h,
                                              DiracSigns signs = DiracSigns::EpsilonWeighted);

}  // namespace csoc
