#pragma once

#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "csoc/ccalc.hpp"
#include "csoc/control.hpp"
#include "csoc/lagrangian.hpp"
#include "csoc/wiener.hpp"

namespace csoc {

struct HJBProblem {
    Lagrangian L;
    DiffusionSpec spec;
    double tau_f = 1.0;
    DomainBox box{};
    /// Used as the Newton starting point when present.
    ClosedFormControl closed_form{};

    const Metric& metric() const { return spec.metric; }
};

struct HJBResidual {
    Complex residual;
    ComplexFourVector w_star;  ///< upper index
    Complex time_term;         ///< -dJ/dtau
    Complex running_term;      ///< L(w*) + sum w*^mu dJ/dz^mu
    Complex diffusion_term;    ///< 1/2 sum sigma^mu sigma^mu d^2J/dz^mu dz^mu
};

/// -dJ/dtau - [L(w*) + sum w*^mu dJ/dz^mu] - 1/2 sum sigma sigma d^2J/dz dz at (tau, z),
/// with w* the stationary control for the numerically differentiated gradient.
/// h <= 0 picks the defaults of ccalc.
HJBResidual hjb_residual_complex(const HJBProblem& P, const ScalarField& J, double tau, const ComplexFourVector& z,
                                 double h = 0.0);

using RealFn = std::function<double(double tau, const Real4& x, const Real4& y)>;

/// J_R(tau, x, y) and J_I(tau, x, y) as two independent real fields.
struct RealPairField {
    RealFn J_R;
    RealFn J_I;
    DomainBox box{};
    std::string name;
};

/// Real and imaginary parts of a complex field, sampled at z = x + i y.
RealPairField split(const ScalarField& J);

struct PairResidual {
    double real = 0.0;
    double imag = 0.0;
    ComplexFourVector w_real_set;  ///< upper, root of the real-part conditions
    ComplexFourVector w_imag_set;  ///< upper, root of the imaginary-part conditions
    /// 1/2 sum (sigma_x^2 d_xx + sigma_y^2 d_yy) of J_R and J_I: cancels for analytic J when sigma_x = sigma_y.
    double non_mixed_R = 0.0;
    double non_mixed_I = 0.0;
};

/// Real-part and imaginary-part HJB residuals, each with its own optimal control and the
/// full second-order operator, mixed term 2 eps eta sigma_x sigma_y d_x d_y included.
PairResidual hjb_residual_pair(const HJBProblem& P, const RealPairField& J, double tau, const ComplexFourVector& z,
                               double h = 0.0);

struct PairConsistency {
    Complex complex_residual;
    PairResidual pair;
    double difference = 0.0;     ///< |complex - (real + i imag)|
    double stencil_error = 0.0;  ///< Richardson estimate from h and 2h plus a round-off floor
    double tolerance = 0.0;      ///< 5 * stencil_error
    bool passed = false;
};

PairConsistency pair_complex_consistency(const HJBProblem& P, const ScalarField& J, double tau,
                                         const ComplexFourVector& z, double h);

/// sum eta^{mu mu} d^2J/dz^mu dz^mu by second differences along x^mu.
Complex dalembertian(const ScalarField& J, double tau, const ComplexFourVector& z, const Metric& g, double h);

struct CovarianceResult {
    Complex at_z;
    Complex at_boosted;
    double discrepancy = 0.0;
};

/// Compares the d'Alembertian of J at z with that of J'(z') = J(boost^-1 z') at z' = boost z.
CovarianceResult covariance_check(const ScalarField& J, const Boost& boost, double tau, const ComplexFourVector& z,
                                  const Metric& g, double h);

/// Cost-to-go of a free particle in a constant (pure gauge) potential:
/// J = kappa (tau_f - tau), kappa = sigma_tilde c sqrt(sigma_tilde P.P) - P.P / m, P = q A.
/// Its gradient vanishes, so w* = -qA/m and the residual is zero at every point.
/// Throws PreconditionError when the potential is not constant.
ScalarField free_particle_cost_to_go(const EMFieldConfig& cfg, double tau_f, const DomainBox& box = {});

/// max |J(tau_f, z)| over the probes' z.
double boundary_violation(const ScalarField& J, double tau_f, const std::vector<Probe>& probes);

/// {tau, z_re[4], z_im[4], residual_re, residual_im, w_star_re[4], w_star_im[4]}.
nlohmann::ordered_json residual_record(double tau, const ComplexFourVector& z, const HJBResidual& r);

}  // namespace csoc
