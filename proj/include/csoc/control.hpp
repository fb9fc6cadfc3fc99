#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <vector>

#include "csoc/ccalc.hpp"
#include "csoc/lagrangian.hpp"
#include "csoc/spacetime.hpp"

namespace csoc {

using Real8 = std::array<double, 8>;

struct NewtonSettings {
    double tol = 1e-12;
    std::size_t max_iterations = 100;
    double damping = 0.5;
    double jacobian_step = 1e-6;
};

struct StationarityResult {
    ComplexFourVector w_star;        ///< lower index
    Complex4 residual_complex{};     ///< dL/dw_mu + dJ/dz^mu at w_star
    Real8 residual_real_pair{};      ///< real-part set: Re dL/dv + dJ_R/dx, Re dL/du + dJ_R/dy
    Real8 residual_imag_pair{};      ///< imaginary-part set: Im dL/dv + dJ_I/dx, Im dL/du + dJ_I/dy
    std::size_t iterations = 0;

    ComplexFourVector w_star_upper(const Metric& g) const { return w_star.raised(g); }
    double max_residual() const;
};

/// Damped Newton on an 8-real system with a central-difference Jacobian.
/// Throws ConvergenceError after max_iterations and SingularityError on a singular Jacobian.
Real8 newton_solve(const std::function<Real8(const Real8&)>& F, Real8 x0, const NewtonSettings& s,
                   std::size_t* iterations = nullptr);

/// Residuals of both forms at an arbitrary w (upper index); iterations is left at 0.
StationarityResult evaluate_stationarity(const Lagrangian& L, double tau, const ComplexFourVector& z,
                                         const ComplexFourVector& dJ, const ComplexFourVector& w);

/// Drives grad_w Phi + dJ to zero over the 8 reals (Re w^mu, Im w^mu), where Phi is the
/// Lagrangian's stationarity form. dJ is the lower-index complex gradient of the cost-to-go.
StationarityResult solve_optimal_control(const Lagrangian& L, double tau, const ComplexFourVector& z,
                                         const ComplexFourVector& dJ, const ComplexFourVector& guess,
                                         const NewtonSettings& s = {});

/// w*_mu = -(dJ_mu + q A_mu) / m.
ComplexFourVector em_closed_form_control(const EMFieldConfig& cfg, double tau, const ComplexFourVector& z,
                                         const ComplexFourVector& dJ);

/// Real partial derivatives of J_R and J_I along x^mu and y^mu.
struct RealPairGradient {
    Real4 dx_R{}, dy_R{}, dx_I{}, dy_I{};

    /// From a complex derivative report: d_x = dJ_R/dx + i dJ_I/dx, d_y likewise.
    static RealPairGradient from_report(const DerivativeReport& r);
    /// From a complex gradient of an analytic J (y-derivatives via Cauchy-Riemann).
    static RealPairGradient from_analytic(const ComplexFourVector& dJ);
};

/// Root of the real-part condition set, with derivatives of Re Phi taken by
/// real-variable central differences along v^mu and u^mu. Returns w upper-index.
ComplexFourVector solve_real_part_set(const Lagrangian& L, double tau, const ComplexFourVector& z,
                                      const RealPairGradient& dJ, const ComplexFourVector& guess,
                                      const NewtonSettings& s = {});
/// Same for the imaginary-part condition set.
ComplexFourVector solve_imag_part_set(const Lagrangian& L, double tau, const ComplexFourVector& z,
                                      const RealPairGradient& dJ, const ComplexFourVector& guess,
                                      const NewtonSettings& s = {});

/// Optional closed form for the optimal control: (tau, z, dJ) -> w*_mu.
using ClosedFormControl =
    std::function<ComplexFourVector(double tau, const ComplexFourVector& z, const ComplexFourVector& dJ)>;

struct AuditEntry {
    Probe probe;
    ComplexFourVector w_real_set;  ///< upper
    ComplexFourVector w_imag_set;  ///< upper
    ComplexFourVector w_complex;   ///< upper, from solve_optimal_control
    double disagreement = 0.0;     ///< max |w_real_set - w_imag_set|
    double closed_form_difference = 0.0;
    bool singular = false;  ///< w* sits where the Lagrangian itself has no gradient
};

struct AuditReport {
    std::vector<AuditEntry> entries;
    double tol = 1e-8;
    double max_disagreement = 0.0;
    double max_closed_form_difference = 0.0;
    std::size_t n_singular = 0;
    bool has_closed_form = false;

    /// Every probe agrees within tol and no singular case was hit.
    bool passed() const;
};

/// Solves the real-part and imaginary-part condition sets independently at
/// each probe and compares their roots with each other and with the complex
/// solve (and the closed form when given). Throws PreconditionError if J fails
/// a Cauchy-Riemann check at a probe.
AuditReport equivalence_audit(const Lagrangian& L, const ScalarField& J, const std::vector<Probe>& probes,
                              double tol, const ClosedFormControl& closed_form = {},
                              double analyticity_tol = 1e-6);

}  // namespace csoc
