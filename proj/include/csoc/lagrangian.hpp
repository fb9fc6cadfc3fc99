#pragma once

#include <functional>
#include <map>
#include <memory>
#include <string>

#include "csoc/spacetime.hpp"

namespace csoc {

using LagrangianValueFn = std::function<Complex(double tau, const ComplexFourVector& z, const ComplexFourVector& w)>;
/// Returns dL/dw^mu, a lower-index vector.
using LagrangianGradientFn =
    std::function<ComplexFourVector(double tau, const ComplexFourVector& z, const ComplexFourVector& w)>;

/// Complex Lagrangian L(tau, z, w), analytic in w.
///
/// Carries its analytic velocity gradient when known and falls back to
/// central differences otherwise. A Lagrangian may also carry a stationarity
/// form: a second function whose w-gradient the control solvers drive to zero
/// in place of L's own gradient. The EM Lagrangian uses it to impose the weak
/// equation after differentiation.
class Lagrangian {
public:
    Lagrangian() = default;
    Lagrangian(std::string name, Metric metric, LagrangianValueFn value, LagrangianGradientFn gradient = {});

    const std::string& name() const { return name_; }
    const Metric& metric() const { return metric_; }
    const std::map<std::string, double>& parameters() const { return params_; }
    Lagrangian& with_parameter(const std::string& key, double v);

    Complex value(double tau, const ComplexFourVector& z, const ComplexFourVector& w) const;
    Complex operator()(double tau, const ComplexFourVector& z, const ComplexFourVector& w) const {
        return value(tau, z, w);
    }

    bool has_analytic_gradient() const { return static_cast<bool>(gradient_); }
    /// Analytic gradient if present, else fd_gradient_w.
    ComplexFourVector gradient_w(double tau, const ComplexFourVector& z, const ComplexFourVector& w) const;
    /// Central differences of the value along real w^mu. h <= 0 picks cbrt(eps) scaled.
    ComplexFourVector fd_gradient_w(double tau, const ComplexFourVector& z, const ComplexFourVector& w,
                                    double h = 0.0) const;

    /// The function whose stationary point in w defines the optimal control. Defaults to *this.
    const Lagrangian& stationarity_form() const { return stationarity_ ? *stationarity_ : *this; }
    Lagrangian& with_stationarity_form(Lagrangian form);

private:
    std::string name_;
    Metric metric_{};
    std::map<std::string, double> params_;
    LagrangianValueFn value_;
    LagrangianGradientFn gradient_;
    std::shared_ptr<const Lagrangian> stationarity_;
};

using PotentialFn = std::function<ComplexFourVector(double tau, const ComplexFourVector& z)>;

/// Charge, mass, speed of light and a lower-index vector potential A_mu(tau, z).
struct EMFieldConfig {
    double q = 0.0;
    double m = 1.0;
    double c = 1.0;
    double hbar = 1.0;
    PotentialFn A;
    Metric metric{};
    std::string potential_name = "zero";

    /// Throws DomainError unless m, c, hbar > 0 and A is set.
    void validate() const;
    ComplexFourVector potential(double tau, const ComplexFourVector& z) const;
};

/// A_mu = 0.
PotentialFn zero_potential();
/// A_mu = (a0, a1, a2, a3), complex components allowed.
PotentialFn constant_potential(const Complex4& a);
/// A_0 = -E z^1, other components zero: a uniform electric field along axis 1,
/// continued analytically to complex z.
PotentialFn linear_electric_potential(double E);

/// Parses "zero", "constant(a0,a1,a2,a3)" or "linear-electric(E)". Throws DomainError on anything else.
PotentialFn potential_from_name(const std::string& spec);

/// L = sigma_tilde m c sqrt(sigma_tilde sum w^mu w_mu) + q sum A_mu w^mu on the principal branch.
///
/// gradient_w is the unconstrained derivative
/// sigma_tilde^2 m c w_mu / sqrt(sigma_tilde sum w w) + q A_mu and throws
/// SingularityError at the branch point sum w w = 0. The stationarity form is
/// 1/2 m sum w w + 1/2 sigma_tilde m c^2 + q A.w: it agrees with L on the
/// weak-equation shell and its gradient is m w_mu + q A_mu everywhere.
Lagrangian em_lagrangian(const EMFieldConfig& cfg);

/// 1/2 m sum w^mu w_mu, used where a strictly convex-in-w test Lagrangian is needed.
Lagrangian quadratic_lagrangian(double m, const Metric& g);

/// L = value everywhere, zero gradient.
Lagrangian constant_lagrangian(Complex value, const Metric& g = {});

struct WeakGradientCheck {
    bool passed = false;
    double shell_residual = 0.0;
    double max_difference = 0.0;
    ComplexFourVector fd_gradient;
    ComplexFourVector shell_gradient;
};

/// Differentiates L by central differences with w unconstrained and compares
/// with the gradient of its stationarity form (m w_mu + q A_mu for the EM
/// Lagrangian). The shell is read from the "c" parameter and the metric.
/// Throws PreconditionError when w is off the shell by more than tol.
WeakGradientCheck check_weak_gradient(const Lagrangian& L, const ComplexFourVector& w, double tol,
                                      double tau = 0.0, const ComplexFourVector& z = {});

}  // namespace csoc
