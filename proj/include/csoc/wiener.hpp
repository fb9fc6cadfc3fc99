#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "csoc/spacetime.hpp"

namespace csoc {

/// Real and imaginary diffusion coefficients per axis plus the correlation sign.
///
/// The real and imaginary Wiener increments are perfectly correlated per axis
/// with sign epsilon * eta^{mu mu}: dWy^mu = epsilon eta^{mu mu} dWx^mu.
struct DiffusionSpec {
    Real4 sigma_x{1.0, 1.0, 1.0, 1.0};
    Real4 sigma_y{1.0, 1.0, 1.0, 1.0};
    int epsilon = +1;
    Metric metric{};

    /// sigma_x^2 = sigma_y^2 = hbar/m on every axis.
    static DiffusionSpec postulated(double hbar, double mass, int epsilon, Metric metric);
    /// No noise at all; the paired equations reduce to dz = w dtau.
    static DiffusionSpec deterministic(Metric metric = {}, int epsilon = +1);

    /// Throws DomainError on negative coefficients or epsilon not in {+1, -1}.
    void validate() const;

    /// epsilon * eta^{mu mu}: the sign carried from dWx^mu to dWy^mu.
    double correlation_sign(std::size_t mu) const { return epsilon * metric.eta(mu); }
};

/// sigma^mu sigma^mu = sigma_x^2 - sigma_y^2 + 2 i epsilon eta^{mu mu} sigma_x sigma_y per axis.
///
/// Only the product enters the HJB equation. The factor sigma^mu itself is
/// ambiguous up to sign in the anti-correlated case and is not exposed.
Complex4 complex_sigma_squared(const DiffusionSpec& spec);

/// N rows of paired increments over one proper-time step.
struct IncrementBatch {
    double d_tau = 0.0;
    std::vector<Real4> dWx;
    std::vector<Real4> dWy;
    std::uint64_t seed = 0;
    std::string rng = "philox4x32-10";

    std::size_t size() const { return dWx.size(); }
};

/// Row i of an increment stream: dWx ~ N(0, d_tau) i.i.d. per axis, dWy by the sign rule.
/// Pure in (spec, d_tau, seed, i).
void increment_row(const DiffusionSpec& spec, double d_tau, std::uint64_t seed, std::uint64_t i,
                   Real4& dWx, Real4& dWy);

/// Throws DomainError when d_tau <= 0 or n == 0.
IncrementBatch sample_increments(const DiffusionSpec& spec, double d_tau, std::size_t n,
                                 std::uint64_t seed);

enum class MomentKind { MeanX, MeanY, XX, YY, XY };

struct MomentEstimate {
    MomentKind kind;
    int mu = 0;
    int nu = -1;  ///< -1 for first moments
    double estimate = 0.0;
    double standard_error = 0.0;
    /// Leading-order target in d_tau, e.g. epsilon eta^{mu nu} sigma_x sigma_y d_tau.
    double target = 0.0;
    /// Exact expectation at finite d_tau: target plus the drift term v^mu v^nu d_tau^2.
    double expected = 0.0;
    double z_score = 0.0;
    bool flagged = false;
};

struct MomentReport {
    double d_tau = 0.0;
    std::size_t n = 0;
    std::uint64_t seed = 0;
    double z_threshold = 5.0;
    std::vector<MomentEstimate> moments;

    bool passed() const;
    double max_abs_z() const;
    const MomentEstimate& find(MomentKind kind, int mu, int nu = -1) const;
};

std::string to_string(MomentKind kind);

/// Monte Carlo estimates of the one-step increment moments of
/// dx = v d_tau + sigma_x dWx, dy = u d_tau + sigma_y dWy.
///
/// Every first moment and every (mu, nu) pair of the three second-moment
/// families is estimated with its standard error and flagged when it lies
/// more than z_threshold standard errors from its expectation.
/// Throws DomainError when d_tau <= 0 or n < 10^4.
MomentReport moment_check(const DiffusionSpec& spec, const Real4& v, const Real4& u, double d_tau,
                          std::size_t n, std::uint64_t seed, double z_threshold = 5.0);

}  // namespace csoc
