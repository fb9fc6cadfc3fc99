#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <vector>

#include "csoc/lagrangian.hpp"
#include "csoc/spacetime.hpp"
#include "csoc/wiener.hpp"

namespace csoc {

/// Markov feedback control w(tau, z), upper index.
using ControlPolicy = std::function<ComplexFourVector(double tau, const ComplexFourVector& z)>;

/// w = const.
ControlPolicy constant_policy(const ComplexFourVector& w);
/// w^mu = sum_nu A[mu][nu] z^nu.
ControlPolicy linear_policy(const std::array<Complex4, 4>& A);

enum class Recording {
    Full,       ///< every step of every path
    Endpoints,  ///< initial and final state only
};

struct IntegrationSettings {
    double tau0 = 0.0;
    double d_tau = 0.01;
    std::size_t n_steps = 100;
    std::size_t n_paths = 1;
    std::uint64_t seed = 0;
    std::size_t jobs = 1;
    /// Each step's increment is the sum of this many independent sub-increments of
    /// d_tau / noise_substeps. A coarse run with k substeps shares its Brownian path with a
    /// fine run of k times as many steps and the same seed.
    std::size_t noise_substeps = 1;
    Recording recording = Recording::Full;

    void validate() const;
    double tau_final() const { return tau0 + d_tau * static_cast<double>(n_steps); }
};

using State8 = std::array<double, 8>;  ///< x^0..x^3, y^0..y^3

struct TrajectoryEnsemble {
    std::size_t n_paths = 0;
    std::size_t n_steps = 0;
    double tau0 = 0.0;
    double d_tau = 0.0;
    std::uint64_t seed = 0;
    Recording recording = Recording::Full;
    /// Row-major (path, recorded step); recorded steps are n_steps + 1 or 2.
    std::vector<State8> states;
    /// Paths that produced a non-finite state, in increasing order.
    std::vector<std::size_t> failed_paths;

    std::size_t recorded_steps() const { return recording == Recording::Full ? n_steps + 1 : 2; }
    const State8& at(std::size_t path, std::size_t recorded_step) const {
        return states[path * recorded_steps() + recorded_step];
    }
    const State8& final_state(std::size_t path) const { return at(path, recorded_steps() - 1); }
    /// Proper time of a recorded step.
    double tau_of(std::size_t recorded_step) const;
    bool failed(std::size_t path) const;
};

/// Standard normals for one Euler-Maruyama step of one path, already scaled to N(0, d_tau).
/// Pure in (seed, path, step, substeps).
Real4 path_increment(std::uint64_t seed, std::size_t path, std::size_t step, double d_tau, std::size_t substeps);

/// Euler-Maruyama for dx = v dtau + sigma_x dWx, dy = u dtau + sigma_y dWy with dWy = eps eta dWx.
/// A path whose state turns non-finite stops updating and is listed in failed_paths.
TrajectoryEnsemble integrate(const ControlPolicy& policy, const DiffusionSpec& spec, const ComplexFourVector& z0,
                             const IntegrationSettings& s);

struct ActionEstimate {
    Complex mean;
    double stderr_re = 0.0;
    double stderr_im = 0.0;
    std::size_t n_valid = 0;
    std::size_t n_excluded = 0;
    /// False when more than 0.1% of the paths were excluded.
    bool valid = true;
};

/// Monte Carlo estimate of < integral L(tau, z, w) dtau > with a left-point rule.
ActionEstimate estimate_action(const Lagrangian& L, const ControlPolicy& policy, const DiffusionSpec& spec,
                               const ComplexFourVector& z0, const IntegrationSettings& s);

struct BellmanResidual {
    Complex residual;  ///< J(tau, z) - < L d_tau + J(tau + d_tau, z + dz) >
    double stderr_re = 0.0;
    double stderr_im = 0.0;
    std::size_t n_valid = 0;
};

/// One-step Bellman recursion checked by Monte Carlo from the fixed point (tau, z).
BellmanResidual bellman_consistency(const std::function<Complex(double, const ComplexFourVector&)>& J,
                                    const Lagrangian& L, const ControlPolicy& policy, const DiffusionSpec& spec,
                                    double tau, const ComplexFourVector& z, double d_tau, std::size_t n_paths,
                                    std::uint64_t seed, std::size_t jobs = 1);

/// path,step,tau,x0..x3,y0..y3 with a header row and 17 significant digits.
void write_trajectory_csv(std::ostream& os, const TrajectoryEnsemble& e);

}  // namespace csoc
