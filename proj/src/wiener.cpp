#include "csoc/wiener.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "csoc/errors.hpp"
#include "csoc/philox.hpp"

namespace csoc {

DiffusionSpec DiffusionSpec::postulated(double hbar, double mass, int epsilon, Metric metric) {
    if (!(hbar > 0.0) || !(mass > 0.0)) throw DomainError("hbar and mass must be positive");
    const double s = std::sqrt(hbar / mass);
    DiffusionSpec spec{{s, s, s, s}, {s, s, s, s}, epsilon, metric};
    spec.validate();
    return spec;
}

DiffusionSpec DiffusionSpec::deterministic(Metric metric, int epsilon) {
    return DiffusionSpec{{0, 0, 0, 0}, {0, 0, 0, 0}, epsilon, metric};
}

void DiffusionSpec::validate() const {
    if (epsilon != 1 && epsilon != -1) throw DomainError("epsilon must be +1 or -1");
    for (std::size_t mu = 0; mu < 4; ++mu) {
        if (!(sigma_x[mu] >= 0.0) || !(sigma_y[mu] >= 0.0) || !std::isfinite(sigma_x[mu]) ||
            !std::isfinite(sigma_y[mu]))
            throw DomainError("diffusion coefficients must be finite and nonnegative");
    }
}

Complex4 complex_sigma_squared(const DiffusionSpec& spec) {
    Complex4 out{};
    for (std::size_t mu = 0; mu < 4; ++mu) {
        const double sx = spec.sigma_x[mu];
        const double sy = spec.sigma_y[mu];
        out[mu] = Complex(sx * sx - sy * sy, 2.0 * spec.correlation_sign(mu) * sx * sy);
    }
    return out;
}

void increment_row(const DiffusionSpec& spec, double d_tau, std::uint64_t seed, std::uint64_t i,
                   Real4& dWx, Real4& dWy) {
    const auto n = standard_normals(seed, StreamPurpose::Increments, 0, i);
    const double scale = std::sqrt(d_tau);
    for (std::size_t mu = 0; mu < 4; ++mu) {
        dWx[mu] = scale * n[mu];
        dWy[mu] = spec.correlation_sign(mu) * dWx[mu];
    }
}

IncrementBatch sample_increments(const DiffusionSpec& spec, double d_tau, std::size_t n,
                                 std::uint64_t seed) {
    spec.validate();
    if (!(d_tau > 0.0)) throw DomainError("d_tau must be positive");
    if (n == 0) throw DomainError("sample count must be at least 1");
    IncrementBatch batch;
    batch.d_tau = d_tau;
    batch.seed = seed;
    batch.rng = Philox4x32::name;
    batch.dWx.resize(n);
    batch.dWy.resize(n);
    for (std::size_t i = 0; i < n; ++i) increment_row(spec, d_tau, seed, i, batch.dWx[i], batch.dWy[i]);
    return batch;
}

std::string to_string(MomentKind kind) {
    switch (kind) {
        case MomentKind::MeanX: return "<dx>";
        case MomentKind::MeanY: return "<dy>";
        case MomentKind::XX: return "<dx dx>";
        case MomentKind::YY: return "<dy dy>";
        case MomentKind::XY: return "<dx dy>";
    }
    return "?";
}

bool MomentReport::passed() const {
    return std::none_of(moments.begin(), moments.end(), [](const MomentEstimate& m) { return m.flagged; });
}

double MomentReport::max_abs_z() const {
    double z = 0.0;
    for (const auto& m : moments) z = std::max(z, std::abs(m.z_score));
    return z;
}

const MomentEstimate& MomentReport::find(MomentKind kind, int mu, int nu) const {
    for (const auto& m : moments)
        if (m.kind == kind && m.mu == mu && m.nu == nu) return m;
    throw DomainError("no such moment in report");
}

namespace {

struct Accumulator {
    double sum = 0.0;
    double sum_sq = 0.0;

    void add(double x) {
        sum += x;
        sum_sq += x * x;
    }
};

MomentEstimate finish(const Accumulator& acc, std::size_t n, MomentKind kind, int mu, int nu, double target,
                      double expected, double z_threshold) {
    const double nn = static_cast<double>(n);
    const double mean = acc.sum / nn;
    const double var = std::max(0.0, (acc.sum_sq - acc.sum * mean) / (nn - 1.0));
    MomentEstimate m{kind, mu, nu, mean, std::sqrt(var / nn), target, expected, 0.0, false};
    const double diff = mean - expected;
    if (m.standard_error > 0.0) {
        m.z_score = diff / m.standard_error;
    } else {
        // degenerate (noise-free) column: the estimate must be exact up to rounding
        const double scale = std::max({std::abs(expected), std::abs(mean), 1e-300});
        m.z_score = std::abs(diff) <= 1e-12 * scale ? 0.0 : std::numeric_limits<double>::infinity();
    }
    m.flagged = !(std::abs(m.z_score) <= z_threshold);
    return m;
}

}  // namespace

MomentReport moment_check(const DiffusionSpec& spec, const Real4& v, const Real4& u, double d_tau,
                          std::size_t n, std::uint64_t seed, double z_threshold) {
    spec.validate();
    if (!(d_tau > 0.0)) throw DomainError("d_tau must be positive");
    if (n < 10000) throw DomainError("moment_check needs at least 10^4 samples");

    std::array<Accumulator, 4> mean_x{}, mean_y{};
    std::array<std::array<Accumulator, 4>, 4> xx{}, yy{}, xy{};
    Real4 dWx{}, dWy{}, dx{}, dy{};
    for (std::size_t i = 0; i < n; ++i) {
        increment_row(spec, d_tau, seed, i, dWx, dWy);
        for (std::size_t mu = 0; mu < 4; ++mu) {
            dx[mu] = v[mu] * d_tau + spec.sigma_x[mu] * dWx[mu];
            dy[mu] = u[mu] * d_tau + spec.sigma_y[mu] * dWy[mu];
            mean_x[mu].add(dx[mu]);
            mean_y[mu].add(dy[mu]);
        }
        for (std::size_t mu = 0; mu < 4; ++mu) {
            for (std::size_t nu = 0; nu < 4; ++nu) {
                xx[mu][nu].add(dx[mu] * dx[nu]);
                yy[mu][nu].add(dy[mu] * dy[nu]);
                xy[mu][nu].add(dx[mu] * dy[nu]);
            }
        }
    }

    MomentReport report;
    report.d_tau = d_tau;
    report.n = n;
    report.seed = seed;
    report.z_threshold = z_threshold;
    const double dt2 = d_tau * d_tau;
    for (int mu = 0; mu < 4; ++mu) {
        report.moments.push_back(
            finish(mean_x[mu], n, MomentKind::MeanX, mu, -1, v[mu] * d_tau, v[mu] * d_tau, z_threshold));
    }
    for (int mu = 0; mu < 4; ++mu) {
        report.moments.push_back(
            finish(mean_y[mu], n, MomentKind::MeanY, mu, -1, u[mu] * d_tau, u[mu] * d_tau, z_threshold));
    }
    for (int mu = 0; mu < 4; ++mu) {
        for (int nu = 0; nu < 4; ++nu) {
            const double delta = mu == nu ? 1.0 : 0.0;
            const double sx2 = spec.sigma_x[mu] * spec.sigma_x[mu];
            const double t_xx = delta * sx2 * d_tau;
            report.moments.push_back(finish(xx[mu][nu], n, MomentKind::XX, mu, nu, t_xx,
                                            t_xx + v[mu] * v[nu] * dt2, z_threshold));
        }
    }
    for (int mu = 0; mu < 4; ++mu) {
        for (int nu = 0; nu < 4; ++nu) {
            const double delta = mu == nu ? 1.0 : 0.0;
            const double sy2 = spec.sigma_y[mu] * spec.sigma_y[mu];
            const double t_yy = delta * sy2 * d_tau;
            report.moments.push_back(finish(yy[mu][nu], n, MomentKind::YY, mu, nu, t_yy,
                                            t_yy + u[mu] * u[nu] * dt2, z_threshold));
        }
    }
    for (int mu = 0; mu < 4; ++mu) {
        for (int nu = 0; nu < 4; ++nu) {
            const double t_xy = mu == nu ? spec.correlation_sign(mu) * spec.sigma_x[mu] * spec.sigma_y[mu] * d_tau
                                         : 0.0;
            report.moments.push_back(finish(xy[mu][nu], n, MomentKind::XY, mu, nu, t_xy,
                                            t_xy + v[mu] * u[nu] * dt2, z_threshold));
        }
    }
    return report;
}

}  // namespace csoc
