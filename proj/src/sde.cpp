#include "csoc/sde.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <ostream>
#include <thread>

#include "csoc/errors.hpp"
#include "csoc/philox.hpp"

namespace csoc {

ControlPolicy constant_policy(const ComplexFourVector& w) {
    ComplexFourVector wu = w;
    wu.position = IndexPosition::Upper;
    return [wu](double, const ComplexFourVector&) { return wu; };
}

ControlPolicy linear_policy(const std::array<Complex4, 4>& A) {
    return [A](double, const ComplexFourVector& z) {
        ComplexFourVector w;
        for (std::size_t mu = 0; mu < 4; ++mu)
            for (std::size_t nu = 0; nu < 4; ++nu) w[mu] += A[mu][nu] * z[nu];
        return w;
    };
}

void IntegrationSettings::validate() const {
    if (!(d_tau > 0.0) || !std::isfinite(d_tau)) throw DomainError("d_tau must be positive");
    if (n_steps == 0) throw DomainError("n_steps must be at least 1");
    if (n_paths == 0) throw DomainError("n_paths must be at least 1");
    if (n_paths > 0xFFFFFFFFull) throw DomainError("n_paths exceeds the substream range");
    if (noise_substeps == 0) throw DomainError("noise_substeps must be at least 1");
    if (jobs == 0) throw DomainError("jobs must be at least 1");
}

double TrajectoryEnsemble::tau_of(std::size_t recorded_step) const {
    const std::size_t step = recording == Recording::Full ? recorded_step : (recorded_step == 0 ? 0 : n_steps);
    return tau0 + d_tau * static_cast<double>(step);
}

bool TrajectoryEnsemble::failed(std::size_t path) const {
    return std::binary_search(failed_paths.begin(), failed_paths.end(), path);
}

Real4 path_increment(std::uint64_t seed, std::size_t path, std::size_t step, double d_tau, std::size_t substeps) {
    const double scale = std::sqrt(d_tau / static_cast<double>(substeps));
    Real4 dW{};
    for (std::size_t k = 0; k < substeps; ++k) {
        const auto n = standard_normals(seed, StreamPurpose::Paths, static_cast<std::uint32_t>(path),
                                        static_cast<std::uint64_t>(step) * substeps + k);
        for (std::size_t mu = 0; mu < 4; ++mu) dW[mu] += scale * n[mu];
    }
    return dW;
}

namespace {

ComplexFourVector to_z(const State8& s) {
    return ComplexFourVector::from_parts({s[0], s[1], s[2], s[3]}, {s[4], s[5], s[6], s[7]});
}

bool finite(const State8& s) {
    return std::all_of(s.begin(), s.end(), [](double v) { return std::isfinite(v); });
}

/// Runs one path; visit(step, tau, z, w) is called before each update. Returns false on a non-finite state.
template <class Visit, class Record>
bool run_path(const ControlPolicy& policy, const DiffusionSpec& spec, const State8& start,
              const IntegrationSettings& s, std::size_t path, Visit&& visit, Record&& record) {
    State8 st = start;
    record(0, st);
    for (std::size_t k = 0; k < s.n_steps; ++k) {
        const double tau = s.tau0 + s.d_tau * static_cast<double>(k);
        const ComplexFourVector z = to_z(st);
        const ComplexFourVector w = policy(tau, z);
        visit(k, tau, z, w);
        const Real4 dW = path_increment(s.seed, path, k, s.d_tau, s.noise_substeps);
        for (std::size_t mu = 0; mu < 4; ++mu) {
            st[mu] += w[mu].real() * s.d_tau + spec.sigma_x[mu] * dW[mu];
            st[4 + mu] += w[mu].imag() * s.d_tau + spec.sigma_y[mu] * (spec.correlation_sign(mu) * dW[mu]);
        }
        if (!finite(st)) return false;
        record(k + 1, st);
    }
    return true;
}

template <class Body>
void for_paths(std::size_t n_paths, std::size_t jobs, Body&& body) {
    jobs = std::min(jobs, n_paths);
    if (jobs <= 1) {
        for (std::size_t p = 0; p < n_paths; ++p) body(p);
        return;
    }
    std::vector<std::thread> pool;
    const std::size_t chunk = (n_paths + jobs - 1) / jobs;
    for (std::size_t j = 0; j < jobs; ++j) {
        const std::size_t lo = j * chunk, hi = std::min(n_paths, lo + chunk);
        pool.emplace_back([lo, hi, &body] {
            for (std::size_t p = lo; p < hi; ++p) body(p);
        });
    }
    for (auto& t : pool) t.join();
}

State8 initial_state(const ComplexFourVector& z0) {
    const Real4 x = z0.re(), y = z0.im();
    return {x[0], x[1], x[2], x[3], y[0], y[1], y[2], y[3]};
}

}  // namespace

TrajectoryEnsemble integrate(const ControlPolicy& policy, const DiffusionSpec& spec, const ComplexFourVector& z0,
                             const IntegrationSettings& s) {
    s.validate();
    spec.validate();
    TrajectoryEnsemble e;
    e.n_paths = s.n_paths;
    e.n_steps = s.n_steps;
    e.tau0 = s.tau0;
    e.d_tau = s.d_tau;
    e.seed = s.seed;
    e.recording = s.recording;
    const std::size_t rec = e.recorded_steps();
    e.states.assign(s.n_paths * rec, State8{});
    std::vector<char> ok(s.n_paths, 1);
    const State8 start = initial_state(z0);
    for_paths(s.n_paths, s.jobs, [&](std::size_t p) {
        State8* row = e.states.data() + p * rec;
        auto record = [&](std::size_t k, const State8& st) {
            if (s.recording == Recording::Full) {
                row[k] = st;
            } else if (k == 0) {
                row[0] = st;
            } else if (k == s.n_steps) {
                row[1] = st;
            }
        };
        auto visit = [](std::size_t, double, const ComplexFourVector&, const ComplexFourVector&) {};
        ok[p] = run_path(policy, spec, start, s, p, visit, record);
    });
    for (std::size_t p = 0; p < s.n_paths; ++p)
        if (!ok[p]) e.failed_paths.push_back(p);
    return e;
}

ActionEstimate estimate_action(const Lagrangian& L, const ControlPolicy& policy, const DiffusionSpec& spec,
                               const ComplexFourVector& z0, const IntegrationSettings& s) {
    s.validate();
    spec.validate();
    std::vector<Complex> action(s.n_paths);
    std::vector<char> ok(s.n_paths, 1);
    const State8 start = initial_state(z0);
    for_paths(s.n_paths, s.jobs, [&](std::size_t p) {
        Complex sum = 0.0;
        auto visit = [&](std::size_t, double tau, const ComplexFourVector& z, const ComplexFourVector& w) {
            sum += L.value(tau, z, w);
        };
        auto record = [](std::size_t, const State8&) {};
        ok[p] = run_path(policy, spec, start, s, p, visit, record);
        action[p] = sum * s.d_tau;
        if (!std::isfinite(action[p].real()) || !std::isfinite(action[p].imag())) ok[p] = 0;
    });
    // fixed-order reduction over paths
    ActionEstimate est;
    Complex total = 0.0;
    for (std::size_t p = 0; p < s.n_paths; ++p) {
        if (!ok[p]) {
            ++est.n_excluded;
            continue;
        }
        ++est.n_valid;
        total += action[p];
    }
    est.valid = est.n_valid > 0 && static_cast<double>(est.n_excluded) <= 1e-3 * static_cast<double>(s.n_paths);
    if (est.n_valid == 0) return est;
    const double n = static_cast<double>(est.n_valid);
    est.mean = total / n;
    if (est.n_valid > 1) {
        double vr = 0.0, vi = 0.0;
        for (std::size_t p = 0; p < s.n_paths; ++p) {
            if (!ok[p]) continue;
            const Complex d = action[p] - est.mean;
            vr += d.real() * d.real();
            vi += d.imag() * d.imag();
        }
        est.stderr_re = std::sqrt(vr / (n - 1.0) / n);
        est.stderr_im = std::sqrt(vi / (n - 1.0) / n);
    }
    return est;
}

BellmanResidual bellman_consistency(const std::function<Complex(double, const ComplexFourVector&)>& J,
                                    const Lagrangian& L, const ControlPolicy& policy, const DiffusionSpec& spec,
                                    double tau, const ComplexFourVector& z, double d_tau, std::size_t n_paths,
                                    std::uint64_t seed, std::size_t jobs) {
    IntegrationSettings s;
    s.tau0 = tau;
    s.d_tau = d_tau;
    s.n_steps = 1;
    s.n_paths = n_paths;
    s.seed = seed;
    s.jobs = jobs;
    s.validate();
    spec.validate();
    const ComplexFourVector w = policy(tau, z);
    const Complex running = L.value(tau, z, w) * d_tau;
    std::vector<Complex> sample(n_paths);
    for_paths(n_paths, jobs, [&](std::size_t p) {
        const Real4 dW = path_increment(seed, p, 0, d_tau, 1);
        ComplexFourVector zn = z;
        for (std::size_t mu = 0; mu < 4; ++mu) {
            const double dx = w[mu].real() * d_tau + spec.sigma_x[mu] * dW[mu];
            const double dy = w[mu].imag() * d_tau + spec.sigma_y[mu] * spec.correlation_sign(mu) * dW[mu];
            zn[mu] += Complex(dx, dy);
        }
        sample[p] = running + J(tau + d_tau, zn);
    });
    BellmanResidual out;
    Complex total = 0.0;
    for (const auto& v : sample) {
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) continue;
        total += v;
        ++out.n_valid;
    }
    if (out.n_valid == 0) throw DomainError("every Bellman sample was non-finite");
    const double n = static_cast<double>(out.n_valid);
    const Complex mean = total / n;
    double vr = 0.0, vi = 0.0;
    for (const auto& v : sample) {
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) continue;
        vr += (v - mean).real() * (v - mean).real();
        vi += (v - mean).imag() * (v - mean).imag();
    }
    if (out.n_valid > 1) {
        out.stderr_re = std::sqrt(vr / (n - 1.0) / n);
        out.stderr_im = std::sqrt(vi / (n - 1.0) / n);
    }
    out.residual = J(tau, z) - mean;
    return out;
}

namespace {

void put_double(std::ostream& os, double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    os.write(buf, ptr - buf);
}

}  // namespace

void write_trajectory_csv(std::ostream& os, const TrajectoryEnsemble& e) {
    os << "path,step,tau,x0,x1,x2,x3,y0,y1,y2,y3\n";
    const std::size_t rec = e.recorded_steps();
    for (std::size_t p = 0; p < e.n_paths; ++p) {
        for (std::size_t k = 0; k < rec; ++k) {
            const std::size_t step = e.recording == Recording::Full ? k : (k == 0 ? 0 : e.n_steps);
            os << p << ',' << step << ',';
            put_double(os, e.tau_of(k));
            for (double v : e.at(p, k)) {
                os << ',';
                put_double(os, v);
            }
            os << '\n';
        }
    }
}

}  // namespace csoc
