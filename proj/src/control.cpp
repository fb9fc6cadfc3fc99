#include "csoc/control.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "csoc/errors.hpp"

namespace csoc {

double StationarityResult::max_residual() const {
    double r = 0.0;
    for (const auto& x : residual_complex) r = std::max(r, std::abs(x));
    return r;
}

namespace {

double max_abs(const Real8& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

Real8 pack(const ComplexFourVector& w) {
    Real8 x{};
    for (std::size_t mu = 0; mu < 4; ++mu) {
        x[mu] = w[mu].real();
        x[4 + mu] = w[mu].imag();
    }
    return x;
}

ComplexFourVector unpack(const Real8& x) {
    ComplexFourVector w;
    for (std::size_t mu = 0; mu < 4; ++mu) w[mu] = Complex(x[mu], x[4 + mu]);
    return w;
}

}  // namespace

Real8 newton_solve(const std::function<Real8(const Real8&)>& F, Real8 x, const NewtonSettings& s,
                   std::size_t* iterations) {
    using Vec8 = Eigen::Matrix<double, 8, 1>;
    using Mat8 = Eigen::Matrix<double, 8, 8>;
    Real8 f = F(x);
    double norm = max_abs(f);
    for (std::size_t it = 0; it < s.max_iterations; ++it) {
        if (!std::isfinite(norm)) throw ConvergenceError("Newton residual is not finite");
        if (norm <= s.tol) {
            if (iterations) *iterations = it;
            return x;
        }
        Mat8 jac;
        for (std::size_t j = 0; j < 8; ++j) {
            const double step = s.jacobian_step * std::max(1.0, std::abs(x[j]));
            Real8 xp = x, xm = x;
            xp[j] += step;
            xm[j] -= step;
            const Real8 fp = F(xp), fm = F(xm);
            for (std::size_t i = 0; i < 8; ++i) jac(i, j) = (fp[i] - fm[i]) / (2.0 * step);
        }
        Eigen::ColPivHouseholderQR<Mat8> qr(jac);
        if (qr.rank() < 8) throw SingularityError("singular Jacobian in stationarity solve");
        const Vec8 rhs = Eigen::Map<const Vec8>(f.data());
        const Vec8 delta = qr.solve(-rhs);

        double lambda = 1.0;
        Real8 trial{};
        Real8 ft{};
        double trial_norm = 0.0;
        for (int halvings = 0; halvings < 40; ++halvings) {
            for (std::size_t i = 0; i < 8; ++i) trial[i] = x[i] + lambda * delta[i];
            ft = F(trial);
            trial_norm = max_abs(ft);
            if (trial_norm <= norm) break;
            lambda *= s.damping;
        }
        double xscale = 1.0;
        for (double v : x) xscale = std::max(xscale, std::abs(v));
        const double step_size = lambda * delta.cwiseAbs().maxCoeff();
        x = trial;
        f = ft;
        norm = trial_norm;
        // stagnation at round-off level counts as convergence
        if (step_size <= 1e-14 * xscale && norm <= std::sqrt(s.tol)) {
            if (iterations) *iterations = it + 1;
            return x;
        }
    }
    if (norm <= s.tol) {
        if (iterations) *iterations = s.max_iterations;
        return x;
    }
    throw ConvergenceError("stationarity solve did not converge (residual " + std::to_string(norm) + ")");
}

StationarityResult solve_optimal_control(const Lagrangian& L, double tau, const ComplexFourVector& z,
                                         const ComplexFourVector& dJ, const ComplexFourVector& guess,
                                         const NewtonSettings& s) {
    const Lagrangian& phi = L.stationarity_form();
    const Metric g = L.metric();
    auto total_gradient = [&](const ComplexFourVector& w) {
        ComplexFourVector G = phi.gradient_w(tau, z, w);
        for (std::size_t mu = 0; mu < 4; ++mu) G[mu] += dJ[mu];
        return G;
    };
    auto F = [&](const Real8& x) {
        const ComplexFourVector G = total_gradient(unpack(x));
        Real8 out{};
        for (std::size_t mu = 0; mu < 4; ++mu) {
            out[mu] = G[mu].real();
            out[4 + mu] = G[mu].imag();
        }
        return out;
    };
    StationarityResult res;
    const Real8 root = newton_solve(F, pack(guess.raised(g)), s, &res.iterations);
    const std::size_t iterations = res.iterations;
    ComplexFourVector w = unpack(root);
    w.position = IndexPosition::Upper;
    res = evaluate_stationarity(L, tau, z, dJ, w);
    res.iterations = iterations;
    return res;
}

StationarityResult evaluate_stationarity(const Lagrangian& L, double tau, const ComplexFourVector& z,
                                         const ComplexFourVector& dJ, const ComplexFourVector& w) {
    const Metric g = L.metric();
    ComplexFourVector wu = w.raised(g);
    ComplexFourVector G = L.stationarity_form().gradient_w(tau, z, wu);
    StationarityResult res;
    for (std::size_t mu = 0; mu < 4; ++mu) {
        G[mu] += dJ[mu];
        res.residual_complex[mu] = G[mu];
        res.residual_real_pair[mu] = G[mu].real();
        res.residual_real_pair[4 + mu] = (kI * G[mu]).real();
        res.residual_imag_pair[mu] = G[mu].imag();
        res.residual_imag_pair[4 + mu] = (kI * G[mu]).imag();
    }
    res.w_star = wu.lowered(g);
    return res;
}

ComplexFourVector em_closed_form_control(const EMFieldConfig& cfg, double tau, const ComplexFourVector& z,
                                         const ComplexFourVector& dJ) {
    cfg.validate();
    const ComplexFourVector A = cfg.potential(tau, z);
    ComplexFourVector w({}, IndexPosition::Lower);
    for (std::size_t mu = 0; mu < 4; ++mu) w[mu] = -(dJ[mu] + cfg.q * A[mu]) / cfg.m;
    return w;
}

RealPairGradient RealPairGradient::from_report(const DerivativeReport& r) {
    RealPairGradient g;
    for (std::size_t mu = 0; mu < 4; ++mu) {
        g.dx_R[mu] = r.d_x[mu].real();
        g.dx_I[mu] = r.d_x[mu].imag();
        g.dy_R[mu] = r.d_y[mu].real();
        g.dy_I[mu] = r.d_y[mu].imag();
    }
    return g;
}

RealPairGradient RealPairGradient::from_analytic(const ComplexFourVector& dJ) {
    RealPairGradient g;
    for (std::size_t mu = 0; mu < 4; ++mu) {
        g.dx_R[mu] = dJ[mu].real();
        g.dx_I[mu] = dJ[mu].imag();
        g.dy_R[mu] = -dJ[mu].imag();
        g.dy_I[mu] = dJ[mu].real();
    }
    return g;
}

namespace {

enum class Part { Real, Imag };

ComplexFourVector solve_part_set(Part part, const Lagrangian& L, double tau, const ComplexFourVector& z,
                                 const RealPairGradient& dJ, const ComplexFourVector& guess, NewtonSettings s) {
    const Lagrangian& phi = L.stationarity_form();
    const Real4& dx = part == Part::Real ? dJ.dx_R : dJ.dx_I;
    const Real4& dy = part == Part::Real ? dJ.dy_R : dJ.dy_I;
    auto take = [part](Complex v) { return part == Part::Real ? v.real() : v.imag(); };
    auto F = [&](const Real8& x) {
        Real8 out{};
        for (std::size_t j = 0; j < 8; ++j) {
            const double step = 1e-5 * std::max(1.0, std::abs(x[j]));
            Real8 xp = x, xm = x;
            xp[j] += step;
            xm[j] -= step;
            const double d = (take(phi.value(tau, z, unpack(xp))) - take(phi.value(tau, z, unpack(xm)))) / (2.0 * step);
            out[j] = d + (j < 4 ? dx[j] : dy[j - 4]);
        }
        return out;
    };
    // nested differences: looser Jacobian step and a residual floor at FD round-off
    s.jacobian_step = std::max(s.jacobian_step, 1e-4);
    s.tol = std::max(s.tol, 1e-10);
    const Real8 root = newton_solve(F, pack(guess.raised(L.metric())), s);
    ComplexFourVector w = unpack(root);
    w.position = IndexPosition::Upper;
    return w;
}

}  // namespace

ComplexFourVector solve_real_part_set(const Lagrangian& L, double tau, const ComplexFourVector& z,
                                      const RealPairGradient& dJ, const ComplexFourVector& guess,
                                      const NewtonSettings& s) {
    return solve_part_set(Part::Real, L, tau, z, dJ, guess, s);
}

ComplexFourVector solve_imag_part_set(const Lagrangian& L, double tau, const ComplexFourVector& z,
                                      const RealPairGradient& dJ, const ComplexFourVector& guess,
                                      const NewtonSettings& s) {
    return solve_part_set(Part::Imag, L, tau, z, dJ, guess, s);
}

bool AuditReport::passed() const { return n_singular == 0 && max_disagreement < tol; }

AuditReport equivalence_audit(const Lagrangian& L, const ScalarField& J, const std::vector<Probe>& probes,
                              double tol, const ClosedFormControl& closed_form, double analyticity_tol) {
    if (probes.empty()) throw DomainError("equivalence audit needs at least one probe");
    const Metric g = L.metric();
    AuditReport rep;
    rep.tol = tol;
    rep.has_closed_form = static_cast<bool>(closed_form);
    const ComplexFourVector guess({Complex(1.0, 0.0), 0.0, 0.0, 0.0}, IndexPosition::Upper);
    for (const auto& p : probes) {
        const DerivativeReport d = complex_derivative(J, p.tau, p.z);
        const double scale = 1.0 + std::abs(d.d_x[0]) + std::abs(d.d_x[1]) + std::abs(d.d_x[2]) + std::abs(d.d_x[3]);
        if (d.max_cr() > analyticity_tol * scale)
            throw PreconditionError("cost-to-go field '" + J.name + "' is not analytic at a probe");

        AuditEntry e;
        e.probe = p;
        const RealPairGradient pair = RealPairGradient::from_report(d);
        e.w_real_set = solve_real_part_set(L, p.tau, p.z, pair, guess);
        e.w_imag_set = solve_imag_part_set(L, p.tau, p.z, pair, guess);
        ComplexFourVector dz(d.d_z, IndexPosition::Lower);
        const StationarityResult sr = solve_optimal_control(L, p.tau, p.z, dz, guess);
        e.w_complex = sr.w_star_upper(g);
        for (std::size_t mu = 0; mu < 4; ++mu)
            e.disagreement = std::max(e.disagreement, std::abs(e.w_real_set[mu] - e.w_imag_set[mu]));
        if (closed_form) {
            const ComplexFourVector wc = closed_form(p.tau, p.z, dz).raised(g);
            for (std::size_t mu = 0; mu < 4; ++mu)
                e.closed_form_difference = std::max(e.closed_form_difference, std::abs(wc[mu] - e.w_complex[mu]));
        }
        try {
            const ComplexFourVector grad = L.gradient_w(p.tau, p.z, e.w_complex);
            for (std::size_t mu = 0; mu < 4; ++mu)
                if (!std::isfinite(grad[mu].real()) || !std::isfinite(grad[mu].imag())) e.singular = true;
        } catch (const SingularityError&) {
            e.singular = true;
        }
        rep.max_disagreement = std::max(rep.max_disagreement, e.disagreement);
        rep.max_closed_form_difference = std::max(rep.max_closed_form_difference, e.closed_form_difference);
        if (e.singular) ++rep.n_singular;
        rep.entries.push_back(e);
    }
    return rep;
}

}  // namespace csoc
