#include "csoc/hjb.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "csoc/errors.hpp"

namespace csoc {

namespace {

double first_step(const ScalarField& J, const ComplexFourVector& z, double h) {
    if (h > 0.0) return h;
    if (J.h > 0.0) return J.h;
    double s = 0.0;
    for (std::size_t mu = 0; mu < 4; ++mu) s = std::max({s, std::abs(z[mu].real()), std::abs(z[mu].imag())});
    return default_first_step(s);
}

double second_step(const ScalarField& J, const ComplexFourVector& z, double h) {
    if (h > 0.0) return h;
    if (J.h > 0.0) return J.h;
    double s = 0.0;
    for (std::size_t mu = 0; mu < 4; ++mu) s = std::max({s, std::abs(z[mu].real()), std::abs(z[mu].imag())});
    return default_second_step(s);
}

ComplexFourVector start_point(const HJBProblem& P, double tau, const ComplexFourVector& z,
                              const ComplexFourVector& dJ) {
    if (P.closed_form) return P.closed_form(tau, z, dJ);
    return ComplexFourVector({}, IndexPosition::Upper);
}

}  // namespace

HJBResidual hjb_residual_complex(const HJBProblem& P, const ScalarField& J, double tau, const ComplexFourVector& z,
                                 double h) {
    const Metric& g = P.metric();
    const double h1 = first_step(J, z, h);
    const double h2 = second_step(J, z, h);
    const DerivativeReport d = complex_derivative(J, tau, z, h1);
    const ComplexFourVector dJ(d.d_z, IndexPosition::Lower);
    const StationarityResult sr = solve_optimal_control(P.L, tau, z, dJ, start_point(P, tau, z, dJ));

    HJBResidual r;
    r.w_star = sr.w_star_upper(g);
    r.time_term = -tau_derivative(J, tau, z, h1);
    r.running_term = P.L.value(tau, z, r.w_star);
    for (std::size_t mu = 0; mu < 4; ++mu) r.running_term += r.w_star[mu] * dJ[mu];
    const Complex4 ss = complex_sigma_squared(P.spec);
    r.diffusion_term = 0.0;
    for (std::size_t mu = 0; mu < 4; ++mu) {
        if (ss[mu] == Complex(0.0, 0.0)) continue;
        r.diffusion_term += 0.5 * ss[mu] * second_x_derivative(J, tau, z, mu, h2);
    }
    r.residual = r.time_term - r.running_term - r.diffusion_term;
    return r;
}

RealPairField split(const ScalarField& J) {
    auto f = J.f;
    RealPairField out;
    out.J_R = [f](double tau, const Real4& x, const Real4& y) {
        return f(tau, ComplexFourVector::from_parts(x, y)).real();
    };
    out.J_I = [f](double tau, const Real4& x, const Real4& y) {
        return f(tau, ComplexFourVector::from_parts(x, y)).imag();
    };
    out.box = J.box;
    out.name = J.name;
    return out;
}

namespace {

ScalarField as_field(const RealFn& fn, const DomainBox& box, const std::string& name) {
    ScalarField f;
    f.f = [fn](double tau, const ComplexFourVector& z) { return Complex(fn(tau, z.re(), z.im()), 0.0); };
    f.box = box;
    f.name = name;
    return f;
}

struct PartTerms {
    double residual = 0.0;
    double non_mixed = 0.0;
};

}  // namespace

PairResidual hjb_residual_pair(const HJBProblem& P, const RealPairField& J, double tau, const ComplexFourVector& z,
                               double h) {
    const ScalarField fR = as_field(J.J_R, J.box, J.name + ":R");
    const ScalarField fI = as_field(J.J_I, J.box, J.name + ":I");
    const double h1 = first_step(fR, z, h);
    const double h2 = second_step(fR, z, h);
    const DerivativeReport dR = complex_derivative(fR, tau, z, h1);
    const DerivativeReport dI = complex_derivative(fI, tau, z, h1);

    RealPairGradient grad;
    for (std::size_t mu = 0; mu < 4; ++mu) {
        grad.dx_R[mu] = dR.d_x[mu].real();
        grad.dy_R[mu] = dR.d_y[mu].real();
        grad.dx_I[mu] = dI.d_x[mu].real();
        grad.dy_I[mu] = dI.d_y[mu].real();
    }
    ComplexFourVector dz({}, IndexPosition::Lower);
    for (std::size_t mu = 0; mu < 4; ++mu) dz[mu] = Complex(grad.dx_R[mu], grad.dx_I[mu]);
    const ComplexFourVector guess = start_point(P, tau, z, dz);

    PairResidual out;
    out.w_real_set = solve_real_part_set(P.L, tau, z, grad, guess);
    out.w_imag_set = solve_imag_part_set(P.L, tau, z, grad, guess);

    const DiffusionSpec& s = P.spec;
    auto part = [&](const ScalarField& f, const Real4& dx, const Real4& dy, const ComplexFourVector& w, bool real_part) {
        PartTerms t;
        const Complex Lw = P.L.value(tau, z, w);
        double running = real_part ? Lw.real() : Lw.imag();
        for (std::size_t mu = 0; mu < 4; ++mu) running += w[mu].real() * dx[mu] + w[mu].imag() * dy[mu];
        double diffusion = 0.0;
        for (std::size_t mu = 0; mu < 4; ++mu) {
            const double sx = s.sigma_x[mu], sy = s.sigma_y[mu];
            double non_mixed = 0.0;
            if (sx != 0.0) non_mixed += sx * sx * second_x_derivative(f, tau, z, mu, h2).real();
            if (sy != 0.0) non_mixed += sy * sy * second_y_derivative(f, tau, z, mu, h2).real();
            double mixed = 0.0;
            if (sx != 0.0 && sy != 0.0)
                mixed = 2.0 * s.correlation_sign(mu) * sx * sy * mixed_xy_derivative(f, tau, z, mu, h2).real();
            t.non_mixed += 0.5 * non_mixed;
            diffusion += 0.5 * (non_mixed + mixed);
        }
        const double time = -tau_derivative(f, tau, z, h1).real();
        t.residual = time - running - diffusion;
        return t;
    };
    const PartTerms R = part(fR, grad.dx_R, grad.dy_R, out.w_real_set, true);
    const PartTerms I = part(fI, grad.dx_I, grad.dy_I, out.w_imag_set, false);
    out.real = R.residual;
    out.imag = I.residual;
    out.non_mixed_R = R.non_mixed;
    out.non_mixed_I = I.non_mixed;
    return out;
}

PairConsistency pair_complex_consistency(const HJBProblem& P, const ScalarField& J, double tau,
                                         const ComplexFourVector& z, double h) {
    if (!(h > 0.0)) throw DomainError("pair/complex consistency needs an explicit step");
    const RealPairField pair = split(J);
    PairConsistency c;
    c.complex_residual = hjb_residual_complex(P, J, tau, z, h).residual;
    c.pair = hjb_residual_pair(P, pair, tau, z, h);
    const Complex combined(c.pair.real, c.pair.imag);
    c.difference = std::abs(c.complex_residual - combined);

    const Complex coarse_c = hjb_residual_complex(P, J, tau, z, 2.0 * h).residual;
    const PairResidual coarse_p = hjb_residual_pair(P, pair, tau, z, 2.0 * h);
    const double richardson =
        (std::abs(c.complex_residual - coarse_c) + std::abs(combined - Complex(coarse_p.real, coarse_p.imag))) / 3.0;
    const double floor = 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(J(tau, z))) / (h * h);
    c.stencil_error = richardson + floor;
    c.tolerance = 5.0 * c.stencil_error;
    c.passed = c.difference <= c.tolerance;
    return c;
}

Complex dalembertian(const ScalarField& J, double tau, const ComplexFourVector& z, const Metric& g, double h) {
    if (!J.box.contains_with_margin(tau, z, 3.0 * h))
        throw DomainError("stencil leaves the domain box of field '" + J.name + "'");
    Complex box = 0.0;
    for (std::size_t mu = 0; mu < 4; ++mu) box += g.eta(mu) * second_x_derivative(J, tau, z, mu, h);
    return box;
}

CovarianceResult covariance_check(const ScalarField& J, const Boost& boost, double tau, const ComplexFourVector& z,
                                  const Metric& g, double h) {
    ComplexFourVector zu = z;
    zu.position = IndexPosition::Upper;
    ScalarField boosted;
    const Boost inv = boost.inverse();
    auto f = J.f;
    boosted.f = [f, inv](double t, const ComplexFourVector& zp) {
        ComplexFourVector u = zp;
        u.position = IndexPosition::Upper;
        return f(t, apply(inv, u));
    };
    boosted.name = J.name + ":boosted";
    CovarianceResult r;
    r.at_z = dalembertian(J, tau, zu, g, h);
    r.at_boosted = dalembertian(boosted, tau, apply(boost, zu), g, h);
    r.discrepancy = std::abs(r.at_z - r.at_boosted);
    return r;
}

ScalarField free_particle_cost_to_go(const EMFieldConfig& cfg, double tau_f, const DomainBox& box) {
    cfg.validate();
    const ComplexFourVector A0 = cfg.potential(0.0, {});
    const ComplexFourVector A1 = cfg.potential(0.37, ComplexFourVector::from_parts({0.3, -0.2, 0.5, 0.1}, {0.1, 0.4, -0.3, 0.2}));
    for (std::size_t mu = 0; mu < 4; ++mu)
        if (A0[mu] != A1[mu]) throw PreconditionError("free-particle cost-to-go needs a constant potential");
    const Metric& g = cfg.metric;
    const ComplexFourVector P = Complex(cfg.q, 0.0) * A0;
    const Complex PP = contract(P, P, g);
    const double st = g.sigma_tilde();
    const Complex kappa = st * cfg.c * std::sqrt(st * PP) - PP / cfg.m;
    ScalarField J;
    J.f = [kappa, tau_f](double tau, const ComplexFourVector&) { return kappa * (tau_f - tau); };
    J.box = box;
    J.name = "free-particle";
    return J;
}

double boundary_violation(const ScalarField& J, double tau_f, const std::vector<Probe>& probes) {
    double worst = 0.0;
    for (const auto& p : probes) worst = std::max(worst, std::abs(J(tau_f, p.z)));
    return worst;
}

nlohmann::ordered_json residual_record(double tau, const ComplexFourVector& z, const HJBResidual& r) {
    nlohmann::ordered_json j;
    j["tau"] = tau;
    j["z_re"] = z.re();
    j["z_im"] = z.im();
    j["residual_re"] = r.residual.real();
    j["residual_im"] = r.residual.imag();
    j["w_star_re"] = r.w_star.re();
    j["w_star_im"] = r.w_star.im();
    return j;
}

}  // namespace csoc
