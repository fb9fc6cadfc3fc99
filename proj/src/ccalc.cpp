#include "csoc/ccalc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "csoc/errors.hpp"

namespace csoc {

DomainBox DomainBox::cube(double tau_lo, double tau_hi, double half_width) {
    DomainBox b;
    b.tau_lo = tau_lo;
    b.tau_hi = tau_hi;
    b.x_lo.fill(-half_width);
    b.x_hi.fill(half_width);
    b.y_lo = b.x_lo;
    b.y_hi = b.x_hi;
    return b;
}

bool DomainBox::bounded() const {
    auto finite = [](const Real4& a) { return std::all_of(a.begin(), a.end(), [](double v) { return std::isfinite(v); }); };
    return std::isfinite(tau_lo) && std::isfinite(tau_hi) && finite(x_lo) && finite(x_hi) && finite(y_lo) &&
           finite(y_hi);
}

bool DomainBox::contains(double tau, const ComplexFourVector& z) const { return contains_with_margin(tau, z, 0.0); }

bool DomainBox::contains_with_margin(double tau, const ComplexFourVector& z, double margin) const {
    if (!(tau >= tau_lo && tau <= tau_hi)) return false;
    for (std::size_t mu = 0; mu < 4; ++mu) {
        const double x = z[mu].real();
        const double y = z[mu].imag();
        if (!(x - margin >= x_lo[mu] && x + margin <= x_hi[mu])) return false;
        if (!(y - margin >= y_lo[mu] && y + margin <= y_hi[mu])) return false;
    }
    return true;
}

double DerivativeReport::max_cr() const { return *std::max_element(cr_residuals.begin(), cr_residuals.end()); }

double DerivativeReport::max_consistency() const {
    return *std::max_element(consistency_residuals.begin(), consistency_residuals.end());
}

double SecondDerivativeReport::max_discrepancy() const {
    return *std::max_element(discrepancy.begin(), discrepancy.end());
}

double default_first_step(double coordinate) {
    return std::cbrt(std::numeric_limits<double>::epsilon()) * std::max(1.0, std::abs(coordinate));
}

double default_second_step(double coordinate) {
    return std::pow(std::numeric_limits<double>::epsilon(), 0.25) * std::max(1.0, std::abs(coordinate));
}

namespace {

ComplexFourVector shifted(const ComplexFourVector& z, std::size_t mu, Complex delta) {
    ComplexFourVector out = z;
    out[mu] += delta;
    return out;
}

double axis_scale(const ComplexFourVector& z) {
    double s = 0.0;
    for (std::size_t mu = 0; mu < 4; ++mu) s = std::max({s, std::abs(z[mu].real()), std::abs(z[mu].imag())});
    return s;
}

double pick_step(const ScalarField& f, const ComplexFourVector& z, double h, bool second) {
    if (h > 0.0) return h;
    if (f.h > 0.0) return f.h;
    return second ? default_second_step(axis_scale(z)) : default_first_step(axis_scale(z));
}

void require_margin(const ScalarField& f, double tau, const ComplexFourVector& z, double margin) {
    if (!f.box.contains_with_margin(tau, z, margin))
        throw DomainError("stencil leaves the domain box of field '" + f.name + "'");
}

}  // namespace

Complex second_x_derivative(const ScalarField& f, double tau, const ComplexFourVector& z, std::size_t mu, double h) {
    const Complex hp(h, 0.0);
    return (f(tau, shifted(z, mu, hp)) - 2.0 * f(tau, z) + f(tau, shifted(z, mu, -hp))) / (h * h);
}

Complex second_y_derivative(const ScalarField& f, double tau, const ComplexFourVector& z, std::size_t mu, double h) {
    const Complex hp(0.0, h);
    return (f(tau, shifted(z, mu, hp)) - 2.0 * f(tau, z) + f(tau, shifted(z, mu, -hp))) / (h * h);
}

Complex mixed_xy_derivative(const ScalarField& f, double tau, const ComplexFourVector& z, std::size_t mu, double h) {
    const Complex pp = f(tau, shifted(z, mu, Complex(h, h)));
    const Complex pm = f(tau, shifted(z, mu, Complex(h, -h)));
    const Complex mp = f(tau, shifted(z, mu, Complex(-h, h)));
    const Complex mm = f(tau, shifted(z, mu, Complex(-h, -h)));
    return (pp - pm - mp + mm) / (4.0 * h * h);
}

DerivativeReport complex_derivative(const ScalarField& f, double tau, const ComplexFourVector& z, double h) {
    h = pick_step(f, z, h, false);
    require_margin(f, tau, z, 2.0 * h);
    DerivativeReport r;
    for (std::size_t mu = 0; mu < 4; ++mu) {
        r.d_x[mu] = (f(tau, shifted(z, mu, {h, 0.0})) - f(tau, shifted(z, mu, {-h, 0.0}))) / (2.0 * h);
        r.d_y[mu] = (f(tau, shifted(z, mu, {0.0, h})) - f(tau, shifted(z, mu, {0.0, -h}))) / (2.0 * h);
        r.d_z[mu] = r.d_x[mu];
        r.cr_residuals[mu] = std::abs(r.d_x[mu].real() - r.d_y[mu].imag()) +
                             std::abs(r.d_x[mu].imag() + r.d_y[mu].real());
        r.consistency_residuals[mu] = std::abs(r.d_x[mu] + kI * r.d_y[mu]);
    }
    return r;
}

SecondDerivativeReport second_complex_derivative(const ScalarField& f, double tau, const ComplexFourVector& z,
                                                 double h) {
    h = pick_step(f, z, h, true);
    require_margin(f, tau, z, 3.0 * h);
    SecondDerivativeReport r;
    for (std::size_t mu = 0; mu < 4; ++mu) {
        r.d_zz[mu] = second_x_derivative(f, tau, z, mu, h);
        r.via_yy[mu] = -second_y_derivative(f, tau, z, mu, h);
        // J_I - i J_R = -i J
        r.via_mixed[mu] = -kI * mixed_xy_derivative(f, tau, z, mu, h);
        r.discrepancy[mu] = std::max({std::abs(r.d_zz[mu] - r.via_yy[mu]), std::abs(r.d_zz[mu] - r.via_mixed[mu]),
                                      std::abs(r.via_yy[mu] - r.via_mixed[mu])});
    }
    return r;
}

Complex tau_derivative(const ScalarField& f, double tau, const ComplexFourVector& z, double h) {
    if (h <= 0.0) h = f.h > 0.0 ? f.h : default_first_step(tau);
    if (!(tau - h >= f.box.tau_lo && tau + h <= f.box.tau_hi) || !f.box.contains(tau, z))
        throw DomainError("tau stencil leaves the domain box of field '" + f.name + "'");
    return (f(tau + h, z) - f(tau - h, z)) / (2.0 * h);
}

namespace {

double radical_inverse(std::size_t i, unsigned base) {
    double inv = 1.0 / base;
    double factor = inv;
    double out = 0.0;
    while (i > 0) {
        out += static_cast<double>(i % base) * factor;
        i /= base;
        factor *= inv;
    }
    return out;
}

}  // namespace

std::vector<Probe> halton_probes(const DomainBox& box, std::size_t n, double margin) {
    if (!box.bounded()) throw DomainError("probe generation needs a bounded domain box");
    static constexpr unsigned kBases[9] = {2, 3, 5, 7, 11, 13, 17, 19, 23};
    auto lerp = [](double lo, double hi, double t) { return lo + (hi - lo) * t; };
    for (std::size_t mu = 0; mu < 4; ++mu) {
        if (box.x_hi[mu] - box.x_lo[mu] < 2.0 * margin || box.y_hi[mu] - box.y_lo[mu] < 2.0 * margin)
            throw DomainError("probe margin exceeds the domain box");
    }
    std::vector<Probe> probes(n);
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t i = k + 1;  // skip the all-zero point
        Probe& p = probes[k];
        p.tau = lerp(box.tau_lo, box.tau_hi, radical_inverse(i, kBases[0]));
        for (std::size_t mu = 0; mu < 4; ++mu) {
            const double x = lerp(box.x_lo[mu] + margin, box.x_hi[mu] - margin, radical_inverse(i, kBases[1 + mu]));
            const double y = lerp(box.y_lo[mu] + margin, box.y_hi[mu] - margin, radical_inverse(i, kBases[5 + mu]));
            p.z[mu] = Complex(x, y);
        }
    }
    return probes;
}

double AnalyticityResult::worst() const { return std::max({worst_cr, worst_consistency, worst_second_route}); }

AnalyticityResult analyticity_scan(const ScalarField& f, const std::vector<Probe>& probes, double h, double tol) {
    if (probes.empty()) throw DomainError("analyticity scan needs at least one probe");
    AnalyticityResult res;
    double worst = -1.0;
    for (std::size_t k = 0; k < probes.size(); ++k) {
        const auto d1 = complex_derivative(f, probes[k].tau, probes[k].z, h);
        const auto d2 = second_complex_derivative(f, probes[k].tau, probes[k].z, h);
        res.worst_cr = std::max(res.worst_cr, d1.max_cr());
        res.worst_consistency = std::max(res.worst_consistency, d1.max_consistency());
        res.worst_second_route = std::max(res.worst_second_route, d2.max_discrepancy());
        const double here = std::max({d1.max_cr(), d1.max_consistency(), d2.max_discrepancy()});
        if (here > worst) {
            worst = here;
            res.worst_probe = k;
        }
    }
    res.passed = res.worst() < tol;
    return res;
}

}  // namespace csoc
