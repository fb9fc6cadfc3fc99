#include "csoc/dirac.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numbers>

#include "csoc/errors.hpp"

namespace csoc {

Matrix4c GammaSet::slash(const Complex4& a) const {
    Matrix4c s = Matrix4c::Zero();
    for (std::size_t mu = 0; mu < 4; ++mu) s += gamma[mu] * a[mu];
    return s;
}

GammaSet build_gammas(const Metric& g) {
    const Complex i = kI;
    const Eigen::Matrix2cd id = Eigen::Matrix2cd::Identity();
    std::array<Eigen::Matrix2cd, 3> pauli;
    pauli[0] << 0, 1, 1, 0;
    pauli[1] << 0, -i, i, 0;
    pauli[2] << 1, 0, 0, -1;

    GammaSet G;
    G.metric = g;
    G.gamma[0].setZero();
    G.gamma[0].topLeftCorner<2, 2>() = id;
    G.gamma[0].bottomRightCorner<2, 2>() = -id;
    for (std::size_t k = 0; k < 3; ++k) {
        Matrix4c m = Matrix4c::Zero();
        m.topRightCorner<2, 2>() = pauli[k];
        m.bottomLeftCorner<2, 2>() = -pauli[k];
        G.gamma[k + 1] = m;
    }
    switch (g.signature()) {
        case Signature::PlusMinus:
            G.representation = "dirac";
            break;
        case Signature::MinusPlus:
            for (auto& m : G.gamma) m *= i;
            G.representation = "dirac-times-i";
            break;
        default:
            throw DomainError("unsupported metric");
    }
    return G;
}

std::array<double, 16> clifford_errors(const GammaSet& G) {
    std::array<double, 16> out{};
    for (std::size_t mu = 0; mu < 4; ++mu) {
        for (std::size_t nu = 0; nu < 4; ++nu) {
            Matrix4c ac = G.gamma[mu] * G.gamma[nu] + G.gamma[nu] * G.gamma[mu];
            if (mu == nu) ac -= 2.0 * G.metric.eta(mu) * Matrix4c::Identity();
            out[4 * mu + nu] = ac.cwiseAbs().maxCoeff();
        }
    }
    return out;
}

double clifford_error(const GammaSet& G) {
    const auto e = clifford_errors(G);
    return *std::max_element(e.begin(), e.end());
}

double linearization_error(const GammaSet& G, const Complex4& a) {
    const Matrix4c s = G.slash(a);
    Complex aa = 0.0;
    for (std::size_t mu = 0; mu < 4; ++mu) aa += G.metric.eta(mu) * a[mu] * a[mu];
    return (s * s - aa * Matrix4c::Identity()).cwiseAbs().maxCoeff();
}

nlohmann::ordered_json gamma_json(const GammaSet& G) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& m : G.gamma) {
        nlohmann::ordered_json rows = nlohmann::ordered_json::array();
        for (int r = 0; r < 4; ++r) {
            nlohmann::ordered_json row = nlohmann::ordered_json::array();
            for (int c = 0; c < 4; ++c) row.push_back({m(r, c).real(), m(r, c).imag()});
            rows.push_back(row);
        }
        arr.push_back(rows);
    }
    return arr;
}

int epsilon_r(int r) {
    if (r < 1 || r > 4) throw DomainError("spinor component index must be 1..4");
    return r <= 2 ? 1 : -1;
}

std::string to_string(DiracSigns s) { return s == DiracSigns::Literal ? "literal" : "epsilon-weighted"; }

namespace {

ComplexFourVector shifted(const ComplexFourVector& z, std::size_t mu, double h) {
    ComplexFourVector out = z;
    out[mu] += h;
    return out;
}

Complex eta_sum(const Metric& g, const Complex4& a, const Complex4& b) {
    Complex s = 0.0;
    for (std::size_t mu = 0; mu < 4; ++mu) s += g.eta(mu) * a[mu] * b[mu];
    return s;
}

void require_margin(const DomainBox& box, const std::string& name, double tau, const ComplexFourVector& z,
                    double h) {
    if (!box.contains_with_margin(tau, z, 2.0 * h) || !(tau - h >= box.tau_lo && tau + h <= box.tau_hi))
        throw DomainError("stencil leaves the domain box of field '" + name + "'");
}

double row_time_sign(DiracSigns s, int r) { return s == DiracSigns::Literal ? 1.0 : epsilon_r(r); }
double row_charge(const EMFieldConfig& cfg, DiracSigns s, int r) {
    return s == DiracSigns::Literal ? cfg.q : epsilon_r(r) * cfg.q;
}

Complex4 constant_potential_of(const EMFieldConfig& cfg) {
    const ComplexFourVector A0 = cfg.potential(0.0, {});
    const ComplexFourVector A1 =
        cfg.potential(0.41, ComplexFourVector::from_parts({0.2, -0.3, 0.1, 0.5}, {-0.1, 0.3, 0.2, -0.4}));
    for (std::size_t mu = 0; mu < 4; ++mu)
        if (A0[mu] != A1[mu]) throw PreconditionError("plane-wave modes need a constant potential");
    return A0.c;
}

}  // namespace

HopfColeResult hopf_cole_check(const ScalarField& Jt, double tau, const ComplexFourVector& z, const Metric& g,
                               double h) {
    if (!Jt.box.contains_with_margin(tau, z, 3.0 * h))
        throw DomainError("stencil leaves the domain box of field '" + Jt.name + "'");
    auto phi = [&](const ComplexFourVector& p) { return std::exp(Jt(tau, p)); };
    const Complex phi0 = phi(z);
    if (std::abs(phi0) < 1e-12) throw BranchError("exp(J) vanishes at the probe");
    HopfColeResult r;
    r.lhs = 0.0;
    r.rhs = 0.0;
    const Complex J0 = Jt(tau, z);
    for (std::size_t mu = 0; mu < 4; ++mu) {
        const Complex Jp = Jt(tau, shifted(z, mu, h)), Jm = Jt(tau, shifted(z, mu, -h));
        const Complex d1 = (Jp - Jm) / (2.0 * h);
        const Complex d2 = (Jp - 2.0 * J0 + Jm) / (h * h);
        r.lhs += g.eta(mu) * (d1 * d1 + d2);
        const Complex p2 = (phi(shifted(z, mu, h)) - 2.0 * phi0 + phi(shifted(z, mu, -h))) / (h * h);
        r.rhs += g.eta(mu) * p2 / phi0;
    }
    r.discrepancy = std::abs(r.lhs - r.rhs);
    return r;
}

double hopf_cole_order(const ScalarField& Jt, double tau, const ComplexFourVector& z, const Metric& g,
                       const std::vector<double>& hs) {
    if (hs.size() < 2) throw DomainError("order estimate needs at least two steps");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (double h : hs) {
        const double x = std::log(h);
        const double y = std::log(hopf_cole_check(Jt, tau, z, g, h).discrepancy);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double n = static_cast<double>(hs.size());
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

Spinor linearized_residual(const EMFieldConfig& cfg, const GammaSet& G, const SpinorField& phi, double tau,
                           const ComplexFourVector& z, double h, DiracSigns signs) {
    cfg.validate();
    require_margin(phi.box, phi.name, tau, z, h);
    const Metric& g = cfg.metric;
    const double hbar = cfg.hbar, m = cfg.m, c = cfg.c;
    const Complex4 A = cfg.potential(tau, z).c;

    const Spinor p0 = phi(tau, z);
    const Spinor tp = phi(tau + h, z), tm = phi(tau - h, z);
    std::array<Spinor, 4> d1{}, d2{};
    for (std::size_t mu = 0; mu < 4; ++mu) {
        const Spinor fp = phi(tau, shifted(z, mu, h)), fm = phi(tau, shifted(z, mu, -h));
        for (std::size_t r = 0; r < 4; ++r) {
            d1[mu][r] = (fp[r] - fm[r]) / (2.0 * h);
            d2[mu][r] = (fp[r] - 2.0 * p0[r] + fm[r]) / (h * h);
        }
    }
    Eigen::Vector4cd gamma_d = Eigen::Vector4cd::Zero();
    for (std::size_t mu = 0; mu < 4; ++mu)
        gamma_d += G.gamma[mu] * Eigen::Map<const Eigen::Vector4cd>(d1[mu].data());
    const Eigen::Vector4cd gamma_A_phi = G.slash(A) * Eigen::Map<const Eigen::Vector4cd>(p0.data());
    const Complex AA = eta_sum(g, A, A);

    Spinor out{};
    for (int r = 1; r <= 4; ++r) {
        const std::size_t k = static_cast<std::size_t>(r - 1);
        const double t = row_time_sign(signs, r);
        const double e = row_charge(cfg, signs, r);
        Complex box = 0.0, A_d = 0.0;
        for (std::size_t mu = 0; mu < 4; ++mu) {
            box += g.eta(mu) * d2[mu][k];
            A_d += g.eta(mu) * A[mu] * d1[mu][k];
        }
        const Complex dtau = (tp[k] - tm[k]) / (2.0 * h);
        const Complex rhs = m * c * (kI * hbar * gamma_d[k] - e * gamma_A_phi[k]) + hbar * hbar * box +
                            2.0 * kI * e * hbar * A_d - e * e * AA * p0[k];
        out[k] = t * kI * hbar * m * dtau - rhs;
    }
    return out;
}

Eigen::Matrix4cd plane_wave_matrix(const EMFieldConfig& cfg, const GammaSet& G, const Complex4& p,
                                   DiracSigns signs) {
    cfg.validate();
    const Complex4 A = constant_potential_of(cfg);
    const Metric& g = cfg.metric;
    const Matrix4c gp = G.slash(p);
    const Matrix4c gA = G.slash(A);
    Matrix4c K = Matrix4c::Zero();
    for (int r = 1; r <= 4; ++r) {
        const int k = r - 1;
        const double e = row_charge(cfg, signs, r);
        Complex4 shift{};
        for (std::size_t mu = 0; mu < 4; ++mu) shift[mu] = p[mu] + e * A[mu];
        K.row(k) = cfg.m * cfg.c * (gp.row(k) + e * gA.row(k));
        K(k, k) += eta_sum(g, shift, shift);
        K.row(k) *= -1.0 / (row_time_sign(signs, r) * cfg.hbar * cfg.m);
    }
    return K;
}

std::vector<PlaneWaveMode> plane_wave_modes(const EMFieldConfig& cfg, const GammaSet& G, const Complex4& p,
                                            DiracSigns signs) {
    const Matrix4c M = plane_wave_matrix(cfg, G, p, signs);
    Eigen::ComplexEigenSolver<Matrix4c> es(M);
    if (es.info() != Eigen::Success) throw ConvergenceError("plane-wave eigenproblem failed");
    std::vector<PlaneWaveMode> modes(4);
    for (int k = 0; k < 4; ++k) {
        modes[k].lambda = es.eigenvalues()[k];
        Eigen::Vector4cd v = es.eigenvectors().col(k);
        v.normalize();
        for (int r = 0; r < 4; ++r) modes[k].chi[r] = v[r];
    }
    std::sort(modes.begin(), modes.end(), [](const PlaneWaveMode& a, const PlaneWaveMode& b) {
        if (a.lambda.real() != b.lambda.real()) return a.lambda.real() < b.lambda.real();
        return a.lambda.imag() < b.lambda.imag();
    });
    return modes;
}

SpinorField plane_wave_field(const Complex4& p, const PlaneWaveMode& mode, double hbar) {
    SpinorField f;
    f.f = [p, mode, hbar](double tau, const ComplexFourVector& z) {
        Complex phase = 0.0;
        for (std::size_t mu = 0; mu < 4; ++mu) phase += p[mu] * z[mu];
        const Complex e = std::exp(kI * phase / hbar - kI * mode.lambda * tau);
        Spinor s{};
        for (std::size_t r = 0; r < 4; ++r) s[r] = e * mode.chi[r];
        return s;
    };
    f.name = "plane-wave";
    return f;
}

RouteConsistency nonlinear_linear_consistency(const EMFieldConfig& cfg, const GammaSet& G, const SpinorField& phi,
                                              int r, double tau, const ComplexFourVector& z, double h,
                                              DiracSigns signs) {
    cfg.validate();
    const int eps_r = epsilon_r(r);
    const std::size_t k = static_cast<std::size_t>(r - 1);
    require_margin(phi.box, phi.name, tau, z, h);
    const Metric& g = cfg.metric;
    const double hbar = cfg.hbar, m = cfg.m, c = cfg.c, q = cfg.q;
    const Complex4 A = cfg.potential(tau, z).c;
    const Spinor p0 = phi(tau, z);
    if (std::abs(p0[k]) < 1e-12) throw BranchError("spinor component vanishes at the probe");

    // J_s = -i eps_s hbar Log phi_s, on the principal branch at the probe and continued across the stencil
    auto J_at = [&](std::size_t s, double t, const ComplexFourVector& p) {
        const Complex ratio = phi(t, p)[s] / p0[s];
        if (std::abs(ratio) < 1e-12 || std::abs(std::arg(ratio)) > std::numbers::pi / 2)
            throw BranchError("logarithm of a spinor component crosses a branch near the probe");
        const double es = epsilon_r(static_cast<int>(s) + 1);
        return -kI * es * hbar * (std::log(p0[s]) + std::log(ratio));
    };

    std::array<Complex, 4> J0{};
    std::array<Complex4, 4> dJ{};
    std::array<bool, 4> live{};
    for (std::size_t s = 0; s < 4; ++s) {
        live[s] = std::abs(p0[s]) >= 1e-12;
        if (!live[s]) continue;  // a vanishing component contributes nothing to the gamma coupling
        J0[s] = J_at(s, tau, z);
        for (std::size_t mu = 0; mu < 4; ++mu)
            dJ[s][mu] = (J_at(s, tau, shifted(z, mu, h)) - J_at(s, tau, shifted(z, mu, -h))) / (2.0 * h);
    }
    Complex box = 0.0;
    for (std::size_t mu = 0; mu < 4; ++mu) {
        const Complex d2 = (J_at(k, tau, shifted(z, mu, h)) - 2.0 * J0[k] + J_at(k, tau, shifted(z, mu, -h))) / (h * h);
        box += g.eta(mu) * d2;
    }
    const Complex dtau = (J_at(k, tau + h, z) - J_at(k, tau - h, z)) / (2.0 * h);

    // Jt_s - Jt_r with Jt_s = i eps_s J_s / hbar
    auto Jt = [&](std::size_t s) { return kI * double(epsilon_r(static_cast<int>(s) + 1)) * J0[s] / hbar; };
    Complex gamma_term = 0.0;
    for (std::size_t s = 0; s < 4; ++s) {
        if (!live[s]) continue;
        const double es = epsilon_r(static_cast<int>(s) + 1);
        const Complex w = std::exp(Jt(s) - Jt(k));
        for (std::size_t mu = 0; mu < 4; ++mu) {
            const Complex gk = G.gamma[mu](static_cast<int>(k), static_cast<int>(s));
            if (gk == Complex(0.0, 0.0)) continue;
            gamma_term += gk * w * (double(eps_r) * es * dJ[s][mu] + q * A[mu]);
        }
    }
    gamma_term *= -double(eps_r) * c;

    const Complex grad2 = eta_sum(g, dJ[k], dJ[k]);
    const Complex gradA = eta_sum(g, dJ[k], A);
    const Complex AA = eta_sum(g, A, A);
    const Complex rhs = gamma_term + kI * double(eps_r) * hbar / m * box - grad2 / m - 2.0 * q * gradA / m -
                        q * q * AA / m;

    RouteConsistency out;
    out.nonlinear = m * (-dtau - rhs);
    out.linear = linearized_residual(cfg, G, phi, tau, z, h, signs)[k] / p0[k];
    out.discrepancy = std::abs(out.nonlinear - out.linear);
    return out;
}

}  // namespace csoc
