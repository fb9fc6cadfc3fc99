#include "csoc/spacetime.hpp"

#include <cmath>

#include "csoc/errors.hpp"

namespace csoc {

ComplexFourVector ComplexFourVector::from_parts(const Real4& re, const Real4& im, IndexPosition pos) {
    ComplexFourVector v;
    for (std::size_t mu = 0; mu < 4; ++mu) v.c[mu] = Complex(re[mu], im[mu]);
    v.position = pos;
    return v;
}

Real4 ComplexFourVector::re() const {
    return {c[0].real(), c[1].real(), c[2].real(), c[3].real()};
}

Real4 ComplexFourVector::im() const {
    return {c[0].imag(), c[1].imag(), c[2].imag(), c[3].imag()};
}

ComplexFourVector ComplexFourVector::with_position(IndexPosition target, const Metric& g) const {
    if (target == position) return *this;
    ComplexFourVector out = *this;
    for (std::size_t mu = 0; mu < 4; ++mu) out.c[mu] *= g.eta(mu);
    out.position = target;
    return out;
}

ComplexFourVector& ComplexFourVector::operator+=(const ComplexFourVector& o) {
    for (std::size_t mu = 0; mu < 4; ++mu) c[mu] += o.c[mu];
    return *this;
}

ComplexFourVector& ComplexFourVector::operator-=(const ComplexFourVector& o) {
    for (std::size_t mu = 0; mu < 4; ++mu) c[mu] -= o.c[mu];
    return *this;
}

ComplexFourVector& ComplexFourVector::operator*=(Complex s) {
    for (auto& x : c) x *= s;
    return *this;
}

ComplexFourVector operator+(ComplexFourVector a, const ComplexFourVector& b) { return a += b; }
ComplexFourVector operator-(ComplexFourVector a, const ComplexFourVector& b) { return a -= b; }
ComplexFourVector operator*(Complex s, ComplexFourVector a) { return a *= s; }
ComplexFourVector operator*(ComplexFourVector a, Complex s) { return a *= s; }

Complex contract(const ComplexFourVector& a, const ComplexFourVector& b, const Metric& g) {
    const bool same = a.position == b.position;
    Complex sum{0.0, 0.0};
    for (std::size_t mu = 0; mu < 4; ++mu) {
        const Complex term = a.c[mu] * b.c[mu];
        sum += same ? g.eta(mu) * term : term;
    }
    return sum;
}

Complex weak_equation_residual(const ComplexFourVector& w, const Metric& g, double c) {
    return contract(w, w, g) - g.sigma_tilde() * c * c;
}

ComplexFourVector apply(const Boost& b, const ComplexFourVector& v) {
    if (b.axis < 1 || b.axis > 3) throw DomainError("boost axis must be spatial (1..3)");
    // lower-index components transform with the inverse transpose, which for a
    // symmetric boost in a diagonal metric is the boost with opposite rapidity
    const double phi = v.position == IndexPosition::Upper ? b.rapidity : -b.rapidity;
    const double ch = std::cosh(phi);
    const double sh = std::sinh(phi);
    ComplexFourVector out = v;
    const std::size_t k = b.axis;
    out.c[0] = ch * v.c[0] - sh * v.c[k];
    out.c[k] = -sh * v.c[0] + ch * v.c[k];
    return out;
}

}  // namespace csoc
