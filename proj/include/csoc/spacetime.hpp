#pragma once

#include <array>
#include <complex>
#include <cstddef>

namespace csoc {

using Complex = std::complex<double>;
using Real4 = std::array<double, 4>;
using Complex4 = std::array<Complex, 4>;

inline constexpr Complex kI{0.0, 1.0};

/// Which diagonal Minkowski convention is in force.
enum class Signature {
    MinusPlus,  ///< diag(-1,+1,+1,+1), sigma_tilde = -1 (default)
    PlusMinus,  ///< diag(+1,-1,-1,-1), sigma_tilde = +1
};

/// Diagonal Minkowski metric. Only eta^{mu mu} is exposed; for a diagonal
/// metric with unit entries upper and lower components are numerically equal.
class Metric {
public:
    constexpr Metric() noexcept : Metric(Signature::MinusPlus) {}
    constexpr explicit Metric(Signature s) noexcept
        : signature_(s),
          diag_(s == Signature::MinusPlus ? Real4{-1.0, 1.0, 1.0, 1.0} : Real4{1.0, -1.0, -1.0, -1.0}),
          sigma_tilde_(s == Signature::MinusPlus ? -1.0 : 1.0) {}

    static constexpr Metric minus_plus() noexcept { return Metric(Signature::MinusPlus); }
    static constexpr Metric plus_minus() noexcept { return Metric(Signature::PlusMinus); }

    constexpr Signature signature() const noexcept { return signature_; }
    constexpr const Real4& diag() const noexcept { return diag_; }
    constexpr double eta(std::size_t mu) const noexcept { return diag_[mu]; }
    /// Sign that appears under and in front of the square root of the point-particle Lagrangian.
    constexpr double sigma_tilde() const noexcept { return sigma_tilde_; }

    friend constexpr bool operator==(const Metric& a, const Metric& b) noexcept {
        return a.signature_ == b.signature_;
    }

private:
    Signature signature_;
    Real4 diag_;
    double sigma_tilde_;
};

enum class IndexPosition { Upper, Lower };

/// Four complex components with an index-position tag.
///
/// Used for complex coordinates z = x + i y, complex velocities w = v + i u,
/// gradients of the cost-to-go (lower index) and vector potentials.
struct ComplexFourVector {
    Complex4 c{};
    IndexPosition position = IndexPosition::Upper;

    ComplexFourVector() = default;
    explicit ComplexFourVector(const Complex4& comps, IndexPosition pos = IndexPosition::Upper)
        : c(comps), position(pos) {}

    static ComplexFourVector from_parts(const Real4& re, const Real4& im,
                                        IndexPosition pos = IndexPosition::Upper);

    Complex& operator[](std::size_t mu) { return c[mu]; }
    const Complex& operator[](std::size_t mu) const { return c[mu]; }

    Real4 re() const;
    Real4 im() const;

    /// Moves the index with eta; a no-op on the numbers when already in position.
    ComplexFourVector with_position(IndexPosition target, const Metric& g) const;
    ComplexFourVector lowered(const Metric& g) const { return with_position(IndexPosition::Lower, g); }
    ComplexFourVector raised(const Metric& g) const { return with_position(IndexPosition::Upper, g); }

    ComplexFourVector& operator+=(const ComplexFourVector& o);
    ComplexFourVector& operator-=(const ComplexFourVector& o);
    ComplexFourVector& operator*=(Complex s);
};

ComplexFourVector operator+(ComplexFourVector a, const ComplexFourVector& b);
ComplexFourVector operator-(ComplexFourVector a, const ComplexFourVector& b);
ComplexFourVector operator*(Complex s, ComplexFourVector a);
ComplexFourVector operator*(ComplexFourVector a, Complex s);

/// Sum over mu of a^mu b_mu with the index positions reconciled through g.
/// Two upper (or two lower) vectors contract with eta^{mu mu}; mixed positions contract directly.
Complex contract(const ComplexFourVector& a, const ComplexFourVector& b, const Metric& g);

/// contract(w, w, g) - sigma_tilde c^2. Zero iff w lies on the complexified mass shell.
Complex weak_equation_residual(const ComplexFourVector& w, const Metric& g, double c);

/// Real Lorentz boost along spatial axis 1..3 with the given rapidity.
struct Boost {
    std::size_t axis = 1;
    double rapidity = 0.0;

    Boost inverse() const { return {axis, -rapidity}; }
};

/// Applies the boost to an upper-index vector; lower-index vectors use the inverse-transpose.
ComplexFourVector apply(const Boost& b, const ComplexFourVector& v);

}  // namespace csoc
