#pragma once

#include <complex>
#include <vector>

#include "canht/matrix.hpp"
#include "canht/rational.hpp"

namespace canht {

// Univariate polynomial with exact rational coefficients, ascending order:
// p[0] + p[1] t + ... + p[deg] t^deg. Trailing zeros are trimmed.
struct Poly {
    QVec c;

    Poly() = default;
    explicit Poly(QVec coeffs) : c(std::move(coeffs)) { trim(); }

    int degree() const { return static_cast<int>(c.size()) - 1; }
    bool is_zero() const { return c.empty(); }

    void trim() {
        while (!c.empty() && sgn(c.back()) == 0) c.pop_back();
    }

    Rat eval(const Rat& x) const {
        Rat v(0);
        for (int i = degree(); i >= 0; --i) v = v * x + c[i];
        return v;
    }

    std::complex<double> eval(std::complex<double> x) const {
        std::complex<double> v(0.0, 0.0);
        for (int i = degree(); i >= 0; --i) v = v * x + std::complex<double>(c[i].get_d());
        return v;
    }
};

// Characteristic polynomial det(tI - A), exact, by Faddeev-LeVerrier.
Poly char_poly(const QMat& m);

Poly derivative(const Poly& p);

// gcd made monic; Euclid over Q.
Poly poly_gcd(Poly a, Poly b);

// p / gcd(p, p'): same roots, all simple.
Poly squarefree_part(const Poly& p);

// All complex roots of the squarefree part (Durand-Kerner + Newton polish).
// Multiplicities are dropped; callers here only ever need the root set.
std::vector<std::complex<double>> poly_roots(const Poly& p);

double max_root_modulus(const Poly& p);

// Real roots (imaginary part below tolerance), deduplicated, sorted ascending.
std::vector<double> real_roots(const Poly& p, double tol = 1e-9);

// Attempts to recognize x as a rational with denominator <= den_cap that is an
// exact root of p (verified exactly). Used to keep rational eigenvalues exact.
bool try_exact_rational_root(const Poly& p, double x, Rat& out, unsigned long den_cap = 1000000);

}  // namespace canht
