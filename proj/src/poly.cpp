#include "canht/poly.hpp"

#include <algorithm>
#include <cmath>

namespace canht {

Poly char_poly(const QMat& a) {
    // Faddeev-LeVerrier: M_0 = I, c_n = 1; M_k = A M_{k-1} + c_{n-k+1} I implicitly
    // folded as below. Exact over Q.
    int n = a.rows;
    QVec coeffs(n + 1, Rat(0));
    coeffs[n] = Rat(1);
    QMat mk = QMat::identity(n);
    for (int k = 1; k <= n; ++k) {
        mk = a * mk;
        Rat ck = -trace(mk) / Rat(k);
        coeffs[n - k] = ck;
        for (int i = 0; i < n; ++i) mk(i, i) += ck;
    }
    return Poly(coeffs);
}

Poly derivative(const Poly& p) {
    QVec d;
    for (int i = 1; i <= p.degree(); ++i) d.push_back(p.c[i] * Rat(i));
    return Poly(d);
}

static Poly monic(Poly p) {
    if (p.is_zero()) return p;
    Rat lead = p.c.back();
    for (auto& v : p.c) v /= lead;
    return p;
}

static Poly poly_rem(Poly a, const Poly& b) {
    while (!a.is_zero() && a.degree() >= b.degree()) {
        Rat f = a.c.back() / b.c.back();
        int shift = a.degree() - b.degree();
        for (int i = 0; i <= b.degree(); ++i) a.c[i + shift] -= f * b.c[i];
        a.trim();
    }
    return a;
}

Poly poly_gcd(Poly a, Poly b) {
    while (!b.is_zero()) {
        Poly r = poly_rem(a, b);
        a = b;
        b = r;
    }
    return monic(a);
}

Poly squarefree_part(const Poly& p) {
    if (p.degree() <= 1) return monic(p);
    Poly g = poly_gcd(p, derivative(p));
    if (g.degree() == 0) return monic(p);
    // exact division p / g
    Poly q = monic(p), d = g;
    QVec out(q.degree() - d.degree() + 1, Rat(0));
    while (!q.is_zero() && q.degree() >= d.degree()) {
        Rat f = q.c.back() / d.c.back();
        int shift = q.degree() - d.degree();
        out[shift] = f;
        for (int i = 0; i <= d.degree(); ++i) q.c[i + shift] -= f * d.c[i];
        q.trim();
    }
    return Poly(out);
}

std::vector<std::complex<double>> poly_roots(const Poly& p) {
    Poly sf = squarefree_part(p);
    int n = sf.degree();
    if (n <= 0) return {};
    std::vector<std::complex<double>> c(n + 1);
    for (int i = 0; i <= n; ++i) c[i] = std::complex<double>(sf.c[i].get_d());
    for (int i = 0; i <= n; ++i) c[i] /= c[n];

    double radius = 0;
    for (int i = 0; i < n; ++i) radius = std::max(radius, std::abs(c[i]));
    radius = 1.0 + radius;

    // Durand-Kerner with staggered initial angles (no root of unity symmetry).
    std::vector<std::complex<double>> z(n);
    for (int k = 0; k < n; ++k)
        z[k] = std::polar(radius * 0.7, 0.9 + 2.0 * M_PI * k / n + 0.13 * k);

    auto eval = [&](std::complex<double> x) {
        std::complex<double> v = 0;
        for (int i = n; i >= 0; --i) v = v * x + c[i];
        return v;
    };

    for (int it = 0; it < 600; ++it) {
        double moved = 0;
        for (int k = 0; k < n; ++k) {
            std::complex<double> num = eval(z[k]);
            std::complex<double> den(1.0, 0.0);
            for (int j = 0; j < n; ++j)
                if (j != k) den *= (z[k] - z[j]);
            std::complex<double> step = num / den;
            z[k] -= step;
            moved = std::max(moved, std::abs(step));
        }
        if (moved < 1e-15 * radius) break;
    }

    // Newton polish against the exact coefficients (evaluated in double).
    Poly dsf = derivative(sf);
    for (auto& root : z)
        for (int it = 0; it < 8; ++it) {
            std::complex<double> f = sf.eval(root);
            std::complex<double> fp = dsf.eval(root);
            if (std::abs(fp) < 1e-300) break;
            std::complex<double> step = f / fp;
            root -= step;
            if (std::abs(step) < 1e-16 * (1.0 + std::abs(root))) break;
        }
    return z;
}

double max_root_modulus(const Poly& p) {
    double m = 0;
    for (const auto& z : poly_roots(p)) m = std::max(m, std::abs(z));
    return m;
}

std::vector<double> real_roots(const Poly& p, double tol) {
    std::vector<double> out;
    for (const auto& z : poly_roots(p))
        if (std::fabs(z.imag()) <= tol * (1.0 + std::fabs(z.real()))) out.push_back(z.real());
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end(),
                          [&](double a, double b) { return std::fabs(a - b) <= tol * (1.0 + std::fabs(a)); }),
              out.end());
    return out;
}

bool try_exact_rational_root(const Poly& p, double x, Rat& out, unsigned long den_cap) {
    // Continued-fraction reconstruction of x, then exact verification.
    double v = x;
    Int pk(0), pk1(1), qk(1), qk1(0);  // convergents p/q
    for (int it = 0; it < 64; ++it) {
        double fl = std::floor(v);
        if (fl > 9e18 || fl < -9e18) return false;
        Int a(static_cast<long>(fl));
        Int pn = a * pk1 + pk;
        Int qn = a * qk1 + qk;
        pk = pk1; pk1 = pn;
        qk = qk1; qk1 = qn;
        if (qk1 > Int(den_cap)) return false;
        Rat cand = make_rat(pk1, qk1);
        if (std::fabs(cand.get_d() - x) < 1e-8 * (1.0 + std::fabs(x)) && sgn(p.eval(cand)) == 0) {
            out = cand;
            return true;
        }
        double frac = v - fl;
        if (frac < 1e-14) break;
        v = 1.0 / frac;
    }
    return false;
}

}  // namespace canht
