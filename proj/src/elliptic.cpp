#include "canht/elliptic.hpp"

#include <algorithm>
#include <cmath>

namespace canht::ell {

CurveQ::CurveQ(Rat a1_, Rat a2_, Rat a3_, Rat a4_, Rat a6_)
    : a1(std::move(a1_)), a2(std::move(a2_)), a3(std::move(a3_)), a4(std::move(a4_)),
      a6(std::move(a6_)) {
    if (sgn(discriminant()) == 0)
        throw Error(ErrorCode::InvalidInput, "singular Weierstrass equation");
}

Rat CurveQ::discriminant() const {
    Rat b2 = a1 * a1 + 4 * a2;
    Rat b4 = 2 * a4 + a1 * a3;
    Rat b6 = a3 * a3 + 4 * a6;
    Rat b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4;
    return -b2 * b2 * b8 - 8 * b4 * b4 * b4 - 27 * b6 * b6 + 9 * b2 * b4 * b6;
}

bool on_curve(const CurveQ& e, const PointQ& p) {
    if (p.infinity) return true;
    Rat lhs = p.y * p.y + e.a1 * p.x * p.y + e.a3 * p.y;
    Rat rhs = p.x * p.x * p.x + e.a2 * p.x * p.x + e.a4 * p.x + e.a6;
    return lhs == rhs;
}

PointQ negate(const CurveQ& e, const PointQ& p) {
    if (p.infinity) return p;
    return PointQ::affine(p.x, -p.y - e.a1 * p.x - e.a3);
}

PointQ add(const CurveQ& e, const PointQ& p, const PointQ& q) {
    if (p.infinity) return q;
    if (q.infinity) return p;
    Rat lambda;
    if (p.x == q.x) {
        // either inverse points or a doubling
        if (q.y == -p.y - e.a1 * p.x - e.a3) return PointQ::at_infinity();
        Rat denom = 2 * p.y + e.a1 * p.x + e.a3;
        lambda = (3 * p.x * p.x + 2 * e.a2 * p.x + e.a4 - e.a1 * p.y) / denom;
    } else {
        lambda = (q.y - p.y) / (q.x - p.x);
    }
    Rat x3 = lambda * lambda + e.a1 * lambda - e.a2 - p.x - q.x;
    Rat y3 = lambda * (p.x - x3) - p.y - e.a1 * x3 - e.a3;
    return PointQ::affine(x3, y3);
}

PointQ multiply(const CurveQ& e, long n, const PointQ& p) {
    if (n == 0 || p.infinity) return PointQ::at_infinity();
    PointQ base = n < 0 ? negate(e, p) : p;
    unsigned long k = static_cast<unsigned long>(n < 0 ? -n : n);
    PointQ acc = PointQ::at_infinity();
    while (k) {
        if (k & 1) acc = add(e, acc, base);
        base = add(e, base, base);
        k >>= 1;
    }
    return acc;
}

double naive_height(const PointQ& p) {
    if (p.infinity) throw Error(ErrorCode::InfinityPoint, "naive height of the point at infinity");
    Int num = p.x.get_num(), den = p.x.get_den();
    Int m = std::max(abs(num), abs(den));
    if (sgn(m) == 0) return 0.0;  // x = 0: h([0:1]) = 0
    return log_int(m);
}

HeightEstimate neron_tate(const CurveQ& e, const PointQ& p, int iters, size_t digit_budget) {
    HeightEstimate est;
    if (p.infinity) return est;  // hhat(O) = 0 exactly
    if (iters < 1) throw Error(ErrorCode::InvalidInput, "iters must be >= 1");

    PointQ q = p;
    double h_prev = naive_height(p);
    double max_defect = 0.0;
    int m = 0;
    for (; m < iters; ++m) {
        if (!q.infinity && (digits10(q.x) > digit_budget || digits10(q.y) > digit_budget)) {
            est.budget_exceeded = true;
            break;
        }
        q = add(e, q, q);
        double h_cur = q.infinity ? 0.0 : naive_height(q);
        max_defect = std::max(max_defect, std::fabs(h_cur - 4.0 * h_prev));
        h_prev = h_cur;
    }
    est.iters_used = m;
    est.value = h_prev * std::pow(4.0, -m);
    est.tail = est.budget_exceeded ? std::numeric_limits<double>::infinity()
                                   : 2.0 * max_defect * std::pow(4.0, -m);
    return est;
}

PairingGram pairing_gram(const CurveQ& e, const std::vector<PointQ>& pts, int iters,
                         size_t digit_budget) {
    int n = static_cast<int>(pts.size());
    PairingGram gram;
    gram.g = DMat(n, n);
    std::vector<HeightEstimate> diag(n);
    for (int i = 0; i < n; ++i) {
        diag[i] = neron_tate(e, pts[i], iters, digit_budget);
        gram.g(i, i) = diag[i].value;
        gram.tail = std::max(gram.tail, diag[i].tail);
        gram.budget_exceeded |= diag[i].budget_exceeded;
    }
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            HeightEstimate s = neron_tate(e, add(e, pts[i], pts[j]), iters, digit_budget);
            double v = (s.value - diag[i].value - diag[j].value) / 2.0;
            gram.g(i, j) = v;
            gram.g(j, i) = v;
            gram.tail = std::max(gram.tail, (s.tail + diag[i].tail + diag[j].tail) / 2.0);
            gram.budget_exceeded |= s.budget_exceeded;
        }
    return gram;
}

bool is_torsion(const CurveQ& e, const PointQ& p) {
    if (p.infinity) return true;
    PointQ acc = p;
    for (int n = 2; n <= 12; ++n) {
        acc = add(e, acc, p);
        if (acc.infinity) return n != 11;  // order 11 cannot occur over Q anyway
    }
    return false;
}

std::vector<PointQ> act(const CurveQ& e, const QMat& a, const std::vector<PointQ>& pts) {
    if (a.cols != static_cast<int>(pts.size()))
        throw Error(ErrorCode::DimensionMismatch, "action size mismatch");
    std::vector<PointQ> out;
    out.reserve(a.rows);
    for (int i = 0; i < a.rows; ++i) {
        PointQ acc = PointQ::at_infinity();
        for (int j = 0; j < a.cols; ++j) {
            Rat coeff = a(i, j);
            if (coeff.get_den() != 1 || !coeff.get_num().fits_slong_p())
                throw Error(ErrorCode::InvalidInput,
                            "point action needs machine-integer coefficients");
            long c = coeff.get_num().get_si();
            if (c != 0) acc = add(e, acc, multiply(e, c, pts[j]));
        }
        out.push_back(std::move(acc));
    }
    return out;
}

}  // namespace canht::ell
