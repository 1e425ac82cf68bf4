#pragma once

#include <optional>
#include <string>
#include <vector>

#include "canht/errors.hpp"
#include "canht/matrix.hpp"
#include "canht/rational.hpp"

namespace canht::ell {

/*
 * Exact Weierstrass arithmetic over Q and Neron-Tate canonical heights by the
 * doubling limit.
 *
 * Height convention: hhat(P) = lim 4^{-m} h(x(2^m P)), with NO extra factor
 * 1/2; h is the absolute logarithmic height of the x-coordinate.  Every
 * estimate carries an empirical tail bound: (max observed one-step defect
 * |h(x(2Q)) - 4 h(x(Q))| over the orbit) * 2 * 4^{-iters}.
 */

struct CurveQ {
    Rat a1, a2, a3, a4, a6;

    CurveQ(Rat a1_, Rat a2_, Rat a3_, Rat a4_, Rat a6_);
    Rat discriminant() const;
    bool operator==(const CurveQ&) const = default;
};

struct PointQ {
    bool infinity = true;
    Rat x, y;

    static PointQ at_infinity() { return PointQ{}; }
    static PointQ affine(Rat x, Rat y) {
        PointQ p;
        p.infinity = false;
        p.x = std::move(x);
        p.y = std::move(y);
        return p;
    }
    bool operator==(const PointQ&) const = default;
};

bool on_curve(const CurveQ& e, const PointQ& p);

PointQ negate(const CurveQ& e, const PointQ& p);
PointQ add(const CurveQ& e, const PointQ& p, const PointQ& q);
PointQ multiply(const CurveQ& e, long n, const PointQ& p);

// h(x(P)) = log max(|num|, |den|) of x in lowest terms. Throws InfinityPoint.
double naive_height(const PointQ& p);

struct HeightEstimate {
    double value = 0.0;
    double tail = 0.0;
    int iters_used = 0;
    bool budget_exceeded = false;  // if set, tail is infinity
};

// Doubling-limit canonical height; degrades gracefully on the digit budget.
HeightEstimate neron_tate(const CurveQ& e, const PointQ& p, int iters,
                          size_t digit_budget = 1000000);

struct PairingGram {
    DMat g;             // <P_a, P_b> = (hhat(P_a+P_b) - hhat(P_a) - hhat(P_b)) / 2
    double tail = 0.0;  // uniform entrywise bound
    bool budget_exceeded = false;
};

PairingGram pairing_gram(const CurveQ& e, const std::vector<PointQ>& pts, int iters,
                         size_t digit_budget = 1000000);

// nP = O for some n in {1..10, 12} (torsion orders over Q).
bool is_torsion(const CurveQ& e, const PointQ& p);

// Integer-matrix action on a tuple of points: (A x)_a = sum_b A[a][b] x_b.
std::vector<PointQ> act(const CurveQ& e, const QMat& a, const std::vector<PointQ>& pts);

}  // namespace canht::ell
