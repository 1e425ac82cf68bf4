#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "canht/errors.hpp"
#include "canht/matrix.hpp"
#include "canht/rational.hpp"

namespace canht::wehler {

/*
 * Surfaces cut out in P^2 x P^2 by a (1,1) form L(x,y) = x^T L y and a (2,2)
 * form Q(x,y) = mx(x)^T Q my(y), where mx/my list the quadratic monomials in
 * lexicographic pair order (00, 01, 02, 11, 12, 22).
 *
 * Each projection to a P^2 factor is generically 2:1; sigma(p, which) swaps
 * the two points of the fiber through p by splitting the restricted conic at
 * the known root (Vieta).  Fibers with a double root or of positive dimension
 * are exceptional: sigma reports IndeterminateFiber and orbit runners
 * truncate there.
 *
 * On the rank-2 Neron-Severi model with Gram [[2,4],[4,2]] the involutions
 * act by sigma1* = [[1,4],[0,-1]] and sigma2* = [[-1,0],[4,1]] (columns are
 * the images of D1, D2), and the composition phi = sigma2 . sigma1 has
 * spectral radius 7 + 4*sqrt(3).
 */

struct SurfacePoint {
    std::array<Int, 3> x;
    std::array<Int, 3> y;

    // gcd-1 representatives, first nonzero coordinate positive
    void normalize();
    bool operator==(const SurfacePoint&) const = default;
    bool operator<(const SurfacePoint& o) const;
    size_t max_digits() const;
};

struct WehlerSurface {
    QMat l;  // 3x3
    QMat q;  // 6x6 over quadratic monomials

    void validate() const;  // shape + nonzero forms
    Rat eval_l(const SurfacePoint& p) const;
    Rat eval_q(const SurfacePoint& p) const;
    bool contains(const SurfacePoint& p) const;

    // Jacobian rank 2 in an affine chart at p (exact); p must lie on S.
    bool smooth_at(const SurfacePoint& p) const;
};

enum class FiberStatus {
    Ok,            // reduced degree-2 fiber, the other point returned
    Tangent,       // double root: exceptional (fixed point of the involution)
    Degenerate,    // line in conic / zero line: positive-dimensional fiber
};

struct SigmaResult {
    FiberStatus status = FiberStatus::Ok;
    SurfacePoint point;  // valid only when status == Ok
};

// which = 1 fixes x (moves y), which = 2 fixes y (moves x).
SigmaResult sigma(const WehlerSurface& s, const SurfacePoint& p, int which);

// Pullback matrices on the (D1, D2) basis and the NS Gram.
QMat ns_gram();
QMat ns_action(int which);

struct K3Characters {
    double lambda1 = 0.0;                 // 7 + 4 sqrt 3
    std::array<double, 2> chi;            // (lambda1, 1/lambda1)
    std::array<std::array<double, 2>, 2> classes;  // D^+, D^- in the (D1,D2) basis,
                                                   // scaled to intersection 1 with D1+D2
    double d_plus_dot_d_minus = 0.0;      // > 0: nef and big certificate
    bool no_orthogonal_minus_two_class = false;  // ampleness of D^+ + D^-
};

K3Characters eigendivisors_k3();

// a log max|x_i| + b log max|y_i|
double height(const SurfacePoint& p, double a, double b);

// All surface points with max|x_i|, max|y_i| <= exp(height_bound), exact and
// exhaustive within the box; deterministic order. Parallel over x-slices.
std::vector<SurfacePoint> enumerate_points(const WehlerSurface& s, double height_bound,
                                           long budget = 4000000, bool parallel = true);
std::vector<SurfacePoint> enumerate_points_serial(const WehlerSurface& s, double height_bound,
                                                  long budget = 4000000);

struct OrbitStep {
    SurfacePoint point;
    double h_plus = 0.0;   // height against D^+
    double h_minus = 0.0;  // height against D^-
    double h_ample = 0.0;  // height against D1 + D2
};

struct Orbit {
    std::vector<OrbitStep> steps;  // steps[0] is the start point
    bool truncated = false;        // exceptional fiber or digit budget hit
    FiberStatus stop_reason = FiberStatus::Ok;
};

// Orbit of p under phi = sigma2 . sigma1 (steps > 0) or its inverse
// (steps < 0 uses sigma1 . sigma2 repeatedly).
Orbit orbit(const WehlerSurface& s, const SurfacePoint& p, int steps,
            size_t digit_budget = 1000000);

struct PeriodicPoint {
    SurfacePoint point;
    int period = 0;
};

std::vector<PeriodicPoint> find_periodic(const WehlerSurface& s, double height_bound,
                                         int period_bound, size_t digit_budget = 1000000);

// Deterministic fixture construction: coefficients drawn from {-2..2} off a
// seeded generator, the last coefficient of each form solved exactly so that
// base_point lies on the surface.
WehlerSurface make_fixture_surface(unsigned seed, const SurfacePoint& base_point);

}  // namespace canht::wehler
