#include "canht/wehler.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "canht/linsolve.hpp"

namespace canht::wehler {

namespace {

// quadratic monomial order: 00, 01, 02, 11, 12, 22
constexpr int kMonomialPairs[6][2] = {{0, 0}, {0, 1}, {0, 2}, {1, 1}, {1, 2}, {2, 2}};

template <class T>
std::array<T, 6> monomials(const std::array<T, 3>& v) {
    std::array<T, 6> m;
    for (int s = 0; s < 6; ++s) m[s] = v[kMonomialPairs[s][0]] * v[kMonomialPairs[s][1]];
    return m;
}

std::array<Rat, 3> to_rat3(const std::array<Int, 3>& v) {
    return {Rat(v[0]), Rat(v[1]), Rat(v[2])};
}

void normalize_triple(std::array<Int, 3>& v) {
    Int g = gcd(gcd(abs(v[0]), abs(v[1])), abs(v[2]));
    if (sgn(g) > 0 && g != 1)
        for (auto& c : v) c /= g;
    for (const auto& c : v) {
        if (sgn(c) != 0) {
            if (sgn(c) < 0)
                for (auto& d : v) d = -d;
            break;
        }
    }
}

}  // namespace

void SurfacePoint::normalize() {
    normalize_triple(x);
    normalize_triple(y);
}

bool SurfacePoint::operator<(const SurfacePoint& o) const {
    for (int i = 0; i < 3; ++i)
        if (x[i] != o.x[i]) return x[i] < o.x[i];
    for (int i = 0; i < 3; ++i)
        if (y[i] != o.y[i]) return y[i] < o.y[i];
    return false;
}

size_t SurfacePoint::max_digits() const {
    size_t d = 1;
    for (const auto& c : x)
        if (sgn(c) != 0) d = std::max(d, digits10(c));
    for (const auto& c : y)
        if (sgn(c) != 0) d = std::max(d, digits10(c));
    return d;
}

void WehlerSurface::validate() const {
    if (l.rows != 3 || l.cols != 3 || q.rows != 6 || q.cols != 6)
        throw Error(ErrorCode::DimensionMismatch, "surface needs a 3x3 L and a 6x6 Q");
    bool lz = true, qz = true;
    for (const auto& v : l.a)
        if (sgn(v) != 0) lz = false;
    for (const auto& v : q.a)
        if (sgn(v) != 0) qz = false;
    if (lz || qz) throw Error(ErrorCode::InvalidInput, "degenerate surface: a defining form is zero");
}

Rat WehlerSurface::eval_l(const SurfacePoint& p) const {
    Rat s(0);
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) s += l(a, b) * Rat(p.x[a]) * Rat(p.y[b]);
    return s;
}

Rat WehlerSurface::eval_q(const SurfacePoint& p) const {
    auto mx = monomials(to_rat3(p.x));
    auto my = monomials(to_rat3(p.y));
    Rat s(0);
    for (int a = 0; a < 6; ++a)
        for (int b = 0; b < 6; ++b) s += q(a, b) * mx[a] * my[b];
    return s;
}

bool WehlerSurface::contains(const SurfacePoint& p) const {
    return sgn(eval_l(p)) == 0 && sgn(eval_q(p)) == 0;
}

bool WehlerSurface::smooth_at(const SurfacePoint& p) const {
    // full projective Jacobian of (L, Q) in the six coordinates, chart columns removed
    auto xr = to_rat3(p.x);
    auto yr = to_rat3(p.y);
    auto mx = monomials(xr);
    auto my = monomials(yr);

    QMat jac(2, 6);
    for (int a = 0; a < 3; ++a) {
        Rat dl(0);
        for (int b = 0; b < 3; ++b) dl += l(a, b) * yr[b];
        jac(0, a) = dl;
    }
    for (int b = 0; b < 3; ++b) {
        Rat dl(0);
        for (int a = 0; a < 3; ++a) dl += l(a, b) * xr[a];
        jac(0, 3 + b) = dl;
    }
    for (int a = 0; a < 3; ++a) {
        Rat dq(0);
        for (int s = 0; s < 6; ++s) {
            // d(mx_s)/dx_a
            Rat dm(0);
            if (kMonomialPairs[s][0] == a) dm += xr[kMonomialPairs[s][1]];
            if (kMonomialPairs[s][1] == a) dm += xr[kMonomialPairs[s][0]];
            if (sgn(dm) == 0) continue;
            Rat row(0);
            for (int t = 0; t < 6; ++t) row += q(s, t) * my[t];
            dq += dm * row;
        }
        jac(1, a) = dq;
    }
    for (int b = 0; b < 3; ++b) {
        Rat dq(0);
        for (int t = 0; t < 6; ++t) {
            Rat dm(0);
            if (kMonomialPairs[t][0] == b) dm += yr[kMonomialPairs[t][1]];
            if (kMonomialPairs[t][1] == b) dm += yr[kMonomialPairs[t][0]];
            if (sgn(dm) == 0) continue;
            Rat col(0);
            for (int s = 0; s < 6; ++s) col += q(s, t) * mx[s];
            dq += dm * col;
        }
        jac(1, 3 + b) = dq;
    }

    int xpiv = 0, ypiv = 0;
    while (sgn(p.x[xpiv]) == 0) ++xpiv;
    while (sgn(p.y[ypiv]) == 0) ++ypiv;
    QMat chart(2, 4);
    int col = 0;
    for (int c = 0; c < 6; ++c) {
        if (c == xpiv || c == 3 + ypiv) continue;
        chart(0, col) = jac(0, c);
        chart(1, col) = jac(1, c);
        ++col;
    }
    return rank(chart, Rat(0)) == 2;
}

namespace {

struct FiberQuadratic {
    // line basis u, v and the restricted conic alpha s^2 + beta st + gamma t^2
    std::array<Int, 3> u, v;
    Rat alpha, beta, gamma;
    Int s0, t0;  // the known root (coordinates of p on the line)
    bool degenerate_line = false;
    bool degenerate_conic = false;
};

// Fiber of the projection fixing `fixed`: line c . w = 0 in the moving factor
// with the conic coefficients c6 over the moving factor's monomials.
FiberQuadratic fiber_quadratic(const std::array<Rat, 3>& line_coeffs,
                               const std::array<Rat, 6>& conic_coeffs,
                               const std::array<Int, 3>& moving) {
    FiberQuadratic f;
    // clear denominators of the line
    Int den(1);
    for (const auto& c : line_coeffs) den = lcm(den, Int(c.get_den()));
    std::array<Int, 3> c;
    for (int i = 0; i < 3; ++i) c[i] = Int(line_coeffs[i].get_num()) * (den / Int(line_coeffs[i].get_den()));
    if (sgn(c[0]) == 0 && sgn(c[1]) == 0 && sgn(c[2]) == 0) {
        f.degenerate_line = true;
        return f;
    }
    int piv = 0;
    while (sgn(c[piv]) == 0) ++piv;
    int p1 = piv == 0 ? 1 : 0;
    int p2 = piv == 2 ? 1 : 2;
    if (p1 == p2) p2 = 2;
    // u = c_piv e_{p1} - c_{p1} e_piv ; v = c_piv e_{p2} - c_{p2} e_piv
    f.u = {Int(0), Int(0), Int(0)};
    f.v = {Int(0), Int(0), Int(0)};
    f.u[p1] = c[piv];
    f.u[piv] -= c[p1];
    f.v[p2] = c[piv];
    f.v[piv] -= c[p2];
    f.s0 = moving[p1];
    f.t0 = moving[p2];

    auto qval = [&](const std::array<Int, 3>& w) {
        auto m = monomials(to_rat3(w));
        Rat s(0);
        for (int i = 0; i < 6; ++i) s += conic_coeffs[i] * m[i];
        return s;
    };
    std::array<Int, 3> upv;
    for (int i = 0; i < 3; ++i) upv[i] = f.u[i] + f.v[i];
    f.alpha = qval(f.u);
    f.gamma = qval(f.v);
    f.beta = qval(upv) - f.alpha - f.gamma;
    if (sgn(f.alpha) == 0 && sgn(f.beta) == 0 && sgn(f.gamma) == 0) f.degenerate_conic = true;
    return f;
}

std::array<Int, 3> line_point(const FiberQuadratic& f, const Rat& s, const Rat& t) {
    Int den = lcm(Int(s.get_den()), Int(t.get_den()));
    Int si = Int(s.get_num()) * (den / Int(s.get_den()));
    Int ti = Int(t.get_num()) * (den / Int(t.get_den()));
    std::array<Int, 3> w;
    for (int i = 0; i < 3; ++i) w[i] = si * f.u[i] + ti * f.v[i];
    return w;
}

std::array<Rat, 3> line_coeffs_for(const WehlerSurface& s, const SurfacePoint& p, int which) {
    std::array<Rat, 3> c{Rat(0), Rat(0), Rat(0)};
    if (which == 1) {
        for (int b = 0; b < 3; ++b)
            for (int a = 0; a < 3; ++a) c[b] += s.l(a, b) * Rat(p.x[a]);
    } else {
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) c[a] += s.l(a, b) * Rat(p.y[b]);
    }
    return c;
}

std::array<Rat, 6> conic_coeffs_for(const WehlerSurface& s, const SurfacePoint& p, int which) {
    std::array<Rat, 6> c6{};
    if (which == 1) {
        auto mx = monomials(to_rat3(p.x));
        for (int b = 0; b < 6; ++b) {
            Rat acc(0);
            for (int a = 0; a < 6; ++a) acc += s.q(a, b) * mx[a];
            c6[b] = acc;
        }
    } else {
        auto my = monomials(to_rat3(p.y));
        for (int a = 0; a < 6; ++a) {
            Rat acc(0);
            for (int b = 0; b < 6; ++b) acc += s.q(a, b) * my[b];
            c6[a] = acc;
        }
    }
    return c6;
}

}  // namespace

SigmaResult sigma(const WehlerSurface& s, const SurfacePoint& p, int which) {
    if (which != 1 && which != 2) throw Error(ErrorCode::InvalidInput, "which must be 1 or 2");
    if (!s.contains(p)) throw Error(ErrorCode::InvalidInput, "point is not on the surface");

    const std::array<Int, 3>& moving = which == 1 ? p.y : p.x;
    FiberQuadratic f =
        fiber_quadratic(line_coeffs_for(s, p, which), conic_coeffs_for(s, p, which), moving);

    SigmaResult res;
    if (f.degenerate_line || f.degenerate_conic) {
        res.status = FiberStatus::Degenerate;
        return res;
    }
    Rat disc = f.beta * f.beta - 4 * f.alpha * f.gamma;
    if (sgn(disc) == 0) {
        res.status = FiberStatus::Tangent;
        return res;
    }
    // split the quadratic at the known root (s0 : t0)
    Rat s1, t1;
    if (sgn(f.alpha) != 0) {
        // root sum: s/t pair (-beta t0 - alpha s0 : alpha t0); t0 != 0 here
        s1 = -f.beta * Rat(f.t0) - f.alpha * Rat(f.s0);
        t1 = f.alpha * Rat(f.t0);
    } else if (sgn(f.t0) == 0) {
        s1 = -f.gamma;
        t1 = f.beta;
    } else {
        s1 = Rat(1);
        t1 = Rat(0);
    }
    std::array<Int, 3> other = line_point(f, s1, t1);

    res.point = p;
    (which == 1 ? res.point.y : res.point.x) = other;
    res.point.normalize();
    if (!s.contains(res.point))
        throw Error(ErrorCode::InvalidInput, "involution output left the surface (inexact input?)");
    return res;
}

QMat ns_gram() { return {{Rat(2), Rat(4)}, {Rat(4), Rat(2)}}; }

QMat ns_action(int which) {
    if (which == 1) return {{Rat(1), Rat(4)}, {Rat(0), Rat(-1)}};
    if (which == 2) return {{Rat(-1), Rat(0)}, {Rat(4), Rat(1)}};
    throw Error(ErrorCode::InvalidInput, "which must be 1 or 2");
}

K3Characters eigendivisors_k3() {
    K3Characters k;
    double s3 = std::sqrt(3.0);
    k.lambda1 = 7.0 + 4.0 * s3;
    k.chi = {k.lambda1, 7.0 - 4.0 * s3};
    // phi* = sigma1* sigma2* has eigenvectors (1, s3 - 2) and (-1, 2 + s3),
    // sign-fixed into the nef side and scaled to intersection 1 with D1 + D2
    double kp = 1.0 / (6.0 * (s3 - 1.0));
    double km = 1.0 / (6.0 * (1.0 + s3));
    k.classes[0] = {kp, kp * (s3 - 2.0)};
    k.classes[1] = {-km, km * (2.0 + s3)};
    // Gram evaluation of D+ . D-
    double a1 = k.classes[0][0], b1 = k.classes[0][1];
    double a2 = k.classes[1][0], b2 = k.classes[1][1];
    k.d_plus_dot_d_minus = 2 * a1 * a2 + 4 * (a1 * b2 + b1 * a2) + 2 * b1 * b2;
    // C^2 = -2 with C = aD1 + bD2 means a^2 + 4ab + b^2 = -1, impossible mod 3
    bool found = false;
    for (int a = 0; a < 3 && !found; ++a)
        for (int b = 0; b < 3; ++b)
            if ((a * a + 4 * a * b + b * b) % 3 == ((-1 % 3) + 3) % 3) { found = true; break; }
    k.no_orthogonal_minus_two_class = !found;
    return k;
}

double height(const SurfacePoint& p, double a, double b) {
    Int mx(0), my(0);
    for (const auto& c : p.x) mx = std::max(mx, Int(abs(c)));
    for (const auto& c : p.y) my = std::max(my, Int(abs(c)));
    double hx = sgn(mx) == 0 ? 0.0 : log_int(mx);
    double hy = sgn(my) == 0 ? 0.0 : log_int(my);
    return a * hx + b * hy;
}

namespace {

bool rat_sqrt(const Rat& r, Rat& out) {
    if (sgn(r) < 0) return false;
    Int num = r.get_num(), den = r.get_den();
    if (mpz_perfect_square_p(num.get_mpz_t()) == 0 || mpz_perfect_square_p(den.get_mpz_t()) == 0)
        return false;
    Int sn, sd;
    mpz_sqrt(sn.get_mpz_t(), num.get_mpz_t());
    mpz_sqrt(sd.get_mpz_t(), den.get_mpz_t());
    out = make_rat(sn, sd);
    return true;
}

// rational points of the fiber over fixed x (which = 1), appended to out
void solve_fiber(const WehlerSurface& s, const SurfacePoint& partial, long box,
                 std::vector<SurfacePoint>& out) {
    std::array<Rat, 3> lc = line_coeffs_for(s, partial, 1);
    std::array<Rat, 6> cc = conic_coeffs_for(s, partial, 1);
    std::array<Int, 3> dummy{Int(1), Int(0), Int(0)};
    FiberQuadratic f = fiber_quadratic(lc, cc, dummy);
    if (f.degenerate_line || f.degenerate_conic) return;

    std::vector<std::pair<Rat, Rat>> roots;
    if (sgn(f.alpha) != 0) {
        Rat disc = f.beta * f.beta - 4 * f.alpha * f.gamma;
        Rat sq;
        if (!rat_sqrt(disc, sq)) return;
        roots.emplace_back((-f.beta + sq) / (2 * f.alpha), Rat(1));
        if (sgn(sq) != 0) roots.emplace_back((-f.beta - sq) / (2 * f.alpha), Rat(1));
    } else {
        roots.emplace_back(Rat(1), Rat(0));
        if (sgn(f.beta) != 0) roots.emplace_back(-f.gamma, f.beta);
    }
    for (const auto& [rs, rt] : roots) {
        SurfacePoint cand = partial;
        cand.y = line_point(f, rs, rt);
        if (sgn(cand.y[0]) == 0 && sgn(cand.y[1]) == 0 && sgn(cand.y[2]) == 0) continue;
        cand.normalize();
        bool in_box = true;
        for (const auto& c : cand.y)
            if (abs(c) > box) in_box = false;
        if (in_box && s.contains(cand)) out.push_back(cand);
    }
}

std::vector<SurfacePoint> enumerate_impl(const WehlerSurface& s, double height_bound, long budget,
                                         bool parallel) {
    s.validate();
    double box_d = std::floor(std::exp(height_bound) + 1e-9);
    long box = box_d < 1 ? 1 : static_cast<long>(box_d);
    double side_d = 2.0 * box + 1.0;
    if (side_d * side_d * side_d > static_cast<double>(budget))
        throw Error(ErrorCode::BudgetExceeded, "enumeration box larger than the budget");
    long side = 2 * box + 1;
    long total = side * side * side;

    auto handle_index = [&](long idx, std::vector<SurfacePoint>& sink) {
        std::array<Int, 3> x;
        long rem = idx;
        for (int i = 2; i >= 0; --i) {
            x[i] = Int(rem % side - box);
            rem /= side;
        }
        if (sgn(x[0]) == 0 && sgn(x[1]) == 0 && sgn(x[2]) == 0) return;
        // primitive, sign-normalized representatives only
        std::array<Int, 3> norm = x;
        normalize_triple(norm);
        if (norm != x) return;
        SurfacePoint partial;
        partial.x = x;
        partial.y = {Int(0), Int(0), Int(0)};
        solve_fiber(s, partial, box, sink);
    };

    std::vector<SurfacePoint> pts;
    if (parallel) {
#ifdef _OPENMP
#pragma omp parallel
        {
            std::vector<SurfacePoint> local;
#pragma omp for nowait schedule(dynamic, 64)
            for (long idx = 0; idx < total; ++idx) handle_index(idx, local);
#pragma omp critical
            pts.insert(pts.end(), local.begin(), local.end());
        }
#else
        parallel = false;
#endif
    }
    if (!parallel)
        for (long idx = 0; idx < total; ++idx) handle_index(idx, pts);

    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return pts;
}

}  // namespace

std::vector<SurfacePoint> enumerate_points(const WehlerSurface& s, double height_bound, long budget,
                                           bool parallel) {
    return enumerate_impl(s, height_bound, budget, parallel);
}

std::vector<SurfacePoint> enumerate_points_serial(const WehlerSurface& s, double height_bound,
                                                  long budget) {
    return enumerate_impl(s, height_bound, budget, false);
}

Orbit orbit(const WehlerSurface& s, const SurfacePoint& p, int steps, size_t digit_budget) {
    K3Characters k = eigendivisors_k3();
    Orbit orb;
    auto record = [&](const SurfacePoint& pt) {
        OrbitStep st;
        st.point = pt;
        st.h_plus = height(pt, k.classes[0][0], k.classes[0][1]);
        st.h_minus = height(pt, k.classes[1][0], k.classes[1][1]);
        st.h_ample = height(pt, 1.0, 1.0);
        orb.steps.push_back(std::move(st));
    };
    SurfacePoint cur = p;
    cur.normalize();
    record(cur);
    int first = steps > 0 ? 1 : 2;   // phi = sigma2 . sigma1; phi^{-1} = sigma1 . sigma2
    int second = steps > 0 ? 2 : 1;
    int count = steps > 0 ? steps : -steps;
    for (int m = 0; m < count; ++m) {
        // heights scale by lambda1 < 14 per step: stop before a step that
        // would blow the digit budget rather than after paying for it
        if (cur.max_digits() > digit_budget / 16) {
            orb.truncated = true;
            break;
        }
        SigmaResult r1 = sigma(s, cur, first);
        if (r1.status != FiberStatus::Ok) {
            orb.truncated = true;
            orb.stop_reason = r1.status;
            break;
        }
        SigmaResult r2 = sigma(s, r1.point, second);
        if (r2.status != FiberStatus::Ok) {
            orb.truncated = true;
            orb.stop_reason = r2.status;
            break;
        }
        if (r2.point.max_digits() > digit_budget) {
            orb.truncated = true;
            break;
        }
        cur = r2.point;
        record(cur);
    }
    return orb;
}

std::vector<PeriodicPoint> find_periodic(const WehlerSurface& s, double height_bound,
                                         int period_bound, size_t digit_budget) {
    std::vector<PeriodicPoint> out;
    for (const auto& p : enumerate_points(s, height_bound)) {
        Orbit orb = orbit(s, p, period_bound, digit_budget);
        for (size_t m = 1; m < orb.steps.size(); ++m)
            if (orb.steps[m].point == p) {
                out.push_back({p, static_cast<int>(m)});
                break;
            }
    }
    return out;
}

WehlerSurface make_fixture_surface(unsigned seed, const SurfacePoint& base_point) {
    if (sgn(base_point.x[2]) == 0 || sgn(base_point.y[2]) == 0)
        throw Error(ErrorCode::InvalidInput,
                    "fixture base point needs nonzero last coordinates in both factors");
    std::mt19937 rng(seed);
    auto coeff = [&]() { return Rat(static_cast<int>(rng() % 5) - 2); };

    WehlerSurface s;
    s.l = QMat(3, 3);
    s.q = QMat(6, 6);
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
            if (a != 2 || b != 2) s.l(a, b) = coeff();
    for (int a = 0; a < 6; ++a)
        for (int b = 0; b < 6; ++b)
            if (a != 5 || b != 5) s.q(a, b) = coeff();

    // solve the final coefficient of each form so the base point is on S
    SurfacePoint p = base_point;
    p.normalize();
    s.l(2, 2) = Rat(0);
    s.q(5, 5) = Rat(0);
    Rat lsum = s.eval_l(p);
    s.l(2, 2) = -lsum / (Rat(p.x[2]) * Rat(p.y[2]));
    Rat qsum = s.eval_q(p);
    auto mx = monomials(to_rat3(p.x));
    auto my = monomials(to_rat3(p.y));
    s.q(5, 5) = -qsum / (mx[5] * my[5]);
    s.validate();
    if (!s.contains(p)) throw Error(ErrorCode::InvalidInput, "fixture construction failed");
    return s;
}

}  // namespace canht::wehler
