#pragma once

#include <vector>

#include "canht/linsolve.hpp"
#include "canht/matrix.hpp"

namespace canht {

enum class LpStatus { Optimal, Infeasible, Unbounded };

template <class T>
struct LpResult {
    LpStatus status = LpStatus::Infeasible;
    std::vector<T> x;  // in the caller's variables (free vars recombined)
    T objective = T(0);
};

// maximize c.x  s.t.  A x = b,  x_i >= 0 where nonneg[i], x_i free otherwise.
// Two-phase dense simplex with Bland's rule; exact when T = Rat and eps = 0.
template <class T>
LpResult<T> lp_solve(const Matrix<T>& a_in, std::vector<T> b, const std::vector<T>& c_in,
                     const std::vector<bool>& nonneg, T eps) {
    int m = a_in.rows;
    int n_orig = a_in.cols;

    // Split free variables x = u - w.
    std::vector<int> pos_col(n_orig), neg_col(n_orig, -1);
    int n = 0;
    for (int j = 0; j < n_orig; ++j) {
        pos_col[j] = n++;
        if (!nonneg[j]) neg_col[j] = n++;
    }

    Matrix<T> a(m, n);
    std::vector<T> c(n, T(0));
    for (int j = 0; j < n_orig; ++j) {
        for (int i = 0; i < m; ++i) {
            a(i, pos_col[j]) = a_in(i, j);
            if (neg_col[j] >= 0) a(i, neg_col[j]) = -a_in(i, j);
        }
        c[pos_col[j]] = c_in[j];
        if (neg_col[j] >= 0) c[neg_col[j]] = -c_in[j];
    }
    for (int i = 0; i < m; ++i)
        if (b[i] < T(0)) {
            b[i] = -b[i];
            for (int j = 0; j < n; ++j) a(i, j) = -a(i, j);
        }

    // Tableau columns: n structural + m artificial + rhs.
    int total = n + m;
    Matrix<T> t(m, total + 1);
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < n; ++j) t(i, j) = a(i, j);
        t(i, n + i) = T(1);
        t(i, total) = b[i];
    }
    std::vector<int> basis(m);
    for (int i = 0; i < m; ++i) basis[i] = n + i;

    auto pivot = [&](int row, int col) {
        T inv = T(1) / t(row, col);
        for (int j = 0; j <= total; ++j) t(row, j) = t(row, j) * inv;
        for (int i = 0; i < m; ++i) {
            if (i == row) continue;
            T f = t(i, col);
            if (detail::is_negligible(f, eps)) continue;
            for (int j = 0; j <= total; ++j) t(i, j) -= f * t(row, j);
        }
        basis[row] = col;
    };

    // Runs simplex on the current tableau for objective coefficients obj
    // (maximization), restricted to columns < limit. Returns false if unbounded.
    auto run = [&](const std::vector<T>& obj, int limit) -> bool {
        for (;;) {
            // reduced costs: obj_j - obj_B . column_j
            std::vector<T> y(m);
            for (int i = 0; i < m; ++i) y[i] = obj[basis[i]];
            int enter = -1;
            for (int j = 0; j < limit; ++j) {
                T red = obj[j];
                for (int i = 0; i < m; ++i) red -= y[i] * t(i, j);
                if (red > eps) { enter = j; break; }  // Bland: first improving index
            }
            if (enter < 0) return true;
            int leave = -1;
            T best_ratio(0);
            for (int i = 0; i < m; ++i) {
                if (!(t(i, enter) > eps)) continue;
                T ratio = t(i, total) / t(i, enter);
                if (leave < 0 || ratio < best_ratio ||
                    (ratio == best_ratio && basis[i] < basis[leave])) {
                    leave = i;
                    best_ratio = ratio;
                }
            }
            if (leave < 0) return false;
            pivot(leave, enter);
        }
    };

    // Phase 1: maximize -(sum of artificials).
    std::vector<T> obj1(total, T(0));
    for (int j = n; j < total; ++j) obj1[j] = T(-1);
    run(obj1, total);
    T art_sum(0);
    for (int i = 0; i < m; ++i)
        if (basis[i] >= n) art_sum += t(i, total);
    LpResult<T> res;
    if (art_sum > (eps + eps) * T(m + 1)) {
        res.status = LpStatus::Infeasible;
        return res;
    }
    // Drive artificials at zero level out of the basis where possible.
    for (int i = 0; i < m; ++i) {
        if (basis[i] < n) continue;
        int col = -1;
        for (int j = 0; j < n; ++j)
            if (!detail::is_negligible(t(i, j), eps)) { col = j; break; }
        if (col >= 0) pivot(i, col);
    }

    // Phase 2 over structural columns only.
    std::vector<T> obj2(total, T(0));
    for (int j = 0; j < n; ++j) obj2[j] = c[j];
    if (!run(obj2, n)) {
        res.status = LpStatus::Unbounded;
        return res;
    }

    std::vector<T> xs(n, T(0));
    for (int i = 0; i < m; ++i)
        if (basis[i] < n) xs[basis[i]] = t(i, total);
    res.x.assign(n_orig, T(0));
    for (int j = 0; j < n_orig; ++j) {
        res.x[j] = xs[pos_col[j]];
        if (neg_col[j] >= 0) res.x[j] -= xs[neg_col[j]];
    }
    res.objective = T(0);
    for (int j = 0; j < n_orig; ++j) res.objective += c_in[j] * res.x[j];
    res.status = LpStatus::Optimal;
    return res;
}

template <class T>
bool lp_feasible(const Matrix<T>& a, const std::vector<T>& b, const std::vector<bool>& nonneg,
                 T eps, std::vector<T>* point = nullptr) {
    std::vector<T> c(a.cols, T(0));
    LpResult<T> r = lp_solve(a, b, c, nonneg, eps);
    if (r.status != LpStatus::Optimal) return false;
    if (point) *point = r.x;
    return true;
}

}  // namespace canht
