#pragma once

#include <cmath>
#include <vector>

#include "canht/matrix.hpp"

namespace canht {

namespace detail {
inline bool is_negligible(const Rat& v, const Rat&) { return sgn(v) == 0; }
inline bool is_negligible(double v, double eps) { return std::fabs(v) <= eps; }
inline double abs_of(double v) { return std::fabs(v); }
inline Rat abs_of(const Rat& v) { return abs(v); }
}  // namespace detail

// In-place reduced row echelon form; returns pivot columns. For T = Rat pass
// eps = Rat(0) (exact); for doubles eps should be scaled to the matrix.
template <class T>
std::vector<int> rref(Matrix<T>& m, T eps) {
    std::vector<int> pivots;
    int r = 0;
    for (int c = 0; c < m.cols && r < m.rows; ++c) {
        int best = -1;
        for (int i = r; i < m.rows; ++i) {
            if (detail::is_negligible(m(i, c), eps)) continue;
            if (best < 0 || detail::abs_of(m(i, c)) > detail::abs_of(m(best, c))) best = i;
        }
        if (best < 0) continue;
        if (best != r)
            for (int j = 0; j < m.cols; ++j) std::swap(m(best, j), m(r, j));
        T inv = T(1) / m(r, c);
        for (int j = c; j < m.cols; ++j) m(r, j) = m(r, j) * inv;
        for (int i = 0; i < m.rows; ++i) {
            if (i == r || detail::is_negligible(m(i, c), eps)) continue;
            T f = m(i, c);
            for (int j = c; j < m.cols; ++j) m(i, j) -= f * m(r, j);
        }
        pivots.push_back(c);
        ++r;
    }
    return pivots;
}

template <class T>
int rank(Matrix<T> m, T eps) {
    return static_cast<int>(rref(m, eps).size());
}

// Basis of the kernel of m, as columns of the returned matrix.
template <class T>
Matrix<T> nullspace(Matrix<T> m, T eps) {
    std::vector<int> piv = rref(m, eps);
    std::vector<bool> is_piv(m.cols, false);
    for (int c : piv) is_piv[c] = true;
    int k = m.cols - static_cast<int>(piv.size());
    Matrix<T> basis(m.cols, k);
    int out = 0;
    for (int freec = 0; freec < m.cols; ++freec) {
        if (is_piv[freec]) continue;
        basis(freec, out) = T(1);
        for (size_t pr = 0; pr < piv.size(); ++pr) basis(piv[pr], out) = -m(static_cast<int>(pr), freec);
        ++out;
    }
    return basis;
}

// Solves the square system a x = b (field T). Throws if singular.
template <class T>
std::vector<T> solve_square(Matrix<T> a, std::vector<T> b, T eps) {
    assert(a.rows == a.cols && static_cast<int>(b.size()) == a.rows);
    int n = a.rows;
    for (int c = 0; c < n; ++c) {
        int best = -1;
        for (int i = c; i < n; ++i) {
            if (detail::is_negligible(a(i, c), eps)) continue;
            if (best < 0 || detail::abs_of(a(i, c)) > detail::abs_of(a(best, c))) best = i;
        }
        if (best < 0) throw std::domain_error("solve_square: singular system");
        if (best != c) {
            for (int j = 0; j < n; ++j) std::swap(a(best, j), a(c, j));
            std::swap(b[best], b[c]);
        }
        T inv = T(1) / a(c, c);
        for (int i = c + 1; i < n; ++i) {
            if (detail::is_negligible(a(i, c), eps)) continue;
            T f = a(i, c) * inv;
            for (int j = c; j < n; ++j) a(i, j) -= f * a(c, j);
            b[i] -= f * b[c];
        }
    }
    std::vector<T> x(n, T(0));
    for (int i = n - 1; i >= 0; --i) {
        T s = b[i];
        for (int j = i + 1; j < n; ++j) s -= a(i, j) * x[j];
        x[i] = s / a(i, i);
    }
    return x;
}

}  // namespace canht
