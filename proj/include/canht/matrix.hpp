#pragma once

#include <cassert>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <stdexcept>
#include <vector>

#include "canht/rational.hpp"

namespace canht {

// Small dense row-major matrix. Everything in this project is <= 6x6 except
// the integer word matrices, which stay small in dimension (entries are mpz).
template <class T>
struct Matrix {
    int rows = 0, cols = 0;
    std::vector<T> a;

    Matrix() = default;
    Matrix(int r, int c) : rows(r), cols(c), a(static_cast<size_t>(r) * c, T(0)) {}
    Matrix(std::initializer_list<std::initializer_list<T>> init) {
        rows = static_cast<int>(init.size());
        cols = rows ? static_cast<int>(init.begin()->size()) : 0;
        a.reserve(static_cast<size_t>(rows) * cols);
        for (const auto& row : init) {
            assert(static_cast<int>(row.size()) == cols);
            for (const auto& v : row) a.push_back(v);
        }
    }

    T& operator()(int i, int j) { return a[static_cast<size_t>(i) * cols + j]; }
    const T& operator()(int i, int j) const { return a[static_cast<size_t>(i) * cols + j]; }

    static Matrix identity(int n) {
        Matrix m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = T(1);
        return m;
    }

    Matrix transposed() const {
        Matrix m(cols, rows);
        for (int i = 0; i < rows; ++i)
            for (int j = 0; j < cols; ++j) m(j, i) = (*this)(i, j);
        return m;
    }

    bool operator==(const Matrix& o) const {
        return rows == o.rows && cols == o.cols && a == o.a;
    }
};

template <class T>
Matrix<T> operator*(const Matrix<T>& x, const Matrix<T>& y) {
    if (x.cols != y.rows) throw std::invalid_argument("matrix product shape mismatch");
    Matrix<T> z(x.rows, y.cols);
    for (int i = 0; i < x.rows; ++i)
        for (int k = 0; k < x.cols; ++k) {
            const T& xv = x(i, k);
            if (xv == T(0)) continue;
            for (int j = 0; j < y.cols; ++j) z(i, j) += xv * y(k, j);
        }
    return z;
}

template <class T>
Matrix<T> operator+(const Matrix<T>& x, const Matrix<T>& y) {
    assert(x.rows == y.rows && x.cols == y.cols);
    Matrix<T> z = x;
    for (size_t i = 0; i < z.a.size(); ++i) z.a[i] += y.a[i];
    return z;
}

template <class T>
Matrix<T> operator-(const Matrix<T>& x, const Matrix<T>& y) {
    assert(x.rows == y.rows && x.cols == y.cols);
    Matrix<T> z = x;
    for (size_t i = 0; i < z.a.size(); ++i) z.a[i] -= y.a[i];
    return z;
}

template <class T>
Matrix<T> operator*(const T& s, const Matrix<T>& x) {
    Matrix<T> z = x;
    for (auto& v : z.a) v *= s;
    return z;
}

template <class T>
std::vector<T> operator*(const Matrix<T>& m, const std::vector<T>& v) {
    assert(static_cast<int>(v.size()) == m.cols);
    std::vector<T> w(m.rows, T(0));
    for (int i = 0; i < m.rows; ++i)
        for (int j = 0; j < m.cols; ++j) w[i] += m(i, j) * v[j];
    return w;
}

template <class T>
T trace(const Matrix<T>& m) {
    T t(0);
    for (int i = 0; i < std::min(m.rows, m.cols); ++i) t += m(i, i);
    return t;
}

// Exact determinant by fraction-full Gaussian elimination; T must be a field.
template <class T>
T det(Matrix<T> m) {
    assert(m.rows == m.cols);
    int n = m.rows;
    T d(1);
    for (int c = 0; c < n; ++c) {
        int p = -1;
        for (int r = c; r < n; ++r)
            if (!(m(r, c) == T(0))) { p = r; break; }
        if (p < 0) return T(0);
        if (p != c) {
            for (int j = 0; j < n; ++j) std::swap(m(p, j), m(c, j));
            d = -d;
        }
        d *= m(c, c);
        T inv = T(1) / m(c, c);
        for (int r = c + 1; r < n; ++r) {
            if (m(r, c) == T(0)) continue;
            T f = m(r, c) * inv;
            for (int j = c; j < n; ++j) m(r, j) -= f * m(c, j);
        }
    }
    return d;
}

using QMat = Matrix<Rat>;
using DMat = Matrix<double>;
using QVec = std::vector<Rat>;
using DVec = std::vector<double>;

inline DMat to_double(const QMat& q) {
    DMat d(q.rows, q.cols);
    for (size_t i = 0; i < q.a.size(); ++i) d.a[i] = q.a[i].get_d();
    return d;
}

inline DVec to_double(const QVec& q) {
    DVec d(q.size());
    for (size_t i = 0; i < q.size(); ++i) d[i] = q[i].get_d();
    return d;
}

inline double dot(const DVec& x, const DVec& y) {
    double s = 0;
    for (size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
    return s;
}

inline double norm2(const DVec& x) { return std::sqrt(dot(x, x)); }

inline double max_abs(const DVec& x) {
    double m = 0;
    for (double v : x) m = std::max(m, std::fabs(v));
    return m;
}

inline double max_abs(const DMat& x) {
    double m = 0;
    for (double v : x.a) m = std::max(m, std::fabs(v));
    return m;
}

// Exact inverse of a rational square matrix (Gauss-Jordan). Throws if singular.
inline QMat inverse(QMat m) {
    assert(m.rows == m.cols);
    int n = m.rows;
    QMat inv = QMat::identity(n);
    for (int c = 0; c < n; ++c) {
        int p = -1;
        for (int r = c; r < n; ++r)
            if (sgn(m(r, c)) != 0) { p = r; break; }
        if (p < 0) throw std::domain_error("inverse: singular matrix");
        if (p != c)
            for (int j = 0; j < n; ++j) {
                std::swap(m(p, j), m(c, j));
                std::swap(inv(p, j), inv(c, j));
            }
        Rat piv = m(c, c);
        for (int j = 0; j < n; ++j) { m(c, j) /= piv; inv(c, j) /= piv; }
        for (int r = 0; r < n; ++r) {
            if (r == c || sgn(m(r, c)) == 0) continue;
            Rat f = m(r, c);
            for (int j = 0; j < n; ++j) {
                m(r, j) -= f * m(c, j);
                inv(r, j) -= f * inv(c, j);
            }
        }
    }
    return inv;
}

// Integer power of a rational square matrix; negative exponents use the exact inverse.
inline QMat mat_pow(const QMat& m, long e) {
    QMat base = e < 0 ? inverse(m) : m;
    unsigned long k = static_cast<unsigned long>(e < 0 ? -e : e);
    QMat acc = QMat::identity(m.rows);
    while (k) {
        if (k & 1) acc = acc * base;
        base = base * base;
        k >>= 1;
    }
    return acc;
}

}  // namespace canht
