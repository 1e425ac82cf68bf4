#pragma once

#include <algorithm>
#include <cmath>

#include "canht/matrix.hpp"

namespace canht {

struct SymEigen {
    DVec values;   // descending
    DMat vectors;  // columns, orthonormal, matching values
};

// Cyclic Jacobi for small symmetric matrices.
inline SymEigen sym_eigen(DMat a) {
    int n = a.rows;
    DMat v = DMat::identity(n);
    for (int sweep = 0; sweep < 64; ++sweep) {
        double off = 0;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
        if (off < 1e-30) break;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) {
                if (std::fabs(a(p, q)) < 1e-300) continue;
                double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
                double t = (theta >= 0 ? 1.0 : -1.0) /
                           (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
                double c = 1.0 / std::sqrt(t * t + 1.0);
                double s = t * c;
                for (int k = 0; k < n; ++k) {
                    double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                for (int k = 0; k < n; ++k) {
                    double vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
    }
    std::vector<int> idx(n);
    for (int i = 0; i < n; ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](int i, int j) { return a(i, i) > a(j, j); });
    SymEigen out;
    out.values.resize(n);
    out.vectors = DMat(n, n);
    for (int j = 0; j < n; ++j) {
        out.values[j] = a(idx[j], idx[j]);
        for (int i = 0; i < n; ++i) out.vectors(i, j) = v(i, idx[j]);
    }
    return out;
}

inline double min_eigenvalue(const DMat& m) {
    SymEigen e = sym_eigen(m);
    return e.values.back();
}

inline bool is_psd(const DMat& m, double tol) { return min_eigenvalue(m) >= -tol; }

}  // namespace canht
