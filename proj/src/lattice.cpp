#include "canht/lattice.hpp"

#include <algorithm>
#include <cmath>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "canht/linsolve.hpp"
#include "canht/poly.hpp"

namespace canht::lattice {

namespace {

long box_size(int r, int bound) {
    long s = 1;
    for (int i = 0; i < r; ++i) s *= 2L * bound + 1;
    return s;
}

std::vector<int> unrank_word(long idx, int r, int bound) {
    std::vector<int> e(r);
    long base = 2L * bound + 1;
    for (int i = r - 1; i >= 0; --i) {
        e[i] = static_cast<int>(idx % base) - bound;
        idx /= base;
    }
    return e;
}

DVec mat_apply(const DMat& l, const std::vector<int>& e) {
    DVec v(l.rows, 0.0);
    for (int i = 0; i < l.rows; ++i)
        for (int j = 0; j < l.cols; ++j) v[i] += l(i, j) * e[j];
    return v;
}

// (l1, lexicographic) total order on words; the parallel searches reduce with
// this, so the result is independent of the schedule.
bool word_less(const std::vector<int>& a, const std::vector<int>& b) {
    int la = 0, lb = 0;
    for (int x : a) la += std::abs(x);
    for (int x : b) lb += std::abs(x);
    if (la != lb) return la < lb;
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

}  // namespace

bool LogCharacterMatrix::column_sums_vanish(double tol) const {
    for (int j = 0; j < l.cols; ++j) {
        double s = 0;
        for (int i = 0; i < l.rows; ++i) s += l(i, j);
        if (std::fabs(s) > tol) return false;
    }
    return true;
}

LatticeCertificate lattice_certificate(const LogCharacterMatrix& lcm, int search_bound,
                                       bool parallel) {
    const DMat& l = lcm.l;
    for (double v : l.a)
        if (!std::isfinite(v)) throw Error(ErrorCode::InvalidInput, "non-finite log-character entry");

    LatticeCertificate cert;
    double scale = std::max(1.0, max_abs(l));
    DMat copy = l;
    cert.rank = rank(copy, 1e-9 * scale);
    // Square data lives in the zero-sum hyperplane, so the group rank there is
    // n - 1; otherwise the r generator columns must be independent.
    int expected = l.rows == l.cols ? l.cols - 1 : l.cols;
    cert.full_rank = cert.rank >= expected;
    if (!cert.full_rank)
        throw Error(ErrorCode::RankDeficient,
                    "log-character matrix has rank " + std::to_string(cert.rank) + " < " +
                        std::to_string(expected) + "; characters do not separate the group");

    // Remark-style dominance certificate on square data: delete row i and
    // column i, normalize row signs so diagonals are positive, then require
    // strict diagonal dominance.
    if (l.rows == l.cols) {
        int n = l.rows;
        cert.dominance.assign(n, false);
        for (int i = 0; i < n; ++i) {
            bool ok = true;
            for (int r = 0; r < n && ok; ++r) {
                if (r == i) continue;
                // row-sign normalization makes the diagonal positive, so the
                // dominance test reduces to absolute values
                double d = std::fabs(l(r, r));
                double off = 0;
                for (int c = 0; c < n; ++c) {
                    if (c == i || c == r) continue;
                    off += std::fabs(l(r, c));
                }
                if (!(d > off)) ok = false;
            }
            cert.dominance[i] = ok;
        }
        cert.dominance_all =
            std::all_of(cert.dominance.begin(), cert.dominance.end(), [](bool b) { return b; });
    }

    // empirical discreteness gap over the exponent box
    int r = l.cols;
    long total = box_size(r, search_bound);
    double best = std::numeric_limits<double>::infinity();
    std::vector<int> best_word;
    if (parallel) {
#ifdef _OPENMP
#pragma omp parallel
        {
            double loc_best = std::numeric_limits<double>::infinity();
            std::vector<int> loc_word;
#pragma omp for nowait
            for (long idx = 0; idx < total; ++idx) {
                std::vector<int> e = unrank_word(idx, r, search_bound);
                bool zero = std::all_of(e.begin(), e.end(), [](int x) { return x == 0; });
                if (zero) continue;
                double nv = norm2(mat_apply(l, e));
                if (nv < loc_best || (nv == loc_best && word_less(e, loc_word))) {
                    loc_best = nv;
                    loc_word = e;
                }
            }
#pragma omp critical
            {
                if (loc_best < best || (loc_best == best && word_less(loc_word, best_word))) {
                    best = loc_best;
                    best_word = loc_word;
                }
            }
        }
#else
        parallel = false;
#endif
    }
    if (!parallel) {
        for (long idx = 0; idx < total; ++idx) {
            std::vector<int> e = unrank_word(idx, r, search_bound);
            if (std::all_of(e.begin(), e.end(), [](int x) { return x == 0; })) continue;
            double nv = norm2(mat_apply(l, e));
            if (nv < best || (nv == best && word_less(e, best_word))) {
                best = nv;
                best_word = e;
            }
        }
    }
    cert.discreteness_gap = best;
    cert.gap_witness.exponents = best_word;
    return cert;
}

GroupWord find_distinguished_serial(const LogCharacterMatrix& lcm, int index, int bound) {
    const DMat& l = lcm.l;
    double margin = 1e-9 * std::max(1.0, max_abs(l));
    int r = l.cols;
    long total = box_size(r, bound);
    bool found = false;
    std::vector<int> best;
    for (long idx = 0; idx < total; ++idx) {
        std::vector<int> e = unrank_word(idx, r, bound);
        if (std::all_of(e.begin(), e.end(), [](int x) { return x == 0; })) continue;
        DVec v = mat_apply(l, e);
        bool ok = true;
        for (int i = 0; i < l.rows && ok; ++i)
            if (i != index && !(v[i] <= -margin)) ok = false;
        if (!ok) continue;
        if (!found || word_less(e, best)) {
            best = e;
            found = true;
        }
    }
    if (!found)
        throw Error(ErrorCode::NotFoundWithinBound,
                    "no distinguished word for index " + std::to_string(index) +
                        " within |exponents| <= " + std::to_string(bound));
    return GroupWord{best};
}

GroupWord find_distinguished(const LogCharacterMatrix& lcm, int index, int bound, bool parallel) {
#ifdef _OPENMP
    if (parallel) {
        const DMat& l = lcm.l;
        double margin = 1e-9 * std::max(1.0, max_abs(l));
        int r = l.cols;
        long total = box_size(r, bound);
        bool found = false;
        std::vector<int> best;
#pragma omp parallel
        {
            bool loc_found = false;
            std::vector<int> loc_best;
#pragma omp for nowait
            for (long idx = 0; idx < total; ++idx) {
                std::vector<int> e = unrank_word(idx, r, bound);
                if (std::all_of(e.begin(), e.end(), [](int x) { return x == 0; })) continue;
                DVec v = mat_apply(l, e);
                bool ok = true;
                for (int i = 0; i < l.rows && ok; ++i)
                    if (i != index && !(v[i] <= -margin)) ok = false;
                if (!ok) continue;
                if (!loc_found || word_less(e, loc_best)) {
                    loc_best = e;
                    loc_found = true;
                }
            }
#pragma omp critical
            {
                if (loc_found && (!found || word_less(loc_best, best))) {
                    best = loc_best;
                    found = true;
                }
            }
        }
        if (!found)
            throw Error(ErrorCode::NotFoundWithinBound,
                        "no distinguished word for index " + std::to_string(index) +
                            " within |exponents| <= " + std::to_string(bound));
        return GroupWord{best};
    }
#endif
    return find_distinguished_serial(lcm, index, bound);
}

namespace {

// |c_j| <= C(degree, j) * bound^j: elementary symmetric bound on the
// coefficients of a monic polynomial with all roots in |z| <= bound.
std::vector<long> coefficient_box(int degree, double bound) {
    std::vector<long> b(degree);
    double binom = 1.0;
    double pw = 1.0;
    for (int j = 1; j <= degree; ++j) {
        binom = binom * (degree - j + 1) / j;
        pw *= bound;
        b[j - 1] = static_cast<long>(std::floor(binom * pw + 1e-9));
    }
    return b;
}

double poly_max_modulus(const std::vector<long>& coeffs_desc, int degree) {
    // monic t^d + c_1 t^{d-1} + ... + c_d
    QVec asc(degree + 1);
    asc[degree] = Rat(1);
    for (int j = 1; j <= degree; ++j) asc[degree - j] = Rat(coeffs_desc[j - 1]);
    return max_root_modulus(Poly(asc));
}

std::vector<double> merge_radii(std::vector<double> vals) {
    std::sort(vals.begin(), vals.end());
    std::vector<double> out;
    for (double v : vals)
        if (out.empty() || std::fabs(v - out.back()) > 1e-9 * std::max(1.0, v)) out.push_back(v);
    return out;
}

}  // namespace

std::vector<double> bounded_spectral_radii_serial(int degree, double bound, long enumeration_cap) {
    if (degree < 1 || degree > 4 || bound > 4.0)
        throw Error(ErrorCode::InvalidInput, "bounded_spectral_radii: degree <= 4 and bound <= 4");
    std::vector<long> box = coefficient_box(degree, bound);
    long total = 1;
    for (long b : box) {
        total *= 2 * b + 1;
        if (total > enumeration_cap)
            throw Error(ErrorCode::BudgetExceeded, "coefficient box exceeds the enumeration cap");
    }
    std::vector<double> hits;
    std::vector<long> c(degree);
    for (long idx = 0; idx < total; ++idx) {
        long rem = idx;
        for (int j = 0; j < degree; ++j) {
            long base = 2 * box[j] + 1;
            c[j] = rem % base - box[j];
            rem /= base;
        }
        double mm = poly_max_modulus(c, degree);
        if (mm <= bound + 1e-9 && mm >= 1.0 - 1e-9) hits.push_back(std::max(mm, 1.0));
    }
    return merge_radii(std::move(hits));
}

std::vector<double> bounded_spectral_radii(int degree, double bound, long enumeration_cap,
                                           bool parallel) {
#ifdef _OPENMP
    if (parallel) {
        if (degree < 1 || degree > 4 || bound > 4.0)
            throw Error(ErrorCode::InvalidInput, "bounded_spectral_radii: degree <= 4 and bound <= 4");
        std::vector<long> box = coefficient_box(degree, bound);
        long total = 1;
        for (long b : box) {
            total *= 2 * b + 1;
            if (total > enumeration_cap)
                throw Error(ErrorCode::BudgetExceeded, "coefficient box exceeds the enumeration cap");
        }
        std::vector<double> hits;
#pragma omp parallel
        {
            std::vector<double> loc;
            std::vector<long> c(degree);
#pragma omp for nowait
            for (long idx = 0; idx < total; ++idx) {
                long rem = idx;
                for (int j = 0; j < degree; ++j) {
                    long base = 2 * box[j] + 1;
                    c[j] = rem % base - box[j];
                    rem /= base;
                }
                double mm = poly_max_modulus(c, degree);
                if (mm <= bound + 1e-9 && mm >= 1.0 - 1e-9) loc.push_back(std::max(mm, 1.0));
            }
#pragma omp critical
            hits.insert(hits.end(), loc.begin(), loc.end());
        }
        return merge_radii(std::move(hits));
    }
#endif
    return bounded_spectral_radii_serial(degree, bound, enumeration_cap);
}

}  // namespace canht::lattice
