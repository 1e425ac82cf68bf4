#include "canht/cone.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "canht/jacobi.hpp"
#include "canht/linsolve.hpp"
#include "canht/simplex.hpp"

namespace canht::cone {

namespace {

constexpr double kLpEps = 1e-9;

DVec normalize_vector(DVec v, bool unit_trace_psd, int matrix_size) {
    if (unit_trace_psd) {
        // trace = sum of diagonal slots
        double tr = 0;
        auto idx = sym_index(matrix_size);
        for (size_t s = 0; s < idx.size(); ++s)
            if (idx[s].first == idx[s].second) tr += v[s];
        if (std::fabs(tr) > 1e-300)
            for (auto& x : v) x /= tr;
        return v;
    }
    double m = max_abs(v);
    if (m > 1e-300)
        for (auto& x : v) x /= m;
    for (double x : v) {
        if (std::fabs(x) > 1e-12) {
            if (x < 0)
                for (auto& y : v) y = -y;
            break;
        }
    }
    return v;
}

DMat columns_matrix(const std::vector<QVec>& cols) {
    int d = cols.empty() ? 0 : static_cast<int>(cols[0].size());
    DMat g(d, static_cast<int>(cols.size()));
    for (int j = 0; j < g.cols; ++j)
        for (int i = 0; i < d; ++i) g(i, j) = cols[j][i].get_d();
    return g;
}

QMat columns_matrix_exact(const std::vector<QVec>& cols) {
    int d = cols.empty() ? 0 : static_cast<int>(cols[0].size());
    QMat g(d, static_cast<int>(cols.size()));
    for (int j = 0; j < g.cols; ++j)
        for (int i = 0; i < d; ++i) g(i, j) = cols[j][i];
    return g;
}

}  // namespace

int sym_dim(int k) { return k * (k + 1) / 2; }

std::vector<std::pair<int, int>> sym_index(int k) {
    std::vector<std::pair<int, int>> idx;
    idx.reserve(sym_dim(k));
    for (int i = 0; i < k; ++i)
        for (int j = i; j < k; ++j) idx.emplace_back(i, j);
    return idx;
}

DVec sym_flatten(const DMat& m) {
    auto idx = sym_index(m.rows);
    DVec v(idx.size());
    for (size_t s = 0; s < idx.size(); ++s) v[s] = m(idx[s].first, idx[s].second);
    return v;
}

DMat sym_unflatten(const DVec& v, int k) {
    auto idx = sym_index(k);
    DMat m(k, k);
    for (size_t s = 0; s < idx.size(); ++s) {
        m(idx[s].first, idx[s].second) = v[s];
        m(idx[s].second, idx[s].first) = v[s];
    }
    return m;
}

QVec sym_flatten(const QMat& m) {
    auto idx = sym_index(m.rows);
    QVec v(idx.size());
    for (size_t s = 0; s < idx.size(); ++s) v[s] = m(idx[s].first, idx[s].second);
    return v;
}

QMat sym_unflatten(const QVec& v, int k) {
    auto idx = sym_index(k);
    QMat m(k, k);
    for (size_t s = 0; s < idx.size(); ++s) {
        m(idx[s].first, idx[s].second) = v[s];
        m(idx[s].second, idx[s].first) = v[s];
    }
    return m;
}

ConeSpec ConeSpec::orthant(int d) {
    ConeSpec c;
    c.kind = ConeKind::Orthant;
    c.ambient_dim = d;
    return c;
}

ConeSpec ConeSpec::psd(int k) {
    ConeSpec c;
    c.kind = ConeKind::Psd;
    c.matrix_size = k;
    c.ambient_dim = sym_dim(k);
    return c;
}

ConeSpec ConeSpec::polyhedral_generators(std::vector<QVec> gens) {
    ConeSpec c;
    c.kind = ConeKind::PolyhedralGenerators;
    c.ambient_dim = gens.empty() ? 0 : static_cast<int>(gens[0].size());
    c.generators = std::move(gens);
    return c;
}

ConeSpec ConeSpec::polyhedral_halfspaces(std::vector<QVec> normals) {
    ConeSpec c;
    c.kind = ConeKind::PolyhedralHalfspaces;
    c.ambient_dim = normals.empty() ? 0 : static_cast<int>(normals[0].size());
    c.halfspaces = std::move(normals);
    return c;
}

void ConeSpec::validate() const {
    if (ambient_dim <= 0) throw Error(ErrorCode::InvalidInput, "cone has empty ambient space");
    if (kind == ConeKind::Orthant || kind == ConeKind::Psd) return;  // salient, full-dim by construction
    if (kind == ConeKind::PolyhedralGenerators) {
        for (const auto& g : generators)
            if (static_cast<int>(g.size()) != ambient_dim)
                throw Error(ErrorCode::DimensionMismatch, "generator dimension mismatch");
        QMat g = columns_matrix_exact(generators);
        if (rank(g, Rat(0)) != ambient_dim)
            throw Error(ErrorCode::InvalidInput, "cone does not span the ambient space");
        // Salient <=> no nonzero nonnegative combination of generators vanishes.
        // Exact LP: nu >= 0, G nu = 0, sum nu = 1 must be infeasible.
        int m = ambient_dim, n = static_cast<int>(generators.size());
        QMat a(m + 1, n);
        QVec b(m + 1, Rat(0));
        for (int j = 0; j < n; ++j) {
            for (int i = 0; i < m; ++i) a(i, j) = generators[j][i];
            a(m, j) = Rat(1);
        }
        b[m] = Rat(1);
        std::vector<bool> nn(n, true);
        if (lp_feasible<Rat>(a, b, nn, Rat(0)))
            throw Error(ErrorCode::InvalidInput, "cone is not salient");
    } else {
        // half-spaces: salient <=> ker H = 0; full-dim <=> strictly feasible interior
        QMat h(static_cast<int>(halfspaces.size()), ambient_dim);
        for (int i = 0; i < h.rows; ++i) {
            if (static_cast<int>(halfspaces[i].size()) != ambient_dim)
                throw Error(ErrorCode::DimensionMismatch, "half-space dimension mismatch");
            for (int j = 0; j < ambient_dim; ++j) h(i, j) = halfspaces[i][j];
        }
        if (rank(h, Rat(0)) != ambient_dim)
            throw Error(ErrorCode::InvalidInput, "cone is not salient (half-space kernel nonzero)");
        // interior: H v - s = 1, s >= 0 feasible
        int m = h.rows, d = ambient_dim;
        QMat a(m, d + m);
        QVec b(m, Rat(1));
        for (int i = 0; i < m; ++i) {
            for (int j = 0; j < d; ++j) a(i, j) = h(i, j);
            a(i, d + i) = Rat(-1);
        }
        std::vector<bool> nn(d + m, true);
        for (int j = 0; j < d; ++j) nn[j] = false;
        if (!lp_feasible<Rat>(a, b, nn, Rat(0)))
            throw Error(ErrorCode::InvalidInput, "cone is not full-dimensional");
    }
}

bool ConeSpec::contains(const DVec& v, double tol) const {
    double scale = std::max(1.0, max_abs(v));
    switch (kind) {
        case ConeKind::Orthant:
            for (double x : v)
                if (x < -tol * scale) return false;
            return true;
        case ConeKind::Psd:
            return is_psd(sym_unflatten(v, matrix_size), tol * scale);
        case ConeKind::PolyhedralHalfspaces: {
            for (const auto& hq : halfspaces) {
                double s = 0;
                for (int j = 0; j < ambient_dim; ++j) s += hq[j].get_d() * v[j];
                if (s < -tol * scale) return false;
            }
            return true;
        }
        case ConeKind::PolyhedralGenerators: {
            // membership by LP: G nu = v, nu >= 0
            DMat g = columns_matrix(generators);
            std::vector<bool> nn(g.cols, true);
            DVec b = v;
            for (auto& x : b) x /= scale;
            DMat gs = g;
            return lp_feasible<double>(gs, b, nn, kLpEps);
        }
    }
    return false;
}

ConeMap ConeMap::from_rational(QMat m, std::string label) {
    ConeMap cm;
    cm.matrix = to_double(m);
    cm.exact = std::move(m);
    cm.label = std::move(label);
    return cm;
}

ConeMap ConeMap::from_double(DMat m, std::string label) {
    ConeMap cm;
    cm.matrix = std::move(m);
    cm.label = std::move(label);
    return cm;
}

ConeMap ConeMap::congruence_map(QMat a, std::string label) {
    int k = a.rows;
    auto idx = sym_index(k);
    int d = sym_dim(k);
    QMat at = a.transposed();
    QMat op(d, d);
    for (int col = 0; col < d; ++col) {
        QMat basis(k, k);
        basis(idx[col].first, idx[col].second) = Rat(1);
        basis(idx[col].second, idx[col].first) = Rat(1);
        QMat image = at * basis * a;
        QVec flat = sym_flatten(image);
        for (int row = 0; row < d; ++row) op(row, col) = flat[row];
    }
    ConeMap cm;
    cm.matrix = to_double(op);
    cm.exact = std::move(op);
    cm.congruence = std::move(a);
    cm.label = std::move(label);
    return cm;
}

bool ConeMap::preserves(const ConeSpec& cone, double tol) const {
    if (matrix.rows != cone.ambient_dim || matrix.cols != cone.ambient_dim) return false;
    switch (cone.kind) {
        case ConeKind::Orthant:
            for (double v : matrix.a)
                if (v < -tol * std::max(1.0, max_abs(matrix))) return false;
            return true;
        case ConeKind::Psd:
            // congruence form preserves psd identically; require the recorded A
            return congruence.has_value();
        case ConeKind::PolyhedralGenerators: {
            for (const auto& g : cone.generators) {
                DVec img = matrix * to_double(g);
                if (!cone.contains(img, tol)) return false;
            }
            return true;
        }
        case ConeKind::PolyhedralHalfspaces: {
            // h_i^T M must lie in the dual cone spanned by the h_j
            DMat h(static_cast<int>(cone.halfspaces.size()), cone.ambient_dim);
            for (int i = 0; i < h.rows; ++i)
                for (int j = 0; j < cone.ambient_dim; ++j) h(i, j) = cone.halfspaces[i][j].get_d();
            DMat hm = h * matrix;
            DMat ht = h.transposed();
            for (int i = 0; i < h.rows; ++i) {
                DVec target(cone.ambient_dim);
                double scale = 1e-300;
                for (int j = 0; j < cone.ambient_dim; ++j) scale = std::max(scale, std::fabs(hm(i, j)));
                for (int j = 0; j < cone.ambient_dim; ++j) target[j] = hm(i, j) / scale;
                std::vector<bool> nn(ht.cols, true);
                if (!lp_feasible<double>(ht, target, nn, kLpEps)) return false;
            }
            return true;
        }
    }
    return false;
}

void CommutingFamily::check_commuting(double tol) const {
    for (size_t i = 0; i < maps.size(); ++i)
        for (size_t j = i + 1; j < maps.size(); ++j) {
            if (maps[i].exact && maps[j].exact) {
                QMat d = (*maps[i].exact) * (*maps[j].exact) - (*maps[j].exact) * (*maps[i].exact);
                for (const auto& v : d.a)
                    if (sgn(v) != 0)
                        throw Error(ErrorCode::NotCommuting,
                                    maps[i].label + " and " + maps[j].label + " do not commute");
            } else {
                DMat d = maps[i].matrix * maps[j].matrix - maps[j].matrix * maps[i].matrix;
                double bound = tol * std::max(1.0, max_abs(maps[i].matrix) * max_abs(maps[j].matrix));
                if (max_abs(d) > bound)
                    throw Error(ErrorCode::NotCommuting,
                                maps[i].label + " and " + maps[j].label + " do not commute");
            }
        }
}

void CommutingFamily::check_preserves(double tol) const {
    for (const auto& m : maps)
        if (!m.preserves(cone, tol))
            throw Error(ErrorCode::ConeNotPreserved, "map " + m.label + " does not preserve the cone");
}

SpectralRadiusResult spectral_radius(const ConeMap& map) {
    QMat m;
    if (map.exact) {
        m = *map.exact;
    } else {
        m = QMat(map.matrix.rows, map.matrix.cols);
        for (size_t i = 0; i < map.matrix.a.size(); ++i) m.a[i] = Rat(map.matrix.a[i]);
    }
    Poly p = char_poly(m);
    return {max_root_modulus(p), p};
}

namespace {

// Basis (columns) of the span of cone ∩ E where E = col(basis); empty matrix
// if the intersection is {0}. `basis` columns live in ambient coordinates.
DMat span_cone_meet(const ConeSpec& cone, const DMat& basis, double tol);

DMat subspace_intersection(const DMat& a, const DMat& b, double eps) {
    if (a.cols == 0 || b.cols == 0) return DMat(a.rows, 0);
    DMat stacked(a.rows, a.cols + b.cols);
    for (int i = 0; i < a.rows; ++i) {
        for (int j = 0; j < a.cols; ++j) stacked(i, j) = a(i, j);
        for (int j = 0; j < b.cols; ++j) stacked(i, a.cols + j) = -b(i, j);
    }
    DMat ns = nullspace(stacked, eps);
    std::vector<DVec> cand;
    for (int c = 0; c < ns.cols; ++c) {
        DVec v(a.rows, 0.0);
        for (int i = 0; i < a.rows; ++i)
            for (int j = 0; j < a.cols; ++j) v[i] += a(i, j) * ns(j, c);
        cand.push_back(std::move(v));
    }
    // keep a maximal independent subset, in order
    std::vector<DVec> kept;
    for (const auto& v : cand) {
        DMat trial(a.rows, static_cast<int>(kept.size()) + 1);
        for (int i = 0; i < a.rows; ++i) {
            for (size_t j = 0; j < kept.size(); ++j) trial(i, static_cast<int>(j)) = kept[j][i];
            trial(i, static_cast<int>(kept.size())) = v[i];
        }
        if (rank(trial, eps) == static_cast<int>(kept.size()) + 1) kept.push_back(v);
    }
    DMat out(a.rows, static_cast<int>(kept.size()));
    for (size_t j = 0; j < kept.size(); ++j)
        for (int i = 0; i < a.rows; ++i) out(i, static_cast<int>(j)) = kept[j][i];
    return out;
}

// Rows subset of basis equal to zero: {v in col(basis) : v_i = 0 for i in zset}.
DMat subspace_with_zero_rows(const DMat& basis, const std::vector<int>& zset, double eps) {
    if (zset.empty()) return basis;
    DMat rows(static_cast<int>(zset.size()), basis.cols);
    for (size_t r = 0; r < zset.size(); ++r)
        for (int j = 0; j < basis.cols; ++j) rows(static_cast<int>(r), j) = basis(zset[r], j);
    DMat ns = nullspace(rows, eps);
    DMat out(basis.rows, ns.cols);
    for (int c = 0; c < ns.cols; ++c)
        for (int i = 0; i < basis.rows; ++i) {
            double s = 0;
            for (int j = 0; j < basis.cols; ++j) s += basis(i, j) * ns(j, c);
            out(i, c) = s;
        }
    return out;
}

DMat span_cone_meet_orthant(const DMat& basis, double tol) {
    int d = basis.rows, k = basis.cols;
    if (k == 0) return DMat(d, 0);
    // LP per coordinate: maximize v_i with v = B c >= 0, sum v = 1.
    // Variables: c (free, k), slack s (>= 0, d): B c - s = 0; 1^T B c = 1.
    DMat a(d + 1, k + d);
    DVec b(d + 1, 0.0);
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < k; ++j) a(i, j) = basis(i, j);
        a(i, k + i) = -1.0;
    }
    for (int j = 0; j < k; ++j) {
        double colsum = 0;
        for (int i = 0; i < d; ++i) colsum += basis(i, j);
        a(d, j) = colsum;
    }
    b[d] = 1.0;
    std::vector<bool> nn(k + d, true);
    for (int j = 0; j < k; ++j) nn[j] = false;

    std::vector<int> zero_rows;
    bool any = false;
    for (int i = 0; i < d; ++i) {
        DVec c(k + d, 0.0);
        for (int j = 0; j < k; ++j) c[j] = basis(i, j);
        LpResult<double> r = lp_solve(a, b, c, nn, kLpEps);
        if (r.status != LpStatus::Optimal) return DMat(d, 0);  // cone meets E at 0 only
        if (r.objective > tol)
            any = true;
        else
            zero_rows.push_back(i);
    }
    if (!any) return DMat(d, 0);
    return subspace_with_zero_rows(basis, zero_rows, 1e-10);
}

DMat span_cone_meet_generators(const ConeSpec& cone, const DMat& basis, double tol) {
    int d = basis.rows, k = basis.cols;
    int g = static_cast<int>(cone.generators.size());
    if (k == 0) return DMat(d, 0);
    DMat gm = columns_matrix(cone.generators);
    // Variables: nu (>=0, g), c (free, k). G nu - B c = 0; sum nu = 1.
    DMat a(d + 1, g + k);
    DVec b(d + 1, 0.0);
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < g; ++j) a(i, j) = gm(i, j);
        for (int j = 0; j < k; ++j) a(i, g + j) = -basis(i, j);
    }
    for (int j = 0; j < g; ++j) a(d, j) = 1.0;
    b[d] = 1.0;
    std::vector<bool> nn(g + k, true);
    for (int j = 0; j < k; ++j) nn[g + j] = false;

    std::vector<int> support;
    for (int t = 0; t < g; ++t) {
        DVec c(g + k, 0.0);
        c[t] = 1.0;
        LpResult<double> r = lp_solve(a, b, c, nn, kLpEps);
        if (r.status != LpStatus::Optimal) return DMat(d, 0);
        if (r.objective > tol) support.push_back(t);
    }
    if (support.empty()) return DMat(d, 0);
    DMat gsup(d, static_cast<int>(support.size()));
    for (size_t j = 0; j < support.size(); ++j)
        for (int i = 0; i < d; ++i) gsup(i, static_cast<int>(j)) = gm(i, support[j]);
    return subspace_intersection(gsup, basis, 1e-10);
}

DMat span_cone_meet_halfspaces(const ConeSpec& cone, const DMat& basis, double tol) {
    int d = basis.rows, k = basis.cols;
    int h = static_cast<int>(cone.halfspaces.size());
    if (k == 0) return DMat(d, 0);
    DMat hm(h, d);
    for (int i = 0; i < h; ++i)
        for (int j = 0; j < d; ++j) hm(i, j) = cone.halfspaces[i][j].get_d();
    DMat hb = hm * basis;  // h x k
    // Variables: c (free, k), s (>=0, h). HB c - s = 0; sum_i (HB c)_i = 1.
    DMat a(h + 1, k + h);
    DVec b(h + 1, 0.0);
    for (int i = 0; i < h; ++i) {
        for (int j = 0; j < k; ++j) a(i, j) = hb(i, j);
        a(i, k + i) = -1.0;
    }
    for (int j = 0; j < k; ++j) {
        double s = 0;
        for (int i = 0; i < h; ++i) s += hb(i, j);
        a(h, j) = s;
    }
    b[h] = 1.0;
    std::vector<bool> nn(k + h, true);
    for (int j = 0; j < k; ++j) nn[j] = false;

    std::vector<int> tight;
    bool any = false;
    for (int i = 0; i < h; ++i) {
        DVec c(k + h, 0.0);
        for (int j = 0; j < k; ++j) c[j] = hb(i, j);
        LpResult<double> r = lp_solve(a, b, c, nn, kLpEps);
        if (r.status != LpStatus::Optimal) return DMat(d, 0);
        if (r.objective > tol)
            any = true;
        else
            tight.push_back(i);
    }
    if (!any) return DMat(d, 0);
    // span = E ∩ {H_i v = 0 for tight i}
    if (tight.empty()) return basis;
    DMat rows(static_cast<int>(tight.size()), k);
    for (size_t r = 0; r < tight.size(); ++r)
        for (int j = 0; j < k; ++j) rows(static_cast<int>(r), j) = hb(tight[r], j);
    DMat ns = nullspace(rows, 1e-10);
    DMat out(d, ns.cols);
    for (int c = 0; c < ns.cols; ++c)
        for (int i = 0; i < d; ++i) {
            double s = 0;
            for (int j = 0; j < k; ++j) s += basis(i, j) * ns(j, c);
            out(i, c) = s;
        }
    return out;
}

DMat span_cone_meet_psd(const ConeSpec& cone, const DMat& basis, double tol) {
    int d = basis.rows, k = basis.cols;
    if (k == 0) return DMat(d, 0);
    if (k == d) return basis;  // full eigenspace: cone spans the ambient space
    if (k == 1) {
        DVec v(d);
        for (int i = 0; i < d; ++i) v[i] = basis(i, 0);
        if (cone.contains(v, tol)) return basis;
        for (auto& x : v) x = -x;
        if (cone.contains(v, tol)) {
            DMat b(d, 1);
            for (int i = 0; i < d; ++i) b(i, 0) = v[i];
            return b;
        }
        return DMat(d, 0);
    }
    throw Error(ErrorCode::InvalidInput,
                "psd eigencone refinement for intermediate-dimensional eigenspaces needs "
                "congruence structure on every map");
}

DMat span_cone_meet(const ConeSpec& cone, const DMat& basis, double tol) {
    switch (cone.kind) {
        case ConeKind::Orthant: return span_cone_meet_orthant(basis, tol);
        case ConeKind::PolyhedralGenerators: return span_cone_meet_generators(cone, basis, tol);
        case ConeKind::PolyhedralHalfspaces: return span_cone_meet_halfspaces(cone, basis, tol);
        case ConeKind::Psd: return span_cone_meet_psd(cone, basis, tol);
    }
    return DMat(basis.rows, 0);
}

// Restriction R of map to col(basis): map*basis = basis*R.
DMat restrict_map(const DMat& map, const DMat& basis) {
    int k = basis.cols;
    DMat mb = map * basis;
    DMat bt = basis.transposed();
    DMat gram = bt * basis;        // k x k
    DMat rhs = bt * mb;            // k x k
    DMat r(k, k);
    for (int c = 0; c < k; ++c) {
        DVec col(k);
        for (int i = 0; i < k; ++i) col[i] = rhs(i, c);
        DVec x = solve_square(gram, col, 1e-13 * std::max(1.0, max_abs(gram)));
        for (int i = 0; i < k; ++i) r(i, c) = x[i];
    }
    DMat resid = mb - basis * r;
    if (max_abs(resid) > 1e-6 * std::max(1.0, max_abs(map)) * std::max(1.0, max_abs(basis)))
        throw Error(ErrorCode::NotCommuting, "family does not keep its eigencone spans invariant");
    return r;
}

std::vector<double> real_eigenvalues_of(const DMat& m, double tol) {
    QMat q(m.rows, m.cols);
    for (size_t i = 0; i < m.a.size(); ++i) q.a[i] = Rat(m.a[i]);
    Poly p = char_poly(q);
    std::vector<double> vals = real_roots(p, 1e-7);
    // snap recognizable rationals (keeps exact eigenvalues exact downstream)
    for (double& v : vals) {
        Rat r;
        if (try_exact_rational_root(p, v, r)) v = r.get_d();
    }
    (void)tol;
    return vals;
}

DVec column_of(const DMat& m, int c) {
    DVec v(m.rows);
    for (int i = 0; i < m.rows; ++i) v[i] = m(i, c);
    return v;
}

bool collinear(const DVec& x, const DVec& y, double tol) {
    double nx = norm2(x), ny = norm2(y);
    if (nx < 1e-300 || ny < 1e-300) return true;
    double d = std::fabs(dot(x, y));
    return std::fabs(d - nx * ny) <= tol * nx * ny;
}

// Extreme rays of {v in col(basis) : v >= 0} (orthant) or generator slices
// (polyhedral); single representative otherwise.
std::vector<DVec> leaf_rays(const ConeSpec& cone, const DMat& basis, double tol) {
    int d = basis.rows, k = basis.cols;
    std::vector<DVec> rays;
    auto push_unique = [&](DVec v) {
        for (const auto& r : rays)
            if (collinear(r, v, 1e-7)) return;
        rays.push_back(std::move(v));
    };
    if (k == 1) {
        DVec v = column_of(basis, 0);
        if (!cone.contains(v, tol)) {
            for (auto& x : v) x = -x;
            if (!cone.contains(v, tol)) return {};
        }
        push_unique(v);
        return rays;
    }
    switch (cone.kind) {
        case ConeKind::Orthant: {
            // active sets of size k-1 among the coordinate hyperplanes
            std::vector<int> subset;
            std::vector<int> all(d);
            for (int i = 0; i < d; ++i) all[i] = i;
            std::vector<int> comb(k - 1);
            std::function<void(int, int)> rec = [&](int start, int depth) {
                if (depth == k - 1) {
                    DMat sub = subspace_with_zero_rows(basis, comb, 1e-10);
                    if (sub.cols == 1) {
                        DVec v = column_of(sub, 0);
                        if (cone.contains(v, tol))
                            push_unique(v);
                        else {
                            for (auto& x : v) x = -x;
                            if (cone.contains(v, tol)) push_unique(v);
                        }
                    }
                    return;
                }
                for (int i = start; i < d; ++i) {
                    comb[depth] = i;
                    rec(i + 1, depth + 1);
                }
            };
            rec(0, 0);
            return rays;
        }
        case ConeKind::PolyhedralGenerators: {
            for (const auto& g : cone.generators) {
                DVec gv = to_double(g);
                // is g in col(basis)?
                DMat bt = basis.transposed();
                DMat gram = bt * basis;
                DVec proj = bt * gv;
                DVec c = solve_square(gram, proj, 1e-13 * std::max(1.0, max_abs(gram)));
                DVec rec(d, 0.0);
                for (int i = 0; i < d; ++i)
                    for (int j = 0; j < k; ++j) rec[i] += basis(i, j) * c[j];
                DVec diff(d);
                for (int i = 0; i < d; ++i) diff[i] = rec[i] - gv[i];
                if (norm2(diff) <= 1e-8 * std::max(1.0, norm2(gv))) push_unique(gv);
            }
            return rays;
        }
        default: {
            // single canonical representative: column sum of the basis if in cone
            DVec v(d, 0.0);
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < k; ++j) v[i] += basis(i, j);
            if (cone.contains(v, tol)) push_unique(v);
            return rays;
        }
    }
}

struct Branch {
    DMat basis;
    std::vector<double> chi;
};

}  // namespace

DVec pf_eigenvector(const ConeMap& map, const ConeSpec& cone, double tol) {
    cone.validate();
    if (!map.preserves(cone, std::max(tol, 1e-9)))
        throw Error(ErrorCode::ConeNotPreserved, "map does not preserve the cone");
    SpectralRadiusResult sr = spectral_radius(map);
    int d = cone.ambient_dim;
    double scale = std::max(1.0, max_abs(map.matrix));

    // rho-eigenspace, exactly when rho is a recognizable rational of an exact map
    DMat eig_basis;
    Rat rho_exact;
    if (map.exact && try_exact_rational_root(sr.char_poly, sr.rho, rho_exact)) {
        QMat shifted = *map.exact;
        for (int i = 0; i < d; ++i) shifted(i, i) -= rho_exact;
        QMat ns = nullspace(shifted, Rat(0));
        eig_basis = to_double(ns);
    } else {
        DMat shifted = map.matrix;
        for (int i = 0; i < d; ++i) shifted(i, i) -= sr.rho;
        eig_basis = nullspace(shifted, 1e-9 * scale);
    }
    if (eig_basis.cols == 0)
        throw Error(ErrorCode::NoConeEigenvector, "no eigenspace found at the spectral radius");

    DVec v;
    if (cone.kind == ConeKind::Psd) {
        int k = cone.matrix_size;
        if (eig_basis.cols == d) {
            v = sym_flatten(DMat::identity(k));  // scalar map: canonical choice
        } else if (eig_basis.cols == 1) {
            v = column_of(eig_basis, 0);
            if (!cone.contains(v, tol)) {
                for (auto& x : v) x = -x;
                if (!cone.contains(v, tol))
                    throw Error(ErrorCode::NoConeEigenvector,
                                "rho-eigenspace meets the psd cone only at 0");
            }
        } else if (map.congruence) {
            // sum of w w^T over real eigenvectors w of A^T with mu^2 = rho
            QMat at = map.congruence->transposed();
            Poly pa = char_poly(at);
            DMat atd = to_double(at);
            DMat acc(k, k);
            bool found = false;
            for (double mu : real_roots(pa, 1e-9)) {
                if (std::fabs(mu * mu - sr.rho) > 1e-6 * std::max(1.0, sr.rho)) continue;
                DMat sh = atd;
                for (int i = 0; i < k; ++i) sh(i, i) -= mu;
                DMat ns = nullspace(sh, 1e-9 * std::max(1.0, max_abs(atd)));
                for (int c = 0; c < ns.cols; ++c) {
                    DVec w = column_of(ns, c);
                    double n = norm2(w);
                    for (int i = 0; i < k; ++i)
                        for (int j = 0; j < k; ++j) acc(i, j) += w[i] * w[j] / (n * n);
                    found = true;
                }
            }
            if (!found)
                throw Error(ErrorCode::NoConeEigenvector,
                            "spectral radius is attained only by complex eigenvalue pairs");
            v = sym_flatten(acc);
        } else {
            throw Error(ErrorCode::NoConeEigenvector, "degenerate psd eigenspace without congruence data");
        }
    } else {
        DMat meet = span_cone_meet(cone, eig_basis, tol);
        if (meet.cols == 0)
            throw Error(ErrorCode::NoConeEigenvector, "rho-eigenspace meets the cone only at 0");
        // relative-interior representative: sum the leaf rays, or the basis columns
        std::vector<DVec> rays = leaf_rays(cone, meet, tol);
        if (rays.empty())
            throw Error(ErrorCode::NoConeEigenvector, "could not certify a cone eigenvector");
        v.assign(d, 0.0);
        for (const auto& r : rays) {
            double m = max_abs(r);
            for (int i = 0; i < d; ++i) v[i] += r[i] / m;
        }
    }

    DVec image = map.matrix * v;
    DVec resid(d);
    for (int i = 0; i < d; ++i) resid[i] = image[i] - sr.rho * v[i];
    if (norm2(resid) > std::max(tol, 1e-9) * scale * norm2(v))
        throw Error(ErrorCode::NoConeEigenvector, "candidate fails the eigenvalue equation");
    return normalize_vector(std::move(v), cone.kind == ConeKind::Psd, cone.matrix_size);
}

std::vector<Character> common_eigenvectors(const CommutingFamily& family, double tol) {
    family.cone.validate();
    family.check_commuting(tol);
    family.check_preserves(std::max(tol, 1e-9));
    int d = family.cone.ambient_dim;
    size_t nmaps = family.maps.size();

    // psd cones with exactly-commuting congruence matrices refine on the
    // underlying k-space: eigenvectors of the A^T family give the rank-one
    // invariant directions w w^T.
    bool psd_route = family.cone.kind == ConeKind::Psd;
    if (psd_route)
        for (const auto& m : family.maps)
            if (!m.congruence) psd_route = false;
    if (psd_route)
        for (size_t i = 0; i + 1 < nmaps && psd_route; ++i)
            for (size_t j = i + 1; j < nmaps; ++j) {
                QMat dlt = (*family.maps[i].congruence) * (*family.maps[j].congruence) -
                           (*family.maps[j].congruence) * (*family.maps[i].congruence);
                for (const auto& v : dlt.a)
                    if (sgn(v) != 0) { psd_route = false; break; }
            }

    std::vector<Character> out;
    auto emit = [&](const DVec& vec) {
        Character ch;
        ch.eigenvector = normalize_vector(vec, family.cone.kind == ConeKind::Psd,
                                          family.cone.matrix_size);
        ch.values.resize(nmaps);
        double nv = norm2(ch.eigenvector);
        for (size_t j = 0; j < nmaps; ++j) {
            DVec img = family.maps[j].matrix * ch.eigenvector;
            double chi = dot(img, ch.eigenvector) / (nv * nv);
            DVec resid(d);
            for (int i = 0; i < d; ++i) resid[i] = img[i] - chi * ch.eigenvector[i];
            if (norm2(resid) > 1e-7 * std::max(1.0, max_abs(family.maps[j].matrix)) * nv)
                return;  // not actually a common eigenvector at this tolerance
            ch.values[j] = chi;
        }
        for (double c : ch.values)
            if (c <= 0) return;  // characters are positive by definition
        for (const auto& prev : out)
            if (collinear(prev.eigenvector, ch.eigenvector, 1e-7)) return;
        out.push_back(std::move(ch));
    };

    if (psd_route) {
        int k = family.cone.matrix_size;
        std::vector<DMat> amaps;
        for (const auto& m : family.maps) amaps.push_back(to_double(m.congruence->transposed()));
        std::vector<Branch> stack{{DMat::identity(k), {}}};
        while (!stack.empty()) {
            Branch br = std::move(stack.back());
            stack.pop_back();
            size_t level = br.chi.size();
            if (level == nmaps) {
                // orthonormalize the common eigenspace, emit each direction
                DMat b = br.basis;
                std::vector<DVec> ortho;
                for (int c = 0; c < b.cols; ++c) {
                    DVec w = column_of(b, c);
                    for (const auto& u : ortho) {
                        double f = dot(w, u) / dot(u, u);
                        for (int i = 0; i < k; ++i) w[i] -= f * u[i];
                    }
                    if (norm2(w) > 1e-9) ortho.push_back(w);
                }
                for (const auto& w : ortho) {
                    DMat m(k, k);
                    for (int i = 0; i < k; ++i)
                        for (int j = 0; j < k; ++j) m(i, j) = w[i] * w[j];
                    emit(sym_flatten(m));
                }
                continue;
            }
            DMat r = restrict_map(amaps[level], br.basis);
            for (double lam : real_eigenvalues_of(r, tol)) {
                DMat sh = r;
                for (int i = 0; i < sh.rows; ++i) sh(i, i) -= lam;
                DMat ns = nullspace(sh, 1e-8 * std::max(1.0, max_abs(r)));
                if (ns.cols == 0) continue;
                DMat sub = br.basis * ns;
                Branch nb{sub, br.chi};
                nb.chi.push_back(lam);
                stack.push_back(std::move(nb));
            }
        }
    } else {
        std::vector<Branch> stack{{DMat::identity(d), {}}};
        while (!stack.empty()) {
            Branch br = std::move(stack.back());
            stack.pop_back();
            size_t level = br.chi.size();
            if (level == nmaps) {
                for (const auto& ray : leaf_rays(family.cone, br.basis, tol)) emit(ray);
                continue;
            }
            DMat r = restrict_map(family.maps[level].matrix, br.basis);
            for (double lam : real_eigenvalues_of(r, tol)) {
                DMat sh = r;
                for (int i = 0; i < sh.rows; ++i) sh(i, i) -= lam;
                DMat ns = nullspace(sh, 1e-8 * std::max(1.0, max_abs(r)));
                if (ns.cols == 0) continue;
                DMat eig = br.basis * ns;
                DMat meet = span_cone_meet(family.cone, eig, tol);
                if (meet.cols == 0) continue;
                Branch nb{meet, br.chi};
                nb.chi.push_back(lam);
                stack.push_back(std::move(nb));
            }
        }
    }

    std::sort(out.begin(), out.end(), [](const Character& x, const Character& y) {
        return std::lexicographical_compare(y.values.begin(), y.values.end(),
                                            x.values.begin(), x.values.end());
    });
    return out;
}

CharacterStructureReport character_structure_report(const std::vector<Character>& chars,
                                                    const std::vector<double>& generator_rhos,
                                                    double tol) {
    size_t m = chars.size();
    CharacterStructureReport rep;

    bool distinct = true;
    for (size_t i = 0; i < m && distinct; ++i)
        for (size_t j = i + 1; j < m; ++j) {
            bool same = true;
            for (size_t g = 0; g < chars[i].values.size(); ++g) {
                double a = chars[i].values[g], b = chars[j].values[g];
                if (std::fabs(a - b) > tol * std::max({1.0, std::fabs(a), std::fabs(b)})) {
                    same = false;
                    break;
                }
            }
            if (same) { distinct = false; break; }
        }
    rep.pairwise_distinct = distinct;

    bool noncol = true;
    for (size_t i = 0; i < m && noncol; ++i)
        for (size_t j = i + 1; j < m; ++j)
            if (collinear(chars[i].eigenvector, chars[j].eigenvector, 1e-9)) { noncol = false; break; }
    rep.pairwise_noncollinear = noncol;

    if (m == 0) {
        rep.linearly_independent = true;
    } else {
        int d = static_cast<int>(chars[0].eigenvector.size());
        DMat vm(d, static_cast<int>(m));
        for (size_t j = 0; j < m; ++j)
            for (int i = 0; i < d; ++i) vm(i, static_cast<int>(j)) = chars[j].eigenvector[i];
        rep.linearly_independent = rank(vm, 1e-9) == static_cast<int>(m);
    }
    rep.equivalences_agree = (rep.pairwise_distinct == rep.pairwise_noncollinear) &&
                             (rep.pairwise_noncollinear == rep.linearly_independent);

    rep.rho_achiever.assign(generator_rhos.size(), -1);
    for (size_t g = 0; g < generator_rhos.size(); ++g)
        for (size_t i = 0; i < m; ++i)
            if (g < chars[i].values.size() &&
                std::fabs(chars[i].values[g] - generator_rhos[g]) <=
                    1e-6 * std::max(1.0, std::fabs(generator_rhos[g]))) {
                rep.rho_achiever[g] = static_cast<int>(i);
                break;
            }
    return rep;
}

}  // namespace canht::cone
