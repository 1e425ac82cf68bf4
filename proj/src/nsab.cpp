#include "canht/nsab.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "canht/jacobi.hpp"
#include "canht/linsolve.hpp"
#include "canht/poly.hpp"

namespace canht::nsab {

namespace {

template <class T>
T mixed_discriminant_impl(const std::vector<Matrix<T>>& ms) {
    int n = static_cast<int>(ms.size());
    if (n == 0) throw Error(ErrorCode::DimensionMismatch, "empty matrix tuple");
    if (n > 5) throw Error(ErrorCode::DimensionMismatch, "mixed discriminant limited to n <= 5");
    for (const auto& m : ms)
        if (m.rows != n || m.cols != n)
            throw Error(ErrorCode::DimensionMismatch, "mixed discriminant needs n matrices of size n");

    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    T sum(0);
    do {
        Matrix<T> pick(n, n);
        for (int col = 0; col < n; ++col)
            for (int row = 0; row < n; ++row) pick(row, col) = ms[perm[col]](row, col);
        sum += det(pick);
    } while (std::next_permutation(perm.begin(), perm.end()));
    T fact(1);
    for (int i = 2; i <= n; ++i) fact *= T(i);
    return sum / fact;
}

template <class T>
std::vector<Matrix<T>> sym_basis(int n) {
    std::vector<Matrix<T>> basis;
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            Matrix<T> b(n, n);
            b(i, j) = T(1);
            b(j, i) = T(1);
            basis.push_back(std::move(b));
        }
    return basis;
}

template <class T>
bool weakly_trivial_impl(const std::vector<Matrix<T>>& partial, int codim, int n, T tol) {
    if (static_cast<int>(partial.size()) != codim)
        throw Error(ErrorCode::DimensionMismatch, "partial tuple size must equal codim");
    if (codim > n) throw Error(ErrorCode::DimensionMismatch, "codim exceeds dimension");
    int slots = n - codim;
    auto basis = sym_basis<T>(n);
    int nb = static_cast<int>(basis.size());
    // unordered tuples with repetition suffice by multilinearity + symmetry
    std::vector<int> pick(slots, 0);
    std::function<bool(int, int)> rec = [&](int depth, int start) -> bool {
        if (depth == slots) {
            std::vector<Matrix<T>> tuple = partial;
            for (int s = 0; s < slots; ++s) tuple.push_back(basis[pick[s]]);
            T v = mixed_discriminant_impl(tuple);
            if constexpr (std::is_same_v<T, Rat>) {
                if (sgn(v) != 0) return false;
            } else {
                if (std::fabs(v) > tol) return false;
            }
            return true;
        }
        for (int b = start; b < nb; ++b) {
            pick[depth] = b;
            if (!rec(depth + 1, b)) return false;
        }
        return true;
    };
    return rec(0, 0);
}

}  // namespace

Rat mixed_discriminant(const std::vector<QMat>& ms) { return mixed_discriminant_impl(ms); }
double mixed_discriminant(const std::vector<DMat>& ms) { return mixed_discriminant_impl(ms); }

Rat intersection_number(const std::vector<QMat>& ms) {
    Rat fact(1);
    for (int i = 2; i <= static_cast<int>(ms.size()); ++i) fact *= Rat(i);
    return fact * mixed_discriminant(ms);
}

double intersection_number(const std::vector<DMat>& ms) {
    double fact = 1;
    for (int i = 2; i <= static_cast<int>(ms.size()); ++i) fact *= i;
    return fact * mixed_discriminant(ms);
}

bool is_weakly_numerically_trivial(const std::vector<QMat>& partial, int codim, int n) {
    return weakly_trivial_impl<Rat>(partial, codim, n, Rat(0));
}

bool is_weakly_numerically_trivial(const std::vector<DMat>& partial, int codim, int n, double tol) {
    double scale = 1.0;
    for (const auto& m : partial) scale = std::max(scale, max_abs(m));
    return weakly_trivial_impl<double>(partial, codim, n, tol * scale);
}

AutoAction::AutoAction(QMat m, std::string lbl) : a(std::move(m)), label(std::move(lbl)) {
    if (a.rows != a.cols) throw Error(ErrorCode::DimensionMismatch, "action matrix must be square");
    for (const auto& v : a.a)
        if (v.get_den() != 1)
            throw Error(ErrorCode::InvalidInput, "action matrix must have integer entries");
    Rat d = det(a);
    if (!(d == Rat(1) || d == Rat(-1)))
        throw Error(ErrorCode::InvalidInput, "action matrix must have determinant +-1");
}

DMat AutoAction::pullback(const DMat& m) const {
    DMat ad = to_double(a);
    return ad.transposed() * m * ad;
}

namespace {

// All words over the family with exponents in [-box, box], excluding identity.
std::vector<std::vector<int>> word_box_list(int r, int box) {
    std::vector<std::vector<int>> words;
    long total = 1;
    for (int i = 0; i < r; ++i) total *= 2L * box + 1;
    for (long idx = 0; idx < total; ++idx) {
        long rem = idx;
        std::vector<int> e(r);
        for (int i = 0; i < r; ++i) {
            e[i] = static_cast<int>(rem % (2 * box + 1)) - box;
            rem /= 2 * box + 1;
        }
        if (std::any_of(e.begin(), e.end(), [](int x) { return x != 0; })) words.push_back(std::move(e));
    }
    return words;
}

}  // namespace

QMat word_matrix(const std::vector<AutoAction>& family, const std::vector<int>& e) {
    QMat w = QMat::identity(family[0].dim());
    for (size_t j = 0; j < family.size(); ++j)
        if (e[j] != 0) w = w * mat_pow(family[j].a, e[j]);
    return w;
}

EigendivisorSystem eigendivisor_system(const std::vector<AutoAction>& family, int word_box) {
    if (family.empty()) throw Error(ErrorCode::InvalidInput, "empty family");
    int n = family[0].dim();
    int r = static_cast<int>(family.size());

    for (size_t i = 0; i < family.size(); ++i)
        for (size_t j = i + 1; j < family.size(); ++j) {
            QMat d = family[i].a * family[j].a - family[j].a * family[i].a;
            for (const auto& v : d.a)
                if (sgn(v) != 0)
                    throw Error(ErrorCode::NotCommuting,
                                family[i].label + " and " + family[j].label + " do not commute");
        }

    // positive entropy on the bounded word box: no eigenvalue modulus within
    // 1e-9 of 1 for any nontrivial word
    for (const auto& e : word_box_list(r, word_box)) {
        QMat w = word_matrix(family, e);
        Poly p = char_poly(w);
        for (const auto& z : poly_roots(p))
            if (std::fabs(std::abs(z) - 1.0) <= 1e-9)
                throw Error(ErrorCode::EntropyCheckFailed,
                            "a word in the family has an eigenvalue of modulus 1");
    }

    cone::CommutingFamily fam;
    fam.cone = cone::ConeSpec::psd(n);
    for (const auto& g : family) fam.maps.push_back(cone::ConeMap::congruence_map(g.a, g.label));
    std::vector<cone::Character> chars = cone::common_eigenvectors(fam);
    if (static_cast<int>(chars.size()) != n)
        throw Error(ErrorCode::InvalidInput,
                    "expected exactly " + std::to_string(n) + " characters, found " +
                        std::to_string(chars.size()));

    EigendivisorSystem sys;
    sys.chars.labels.reserve(family.size());
    for (const auto& g : family) sys.chars.labels.push_back(g.label);
    sys.d_sum = DMat(n, n);
    for (const auto& ch : chars) {
        DMat d = cone::sym_unflatten(ch.eigenvector, n);
        sys.chars.eigendivisors.push_back(d);
        sys.chars.chi.push_back(ch.values);
        // rank-one factor w from the top eigenvector of D
        SymEigen e = sym_eigen(d);
        DVec w(n);
        for (int i = 0; i < n; ++i) w[i] = e.vectors(i, 0);
        for (int i = 0; i < n; ++i)
            if (std::fabs(w[i]) > 1e-12) {
                if (w[i] < 0)
                    for (auto& x : w) x = -x;
                break;
            }
        sys.chars.eigenvectors.push_back(std::move(w));
        sys.d_sum = sys.d_sum + d;
    }

    std::vector<double> rhos;
    for (const auto& m : fam.maps) rhos.push_back(cone::spectral_radius(m).rho);
    auto rep = cone::character_structure_report(chars, rhos);
    sys.certs.distinct = rep.pairwise_distinct;
    sys.certs.noncollinear = rep.pairwise_noncollinear;
    sys.certs.independent = rep.linearly_independent;
    sys.certs.entropy_ok = true;
    sys.certs.min_eigenvalue_of_sum = min_eigenvalue(sys.d_sum);
    sys.certs.intersection = intersection_number(sys.chars.eigendivisors);

    // regulator: max |r x r| minor of the log-character matrix (rows = characters)
    DMat lmat(n, r);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < r; ++j) lmat(i, j) = std::log(sys.chars.chi[i][j]);
    double reg = 0;
    std::vector<int> rows(r);
    std::function<void(int, int)> rec = [&](int start, int depth) {
        if (depth == r) {
            DMat sub(r, r);
            for (int i = 0; i < r; ++i)
                for (int j = 0; j < r; ++j) sub(i, j) = lmat(rows[i], j);
            reg = std::max(reg, std::fabs(det(sub)));
            return;
        }
        for (int i = start; i < n; ++i) {
            rows[depth] = i;
            rec(i + 1, depth + 1);
        }
    };
    rec(0, 0);
    sys.certs.regulator = reg;

    if (!(sys.certs.intersection > 0))
        throw Error(ErrorCode::InvalidInput, "eigendivisor intersection number is not positive");
    return sys;
}

namespace {

// Minimal linear recurrence of an exact sequence: smallest L whose Hankel
// system has a solution that reproduces every available term.
struct Recurrence {
    int order = 0;
    QVec coeffs;  // T_m = sum coeffs[i] * T_{m-1-i}
};

bool try_recurrence(const std::vector<Rat>& t, int l, Recurrence& out) {
    if (2 * l > static_cast<int>(t.size())) return false;
    QMat a(l, l);
    QVec b(l);
    for (int row = 0; row < l; ++row) {
        for (int col = 0; col < l; ++col) a(row, col) = t[l + row - 1 - col];
        b[row] = t[l + row];
    }
    QVec c;
    try {
        c = solve_square(a, b, Rat(0));
    } catch (const std::domain_error&) {
        return false;
    }
    for (size_t m = l; m < t.size(); ++m) {
        Rat acc(0);
        for (int i = 0; i < l; ++i) acc += c[i] * t[m - 1 - i];
        if (acc != t[m]) return false;
    }
    out.order = l;
    out.coeffs = c;
    return true;
}

double dominant_recurrence_root(const Recurrence& rec) {
    QVec poly(rec.order + 1);
    poly[rec.order] = Rat(1);
    for (int i = 0; i < rec.order; ++i) poly[rec.order - 1 - i] = -rec.coeffs[i];
    return max_root_modulus(Poly(poly));
}

}  // namespace

DynamicalDegreeProfile dynamical_degree_profile(const AutoAction& a, int m_base) {
    int n = a.dim();
    DynamicalDegreeProfile prof;

    Poly p = char_poly(a.a);
    std::vector<double> moduli;
    for (const auto& z : poly_roots(p)) moduli.push_back(std::abs(z));
    // poly_roots drops multiplicities; recover them from exact division
    {
        std::vector<double> full;
        Poly rem = p;
        // each distinct root's multiplicity via repeated squarefree peeling
        // (cheap alternative: degree bookkeeping with derivative gcds)
        while (static_cast<int>(full.size()) < n) {
            Poly sf = squarefree_part(rem);
            for (const auto& z : poly_roots(sf)) full.push_back(std::abs(z));
            Poly g = poly_gcd(rem, derivative(rem));
            if (g.degree() == 0) break;
            rem = g;
        }
        moduli = full;
    }
    if (static_cast<int>(moduli.size()) != n)
        throw Error(ErrorCode::InvalidInput, "could not recover the full eigenvalue list");
    std::sort(moduli.rbegin(), moduli.rend());

    prof.spectral.resize(n + 1);
    prof.spectral[0] = 1.0;
    for (int k = 1; k <= n; ++k) prof.spectral[k] = prof.spectral[k - 1] * moduli[k - 1] * moduli[k - 1];

    prof.limit.resize(n + 1);
    QMat identity = QMat::identity(n);
    for (int k = 0; k <= n; ++k) {
        int m_max = std::max(m_base, 8);
        Recurrence rec;
        bool ok = false;
        while (!ok && m_max <= 64) {
            std::vector<Rat> t;
            QMat w = identity;
            for (int m = 0; m <= m_max; ++m) {
                std::vector<QMat> tuple;
                for (int s = 0; s < k; ++s) tuple.push_back(w);
                for (int s = k; s < n; ++s) tuple.push_back(identity);
                t.push_back(intersection_number(tuple));
                w = a.pullback(w);
            }
            for (int l = 1; l <= (m_max + 1) / 2; ++l)
                if (try_recurrence(t, l, rec)) { ok = true; break; }
            if (!ok) m_max *= 2;
        }
        if (!ok)
            throw Error(ErrorCode::BudgetExceeded,
                        "no linear recurrence found for the intersection sequence");
        prof.limit[k] = dominant_recurrence_root(rec);
    }

    prof.lambda.resize(n + 1);
    for (int k = 0; k <= n; ++k) {
        double s = prof.spectral[k], l = prof.limit[k];
        if (std::fabs(s - l) > 1e-6 * std::max(1.0, std::fabs(s)))
            throw Error(ErrorCode::InvalidInput,
                        "dynamical degree routes disagree at k = " + std::to_string(k));
        prof.lambda[k] = s;
    }
    return prof;
}

}  // namespace canht::nsab
