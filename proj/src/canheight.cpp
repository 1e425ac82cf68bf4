#include "canht/canheight.hpp"

#include <algorithm>
#include <cmath>

#include "canht/poly.hpp"

namespace canht::canon {

namespace {

double tr_product(const DMat& a, const DMat& b) {
    double s = 0;
    for (int i = 0; i < a.rows; ++i)
        for (int j = 0; j < a.cols; ++j) s += a(i, j) * b(j, i);
    return s;
}

double abs_sum(const DMat& a) {
    double s = 0;
    for (double v : a.a) s += std::fabs(v);
    return s;
}

// first dynamical degree of the word: rho(pullback)^2 = rho(W)^2
double lambda1_of_word(const std::vector<nsab::AutoAction>& gens, const std::vector<int>& word) {
    QMat w = nsab::word_matrix(gens, word);
    double rho = max_root_modulus(char_poly(w));
    return rho * rho;
}

}  // namespace

AbelianSystem make_abelian_system(ell::CurveQ curve, std::vector<nsab::AutoAction> generators,
                                  int search_bound, int iters) {
    nsab::EigendivisorSystem eig = nsab::eigendivisor_system(generators);
    int n = generators[0].dim();
    int r = static_cast<int>(generators.size());

    lattice::LogCharacterMatrix lcm;
    lcm.l = DMat(n, r);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < r; ++j) lcm.l(i, j) = std::log(eig.chars.chi[i][j]);
    for (const auto& g : generators) lcm.labels.push_back(g.label);

    std::vector<lattice::GroupWord> words;
    std::vector<QMat> mats;
    for (int i = 0; i < n; ++i) {
        lattice::GroupWord w = lattice::find_distinguished(lcm, i, search_bound);
        mats.push_back(nsab::word_matrix(generators, w.exponents));
        words.push_back(std::move(w));
    }
    return AbelianSystem{std::move(curve), std::move(generators), std::move(eig),
                         std::move(lcm),  std::move(words),      std::move(mats),
                         iters,           1000000};
}

double character_on_word(const AbelianSystem& sys, int index, const std::vector<int>& word) {
    double v = 1.0;
    for (size_t j = 0; j < word.size(); ++j)
        v *= std::pow(sys.eig.chars.chi[index][j], word[j]);
    return v;
}

IndexHeight telescoping_height(const AbelianSystem& sys, int index, const AbelianPoint& x) {
    ell::PairingGram gram = ell::pairing_gram(sys.curve, x.tuple, sys.iters, sys.digit_budget);
    const DMat& d = sys.eig.chars.eigendivisors[index];
    IndexHeight ih;
    ih.value = tr_product(d, gram.g);
    ih.tail = gram.budget_exceeded ? std::numeric_limits<double>::infinity()
                                   : abs_sum(d) * gram.tail;
    ih.budget_exceeded = gram.budget_exceeded;
    ih.m_used = 0;  // exact Gram evaluation, no orbit depth
    return ih;
}

IndexHeight telescoping_height(const WehlerSystem& sys, int index, const wehler::SurfacePoint& x,
                               int m_max) {
    if (m_max < 0) m_max = sys.m_max;
    double lambda = sys.chars.lambda1;
    int direction = index == 0 ? m_max : -m_max;
    wehler::Orbit orb = wehler::orbit(sys.surface, x, direction, sys.digit_budget);
    if (orb.truncated && orb.stop_reason != wehler::FiberStatus::Ok)
        throw Error(ErrorCode::ExcludedPoint, "orbit hit an exceptional fiber");

    auto h_of = [&](const wehler::OrbitStep& st) { return index == 0 ? st.h_plus : st.h_minus; };
    int m = static_cast<int>(orb.steps.size()) - 1;
    IndexHeight ih;
    ih.m_used = m;
    ih.budget_exceeded = orb.truncated;
    double defect = 0.0;
    for (int k = 0; k + 1 <= m; ++k)
        defect = std::max(defect, std::fabs(h_of(orb.steps[k + 1]) - lambda * h_of(orb.steps[k])));
    ih.value = h_of(orb.steps[m]) / std::pow(lambda, m);
    if (m == 0 || orb.truncated)
        ih.tail = std::numeric_limits<double>::infinity();
    else
        ih.tail = 2.0 * defect * std::pow(lambda, -m) / (lambda - 1.0);
    return ih;
}

namespace {

// Weil height representative for D on the abelian testbed: the naive-height
// polarization plugged into the same quadratic forms.
double naive_h_d(const AbelianSystem& sys, const AbelianPoint& x) {
    int n = sys.dim();
    DMat naive(n, n);
    std::vector<double> diag(n, 0.0);
    for (int a = 0; a < n; ++a)
        diag[a] = x.tuple[a].infinity ? 0.0 : ell::naive_height(x.tuple[a]);
    for (int a = 0; a < n; ++a) naive(a, a) = diag[a];
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b) {
            ell::PointQ sum = ell::add(sys.curve, x.tuple[a], x.tuple[b]);
            double hs = sum.infinity ? 0.0 : ell::naive_height(sum);
            double v = (hs - diag[a] - diag[b]) / 2.0;
            naive(a, b) = v;
            naive(b, a) = v;
        }
    DMat dsum(n, n);
    for (const auto& d : sys.eig.chars.eigendivisors) dsum = dsum + d;
    return tr_product(dsum, naive);
}

}  // namespace

CanonicalHeightEstimate canonical_height_G(const DynamicalSystem& sys, const SystemPoint& x) {
    CanonicalHeightEstimate est;
    if (std::holds_alternative<AbelianSystem>(sys)) {
        const auto& s = std::get<AbelianSystem>(sys);
        const auto& pt = std::get<AbelianPoint>(x);
        for (int i = 0; i < s.dim(); ++i) {
            IndexHeight ih = telescoping_height(s, i, pt);
            est.value += ih.value;
            est.tail += ih.tail;
            est.m_used = std::max(est.m_used, ih.m_used);
            est.per_index.push_back(ih);
        }
        est.h_d = naive_h_d(s, pt);
    } else {
        const auto& s = std::get<WehlerSystem>(sys);
        const auto& pt = std::get<wehler::SurfacePoint>(x);
        for (int i = 0; i < 2; ++i) {
            IndexHeight ih = telescoping_height(s, i, pt);
            est.value += ih.value;
            est.tail += ih.tail;
            est.m_used = std::max(est.m_used, ih.m_used);
            est.per_index.push_back(ih);
        }
        est.h_d = wehler::height(pt, s.chars.classes[0][0] + s.chars.classes[1][0],
                                 s.chars.classes[0][1] + s.chars.classes[1][1]);
    }
    est.defect = est.value - est.h_d;
    return est;
}

double product_height(const DynamicalSystem& sys, const SystemPoint& x) {
    CanonicalHeightEstimate est = canonical_height_G(sys, x);
    double prod = 1.0;
    for (const auto& ih : est.per_index) {
        // values within tail of zero count as zero (periodic factor)
        double v = ih.value <= ih.tail ? 0.0 : ih.value;
        prod *= v;
    }
    return prod;
}

namespace {

bool abelian_tuple_torsion(const AbelianSystem& sys, const AbelianPoint& x) {
    for (const auto& p : x.tuple)
        if (!ell::is_torsion(sys.curve, p)) return false;
    return true;
}

// exact orbit recurrence of the tuple under the integer matrix within bound
bool abelian_recurrence(const AbelianSystem& sys, const AbelianPoint& x, const QMat& w,
                        int period_bound) {
    std::vector<ell::PointQ> cur = x.tuple;
    for (int m = 1; m <= period_bound; ++m) {
        cur = ell::act(sys.curve, w, cur);
        if (cur == x.tuple) return true;
        for (const auto& p : cur)
            if (!p.infinity && digits10(p.x) > sys.digit_budget) return false;
    }
    return false;
}

bool wehler_recurrence(const WehlerSystem& sys, const wehler::SurfacePoint& x, bool forward,
                       int period_bound) {
    wehler::Orbit orb =
        wehler::orbit(sys.surface, x, forward ? period_bound : -period_bound, sys.digit_budget);
    wehler::SurfacePoint start = x;
    start.normalize();
    for (size_t m = 1; m < orb.steps.size(); ++m)
        if (orb.steps[m].point == start) return true;
    return false;
}

}  // namespace

ZeroLocusReport classify_zero_locus(const DynamicalSystem& sys, const SystemPoint& x,
                                    int period_bound) {
    ZeroLocusReport rep;
    CanonicalHeightEstimate est;
    try {
        est = canonical_height_G(sys, x);
    } catch (const Error& e) {
        if (e.code() == ErrorCode::ExcludedPoint) return rep;  // Inconclusive
        throw;
    }
    double zero_eps = 1e-12;
    rep.sum_is_zero = std::fabs(est.value) <= est.tail + zero_eps;
    rep.all_indices_zero = true;
    rep.some_index_zero = false;
    for (const auto& ih : est.per_index) {
        bool z = std::fabs(ih.value) <= ih.tail + zero_eps;
        rep.all_indices_zero &= z;
        rep.some_index_zero |= z;
    }

    if (std::holds_alternative<AbelianSystem>(sys)) {
        const auto& s = std::get<AbelianSystem>(sys);
        const auto& pt = std::get<AbelianPoint>(x);
        // periodicity on this testbed is the exact torsion test; the direct
        // orbit recurrence is evaluated as corroborating evidence
        bool torsion = abelian_tuple_torsion(s, pt);
        bool rec_all = true, rec_some = false;
        for (const auto& w : s.distinguished_mats) {
            bool rec = torsion ? abelian_recurrence(s, pt, w, period_bound) : false;
            rec_all &= rec;
            rec_some |= rec;
        }
        rep.periodic_all = torsion && rec_all;
        rep.periodic_some = torsion ? rec_some : false;
    } else {
        const auto& s = std::get<WehlerSystem>(sys);
        const auto& pt = std::get<wehler::SurfacePoint>(x);
        bool fwd = wehler_recurrence(s, pt, true, period_bound);
        bool bwd = wehler_recurrence(s, pt, false, period_bound);
        rep.periodic_all = fwd && bwd;
        rep.periodic_some = fwd || bwd;
    }

    bool all_true = rep.sum_is_zero && rep.all_indices_zero && rep.some_index_zero &&
                    rep.periodic_all && rep.periodic_some;
    bool all_false = !rep.sum_is_zero && !rep.all_indices_zero && !rep.some_index_zero &&
                     !rep.periodic_all && !rep.periodic_some;
    rep.consistent = all_true || all_false;
    if (all_true)
        rep.verdict = ZeroLocusClass::PeriodicAll;
    else if (all_false)
        rep.verdict = ZeroLocusClass::NonPeriodic;
    else
        rep.verdict = ZeroLocusClass::Inconclusive;
    return rep;
}

namespace {

std::vector<double> abelian_orbit_heights(const AbelianSystem& sys, const std::vector<int>& word,
                                          const AbelianPoint& x, int m_budget) {
    ell::PairingGram gram = ell::pairing_gram(sys.curve, x.tuple, sys.iters, sys.digit_budget);
    QMat w = nsab::word_matrix(sys.generators, word);
    QMat wm = QMat::identity(w.rows);
    std::vector<double> h;
    h.reserve(m_budget + 1);
    for (int m = 0; m <= m_budget; ++m) {
        DMat wd = to_double(wm);
        h.push_back(tr_product(wd * gram.g, wd.transposed()));
        wm = w * wm;
    }
    return h;
}

}  // namespace

double arithmetic_degree(const DynamicalSystem& sys, const std::vector<int>& word,
                         const SystemPoint& x, int m_budget) {
    if (std::holds_alternative<AbelianSystem>(sys)) {
        const auto& s = std::get<AbelianSystem>(sys);
        const auto& pt = std::get<AbelianPoint>(x);
        if (abelian_tuple_torsion(s, pt)) return 1.0;  // finite orbit
        std::vector<double> h = abelian_orbit_heights(s, word, pt, m_budget);
        int m1 = m_budget / 2, m2 = m_budget;
        if (h[m1] <= 0 || h[m2] <= 0) return 1.0;
        return std::exp((std::log(h[m2]) - std::log(h[m1])) / (m2 - m1));
    }
    const auto& s = std::get<WehlerSystem>(sys);
    const auto& pt = std::get<wehler::SurfacePoint>(x);
    int e = word.empty() ? 1 : word[0];
    if (e == 0) return 1.0;
    int steps = std::min(m_budget, s.m_max) * std::abs(e);
    wehler::Orbit orb = wehler::orbit(s.surface, pt, e > 0 ? steps : -steps, s.digit_budget);
    size_t avail = orb.steps.size();
    // recurrence within the computed window means a finite orbit
    for (size_t m = 1; m < avail; ++m)
        if (orb.steps[m].point == orb.steps[0].point) return 1.0;
    if (avail < 3) throw Error(ErrorCode::DigitBudgetExceeded, "orbit too short for a growth estimate");
    size_t last = avail - 1;
    double h1 = orb.steps[last - 1].h_ample, h2 = orb.steps[last].h_ample;
    if (h1 <= 0) return 1.0;
    // one phi-step per orbit entry; |e| phi-steps per g-step
    return std::pow(h2 / h1, static_cast<double>(std::abs(e)));
}

CountingTable counting_function(const DynamicalSystem& sys, const std::vector<int>& word,
                                const SystemPoint& x, int m_budget, int grid_size) {
    CountingTable table;
    std::vector<double> h;

    if (std::holds_alternative<AbelianSystem>(sys)) {
        const auto& s = std::get<AbelianSystem>(sys);
        const auto& pt = std::get<AbelianPoint>(x);
        table.limit_value = 1.0 / std::log(lambda1_of_word(s.generators, word));
        if (abelian_tuple_torsion(s, pt)) {
            table.divergent = true;
            return table;
        }
        h = abelian_orbit_heights(s, word, pt, m_budget);
    } else {
        const auto& s = std::get<WehlerSystem>(sys);
        const auto& pt = std::get<wehler::SurfacePoint>(x);
        int e = word.empty() ? 1 : word[0];
        double lam_g = std::pow(s.chars.lambda1, std::abs(e));
        table.limit_value = 1.0 / std::log(lam_g);
        if (e == 0) {
            table.divergent = true;
            return table;
        }
        // exact heights to depth m_max against the ample class D+ + D-, then
        // the fitted two-term model for deeper m; one g-step is |e| phi-steps
        IndexHeight hp = telescoping_height(s, e > 0 ? 0 : 1, pt);
        IndexHeight hm = telescoping_height(s, e > 0 ? 1 : 0, pt);
        int stride = std::abs(e);
        wehler::Orbit orb = wehler::orbit(s.surface, pt, e > 0 ? s.m_max * stride : -s.m_max * stride,
                                          s.digit_budget);
        for (size_t m = 1; m < orb.steps.size(); ++m)
            if (orb.steps[m].point == orb.steps[0].point) {
                table.divergent = true;
                return table;
            }
        double ca = s.chars.classes[0][0] + s.chars.classes[1][0];
        double cb = s.chars.classes[0][1] + s.chars.classes[1][1];
        std::vector<double> exact;
        for (size_t k = 0; k < orb.steps.size(); k += stride)
            exact.push_back(wehler::height(orb.steps[k].point, ca, cb));
        double c = 0.0;
        for (size_t m = 0; m < exact.size(); ++m)
            c += exact[m] - hp.value * std::pow(lam_g, static_cast<double>(m)) -
                 hm.value * std::pow(lam_g, -static_cast<double>(m));
        c /= static_cast<double>(exact.size());
        for (int m = 0; m <= m_budget; ++m) {
            if (m < static_cast<int>(exact.size()))
                h.push_back(exact[m]);
            else
                h.push_back(hp.value * std::pow(lam_g, m) + hm.value * std::pow(lam_g, -m) + c);
        }
    }

    if (h.empty()) return table;
    int m_max = static_cast<int>(h.size()) - 1;
    for (int j = 1; j <= grid_size; ++j) {
        int mj = m_max * j / grid_size;
        double t = h[mj];
        if (t <= 1.0) continue;
        long count = 0;
        for (double v : h)
            if (v <= t) ++count;
        table.rows.push_back({t, count, static_cast<double>(count) / std::log(t)});
    }
    return table;
}

}  // namespace canht::canon
