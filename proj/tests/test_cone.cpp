#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "canht/cone.hpp"
#include "canht/jacobi.hpp"
#include "canht/linsolve.hpp"

using namespace canht;
using namespace canht::cone;

namespace {

// Independent oracles for the frozen constants used below.

// Roots of t^3 - 3t - 1 by bisection (descending by modulus).
std::array<double, 3> cubic_roots_oracle() {
    auto f = [](double t) { return t * t * t - 3.0 * t - 1.0; };
    auto bisect = [&](double lo, double hi) {
        for (int i = 0; i < 200; ++i) {
            double mid = 0.5 * (lo + hi);
            (f(lo) * f(mid) <= 0 ? hi : lo) = mid;
        }
        return 0.5 * (lo + hi);
    };
    return {bisect(1.5, 2.0), bisect(-2.0, -1.0), bisect(-1.0, 0.0)};
}

const double kGolden = (1.0 + std::sqrt(5.0)) / 2.0;       // root of t^2 - t - 1
const double kRhoFib = (3.0 + std::sqrt(5.0)) / 2.0;       // root of t^2 - 3t + 1

QMat companion_c() {
    return {{Rat(0), Rat(0), Rat(1)}, {Rat(1), Rat(0), Rat(3)}, {Rat(0), Rat(1), Rat(0)}};
}

}  // namespace

TEST_CASE("spectral_radius: identity, fibonacci-type, companion") {
    ConeMap id3 = ConeMap::from_rational(QMat::identity(3), "id");
    auto r = spectral_radius(id3);
    CHECK(r.rho == doctest::Approx(1.0).epsilon(1e-12));
    // (t-1)^3 = t^3 - 3t^2 + 3t - 1
    CHECK(r.char_poly.c[0] == Rat(-1));
    CHECK(r.char_poly.c[1] == Rat(3));
    CHECK(r.char_poly.c[2] == Rat(-3));
    CHECK(r.char_poly.c[3] == Rat(1));

    ConeMap fib = ConeMap::from_rational({{Rat(2), Rat(1)}, {Rat(1), Rat(1)}}, "F");
    CHECK(spectral_radius(fib).rho == doctest::Approx(kRhoFib).epsilon(1e-12));

    ConeMap comp = ConeMap::from_rational(companion_c(), "C");
    auto roots = cubic_roots_oracle();
    CHECK(spectral_radius(comp).rho == doctest::Approx(roots[0]).epsilon(1e-12));
}

TEST_CASE("pf_eigenvector on the orthant") {
    ConeSpec orth = ConeSpec::orthant(2);
    ConeMap fib = ConeMap::from_rational({{Rat(2), Rat(1)}, {Rat(1), Rat(1)}}, "F");
    DVec v = pf_eigenvector(fib, orth);
    // v proportional to (golden, 1), max-norm 1
    CHECK(v[0] == doctest::Approx(1.0));
    CHECK(v[1] == doctest::Approx(1.0 / kGolden).epsilon(1e-10));
}

TEST_CASE("pf_eigenvector on psd: identity and congruence by the companion matrix") {
    ConeSpec psd3 = ConeSpec::psd(3);
    ConeMap idc = ConeMap::congruence_map(QMat::identity(3), "id");
    DVec v = pf_eigenvector(idc, psd3);
    DMat m = sym_unflatten(v, 3);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            CHECK(m(i, j) == doctest::Approx(i == j ? 1.0 / 3.0 : 0.0).epsilon(1e-12));

    ConeMap cc = ConeMap::congruence_map(companion_c(), "C");
    auto roots = cubic_roots_oracle();
    auto sr = spectral_radius(cc);
    CHECK(sr.rho == doctest::Approx(roots[0] * roots[0]).epsilon(1e-10));

    DVec vc = pf_eigenvector(cc, psd3);
    DMat mc = sym_unflatten(vc, 3);
    // oracle: w with C^T w = mu_max w, i.e. w = (1, mu, mu^2 - 3)... solve directly:
    // C^T rows: (0,1,0), (0,0,1), (1,3,0) => w2 = mu w1, w3 = mu w2.
    double mu = roots[0];
    DVec w{1.0, mu, mu * mu};
    double nw = std::sqrt(dot(w, w));
    for (auto& x : w) x /= nw;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            CHECK(mc(i, j) == doctest::Approx(w[i] * w[j]).epsilon(1e-8));
    CHECK(is_psd(mc, 1e-10));
    CHECK(trace(mc) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("pf_eigenvector on a polyhedral cone given by generators") {
    std::vector<QVec> gens = {{Rat(1), Rat(0)}, {Rat(0), Rat(1)}};
    ConeSpec poly = ConeSpec::polyhedral_generators(gens);
    ConeMap fib = ConeMap::from_rational({{Rat(2), Rat(1)}, {Rat(1), Rat(1)}}, "F");
    DVec v = pf_eigenvector(fib, poly);
    CHECK(v[0] / v[1] == doctest::Approx(kGolden).epsilon(1e-7));
}

TEST_CASE("pf_eigenvector on a half-space cone") {
    std::vector<QVec> hs = {{Rat(1), Rat(0)}, {Rat(0), Rat(1)}};
    ConeSpec quad = ConeSpec::polyhedral_halfspaces(hs);
    ConeMap fib = ConeMap::from_rational({{Rat(2), Rat(1)}, {Rat(1), Rat(1)}}, "F");
    DVec v = pf_eigenvector(fib, quad);
    CHECK(v[0] / v[1] == doctest::Approx(kGolden).epsilon(1e-7));
}

TEST_CASE("cone validation: salience and full dimension") {
    // a half-plane is not salient: generators e1, -e1, e2
    std::vector<QVec> bad = {{Rat(1), Rat(0)}, {Rat(-1), Rat(0)}, {Rat(0), Rat(1)}};
    CHECK_THROWS_AS(ConeSpec::polyhedral_generators(bad).validate(), Error);
    // a ray in R^2 does not span
    std::vector<QVec> thin = {{Rat(1), Rat(1)}};
    CHECK_THROWS_AS(ConeSpec::polyhedral_generators(thin).validate(), Error);
    // the quadrant in half-space form is fine
    std::vector<QVec> hs = {{Rat(1), Rat(0)}, {Rat(0), Rat(1)}};
    CHECK_NOTHROW(ConeSpec::polyhedral_halfspaces(hs).validate());
}

TEST_CASE("common_eigenvectors: identity family on the orthant gives extreme rays") {
    CommutingFamily fam;
    fam.cone = ConeSpec::orthant(2);
    fam.maps.push_back(ConeMap::from_rational(QMat::identity(2), "id"));
    auto chars = common_eigenvectors(fam);
    REQUIRE(chars.size() == 2);
    for (const auto& ch : chars) CHECK(ch.values[0] == doctest::Approx(1.0));
    // rays e1, e2 in some order
    bool e1 = false, e2 = false;
    for (const auto& ch : chars) {
        if (ch.eigenvector[0] > 0.5 && std::fabs(ch.eigenvector[1]) < 1e-9) e1 = true;
        if (ch.eigenvector[1] > 0.5 && std::fabs(ch.eigenvector[0]) < 1e-9) e2 = true;
    }
    CHECK(e1);
    CHECK(e2);
}

TEST_CASE("common_eigenvectors: powers share eigenvectors") {
    CommutingFamily fam;
    fam.cone = ConeSpec::orthant(2);
    QMat a = {{Rat(2), Rat(1)}, {Rat(1), Rat(1)}};
    fam.maps.push_back(ConeMap::from_rational(a, "A"));
    fam.maps.push_back(ConeMap::from_rational(a * a, "A2"));
    auto chars = common_eigenvectors(fam);
    REQUIRE(chars.size() == 1);
    CHECK(chars[0].values[0] == doctest::Approx(kRhoFib).epsilon(1e-10));
    CHECK(chars[0].values[1] == doctest::Approx(kRhoFib * kRhoFib).epsilon(1e-10));
    CHECK(chars[0].eigenvector[1] / chars[0].eigenvector[0] ==
          doctest::Approx(1.0 / kGolden).epsilon(1e-9));
}

TEST_CASE("common_eigenvectors on polyhedral cones: branches die outside the cone") {
    // triangle cone spanned by (1,0) and (1,2); M fixes the first ray and its
    // second eigenvector points out of the cone
    std::vector<QVec> gens = {{Rat(1), Rat(0)}, {Rat(1), Rat(2)}};
    CommutingFamily fam;
    fam.cone = ConeSpec::polyhedral_generators(gens);
    QMat m = {{Rat(3), Rat(1)}, {Rat(0), Rat(2)}};
    fam.maps.push_back(ConeMap::from_rational(m, "M"));
    auto chars = common_eigenvectors(fam);
    REQUIRE(chars.size() == 1);
    CHECK(chars[0].values[0] == doctest::Approx(3.0).epsilon(1e-10));
    CHECK(chars[0].eigenvector[0] == doctest::Approx(1.0));
    CHECK(std::fabs(chars[0].eigenvector[1]) < 1e-9);

    // the same family on the quadrant in half-space form
    CommutingFamily hf;
    hf.cone = ConeSpec::polyhedral_halfspaces({{Rat(1), Rat(0)}, {Rat(0), Rat(1)}});
    hf.maps.push_back(ConeMap::from_rational({{Rat(2), Rat(1)}, {Rat(1), Rat(1)}}, "F"));
    auto hchars = common_eigenvectors(hf);
    REQUIRE(hchars.size() == 1);
    CHECK(hchars[0].values[0] == doctest::Approx(kRhoFib).epsilon(1e-9));
}

TEST_CASE("common_eigenvectors: the psd(3) companion family has three characters") {
    CommutingFamily fam;
    fam.cone = ConeSpec::psd(3);
    QMat c = companion_c();
    QMat cpi = c;
    for (int i = 0; i < 3; ++i) cpi(i, i) += 1;
    fam.maps.push_back(ConeMap::congruence_map(c, "A"));
    fam.maps.push_back(ConeMap::congruence_map(cpi, "B"));
    auto chars = common_eigenvectors(fam);
    REQUIRE(chars.size() == 3);

    auto roots = cubic_roots_oracle();
    // chi(A) = mu_i^2 sorted descending; chi(B) = (mu_i + 1)^2 paired accordingly
    std::array<double, 3> chi_a{roots[0] * roots[0], roots[1] * roots[1], roots[2] * roots[2]};
    std::array<double, 3> chi_b{(roots[0] + 1) * (roots[0] + 1), (roots[1] + 1) * (roots[1] + 1),
                                (roots[2] + 1) * (roots[2] + 1)};
    for (int i = 0; i < 3; ++i) {
        CHECK(chars[i].values[0] == doctest::Approx(chi_a[i]).epsilon(1e-9));
        CHECK(chars[i].values[1] == doctest::Approx(chi_b[i]).epsilon(1e-9));
    }
    // frozen reference values (bisection oracle, squared)
    CHECK(chars[0].values[0] == doctest::Approx(3.5320888862379562).epsilon(1e-9));
    CHECK(chars[1].values[0] == doctest::Approx(2.3472963553338611).epsilon(1e-9));
    CHECK(chars[2].values[0] == doctest::Approx(0.12061475842818324).epsilon(1e-9));
    CHECK(chars[0].values[1] == doctest::Approx(8.2908593693815895).epsilon(1e-9));
    CHECK(chars[1].values[1] == doctest::Approx(0.28311858285794872).epsilon(1e-9));
    CHECK(chars[2].values[1] == doctest::Approx(0.42602204776046182).epsilon(1e-9));
}

TEST_CASE("character_structure_report on the three companion characters") {
    CommutingFamily fam;
    fam.cone = ConeSpec::psd(3);
    QMat c = companion_c();
    QMat cpi = c;
    for (int i = 0; i < 3; ++i) cpi(i, i) += 1;
    fam.maps.push_back(ConeMap::congruence_map(c, "A"));
    fam.maps.push_back(ConeMap::congruence_map(cpi, "B"));
    auto chars = common_eigenvectors(fam);
    REQUIRE(chars.size() == 3);
    std::vector<double> rhos{spectral_radius(fam.maps[0]).rho, spectral_radius(fam.maps[1]).rho};
    auto rep = character_structure_report(chars, rhos);
    CHECK(rep.pairwise_distinct);
    CHECK(rep.pairwise_noncollinear);
    CHECK(rep.linearly_independent);
    CHECK(rep.equivalences_agree);
    CHECK(rep.rho_achiever[0] == 0);  // chi_1(A) = rho(A)
    CHECK(rep.rho_achiever[1] == 0);  // chi_1(B) = rho(B): (mu_1+1)^2 is the largest
}

TEST_CASE("character_structure_report: single and duplicated characters") {
    Character ch;
    ch.values = {2.0};
    ch.eigenvector = {1.0, 0.5};
    auto rep1 = character_structure_report({ch}, {2.0});
    CHECK(rep1.pairwise_distinct);
    CHECK(rep1.equivalences_agree);
    CHECK(rep1.rho_achiever[0] == 0);

    auto rep2 = character_structure_report({ch, ch}, {2.0});
    CHECK_FALSE(rep2.pairwise_distinct);
    CHECK_FALSE(rep2.pairwise_noncollinear);
    CHECK_FALSE(rep2.linearly_independent);
    CHECK(rep2.equivalences_agree);
}

TEST_CASE("errors: NotCommuting and ConeNotPreserved") {
    CommutingFamily fam;
    fam.cone = ConeSpec::orthant(2);
    fam.maps.push_back(ConeMap::from_rational({{Rat(1), Rat(1)}, {Rat(0), Rat(1)}}, "U"));
    fam.maps.push_back(ConeMap::from_rational({{Rat(1), Rat(0)}, {Rat(1), Rat(1)}}, "L"));
    CHECK_THROWS_AS(common_eigenvectors(fam), Error);

    CommutingFamily fam2;
    fam2.cone = ConeSpec::orthant(2);
    fam2.maps.push_back(ConeMap::from_rational({{Rat(1), Rat(-5)}, {Rat(0), Rat(1)}}, "neg"));
    CHECK_THROWS_AS(common_eigenvectors(fam2), Error);
}

TEST_CASE("property: cone invariance is preserved by composition") {
    std::mt19937 rng(12345);
    ConeSpec orth = ConeSpec::orthant(3);
    for (int trial = 0; trial < 20; ++trial) {
        QMat a(3, 3), b(3, 3);
        for (auto& v : a.a) v = Rat(static_cast<int>(rng() % 4));
        for (auto& v : b.a) v = Rat(static_cast<int>(rng() % 4));
        ConeMap ma = ConeMap::from_rational(a), mb = ConeMap::from_rational(b);
        REQUIRE(ma.preserves(orth, 1e-9));
        REQUIRE(mb.preserves(orth, 1e-9));
        ConeMap comp = ConeMap::from_rational(a * b);
        // composite maps sampled cone generators into the cone
        for (int i = 0; i < 3; ++i) {
            DVec e(3, 0.0);
            e[i] = 1.0;
            CHECK(orth.contains(comp.matrix * e, 1e-9));
        }
    }
}

TEST_CASE("property: lemma-of-three-equivalences agrees on randomized shared-eigenbasis families") {
    std::mt19937 rng(777);
    for (int trial = 0; trial < 100; ++trial) {
        // diagonal commuting family on the orthant with pairwise-distinct
        // per-coordinate value tuples
        int d = 3 + static_cast<int>(rng() % 2);
        int nmaps = 2;
        std::vector<QMat> mats(nmaps, QMat(d, d));
        bool distinct_tuples = false;
        while (!distinct_tuples) {
            for (int j = 0; j < nmaps; ++j)
                for (int i = 0; i < d; ++i) mats[j](i, i) = Rat(1 + static_cast<int>(rng() % 6));
            distinct_tuples = true;
            for (int i = 0; i < d && distinct_tuples; ++i)
                for (int k = i + 1; k < d; ++k) {
                    bool same = true;
                    for (int j = 0; j < nmaps; ++j)
                        if (mats[j](i, i) != mats[j](k, k)) same = false;
                    if (same) distinct_tuples = false;
                }
        }
        CommutingFamily fam;
        fam.cone = ConeSpec::orthant(d);
        for (int j = 0; j < nmaps; ++j) fam.maps.push_back(ConeMap::from_rational(mats[j]));
        auto chars = common_eigenvectors(fam);
        REQUIRE(static_cast<int>(chars.size()) == d);
        std::vector<double> rhos;
        for (const auto& m : fam.maps) rhos.push_back(spectral_radius(m).rho);
        auto rep = character_structure_report(chars, rhos);
        CHECK(rep.equivalences_agree);
        CHECK(rep.pairwise_distinct);
        for (int g = 0; g < nmaps; ++g) CHECK(rep.rho_achiever[g] >= 0);
    }
}

TEST_CASE("property: oracle equivalence with brute-force eigendecomposition") {
    // families of simultaneously diagonalizable rational matrices preserving
    // the orthant: polynomials in one nonnegative matrix
    std::mt19937 rng(424242);
    int done = 0;
    while (done < 12) {
        int d = 2 + static_cast<int>(rng() % 2);
        QMat m(d, d);
        for (auto& v : m.a) v = Rat(static_cast<int>(rng() % 3));
        for (int i = 0; i < d; ++i) m(i, i) += Rat(1 + static_cast<int>(rng() % 3));
        Poly p = char_poly(m);
        if (squarefree_part(p).degree() != d) continue;  // want distinct eigenvalues
        ++done;

        CommutingFamily fam;
        fam.cone = ConeSpec::orthant(d);
        fam.maps.push_back(ConeMap::from_rational(m, "M"));
        fam.maps.push_back(ConeMap::from_rational(m * m, "M2"));
        auto chars = common_eigenvectors(fam);

        // brute force: real eigenvectors of M lying in the orthant up to sign
        DMat md = to_double(m);
        int expected = 0;
        std::vector<DVec> oracle_vs;
        for (double lam : real_roots(p)) {
            DMat sh = md;
            for (int i = 0; i < d; ++i) sh(i, i) -= lam;
            DMat ns = nullspace(sh, 1e-8 * std::max(1.0, max_abs(md)));
            if (ns.cols != 1) continue;
            DVec v(d);
            for (int i = 0; i < d; ++i) v[i] = ns(i, 0);
            bool nonneg = true, nonpos = true;
            for (double x : v) {
                if (x < -1e-8) nonneg = false;
                if (x > 1e-8) nonpos = false;
            }
            if (nonneg || nonpos) {
                ++expected;
                if (nonpos)
                    for (auto& x : v) x = -x;
                oracle_vs.push_back(v);
            }
        }
        REQUIRE(static_cast<int>(chars.size()) == expected);
        for (const auto& ov : oracle_vs) {
            bool matched = false;
            for (const auto& ch : chars) {
                double c = dot(ov, ch.eigenvector) / (norm2(ov) * norm2(ch.eigenvector));
                if (std::fabs(c - 1.0) < 1e-6) matched = true;
            }
            CHECK(matched);
        }
    }
}

TEST_CASE("property: every produced character satisfies its eigenequations") {
    CommutingFamily fam;
    fam.cone = ConeSpec::psd(3);
    QMat c = companion_c();
    QMat cpi = c;
    for (int i = 0; i < 3; ++i) cpi(i, i) += 1;
    fam.maps.push_back(ConeMap::congruence_map(c, "A"));
    fam.maps.push_back(ConeMap::congruence_map(cpi, "B"));
    for (const auto& ch : common_eigenvectors(fam)) {
        for (size_t j = 0; j < fam.maps.size(); ++j) {
            DVec img = fam.maps[j].matrix * ch.eigenvector;
            DVec resid(img.size());
            for (size_t i = 0; i < img.size(); ++i)
                resid[i] = img[i] - ch.values[j] * ch.eigenvector[i];
            CHECK(norm2(resid) <= 1e-9 * std::max(1.0, norm2(ch.eigenvector) *
                                                            max_abs(fam.maps[j].matrix)));
        }
        CHECK(fam.cone.contains(ch.eigenvector, 1e-9));
    }
}

TEST_CASE("birkhoff consistency: pf eigenvalue matches the spectral radius") {
    ConeSpec orth = ConeSpec::orthant(3);
    QMat a = {{Rat(1), Rat(2), Rat(0)}, {Rat(0), Rat(2), Rat(1)}, {Rat(1), Rat(0), Rat(3)}};
    ConeMap m = ConeMap::from_rational(a);
    auto sr = spectral_radius(m);
    DVec v = pf_eigenvector(m, orth);
    DVec img = m.matrix * v;
    // Rayleigh quotient at the returned vector
    double lam = dot(img, v) / dot(v, v);
    CHECK(lam == doctest::Approx(sr.rho).epsilon(1e-9));
}
