#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "canht/wehler.hpp"

using namespace canht;
using namespace canht::wehler;

namespace {

// frozen fixture: seed chosen so the base orbit is long and clean
constexpr unsigned kFixtureSeed = 1;

SurfacePoint base_point() {
    SurfacePoint p;
    p.x = {Int(1), Int(1), Int(1)};
    p.y = {Int(1), Int(-1), Int(1)};
    return p;
}

WehlerSurface fixture() { return make_fixture_surface(kFixtureSeed, base_point()); }

}  // namespace

TEST_CASE("fixture construction puts the base point on a smooth locus") {
    WehlerSurface s = fixture();
    SurfacePoint p = base_point();
    CHECK(s.contains(p));
    CHECK(s.smooth_at(p));
    CHECK(sgn(s.eval_l(p)) == 0);
    CHECK(sgn(s.eval_q(p)) == 0);
}

TEST_CASE("contains: projective invariance and generic rejection") {
    WehlerSurface s = fixture();
    SurfacePoint p = base_point();
    SurfacePoint scaled = p;
    for (auto& c : scaled.x) c *= 7;
    for (auto& c : scaled.y) c *= -3;
    scaled.normalize();
    CHECK(scaled == p);  // normalization removes content and sign
    CHECK(s.contains(scaled));

    SurfacePoint off = p;
    off.x = {Int(1), Int(2), Int(5)};
    off.normalize();
    CHECK_FALSE(s.contains(off));
}

TEST_CASE("ns action matrices: involutions and isometries of the gram") {
    QMat gram = ns_gram();
    for (int which : {1, 2}) {
        QMat m = ns_action(which);
        CHECK(m * m == QMat::identity(2));
        CHECK(m.transposed() * gram * m == gram);
    }
    QMat s1 = ns_action(1), s2 = ns_action(2);
    // phi = sigma2 . sigma1 pulls back by sigma1* sigma2*
    QMat phi = s1 * s2;
    CHECK(trace(phi) == Rat(14));
    CHECK(det(phi) == Rat(1));
    // sigma1*: D1 -> D1, D2 -> 4 D1 - D2 (columns are images)
    CHECK(s1(0, 0) == Rat(1));
    CHECK(s1(1, 0) == Rat(0));
    CHECK(s1(0, 1) == Rat(4));
    CHECK(s1(1, 1) == Rat(-1));
}

TEST_CASE("eigendivisors: characters, boundary classes, certificates") {
    K3Characters k = eigendivisors_k3();
    double s3 = std::sqrt(3.0);
    CHECK(k.lambda1 == doctest::Approx(7.0 + 4.0 * s3).epsilon(1e-15));
    CHECK(k.chi[0] * k.chi[1] == doctest::Approx(1.0).epsilon(1e-14));

    // self-intersection 0 on the nef boundary; positive pairing; scaling
    auto self_int = [](const std::array<double, 2>& v) {
        return 2 * v[0] * v[0] + 8 * v[0] * v[1] + 2 * v[1] * v[1];
    };
    CHECK(self_int(k.classes[0]) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(self_int(k.classes[1]) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(k.d_plus_dot_d_minus == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
    for (const auto& cls : k.classes)
        CHECK(6.0 * (cls[0] + cls[1]) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(k.no_orthogonal_minus_two_class);
}

TEST_CASE("sigma is an exact involution along the fixture orbit") {
    WehlerSurface s = fixture();
    SurfacePoint p = base_point();
    for (int step = 0; step < 6; ++step) {
        int which = step % 2 == 0 ? 1 : 2;
        SigmaResult r = sigma(s, p, which);
        REQUIRE(r.status == FiberStatus::Ok);
        CHECK(s.contains(r.point));
        SigmaResult back = sigma(s, r.point, which);
        REQUIRE(back.status == FiberStatus::Ok);
        CHECK(back.point == p);
        CHECK_FALSE(r.point == p);
        p = r.point;
    }
}

TEST_CASE("sigma flags tangent and degenerate fibers as exceptional") {
    // hand-built degenerate surfaces: L = x0 y2, so the sigma_1 fiber over
    // x = (1,0,0) is the line y2 = 0
    WehlerSurface s;
    s.l = QMat(3, 3);
    s.l(0, 2) = Rat(1);
    s.q = QMat(6, 6);
    SurfacePoint p;
    p.x = {Int(1), Int(0), Int(0)};
    p.y = {Int(0), Int(1), Int(0)};

    // Q = x0^2 y0^2 restricts to s^2 on the line: double root at p
    s.q(0, 0) = Rat(1);
    REQUIRE(s.contains(p));
    CHECK(sigma(s, p, 1).status == FiberStatus::Tangent);

    // Q = x0^2 y0 y2 vanishes identically on the line: positive-dimensional fiber
    s.q(0, 0) = Rat(0);
    s.q(0, 2) = Rat(1);
    REQUIRE(s.contains(p));
    CHECK(sigma(s, p, 1).status == FiberStatus::Degenerate);

    // a fixed point is exactly a double root: same surface, the tangent case
    s.q(0, 2) = Rat(0);
    s.q(0, 0) = Rat(1);
    Orbit orb = orbit(s, p, 3);
    CHECK(orb.truncated);
    CHECK(orb.stop_reason == FiberStatus::Tangent);
}

TEST_CASE("sigma rejects points off the surface") {
    WehlerSurface s = fixture();
    SurfacePoint off;
    off.x = {Int(1), Int(0), Int(0)};
    off.y = {Int(1), Int(0), Int(0)};
    if (!s.contains(off)) CHECK_THROWS_AS(sigma(s, off, 1), Error);
}

TEST_CASE("height: additivity and factor dependence") {
    SurfacePoint p;
    p.x = {Int(1), Int(0), Int(0)};
    p.y = {Int(0), Int(1), Int(0)};
    CHECK(height(p, 1.0, 1.0) == doctest::Approx(0.0));
    SurfacePoint q;
    q.x = {Int(3), Int(1), Int(0)};
    q.y = {Int(1), Int(7), Int(2)};
    CHECK(height(q, 1.0, 0.0) == doctest::Approx(std::log(3.0)).epsilon(1e-12));
    CHECK(height(q, 0.0, 1.0) == doctest::Approx(std::log(7.0)).epsilon(1e-12));
    CHECK(height(q, 1.0, 1.0) ==
          doctest::Approx(height(q, 1.0, 0.0) + height(q, 0.0, 1.0)).epsilon(1e-12));
}

TEST_CASE("orbit heights grow like lambda1 and the functoriality defect stays bounded") {
    WehlerSurface s = fixture();
    Orbit orb = orbit(s, base_point(), 4);
    REQUIRE(orb.steps.size() >= 4);
    K3Characters k = eigendivisors_k3();
    // growth increments of the ample height vs the transform defect
    double max_defect = 0.0, min_increment = 1e300;
    for (size_t m = 0; m + 1 < orb.steps.size(); ++m) {
        double defect =
            std::fabs(orb.steps[m + 1].h_plus - k.lambda1 * orb.steps[m].h_plus);
        max_defect = std::max(max_defect, defect);
        if (m >= 1)
            min_increment = std::min(min_increment,
                                     orb.steps[m + 1].h_ample - orb.steps[m].h_ample);
    }
    CHECK(min_increment > 0);
    CHECK(max_defect < 0.1 * min_increment * k.lambda1);
    // algebraic-equivalence-style bound: defect / sqrt(1 + h) stays bounded
    for (size_t m = 0; m + 1 < orb.steps.size(); ++m) {
        double defect =
            std::fabs(orb.steps[m + 1].h_plus - k.lambda1 * orb.steps[m].h_plus);
        CHECK(defect / std::sqrt(1.0 + orb.steps[m].h_ample) < 40.0);
    }
}

TEST_CASE("enumerate_points: box semantics, membership, determinism, parallel equality") {
    WehlerSurface s = fixture();
    auto pts = enumerate_points(s, std::log(4.0));
    for (const auto& p : pts) {
        CHECK(s.contains(p));
        for (const auto& c : p.x) CHECK(abs(c) <= 4);
        for (const auto& c : p.y) CHECK(abs(c) <= 4);
    }
    auto again = enumerate_points(s, std::log(4.0));
    CHECK(pts == again);
    auto serial = enumerate_points_serial(s, std::log(4.0));
    CHECK(pts == serial);
    // bound 0: coordinates in {-1, 0, 1}
    for (const auto& p : enumerate_points(s, 0.0)) {
        CHECK(s.contains(p));
        for (const auto& c : p.x) CHECK(abs(c) <= 1);
    }
    CHECK_THROWS_AS(enumerate_points(s, 20.0), Error);  // budget guard
}

TEST_CASE("involution and membership hold across fixture seeds") {
    for (unsigned seed : {2u, 3u, 5u, 11u}) {
        WehlerSurface s = make_fixture_surface(seed, base_point());
        SurfacePoint p = base_point();
        REQUIRE(s.contains(p));
        for (int step = 0; step < 4; ++step) {
            int which = step % 2 == 0 ? 1 : 2;
            SigmaResult r = sigma(s, p, which);
            if (r.status != FiberStatus::Ok) break;  // exceptional fiber: allowed
            CHECK(s.contains(r.point));
            SigmaResult back = sigma(s, r.point, which);
            REQUIRE(back.status == FiberStatus::Ok);
            CHECK(back.point == p);
            p = r.point;
        }
    }
}

TEST_CASE("the boundary classes sum to the scaled ample class") {
    K3Characters k = eigendivisors_k3();
    // with intersection-1 scaling, D+ + D- = (D1 + D2) / 6
    CHECK(k.classes[0][0] + k.classes[1][0] == doctest::Approx(1.0 / 6.0).epsilon(1e-13));
    CHECK(k.classes[0][1] + k.classes[1][1] == doctest::Approx(1.0 / 6.0).epsilon(1e-13));
}

TEST_CASE("orbit truncates gracefully at the digit budget") {
    WehlerSurface s = fixture();
    Orbit orb = orbit(s, base_point(), 50, 60);
    CHECK(orb.truncated);
    CHECK(orb.steps.size() < 51);
}

TEST_CASE("find_periodic returns only verified periodic points within the box") {
    WehlerSurface s = fixture();
    auto periodic = find_periodic(s, std::log(3.0), 6);
    for (const auto& pp : periodic) {
        Orbit orb = orbit(s, pp.point, pp.period);
        REQUIRE(static_cast<int>(orb.steps.size()) == pp.period + 1);
        CHECK(orb.steps.back().point == pp.point);
        CHECK(height(pp.point, 1.0, 1.0) <= std::log(3.0) * 2 + 1e-9);
    }
    // the base point's orbit grows: it must not be classified periodic
    for (const auto& pp : periodic) CHECK_FALSE(pp.point == base_point());
}
