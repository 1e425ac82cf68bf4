// Serial vs OpenMP timings for the three enumerative kernels, with result
// equality checked so the parallel paths stay honest.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>

#include "canht/lattice.hpp"
#include "canht/wehler.hpp"

using namespace canht;

namespace {

template <class F>
double time_ms(F&& f) {
    auto t0 = std::chrono::steady_clock::now();
    f();
    auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration<double, std::milli>(t1 - t0).count();
}

void report(const char* name, double serial_ms, double parallel_ms, bool equal) {
    std::printf("%-28s serial %9.1f ms   parallel %9.1f ms   speedup %5.2fx   results %s\n", name,
                serial_ms, parallel_ms, serial_ms / std::max(parallel_ms, 1e-9),
                equal ? "equal" : "DIFFER");
}

}  // namespace

int main() {
    // box search over a synthetic 6-character, 5-generator log matrix
    lattice::LogCharacterMatrix l;
    l.l = DMat(6, 5);
    unsigned state = 12345;
    auto next = [&]() { state = state * 1664525u + 1013904223u; return (state >> 8) % 1000 / 500.0 - 1.0; };
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 5; ++j) l.l(i, j) = next();
    for (int j = 0; j < 5; ++j) {  // push the columns into the zero-sum hyperplane
        double s = 0;
        for (int i = 0; i < 6; ++i) s += l.l(i, j);
        for (int i = 0; i < 6; ++i) l.l(i, j) -= s / 6.0;
    }
    l.labels = {"g1", "g2", "g3", "g4", "g5"};

    lattice::GroupWord ws, wp;
    double ts = time_ms([&] { ws = lattice::find_distinguished_serial(l, 0, 4); });
    double tp = time_ms([&] { wp = lattice::find_distinguished(l, 0, 4, true); });
    report("distinguished box search", ts, tp, ws.exponents == wp.exponents);

    std::vector<double> rs, rp;
    ts = time_ms([&] { rs = lattice::bounded_spectral_radii_serial(3, 2.0, 40000000); });
    tp = time_ms([&] { rp = lattice::bounded_spectral_radii(3, 2.0, 40000000, true); });
    report("polynomial enumeration", ts, tp, rs == rp);

    wehler::SurfacePoint base;
    base.x = {Int(1), Int(1), Int(1)};
    base.y = {Int(1), Int(-1), Int(1)};
    wehler::WehlerSurface s = wehler::make_fixture_surface(7, base);
    std::vector<wehler::SurfacePoint> ps, pp;
    ts = time_ms([&] { ps = wehler::enumerate_points_serial(s, std::log(12.0), 40000000); });
    tp = time_ms([&] { pp = wehler::enumerate_points(s, std::log(12.0), 40000000, true); });
    report("surface point enumeration", ts, tp, ps == pp);
    return 0;
}
