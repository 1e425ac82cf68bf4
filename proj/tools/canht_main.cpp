// canht: canonical-height experiments on exact arithmetic testbeds.
//
// Subcommands: verify, characters, distinguished, orbit, height, canheight,
// classify, alpha, counting, enumerate, periodic.  Every run writes a
// manifest (tool version, conventions, budgets, seed) plus machine-readable
// records; outputs are byte-identical for identical configs and seeds.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "canht/canheight.hpp"
#include "canht/jsonio.hpp"

using namespace canht;
using io::json;

namespace {

constexpr const char* kVersion = "0.1.0";

struct RunContext {
    std::string out_dir = "run_out";
    long seed = 0;
    int iters = 8;
    int m_max = 5;
    int m_budget = 200;
    int bound = 3;
    int period_bound = 8;
    double height_bound = 1.0;
    size_t digit_budget = 1000000;
    std::string command;
    json options = json::object();
};

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
}

void emit(const RunContext& ctx, const json& records, const std::string& csv = "") {
    std::filesystem::create_directories(ctx.out_dir);
    json manifest{{"tool", "canht"},
                  {"version", kVersion},
                  {"command", ctx.command},
                  {"options", ctx.options},
                  {"seed", ctx.seed},
                  {"conventions",
                   {{"height", "hhat = lim 4^-m h(x(2^m P)); no extra 1/2"},
                    {"intersection", "n! * mixed_discriminant"},
                    {"eigendivisor_scale", "unit trace"},
                    {"k3_class_scale", "intersection 1 against D1 + D2"}}},
                  {"budgets",
                   {{"iters", ctx.iters},
                    {"m_max", ctx.m_max},
                    {"m_budget", ctx.m_budget},
                    {"bound", ctx.bound},
                    {"period_bound", ctx.period_bound},
                    {"height_bound", ctx.height_bound},
                    {"digit_budget", ctx.digit_budget}}}};
    write_file(ctx.out_dir + "/manifest.json", manifest.dump(2) + "\n");
    write_file(ctx.out_dir + "/records.json", records.dump(2) + "\n");
    if (!csv.empty()) write_file(ctx.out_dir + "/table.csv", csv);
    std::cout << records.dump(2) << "\n";
}

int fail_config(const std::string& field, const std::string& message) {
    json err{{"error", {{"code", "MalformedConfig"}, {"field", field}, {"message", message}}}};
    std::cout << err.dump(2) << "\n";
    return 2;
}

int fail_module(const Error& e) {
    json err{{"error", {{"code", error_code_name(e.code())}, {"message", e.what()}}}};
    std::cout << err.dump(2) << "\n";
    return 1;
}

canon::AbelianSystem build_abelian(const io::SystemFile& f, const RunContext& ctx) {
    canon::AbelianSystem sys = canon::make_abelian_system(*f.curve, f.generators, ctx.bound, ctx.iters);
    sys.digit_budget = ctx.digit_budget;
    return sys;
}

canon::WehlerSystem build_wehler(const io::SystemFile& f, const RunContext& ctx) {
    return canon::WehlerSystem{*f.surface, wehler::eigendivisors_k3(), ctx.m_max, ctx.digit_budget};
}

std::vector<int> parse_word(const std::string& g, const io::SystemFile& f) {
    if (f.kind == "wehler") {
        if (g.empty() || g == "phi") return {1};
        if (g == "phi^-1" || g == "-phi") return {-1};
        return {std::stoi(g)};
    }
    std::vector<int> word(f.generators.size(), 0);
    for (size_t j = 0; j < f.generators.size(); ++j)
        if (f.generators[j].label == g) {
            word[j] = 1;
            return word;
        }
    // comma-separated exponents
    std::stringstream ss(g);
    std::string tok;
    size_t idx = 0;
    while (std::getline(ss, tok, ',')) {
        if (idx >= word.size()) throw io::ConfigError("g", "too many exponents in '" + g + "'");
        word[idx++] = std::stoi(tok);
    }
    if (idx != word.size()) throw io::ConfigError("g", "expected " + std::to_string(word.size()) +
                                                           " exponents or a generator label");
    return word;
}

wehler::SurfacePoint parse_surface_point(const std::string& spec, const io::SystemFile& f) {
    if (spec == "base" || spec.empty()) {
        if (!f.base_point) throw io::ConfigError("point", "fixture has no base_point");
        return *f.base_point;
    }
    auto it = f.points.find(spec);
    if (it != f.points.end()) return it->second;
    if (std::filesystem::exists(spec)) {
        std::ifstream in(spec);
        json j;
        in >> j;
        wehler::SurfacePoint p = io::surface_point_from_json(j);
        if (!f.surface->contains(p)) throw io::ConfigError("point", "point is not on the surface");
        return p;
    }
    // inline "x0,x1,x2;y0,y1,y2"
    auto semi = spec.find(';');
    if (semi == std::string::npos)
        throw io::ConfigError("point", "unknown point '" + spec + "'");
    wehler::SurfacePoint p;
    std::stringstream sx(spec.substr(0, semi)), sy(spec.substr(semi + 1));
    std::string tok;
    for (int i = 0; i < 3; ++i) {
        if (!std::getline(sx, tok, ',')) throw io::ConfigError("point", "need 3 x-coordinates");
        p.x[i] = Int(tok);
    }
    for (int i = 0; i < 3; ++i) {
        if (!std::getline(sy, tok, ',')) throw io::ConfigError("point", "need 3 y-coordinates");
        p.y[i] = Int(tok);
    }
    p.normalize();
    if (!f.surface->contains(p)) throw io::ConfigError("point", "point is not on the surface");
    return p;
}

std::vector<ell::PointQ> parse_tuple(const std::string& spec, const io::SystemFile& f) {
    auto it = f.tuples.find(spec);
    if (it != f.tuples.end()) return it->second;
    if (std::filesystem::exists(spec)) {
        // a JSON file holding an array of point specs ("O" or {x, y})
        std::ifstream in(spec);
        json j;
        in >> j;
        std::vector<ell::PointQ> tuple;
        for (const auto& pj : j) {
            ell::PointQ p = io::point_from_json(pj);
            if (!p.infinity && !ell::on_curve(*f.curve, p))
                throw io::ConfigError("point", "tuple point is not on the curve");
            tuple.push_back(p);
        }
        if (static_cast<int>(tuple.size()) != f.generators[0].dim())
            throw io::ConfigError("point", "tuple length must match the dimension");
        return tuple;
    }
    throw io::ConfigError("point", "unknown tuple '" + spec + "'");
}

json index_height_json(const canon::IndexHeight& ih) {
    return json{{"value", ih.value},
                {"tail", ih.budget_exceeded ? json("inf") : json(ih.tail)},
                {"m_used", ih.m_used}};
}

json estimate_json(const canon::CanonicalHeightEstimate& est) {
    json per = json::array();
    for (const auto& ih : est.per_index) per.push_back(index_height_json(ih));
    return json{{"value", est.value}, {"tail", est.tail},       {"m_used", est.m_used},
                {"per_index", per},   {"h_D", est.h_d},         {"defect", est.defect}};
}

// ---------------------------------------------------------------- verify ---

int run_verify(const io::SystemFile& f, const RunContext& ctx) {
    json checks = json::array();
    bool all_ok = true;
    auto check = [&](const std::string& name, bool ok, const json& detail = {}) {
        checks.push_back(json{{"check", name}, {"pass", ok}, {"detail", detail}});
        std::cerr << (ok ? "[ok]   " : "[FAIL] ") << name << "\n";
        all_ok &= ok;
    };

    if (f.kind == "abelian") {
        canon::AbelianSystem sys = build_abelian(f, ctx);
        int n = sys.dim();
        check("characters.count", static_cast<int>(sys.eig.chars.size()) == n);
        check("characters.distinct", sys.eig.certs.distinct);
        check("characters.independent", sys.eig.certs.independent);
        check("entropy.box", sys.eig.certs.entropy_ok);
        check("regulator.nonzero", sys.eig.certs.regulator > 1e-9,
              json{{"regulator", sys.eig.certs.regulator}});
        check("D.positive_definite", sys.eig.certs.min_eigenvalue_of_sum > 1e-9,
              json{{"min_eigenvalue", sys.eig.certs.min_eigenvalue_of_sum}});
        check("D.intersection_positive", sys.eig.certs.intersection > 0,
              json{{"intersection", sys.eig.certs.intersection}});
        check("log_chars.zero_sum", sys.log_chars.column_sums_vanish());
        bool prod_ok = true;
        for (int ea = -3; ea <= 3 && prod_ok; ++ea)
            for (int eb = -3; eb <= 3; ++eb) {
                double prod = 1.0;
                for (int i = 0; i < n; ++i)
                    prod *= canon::character_on_word(sys, i, {ea, eb});
                if (std::fabs(prod - 1.0) > 1e-9) { prod_ok = false; break; }
            }
        check("characters.product_one", prod_ok);
        json words = json::array();
        for (const auto& w : sys.distinguished) words.push_back(w.exponents);
        check("distinguished.found", static_cast<int>(sys.distinguished.size()) == n,
              json{{"words", words}});
        for (const auto& [name, tuple] : f.tuples) {
            canon::AbelianPoint pt{tuple};
            canon::CanonicalHeightEstimate est =
                canon::canonical_height_G(canon::DynamicalSystem{sys}, canon::SystemPoint{pt});
            bool nonneg = true;
            for (const auto& ih : est.per_index)
                if (ih.value < -ih.tail - 1e-12) nonneg = false;
            check("heights.nonnegative." + name, nonneg, estimate_json(est));
        }
    } else {
        canon::WehlerSystem sys = build_wehler(f, ctx);
        QMat s1 = wehler::ns_action(1), s2 = wehler::ns_action(2), gram = wehler::ns_gram();
        check("ns.involutions", s1 * s1 == QMat::identity(2) && s2 * s2 == QMat::identity(2));
        check("ns.isometries", s1.transposed() * gram * s1 == gram &&
                                   s2.transposed() * gram * s2 == gram);
        double lam = wehler::eigendivisors_k3().lambda1;
        check("ns.lambda1", std::fabs(lam - (7.0 + 4.0 * std::sqrt(3.0))) < 1e-12,
              json{{"lambda1", lam}});
        check("ns.nef_big", wehler::eigendivisors_k3().d_plus_dot_d_minus > 0);
        check("ns.ample_no_minus_two", wehler::eigendivisors_k3().no_orthogonal_minus_two_class);
        std::vector<wehler::SurfacePoint> pts =
            wehler::enumerate_points(*f.surface, ctx.height_bound);
        bool inv_ok = true, member_ok = true, smooth_ok = true;
        int checked = 0;
        std::vector<wehler::SurfacePoint> sample = pts;
        if (f.base_point) sample.push_back(*f.base_point);
        for (const auto& p : sample) {
            member_ok &= f.surface->contains(p);
            smooth_ok &= f.surface->smooth_at(p);
            for (int which : {1, 2}) {
                wehler::SigmaResult r = wehler::sigma(*f.surface, p, which);
                if (r.status != wehler::FiberStatus::Ok) continue;
                wehler::SigmaResult back = wehler::sigma(*f.surface, r.point, which);
                inv_ok &= back.status == wehler::FiberStatus::Ok && back.point == p;
                ++checked;
            }
        }
        check("surface.membership", member_ok, json{{"points", sample.size()}});
        check("surface.smooth_at_points", smooth_ok);
        check("sigma.involution", inv_ok, json{{"pairs_checked", checked}});
    }
    json records{{"system", f.label.empty() ? f.kind : f.label}, {"checks", checks},
                 {"all_passed", all_ok}};
    emit(ctx, records);
    return all_ok ? 0 : 1;
}

// ------------------------------------------------------------- characters ---

int run_characters(const io::SystemFile& f, const RunContext& ctx) {
    json rec;
    if (f.kind == "abelian") {
        canon::AbelianSystem sys = build_abelian(f, ctx);
        json chars = json::array();
        for (int i = 0; i < sys.dim(); ++i) {
            json values = json::array();
            for (double v : sys.eig.chars.chi[i]) values.push_back(v);
            chars.push_back(json{{"values", values},
                                 {"eigenvector", io::dvec_to_json(sys.eig.chars.eigenvectors[i])},
                                 {"eigendivisor", io::dmat_to_json(sys.eig.chars.eigendivisors[i])}});
        }
        rec = json{{"kind", "abelian"},
                   {"generators", sys.log_chars.labels},
                   {"characters", chars},
                   {"certificates",
                    {{"distinct", sys.eig.certs.distinct},
                     {"independent", sys.eig.certs.independent},
                     {"entropy_ok", sys.eig.certs.entropy_ok},
                     {"min_eigenvalue_of_sum", sys.eig.certs.min_eigenvalue_of_sum},
                     {"intersection", sys.eig.certs.intersection},
                     {"regulator", sys.eig.certs.regulator}}}};
    } else {
        wehler::K3Characters k = wehler::eigendivisors_k3();
        rec = json{{"kind", "wehler"},
                   {"lambda1", k.lambda1},
                   {"characters", {k.chi[0], k.chi[1]}},
                   {"classes",
                    {{"D_plus", {k.classes[0][0], k.classes[0][1]}},
                     {"D_minus", {k.classes[1][0], k.classes[1][1]}}}},
                   {"certificates",
                    {{"D_plus_dot_D_minus", k.d_plus_dot_d_minus},
                     {"ample_no_minus_two_class", k.no_orthogonal_minus_two_class}}}};
    }
    emit(ctx, rec);
    return 0;
}

// ----------------------------------------------------------- distinguished ---

int run_distinguished(const io::SystemFile& f, const RunContext& ctx) {
    if (f.kind != "abelian")
        return fail_config("system", "distinguished needs an abelian system");
    canon::AbelianSystem sys = build_abelian(f, ctx);
    json words = json::array(), chars = json::array();
    for (int i = 0; i < sys.dim(); ++i) {
        words.push_back(json{{"index", i + 1}, {"exponents", sys.distinguished[i].exponents}});
        json row = json::array();
        for (int k = 0; k < sys.dim(); ++k)
            row.push_back(canon::character_on_word(sys, k, sys.distinguished[i].exponents));
        chars.push_back(row);
    }
    lattice::LatticeCertificate cert = lattice::lattice_certificate(sys.log_chars, ctx.bound);
    // dominance on the square matrix over the distinguished words
    lattice::LogCharacterMatrix square;
    square.l = DMat(sys.dim(), sys.dim());
    for (int i = 0; i < sys.dim(); ++i)
        for (int j = 0; j < sys.dim(); ++j)
            square.l(i, j) = std::log(canon::character_on_word(sys, i, sys.distinguished[j].exponents));
    for (int j = 0; j < sys.dim(); ++j) square.labels.push_back("g" + std::to_string(j + 1));
    lattice::LatticeCertificate sq_cert = lattice::lattice_certificate(square, ctx.bound);
    json rec{{"words", words},
             {"characters", chars},
             {"certificates",
              {{"rank", cert.rank},
               {"discreteness_gap", cert.discreteness_gap},
               {"dominance_all", sq_cert.dominance_all}}}};
    emit(ctx, rec);
    return 0;
}

// ------------------------------------------------------------------ orbit ---

int run_orbit(const io::SystemFile& f, const RunContext& ctx, const std::string& point, int steps) {
    if (f.kind != "wehler") return fail_config("system", "orbit needs a wehler system");
    wehler::SurfacePoint p = parse_surface_point(point, f);
    wehler::Orbit orb = wehler::orbit(*f.surface, p, steps, ctx.digit_budget);
    canon::WehlerSystem sys = build_wehler(f, ctx);
    double lam = sys.chars.lambda1;
    // the opposite-direction orbit supplies the other telescoping estimate
    wehler::Orbit back = wehler::orbit(*f.surface, p, -steps, ctx.digit_budget);
    bool forward = steps > 0;

    // depth-m estimates of hhat+-(start) from orbit prefixes, with the
    // defect-based tails
    auto telescoped = [&](const wehler::Orbit& o, bool plus) {
        std::vector<std::pair<double, double>> rows;  // (value, tail)
        double defect = 0.0;
        auto h_of = [&](size_t k) { return plus ? o.steps[k].h_plus : o.steps[k].h_minus; };
        for (size_t m = 0; m < o.steps.size(); ++m) {
            if (m >= 1)
                defect = std::max(defect, std::fabs(h_of(m) - lam * h_of(m - 1)));
            double tail = m == 0 ? std::numeric_limits<double>::infinity()
                                 : 2.0 * defect * std::pow(lam, -static_cast<double>(m)) /
                                       (lam - 1.0);
            rows.emplace_back(h_of(m) / std::pow(lam, static_cast<double>(m)), tail);
        }
        return rows;
    };
    auto plus_rows = telescoped(forward ? orb : back, true);
    auto minus_rows = telescoped(forward ? back : orb, false);

    std::string csv = "m,h,hhat_plus,hhat_minus,tail\n";
    json steps_json = json::array();
    for (size_t m = 0; m < orb.steps.size(); ++m) {
        const auto& st = orb.steps[m];
        double hp = m < plus_rows.size() ? plus_rows[m].first : plus_rows.back().first;
        double hm = m < minus_rows.size() ? minus_rows[m].first : minus_rows.back().first;
        double tp = m < plus_rows.size() ? plus_rows[m].second : plus_rows.back().second;
        double tm = m < minus_rows.size() ? minus_rows[m].second : minus_rows.back().second;
        char line[256];
        std::snprintf(line, sizeof line, "%zu,%.12g,%.12g,%.12g,%.12g\n", m, st.h_ample, hp, hm,
                      tp + tm);
        csv += line;
        steps_json.push_back(json{{"m", m},
                                  {"point", io::surface_point_to_json(st.point)},
                                  {"h", st.h_ample},
                                  {"h_plus", st.h_plus},
                                  {"h_minus", st.h_minus}});
    }
    json rec{{"steps", steps_json},
             {"truncated", orb.truncated},
             {"stop_reason", orb.stop_reason == wehler::FiberStatus::Ok
                                 ? "none"
                                 : orb.stop_reason == wehler::FiberStatus::Tangent
                                       ? "IndeterminateFiber(tangent)"
                                       : "IndeterminateFiber(degenerate)"}};
    emit(ctx, rec, csv);
    return 0;
}

// ----------------------------------------------------------------- height ---

int run_height(const std::string& curve_path, const std::string& point, const RunContext& ctx) {
    std::ifstream in(curve_path);
    if (!in) return fail_config("curve", "cannot open '" + curve_path + "'");
    json cj;
    in >> cj;
    ell::CurveQ e = io::curve_from_json(cj.contains("curve") ? cj["curve"] : cj);
    auto comma = point.find(',');
    if (comma == std::string::npos) return fail_config("point", "expected \"x,y\"");
    ell::PointQ p = ell::PointQ::affine(parse_rat(point.substr(0, comma)),
                                        parse_rat(point.substr(comma + 1)));
    if (!ell::on_curve(e, p)) return fail_config("point", "point is not on the curve");
    ell::HeightEstimate h = ell::neron_tate(e, p, ctx.iters, ctx.digit_budget);
    json rec{{"naive", ell::naive_height(p)},
             {"canonical", h.value},
             {"tail", h.budget_exceeded ? json("inf") : json(h.tail)},
             {"iters_used", h.iters_used},
             {"torsion", ell::is_torsion(e, p)}};
    emit(ctx, rec);
    return 0;
}

// ------------------------------------------------- canonical height & co. ---

canon::DynamicalSystem build_system(const io::SystemFile& f, const RunContext& ctx) {
    if (f.kind == "abelian") return build_abelian(f, ctx);
    return build_wehler(f, ctx);
}

canon::SystemPoint build_point(const io::SystemFile& f, const std::string& point) {
    if (f.kind == "abelian") return canon::AbelianPoint{parse_tuple(point, f)};
    return parse_surface_point(point, f);
}

int run_canheight(const io::SystemFile& f, const RunContext& ctx, const std::string& point,
                  bool scatter) {
    canon::DynamicalSystem sys = build_system(f, ctx);
    json rec;
    std::string csv;
    if (!point.empty()) {
        canon::SystemPoint x = build_point(f, point);
        canon::CanonicalHeightEstimate est = canon::canonical_height_G(sys, x);
        rec = estimate_json(est);
        rec["product_height"] = canon::product_height(sys, x);
        // telescoping table: one row per affordable depth
        csv = "m,h,hhat_plus,hhat_minus,tail\n";
        if (f.kind == "wehler") {
            const auto& ws = std::get<canon::WehlerSystem>(sys);
            const auto& pt = std::get<wehler::SurfacePoint>(x);
            for (int m = 0; m <= ws.m_max; ++m) {
                canon::IndexHeight hp = canon::telescoping_height(ws, 0, pt, m);
                canon::IndexHeight hm = canon::telescoping_height(ws, 1, pt, m);
                char line[192];
                std::snprintf(line, sizeof line, "%d,%.12g,%.12g,%.12g,%.12g\n", m,
                              wehler::height(pt, 1.0, 1.0), hp.value, hm.value,
                              hp.tail + hm.tail);
                csv += line;
            }
        } else {
            char line[192];
            std::snprintf(line, sizeof line, "0,%.12g,%.12g,%.12g,%.12g\n", est.h_d,
                          est.per_index.front().value, est.per_index.back().value, est.tail);
            csv += line;
        }
    }
    if (scatter) {
        // experiment hook: hhat_G vs Hhat_G over the fixture's points
        csv = "hhat_G,Hhat_G\n";
        json pts = json::array();
        auto add_row = [&](const canon::SystemPoint& x) {
            canon::CanonicalHeightEstimate est = canon::canonical_height_G(sys, x);
            double prod = canon::product_height(sys, x);
            char line[128];
            std::snprintf(line, sizeof line, "%.12g,%.12g\n", est.value, prod);
            csv += line;
            pts.push_back(json{{"hhat_G", est.value}, {"Hhat_G", prod}});
        };
        if (f.kind == "abelian")
            for (const auto& [name, tuple] : f.tuples) add_row(canon::AbelianPoint{tuple});
        else
            for (const auto& p : wehler::enumerate_points(*f.surface, ctx.height_bound))
                add_row(p);
        rec["scatter"] = pts;
    }
    emit(ctx, rec, csv);
    return 0;
}

int run_classify(const io::SystemFile& f, const RunContext& ctx, const std::string& point) {
    canon::DynamicalSystem sys = build_system(f, ctx);
    canon::SystemPoint x = build_point(f, point);
    canon::ZeroLocusReport rep = canon::classify_zero_locus(sys, x, ctx.period_bound);
    const char* verdict = rep.verdict == canon::ZeroLocusClass::PeriodicAll ? "PERIODIC_ALL"
                          : rep.verdict == canon::ZeroLocusClass::NonPeriodic ? "NONPERIODIC"
                                                                              : "INCONCLUSIVE";
    json rec{{"verdict", verdict},
             {"conditions",
              {{"sum_is_zero", rep.sum_is_zero},
               {"all_indices_zero", rep.all_indices_zero},
               {"some_index_zero", rep.some_index_zero},
               {"periodic_all", rep.periodic_all},
               {"periodic_some", rep.periodic_some}}},
             {"consistent", rep.consistent}};
    emit(ctx, rec);
    return 0;
}

int run_alpha(const io::SystemFile& f, const RunContext& ctx, const std::string& point,
              const std::string& g) {
    canon::DynamicalSystem sys = build_system(f, ctx);
    canon::SystemPoint x = build_point(f, point);
    std::vector<int> word = parse_word(g, f);
    double alpha = canon::arithmetic_degree(sys, word, x, ctx.m_budget);
    json rec{{"word", word}, {"alpha", alpha}, {"m_budget", ctx.m_budget}};
    emit(ctx, rec);
    return 0;
}

int run_counting(const io::SystemFile& f, const RunContext& ctx, const std::string& point,
                 const std::string& g) {
    canon::DynamicalSystem sys = build_system(f, ctx);
    canon::SystemPoint x = build_point(f, point);
    std::vector<int> word = parse_word(g, f);
    canon::CountingTable table = canon::counting_function(sys, word, x, ctx.m_budget);
    std::string csv = "T,N,ratio\n";
    json rows = json::array();
    for (const auto& r : table.rows) {
        char line[128];
        std::snprintf(line, sizeof line, "%.12g,%ld,%.12g\n", r.t, r.n, r.ratio);
        csv += line;
        rows.push_back(json{{"T", r.t}, {"N", r.n}, {"ratio", r.ratio}});
    }
    json rec{{"rows", rows},
             {"divergent", table.divergent},
             {"limit", table.limit_value},
             {"final_ratio", table.rows.empty() ? 0.0 : table.rows.back().ratio}};
    emit(ctx, rec, csv);
    return 0;
}

int run_enumerate(const io::SystemFile& f, const RunContext& ctx) {
    if (f.kind != "wehler") return fail_config("system", "enumerate needs a wehler system");
    std::vector<wehler::SurfacePoint> pts = wehler::enumerate_points(*f.surface, ctx.height_bound);
    json arr = json::array();
    for (const auto& p : pts) arr.push_back(io::surface_point_to_json(p));
    json rec{{"height_bound", ctx.height_bound}, {"count", pts.size()}, {"points", arr}};
    emit(ctx, rec);
    return 0;
}

int run_periodic(const io::SystemFile& f, const RunContext& ctx) {
    if (f.kind != "wehler") return fail_config("system", "periodic needs a wehler system");
    std::vector<wehler::PeriodicPoint> pts =
        wehler::find_periodic(*f.surface, ctx.height_bound, ctx.period_bound, ctx.digit_budget);
    json arr = json::array();
    for (const auto& p : pts)
        arr.push_back(json{{"point", io::surface_point_to_json(p.point)}, {"period", p.period}});
    json rec{{"count", pts.size()}, {"periodic_points", arr}};
    emit(ctx, rec);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"canonical heights for commuting automorphism systems"};
    app.require_subcommand(1);

    RunContext ctx;
    std::string system_path, curve_path, point, g_word;
    int steps = 5;
    bool scatter = false;

    auto add_common = [&](CLI::App* cmd, bool needs_system) {
        if (needs_system)
            cmd->add_option("--system", system_path, "system fixture JSON")->required();
        cmd->add_option("--out", ctx.out_dir, "output directory");
        cmd->add_option("--seed", ctx.seed, "random seed recorded in outputs");
        cmd->add_option("--iters", ctx.iters, "doubling iterations for canonical heights");
        cmd->add_option("--m-max", ctx.m_max, "orbit depth for wehler telescoping");
        cmd->add_option("--m-budget", ctx.m_budget, "orbit budget for asymptotics");
        cmd->add_option("--bound", ctx.bound, "exponent box bound for word searches");
        cmd->add_option("--period-bound", ctx.period_bound, "period search bound");
        cmd->add_option("--height-bound", ctx.height_bound, "log-height box for enumeration");
        cmd->add_option("--digit-budget", ctx.digit_budget, "max decimal digits per coordinate");
    };

    CLI::App* verify = app.add_subcommand("verify", "run the invariant suite for a system");
    add_common(verify, true);
    CLI::App* verify_ns = app.add_subcommand("verify-ns", "invariant suite for an abelian fixture");
    add_common(verify_ns, false);
    verify_ns->add_option("--fixture,--system", system_path, "fixture JSON")->required();
    CLI::App* characters = app.add_subcommand("characters", "character system and certificates");
    add_common(characters, true);
    CLI::App* distinguished = app.add_subcommand("distinguished", "distinguished automorphisms");
    add_common(distinguished, true);
    CLI::App* orbit_cmd = app.add_subcommand("orbit", "exact orbit with height columns");
    add_common(orbit_cmd, false);
    orbit_cmd->add_option("--system,--surface", system_path, "system fixture JSON")->required();
    orbit_cmd->add_option("--point", point, "point name or inline coordinates")->required();
    orbit_cmd->add_option("--steps", steps, "number of phi steps (negative for inverse)");
    CLI::App* height = app.add_subcommand("height", "naive and canonical height of a point");
    add_common(height, false);
    height->add_option("--curve", curve_path, "curve JSON file")->required();
    height->add_option("--point", point, "affine point \"x,y\"")->required();
    CLI::App* canheight_cmd = app.add_subcommand("canheight", "canonical height estimate");
    add_common(canheight_cmd, true);
    canheight_cmd->add_option("--point", point, "tuple/point name");
    canheight_cmd->add_flag("--scatter", scatter, "emit hhat_G vs Hhat_G scatter data");
    CLI::App* classify = app.add_subcommand("classify", "zero-locus classification");
    add_common(classify, true);
    classify->add_option("--point", point, "tuple/point name")->required();
    CLI::App* alpha = app.add_subcommand("alpha", "arithmetic degree along an orbit");
    add_common(alpha, true);
    alpha->add_option("--point", point, "tuple/point name")->required();
    alpha->add_option("--g", g_word, "group word (label or comma exponents)")->required();
    CLI::App* counting = app.add_subcommand("counting", "orbit height counting function");
    add_common(counting, true);
    counting->add_option("--point", point, "tuple/point name")->required();
    counting->add_option("--g", g_word, "group word (label or comma exponents)")->required();
    counting->add_option("--Tmax", ctx.m_budget,
                         "orbit budget (alias of --m-budget; \"auto\" keeps the default)")
        ->transform([](std::string s) { return s == "auto" ? std::string("200") : s; });
    CLI::App* enumerate_cmd = app.add_subcommand("enumerate", "bounded-height point enumeration");
    add_common(enumerate_cmd, true);
    CLI::App* periodic = app.add_subcommand("periodic", "bounded-height periodic points");
    add_common(periodic, true);

    CLI11_PARSE(app, argc, argv);

    try {
        CLI::App* sub = app.get_subcommands().front();
        ctx.command = sub->get_name();
        for (const auto* opt : sub->get_options())
            if (!opt->get_name().empty() && opt->count() > 0 && opt->get_name() != "--help")
                ctx.options[opt->get_name()] = opt->results().front();

        if (sub == height) return run_height(curve_path, point, ctx);

        io::SystemFile f = io::load_system_file(system_path);
        if (sub == verify) return run_verify(f, ctx);
        if (sub == verify_ns) {
            if (f.kind != "abelian")
                return fail_config("fixture", "verify-ns needs an abelian fixture");
            return run_verify(f, ctx);
        }
        if (sub == characters) return run_characters(f, ctx);
        if (sub == distinguished) return run_distinguished(f, ctx);
        if (sub == orbit_cmd) return run_orbit(f, ctx, point, steps);
        if (sub == canheight_cmd) return run_canheight(f, ctx, point, scatter);
        if (sub == classify) return run_classify(f, ctx, point);
        if (sub == alpha) return run_alpha(f, ctx, point, g_word);
        if (sub == counting) return run_counting(f, ctx, point, g_word);
        if (sub == enumerate_cmd) return run_enumerate(f, ctx);
        if (sub == periodic) return run_periodic(f, ctx);
        return fail_config("subcommand", "unhandled subcommand");
    } catch (const io::ConfigError& e) {
        return fail_config(e.field(), e.what());
    } catch (const Error& e) {
        return fail_module(e);
    } catch (const std::exception& e) {
        json err{{"error", {{"code", "Internal"}, {"message", e.what()}}}};
        std::cout << err.dump(2) << "\n";
        return 1;
    }
}
