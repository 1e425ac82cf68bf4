#include "canht/jsonio.hpp"

#include <fstream>

namespace canht::io {

json rat_to_json(const Rat& r) { return rat_str(r); }

Rat rat_from_json(const json& j) {
    if (j.is_string()) return parse_rat(j.get<std::string>());
    if (j.is_number_integer()) return Rat(j.get<long>());
    if (j.is_number_float()) return Rat(j.get<double>());
    throw ConfigError("rational", "expected a \"p/q\" string or a number");
}

json qmat_to_json(const QMat& m) {
    json rows = json::array();
    for (int i = 0; i < m.rows; ++i) {
        json row = json::array();
        for (int j = 0; j < m.cols; ++j) row.push_back(rat_to_json(m(i, j)));
        rows.push_back(std::move(row));
    }
    return rows;
}

QMat qmat_from_json(const json& j) {
    if (!j.is_array() || j.empty() || !j[0].is_array())
        throw ConfigError("matrix", "expected a row-major array of arrays");
    int rows = static_cast<int>(j.size());
    int cols = static_cast<int>(j[0].size());
    QMat m(rows, cols);
    for (int r = 0; r < rows; ++r) {
        if (static_cast<int>(j[r].size()) != cols)
            throw ConfigError("matrix", "ragged matrix rows");
        for (int c = 0; c < cols; ++c) m(r, c) = rat_from_json(j[r][c]);
    }
    return m;
}

json dmat_to_json(const DMat& m) {
    json rows = json::array();
    for (int i = 0; i < m.rows; ++i) {
        json row = json::array();
        for (int j = 0; j < m.cols; ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

json dvec_to_json(const DVec& v) {
    json a = json::array();
    for (double x : v) a.push_back(x);
    return a;
}

json cone_spec_to_json(const cone::ConeSpec& c) {
    json j;
    switch (c.kind) {
        case cone::ConeKind::Orthant:
            j["kind"] = "orthant";
            j["dim"] = c.ambient_dim;
            break;
        case cone::ConeKind::Psd:
            j["kind"] = "psd";
            j["size"] = c.matrix_size;
            break;
        case cone::ConeKind::PolyhedralGenerators: {
            j["kind"] = "polyhedral";
            json gens = json::array();
            for (const auto& g : c.generators) {
                json v = json::array();
                for (const auto& x : g) v.push_back(rat_to_json(x));
                gens.push_back(std::move(v));
            }
            j["generators"] = std::move(gens);
            break;
        }
        case cone::ConeKind::PolyhedralHalfspaces: {
            j["kind"] = "polyhedral";
            json hs = json::array();
            for (const auto& h : c.halfspaces) {
                json v = json::array();
                for (const auto& x : h) v.push_back(rat_to_json(x));
                hs.push_back(std::move(v));
            }
            j["halfspaces"] = std::move(hs);
            break;
        }
    }
    return j;
}

cone::ConeSpec cone_spec_from_json(const json& j) {
    std::string kind = j.value("kind", "");
    if (kind == "orthant") return cone::ConeSpec::orthant(j.at("dim").get<int>());
    if (kind == "psd") return cone::ConeSpec::psd(j.at("size").get<int>());
    if (kind == "polyhedral") {
        auto parse_vecs = [](const json& arr) {
            std::vector<QVec> out;
            for (const auto& v : arr) {
                QVec w;
                for (const auto& x : v) w.push_back(rat_from_json(x));
                out.push_back(std::move(w));
            }
            return out;
        };
        if (j.contains("generators"))
            return cone::ConeSpec::polyhedral_generators(parse_vecs(j["generators"]));
        if (j.contains("halfspaces"))
            return cone::ConeSpec::polyhedral_halfspaces(parse_vecs(j["halfspaces"]));
        throw ConfigError("cone", "polyhedral cone needs generators or halfspaces");
    }
    throw ConfigError("cone.kind", "unknown cone kind '" + kind + "'");
}

json curve_to_json(const ell::CurveQ& e) {
    return json{{"a1", rat_to_json(e.a1)},
                {"a2", rat_to_json(e.a2)},
                {"a3", rat_to_json(e.a3)},
                {"a4", rat_to_json(e.a4)},
                {"a6", rat_to_json(e.a6)}};
}

ell::CurveQ curve_from_json(const json& j) {
    for (const char* f : {"a1", "a2", "a3", "a4", "a6"})
        if (!j.contains(f)) throw ConfigError(std::string("curve.") + f, "missing coefficient");
    return ell::CurveQ(rat_from_json(j["a1"]), rat_from_json(j["a2"]), rat_from_json(j["a3"]),
                       rat_from_json(j["a4"]), rat_from_json(j["a6"]));
}

json point_to_json(const ell::PointQ& p) {
    if (p.infinity) return "O";
    return json{{"x", rat_to_json(p.x)}, {"y", rat_to_json(p.y)}};
}

ell::PointQ point_from_json(const json& j) {
    if (j.is_string() && j.get<std::string>() == "O") return ell::PointQ::at_infinity();
    if (!j.contains("x") || !j.contains("y"))
        throw ConfigError("point", "expected \"O\" or {x, y}");
    return ell::PointQ::affine(rat_from_json(j["x"]), rat_from_json(j["y"]));
}

namespace {

// quadratic monomial pair keys "00 01" etc., same order as the Q matrix
const char* kPairNames[6] = {"00", "01", "02", "11", "12", "22"};

int pair_index(const std::string& s) {
    for (int i = 0; i < 6; ++i)
        if (s == kPairNames[i]) return i;
    throw ConfigError("surface.Q", "bad monomial pair '" + s + "'");
}

}  // namespace

json surface_to_json(const wehler::WehlerSurface& s) {
    json q;
    for (int a = 0; a < 6; ++a)
        for (int b = 0; b < 6; ++b)
            if (sgn(s.q(a, b)) != 0)
                q[std::string(kPairNames[a]) + " " + kPairNames[b]] = rat_to_json(s.q(a, b));
    return json{{"L", qmat_to_json(s.l)}, {"Q", std::move(q)}};
}

wehler::WehlerSurface surface_from_json(const json& j) {
    wehler::WehlerSurface s;
    if (!j.contains("L")) throw ConfigError("surface.L", "missing (1,1) form");
    if (!j.contains("Q")) throw ConfigError("surface.Q", "missing (2,2) form");
    s.l = qmat_from_json(j["L"]);
    s.q = QMat(6, 6);
    for (const auto& [key, val] : j["Q"].items()) {
        auto space = key.find(' ');
        if (space == std::string::npos)
            throw ConfigError("surface.Q", "monomial key must look like \"01 22\"");
        int a = pair_index(key.substr(0, space));
        int b = pair_index(key.substr(space + 1));
        s.q(a, b) = rat_from_json(val);
    }
    s.validate();
    return s;
}

json surface_point_to_json(const wehler::SurfacePoint& p) {
    json x = json::array(), y = json::array();
    for (const auto& c : p.x) x.push_back(c.get_str());
    for (const auto& c : p.y) y.push_back(c.get_str());
    return json{{"x", std::move(x)}, {"y", std::move(y)}};
}

wehler::SurfacePoint surface_point_from_json(const json& j) {
    if (!j.contains("x") || !j.contains("y") || j["x"].size() != 3 || j["y"].size() != 3)
        throw ConfigError("point", "surface point needs 3-vectors x and y");
    wehler::SurfacePoint p;
    for (int i = 0; i < 3; ++i) {
        const json& xv = j["x"][i];
        const json& yv = j["y"][i];
        p.x[i] = xv.is_string() ? Int(xv.get<std::string>()) : Int(xv.get<long>());
        p.y[i] = yv.is_string() ? Int(yv.get<std::string>()) : Int(yv.get<long>());
    }
    p.normalize();
    return p;
}

namespace {

ell::PointQ resolve_point_spec(const json& spec,
                               const std::map<std::string, ell::PointQ>& named,
                               const ell::CurveQ& curve) {
    if (spec.is_string()) {
        std::string s = spec.get<std::string>();
        if (s == "O") return ell::PointQ::at_infinity();
        auto it = named.find(s);
        if (it == named.end()) throw ConfigError("tuples", "unknown base point '" + s + "'");
        return it->second;
    }
    if (spec.contains("combo")) {
        ell::PointQ acc = ell::PointQ::at_infinity();
        for (const auto& term : spec["combo"]) {
            std::string name = term.at(0).get<std::string>();
            long mult = term.at(1).get<long>();
            auto it = named.find(name);
            if (it == named.end()) throw ConfigError("tuples", "unknown base point '" + name + "'");
            acc = ell::add(curve, acc, ell::multiply(curve, mult, it->second));
        }
        return acc;
    }
    return point_from_json(spec);
}

}  // namespace

SystemFile load_system_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("system", "cannot open '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw ConfigError("system", std::string("JSON parse error: ") + e.what());
    }

    SystemFile f;
    f.kind = j.value("kind", "");
    f.label = j.value("label", "");
    if (f.kind == "abelian") {
        if (!j.contains("curve")) throw ConfigError("curve", "abelian system needs a curve");
        f.curve = curve_from_json(j["curve"]);
        if (!j.contains("generators") || j["generators"].empty())
            throw ConfigError("generators", "abelian system needs generator matrices");
        for (const auto& g : j["generators"]) {
            std::string label = g.value("label", "g" + std::to_string(f.generators.size() + 1));
            if (!g.contains("matrix")) throw ConfigError("generators.matrix", "missing matrix");
            f.generators.emplace_back(qmat_from_json(g["matrix"]), label);
        }
        std::map<std::string, ell::PointQ> named;
        if (j.contains("base_points"))
            for (const auto& [name, spec] : j["base_points"].items()) {
                ell::PointQ p = point_from_json(spec);
                if (!ell::on_curve(*f.curve, p))
                    throw ConfigError("base_points." + name, "point is not on the curve");
                named[name] = p;
            }
        if (j.contains("tuples"))
            for (const auto& [name, arr] : j["tuples"].items()) {
                std::vector<ell::PointQ> tuple;
                for (const auto& spec : arr) tuple.push_back(resolve_point_spec(spec, named, *f.curve));
                if (static_cast<int>(tuple.size()) != f.generators[0].dim())
                    throw ConfigError("tuples." + name, "tuple length must match the dimension");
                f.tuples[name] = std::move(tuple);
            }
    } else if (f.kind == "wehler") {
        if (!j.contains("surface")) throw ConfigError("surface", "wehler system needs a surface");
        f.surface = surface_from_json(j["surface"]);
        if (j.contains("base_point")) {
            f.base_point = surface_point_from_json(j["base_point"]);
            if (!f.surface->contains(*f.base_point))
                throw ConfigError("base_point", "base point is not on the surface");
        }
        if (j.contains("points"))
            for (const auto& [name, spec] : j["points"].items()) {
                wehler::SurfacePoint p = surface_point_from_json(spec);
                if (!f.surface->contains(p))
                    throw ConfigError("points." + name, "point is not on the surface");
                f.points[name] = p;
            }
    } else {
        throw ConfigError("kind", "system kind must be \"abelian\" or \"wehler\"");
    }
    return f;
}

}  // namespace canht::io
