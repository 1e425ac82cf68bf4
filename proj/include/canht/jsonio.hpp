#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "canht/canheight.hpp"
#include "canht/cone.hpp"
#include "canht/elliptic.hpp"
#include "canht/nsab.hpp"
#include "canht/wehler.hpp"

namespace canht::io {

using json = nlohmann::ordered_json;

// Rationals travel as "p/q" strings; floats as numbers (shortest round-trip).
json rat_to_json(const Rat& r);
Rat rat_from_json(const json& j);

json qmat_to_json(const QMat& m);
QMat qmat_from_json(const json& j);
json dmat_to_json(const DMat& m);
json dvec_to_json(const DVec& v);

json cone_spec_to_json(const cone::ConeSpec& c);
cone::ConeSpec cone_spec_from_json(const json& j);

json curve_to_json(const ell::CurveQ& e);
ell::CurveQ curve_from_json(const json& j);
json point_to_json(const ell::PointQ& p);
ell::PointQ point_from_json(const json& j);

json surface_to_json(const wehler::WehlerSurface& s);
wehler::WehlerSurface surface_from_json(const json& j);
json surface_point_to_json(const wehler::SurfacePoint& p);
wehler::SurfacePoint surface_point_from_json(const json& j);

// Fixture file describing one dynamical system plus named points.
struct SystemFile {
    std::string kind;  // "abelian" | "wehler"
    std::string label;

    std::optional<ell::CurveQ> curve;
    std::vector<nsab::AutoAction> generators;
    std::map<std::string, std::vector<ell::PointQ>> tuples;

    std::optional<wehler::WehlerSurface> surface;
    std::map<std::string, wehler::SurfacePoint> points;
    std::optional<wehler::SurfacePoint> base_point;
};

SystemFile load_system_file(const std::string& path);

// Named field errors for the CLI's exit-2 diagnostics.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string field, const std::string& what)
        : std::runtime_error(what), field_(std::move(field)) {}
    const std::string& field() const { return field_; }

private:
    std::string field_;
};

}  // namespace canht::io
