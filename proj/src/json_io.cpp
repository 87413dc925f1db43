#include "svo/json_io.hpp"

namespace svo {

using json = nlohmann::ordered_json;

namespace {

json vec_to_json(const Vec& v) {
    json a = json::array();
    for (int i = 0; i < v.size(); ++i)
        a.push_back(v(i));
    return a;
}

Vec vec_from_json(const json& j) {
    Vec v(j.size());
    for (std::size_t i = 0; i < j.size(); ++i)
        v(i) = j[i].get<double>();
    return v;
}

}  // namespace

json polytope_to_json(const Polytope& P) {
    json j;
    j["vertices"] = json::array();
    for (const auto& v : P.vertices())
        j["vertices"].push_back(vec_to_json(v));
    j["halfspaces"] = json::array();
    for (const auto& h : P.halfspaces()) {
        json hj;
        hj["normal"] = vec_to_json(h.normal);
        hj["offset"] = h.offset;
        j["halfspaces"].push_back(hj);
    }
    j["dim"] = P.dim();
    j["degenerate"] = P.degenerate();
    return j;
}

Polytope polytope_from_json(const json& j) {
    std::vector<Vec> pts;
    for (const auto& v : j.at("vertices"))
        pts.push_back(vec_from_json(v));
    const int dim = j.at("dim").get<int>();
    return convex_hull(dim, pts);
}

json cone_to_json(const SupportCone& c) {
    json j;
    j["base_point"] = vec_to_json(c.base_point);
    j["generators"] = json::array();
    for (const auto& g : c.generators)
        j["generators"].push_back(vec_to_json(g));
    j["theta_lo"] = c.theta_lo;
    j["theta_hi"] = c.theta_hi;
    return j;
}

SupportCone cone_from_json(const json& j) {
    SupportCone c;
    c.base_point = vec_from_json(j.at("base_point"));
    for (const auto& g : j.at("generators"))
        c.generators.push_back(vec_from_json(g));
    c.theta_lo = j.at("theta_lo").get<double>();
    c.theta_hi = j.at("theta_hi").get<double>();
    return c;
}

json front_to_json(const Front& f) {
    json j;
    j["polytope"] = polytope_to_json(f.polytope);
    j["boundary_points"] = json::array();
    for (const auto& bp : f.boundary_points) {
        json b;
        b["point"] = vec_to_json(bp.point);
        b["cone"] = cone_to_json(bp.cone);
        j["boundary_points"].push_back(b);
    }
    j["k"] = f.k;
    j["z_history"] = f.z_history;
    return j;
}

Front front_from_json(const json& j) {
    Front f;
    f.polytope = polytope_from_json(j.at("polytope"));
    for (const auto& b : j.at("boundary_points"))
        f.boundary_points.push_back(
            {vec_from_json(b.at("point")), cone_from_json(b.at("cone"))});
    f.k = j.at("k").get<int>();
    f.z_history = j.at("z_history").get<std::vector<double>>();
    return f;
}

}  // namespace svo
